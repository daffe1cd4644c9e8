"""Command-line entry point.

Exit codes: 0 when every verdict agrees with the classification, 2 when a
computation succeeded but disagreed with it, 1 on errors (including
undecided isomorphism questions unless ``--allow-inconclusive``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coeff import CoeffError, ParseError, build_local_algebra, check_prime, natural_surjection
from .deform import (
    DeformError,
    NoExtension,
    StableEndTooLarge,
    dumps_lift,
    extend_search,
    lift_to_dict,
    loads_lift,
    relation_violations,
    udr_evidence,
    verify_lift,
)
from .homalg import (
    Inconclusive,
    cover_of,
    ext1_dim,
    hom_space,
    iso_test,
    match_catalog,
    projective_multiplicities,
    socle_dims,
    syzygy,
    top_dims,
)
from .presentation import PresentationError, build_presentation
from .repbuild import (
    ModuleSpecError,
    RepError,
    Representation,
    build_band,
    build_string,
    enumerate_strings,
    parse_module_spec,
)
from .report import (
    AnalyzeConfig,
    analyze,
    certificate_record,
    max_dim_from_env,
    to_csv,
    to_json,
    to_text,
    verify_report,
)


class CliError(Exception):
    def __init__(self, kind: str, message: str, **extra):
        super().__init__(message)
        self.kind = kind
        self.extra = extra


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, sort_keys=True, indent=1) + "\n"
    lines = []
    for k in sorted(obj):
        v = obj[k]
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def _matrices(f) -> list:
    return [np.asarray(x).tolist() for x in f]


def _module(args) -> Representation:
    check_prime(args.prime)
    q = build_presentation(args.edges)
    V = parse_module_spec(args.module, q, args.prime)
    cap = max_dim_from_env()
    if V.total_dim > cap:
        raise CliError("TooLarge", f"{args.module} has total dimension {V.total_dim} > BRAUER_UDR_MAX_DIM={cap}")
    return V


def identify(M: Representation, max_len: int | None = None) -> tuple[str | None, list | None]:
    """Name M as a band or string module (with an iso witness) if possible."""
    q, p = M.quiver, M.p
    if M.total_dim == 0:
        return "0", []
    n = M.dims[-1] // 2
    if M.dims[-1] % 2 == 0 and n and all(d == n for d in M.dims[:-1]):
        for lam in range(1, p):
            res = iso_test(M, build_band(q, p, (n, lam)))
            if res.isomorphic:
                return f"band:{n},{lam}", _matrices(res.witness)
    length = M.total_dim - 1
    if max_len is not None and length > max_len:
        return None, None
    for w in enumerate_strings(q, length):
        if len(w) != length:
            continue
        S = build_string(q, p, w, w.base)
        if S.dims != M.dims:
            continue
        res = iso_test(M, S)
        if res.isomorphic:
            spec = f"S({w.base})" if not w.letters else w.spec()
            return spec, _matrices(res.witness)
    return None, None


# ---------------------------------------------------------------------------
# commands

def cmd_analyze(args) -> int:
    cfg = AnalyzeConfig(args.edges, args.prime, args.max_string_len, args.bands, args.max_level,
                        args.allow_inconclusive, max_dim_from_env())
    rep = analyze(cfg, reproducible=args.reproducible)
    if rep.inconclusive and not args.allow_inconclusive:
        raise CliError("Inconclusive", "undecided verdicts in the report", items=rep.inconclusive)
    text = {"json": to_json, "csv": to_csv, "text": to_text}[args.format](rep)
    _emit(text, args.out)
    for m in rep.mismatches:
        print(f"mismatch: {m}", file=sys.stderr)
    return rep.exit_code


def cmd_verify(args) -> int:
    data = json.loads(Path(args.report).read_text())
    problems = verify_report(data)
    for pr in problems:
        print(pr)
    print("all certificates replay" if not problems else f"{len(problems)} certificate(s) failed")
    return 2 if problems else 0


def cmd_module_info(args) -> int:
    V = _module(args)
    m = match_catalog(V)
    E = hom_space(V, V)
    cov = cover_of(V)
    obj = {
        "spec": args.module,
        "dim_vector": list(V.dims),
        "top": list(top_dims(V)),
        "socle": list(socle_dims(V)),
        "projective_cover": list(cov.multiplicities),
        "projective_summands": list(projective_multiplicities(V)),
        "component": str(m.label),
        "orbit": m.orbit_key,
        "omega_shift": m.shift,
        "match": m.reason,
        "end_dim": E.dim,
        "stable_end_dim": E.stable_dim,
    }
    if m.witness is not None:
        obj["iso_witness"] = _matrices(m.witness)
    _emit(_dump(obj, args.format), None)
    return 0


def cmd_stable_end(args) -> int:
    V = _module(args)
    E = hom_space(V, V)
    obj = {"spec": args.module, "end_dim": E.dim, "proj_factoring_dim": E.proj_vectors.shape[0],
           "stable_end_dim": E.stable_dim}
    if args.format == "json":
        obj["end_basis"] = [_matrices(f) for f in E.basis]
        obj["proj_factoring_basis"] = [_matrices(f) for f in E.proj_basis]
        _emit(_dump(obj, "json"), None)
    else:
        _emit(f"{E.stable_dim}\n" if args.quiet else _dump(obj, "text"), None)
    return 0


def cmd_syzygy(args) -> int:
    V = _module(args)
    O = syzygy(V)
    name, wit = identify(O)
    obj = {"spec": args.module, "syzygy_dim_vector": list(O.dims), "syzygy": name}
    if wit is not None:
        obj["iso_witness"] = wit
    obj["maps"] = {a: np.asarray(O.maps[a]).tolist() for a in sorted(O.maps)}
    if args.format == "json":
        _emit(_dump(obj, "json"), None)
    else:
        lines = [name or f"unnamed module with dimension vector {O.dims}"]
        if wit is not None:
            lines.append("iso witness: " + json.dumps(wit))
        _emit("\n".join(lines) + "\n", None)
    return 0


def cmd_ext1(args) -> int:
    V = _module(args)
    r = ext1_dim(V)
    if args.format == "json":
        _emit(_dump({"spec": args.module, "ext1_dim": r}, "json"), None)
    else:
        _emit(f"{r}\n", None)
    return 0


def _load_lift(path: str, args):
    L = loads_lift(Path(path).read_text())
    if args.edges is not None and args.edges != L.quiver.e:
        raise CliError("Mismatch", f"lift is for e={L.quiver.e}, not e={args.edges}")
    if args.prime is not None and args.prime != L.p:
        raise CliError("Mismatch", f"lift is over GF({L.p}), not GF({args.prime})")
    return L


def cmd_lift_verify(args) -> int:
    L = _load_lift(args.lift, args)
    v = verify_lift(L)
    obj = {"lift": args.lift, "ring": L.ring.name, "verdict": v.kind}
    if v.kind == "RelationViolated":
        obj["violations"] = [{"relation": str(x.relation), "residue": x.residue_text()} for x in relation_violations(L)]
    elif v.detail:
        obj["detail"] = v.detail
    if args.format == "json":
        _emit(_dump(obj, "json"), None)
    else:
        _emit(str(v) + "\n", None)
    return 0 if v.ok else 2


def cmd_lift_search(args) -> int:
    L = _load_lift(args.lift, args)
    R2 = build_local_algebra(args.ring, L.p)
    surj = natural_surjection(R2, L.ring)
    res = extend_search(L, R2, surj)
    if isinstance(res, NoExtension):
        obj = {"result": "NoExtension", "certificate": certificate_record(res), "check": res.check()}
        if args.format == "json":
            _emit(_dump(obj, "json"), args.out)
        else:
            _emit(res.describe() + "\n", args.out)
        return 0
    if args.format == "json" or args.out:
        _emit(dumps_lift(res.lift), args.out)
    else:
        _emit("extension exists\n" + dumps_lift(res.lift), None)
    return 0


def cmd_udr_evidence(args) -> int:
    V = _module(args)
    ev = udr_evidence(V, args.max_level)
    levels = []
    for lv in ev.levels:
        rec = {"ring": lv.ring, "status": lv.status}
        if lv.certificate is not None:
            rec["certificate"] = certificate_record(lv.certificate)
        if lv.witness is not None and args.format == "json":
            rec["witness"] = lift_to_dict(lv.witness)
        levels.append(rec)
    obj = {"spec": args.module, "r": ev.r, "r_linearized": ev.r_linearized, "verdict": ev.verdict,
           "summary": ev.summary, "levels": levels}
    if args.format == "json":
        _emit(_dump(obj, "json"), None)
    else:
        lines = [f"r = {ev.r}", f"verdict: {ev.verdict}", ev.summary]
        lines += [f"  {lv['ring']}: {lv['status']}" for lv in levels]
        _emit("\n".join(lines) + "\n", None)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brauer-udr", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, module=True, need=True):
        p.add_argument("--edges", type=int, required=need, help="number of edges e")
        p.add_argument("--prime", type=int, required=need, help="odd prime p")
        if module:
            p.add_argument("--module", required=True, help="module spec: S(i), P(i), str@v:..., band:n,lambda")
        p.add_argument("--format", choices=("text", "json"), default="text")

    a = sub.add_parser("analyze", help="classify a catalog of modules and check the verdicts")
    a.add_argument("--edges", type=int, required=True)
    a.add_argument("--prime", type=int, required=True)
    a.add_argument("--max-string-len", type=int, default=12)
    a.add_argument("--bands", type=int, default=2)
    a.add_argument("--max-level", type=int, default=6)
    a.add_argument("--out")
    a.add_argument("--format", choices=("json", "csv", "text"), default="json")
    a.add_argument("--reproducible", action="store_true", help="omit the timestamp")
    a.add_argument("--allow-inconclusive", action="store_true")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="replay the certificates of a JSON report")
    v.add_argument("report")
    v.set_defaults(func=cmd_verify)

    for name, fn, hlp in (
        ("module-info", cmd_module_info, "dimension data and component of one module"),
        ("syzygy", cmd_syzygy, "Ω of a module, named with an iso witness when possible"),
        ("ext1", cmd_ext1, "dim Ext^1(V, V)"),
    ):
        p = sub.add_parser(name, help=hlp)
        common(p)
        p.set_defaults(func=fn)
    s = sub.add_parser("stable-end", help="dim of the stable endomorphism ring")
    common(s)
    s.add_argument("--quiet", action="store_true", help="print only the number")
    s.set_defaults(func=cmd_stable_end)
    u = sub.add_parser("udr-evidence", help="tangent dimension and lift ladder")
    common(u)
    u.add_argument("--max-level", type=int, default=6)
    u.set_defaults(func=cmd_udr_evidence)
    lv = sub.add_parser("lift-verify", help="check a serialised lift")
    common(lv, module=False, need=False)
    lv.add_argument("--lift", required=True)
    lv.set_defaults(func=cmd_lift_verify)
    ls = sub.add_parser("lift-search", help="extend a lift along a small extension")
    common(ls, module=False, need=False)
    ls.add_argument("--lift", required=True)
    ls.add_argument("--ring", required=True, help="ring spec of the bigger ring, e.g. 'k[t]/(t^3)'")
    ls.add_argument("--out")
    ls.set_defaults(func=cmd_lift_search)
    return ap


def _error(kind: str, message: str, code: int = 1, **extra) -> int:
    rec = {"error": kind, "message": message}
    rec.update(extra)
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = getattr(args, "module", None)
    try:
        return args.func(args)
    except CliError as exc:
        return _error(exc.kind, str(exc), module=spec, **exc.extra)
    except (ParseError, ModuleSpecError) as exc:
        return _error("ParseError", str(exc), position=exc.position, expected=list(exc.expected), module=spec)
    except Inconclusive as exc:
        return _error("Inconclusive", str(exc), module=spec)
    except StableEndTooLarge as exc:
        return _error("StableEndTooLarge", str(exc), module=spec)
    except (CoeffError, RepError, PresentationError, DeformError, ValueError, OSError) as exc:
        return _error(type(exc).__name__, str(exc), module=spec)


if __name__ == "__main__":
    sys.exit(main())
