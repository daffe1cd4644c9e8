"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS`` or ``criterion N: FAIL``
line (visible in ``pytest -v`` output) and then asserts.
"""

from __future__ import annotations

import numpy as np
import pytest

from brauer_udr.catalog import K, KT, KT1T2, KT2, m_n0, m_ni, predicted_band, seeds
from brauer_udr.coeff import build_local_algebra, natural_surjection, truncated_power_series
from brauer_udr.deform import (
    J_PRIME_RING,
    Extended,
    NoExtension,
    exhaustive_extension_count,
    extend_search,
    first_order_classes,
    paper_lift_family,
    relation_violations,
    verify_lift,
)
from brauer_udr.homalg import ext1_dim, hom_space, is_homomorphism, is_iso_map, iso_test, stable_end_dim, syzygy
from brauer_udr.repbuild import parse_module_spec

from conftest import EDGES, PRIMES, catalog
from properties import ALL_CHECKS


@pytest.fixture
def verdict(capsys):
    def emit(n: int, failures: list[str]) -> None:
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if not failures else 'FAIL'}")
            for f in failures[:10]:
                print(f"  {f}")
        assert not failures, failures

    return emit


def mod(spec, e, p):
    return parse_module_spec(spec, e, p)


def test_criterion_1_band_end_dims(verdict):
    bad = []
    for e in (2, 3):
        for n, want in ((1, 2), (2, 6), (3, 12)):
            B = mod(f"band:{n},2", e, 7)
            got = hom_space(B, B).dim
            if got != want:
                bad.append(f"e={e} n={n}: dim End = {got}, want {want}")
    verdict(1, bad)


def test_criterion_2_band_gate(verdict):
    bad = []
    for e in (2, 3):
        got = stable_end_dim(mod("band:1,2", e, 5))
        if got != 2:
            bad.append(f"e={e} p=5: stable End of B(1,2) = {got}")
        for lam in range(1, 7):
            got = stable_end_dim(mod(f"band:1,{lam}", e, 7))
            if got != 1:
                bad.append(f"e={e} p=7 lambda={lam}: stable End = {got}")
    verdict(2, bad)


def test_criterion_3_band_syzygy(verdict):
    bad = []
    for e in (1, 2, 3):
        for lam in range(1, 7):
            mu = (-pow(lam, 5, 7)) % 7
            W, B = syzygy(mod(f"band:1,{lam}", e, 7)), mod(f"band:1,{mu}", e, 7)
            res = iso_test(W, B)
            ok = res.isomorphic and res.witness is not None and is_iso_map(res.witness, 7) and is_homomorphism(res.witness, W, B)
            if not ok:
                bad.append(f"e={e} lambda={lam}: Omega not B(1,{mu}) with a checked witness")
    verdict(3, bad)


def test_criterion_4_stable_end_catalog(verdict):
    bad = []
    for e in (2, 3, 4):
        for sd in seeds(e):
            V = mod(sd.spec, e, 7)
            for k in range(2 * e + 1):
                d = stable_end_dim(V)
                if d != 1:
                    bad.append(f"e={e} {sd.name}: Omega^{k} has stable End dim {d}")
                V = syzygy(V)
        extra = [m_n0(e)] + [m_ni(e, i) for i in range(1, e - 1)]
        for spec in extra:
            d = stable_end_dim(mod(spec, e, 7))
            if d < 2:
                bad.append(f"e={e} {spec}: stable End dim {d}, want >= 2")
    verdict(4, bad)


def test_criterion_5_ext1_table(verdict):
    bad = []
    table = [("S(2)", 0), ("str:a1", 0), ("str:a1*a3*d~", 1), ("S(3)", 1), ("str:a2*a1", 1), ("str:a2", 0)]
    for spec, want in table:
        got = ext1_dim(mod(spec, 3, 7))
        if got != want:
            bad.append(f"e=3 {spec}: ext1 {got}, want {want}")
    got = ext1_dim(mod("S(1)", 1, 3))
    if got != 2:
        bad.append(f"e=1 S(1): ext1 {got}, want 2")
    verdict(5, bad)


def test_criterion_6_obstructions(verdict):
    bad = []
    for e in (2, 3, 4):
        L = paper_lift_family("Se", e, 7, N=2)
        R3 = truncated_power_series(7, 3)
        res = extend_search(L, R3)
        if not isinstance(res, NoExtension):
            bad.append(f"e={e}: S_e lift extends to k[t]/(t^3)")
            continue
        if not np.array_equal(res.obstruction % 7, R3.element("t^2")) or not res.check():
            bad.append(f"e={e}: obstruction {R3.format(res.obstruction)} is not t^2 or the certificate fails")
        L3 = paper_lift_family("Se", e, 3, N=2)
        R = truncated_power_series(3, 3)
        if exhaustive_extension_count(L3, R, natural_surjection(R, L3.ring)) != 0:
            bad.append(f"e={e}: enumeration over GF(3) finds an extension")
    S = paper_lift_family("S1-e1", 1, 7)
    Jp = build_local_algebra(J_PRIME_RING, 7)
    res = extend_search(S, Jp)
    if not (isinstance(res, NoExtension) and res.check()):
        bad.append("e=1: S_1 lift extends to the J' quotient")
    S3 = paper_lift_family("S1-e1", 1, 3)
    Jp3 = build_local_algebra(J_PRIME_RING, 3)
    if Jp3.dimension != 6 or exhaustive_extension_count(S3, Jp3, natural_surjection(Jp3, S3.ring)) != 0:
        bad.append("e=1: enumeration over GF(3) finds an extension to the J' quotient")
    verdict(6, bad)


def test_criterion_7_ladders(verdict):
    bad = []
    for e in (1, 2, 3, 4):
        for name, lam in (("W-star", None), ("band", 2)):
            for N in range(2, 7):
                L = paper_lift_family(name, e, 7, N=N, lam=lam)
                if not verify_lift(L).ok:
                    bad.append(f"e={e} {name} N={N}: {verify_lift(L)}")
                if N < 6:
                    res = extend_search(L, truncated_power_series(7, N + 1))
                    if not (isinstance(res, Extended) and verify_lift(res.lift).ok):
                        bad.append(f"e={e} {name}: no extension from N={N} to {N + 1}")
        if e >= 2 and not relation_violations(paper_lift_family("W-star", e, 7, N=2, printed=True)):
            bad.append(f"e={e}: printed W matrix verifies")
    verdict(7, bad)


def test_criterion_8_tangent_counts(verdict, analyze_cache):
    bad = []
    n = 0
    for e in (1, 2, 3):
        for spec, V in catalog(e, 3):
            if stable_end_dim(V) != 1:
                continue
            r = ext1_dim(V)
            fo = first_order_classes(V, limit=2200)
            n += 1
            if fo.count != 3 ** r or fo.r != r:
                bad.append(f"e={e} {spec}: {fo.mode} count {fo.count}, r {fo.r}; ext1 {r}")
        _, data, _ = analyze_cache(e, 3)
        for row in data["rows"]:
            ev = row.get("evidence")
            if ev and ev["r"] != ev["r_linearized"]:
                bad.append(f"e={e} {row['spec']}: r {ev['r']} vs linearized {ev['r_linearized']}")
    if n == 0:
        bad.append("no modules checked")
    verdict(8, bad)


def _orbit_counts(summary: dict) -> dict:
    out: dict = {}
    for key, orb in summary["orbits"].items():
        if key.startswith("band:"):
            continue
        for v in orb["verdicts"]:
            out[(orb["component"], v)] = out.get((orb["component"], v), 0) + 1
    return out


def test_criterion_9_end_to_end(verdict, analyze_cache):
    bad = []
    for e in EDGES:
        code, data, _ = analyze_cache(e, 7)
        if code != 0:
            bad.append(f"e={e}: analyze exited {code}: {data['mismatches'][:3]}")
        counts = _orbit_counts(data["summary"])
        if e >= 2:
            want = {("ExceptionalTube", KT): 1, ("ExceptionalTube", K): e - 1, ("NonPeriodic", KT2): 2}
            if e > 2:
                want[("NonPeriodic", K)] = e - 2
            if counts != want:
                bad.append(f"e={e}: orbit verdict counts {counts}, want {want}")
        else:
            verdicts = {v for orb in data["summary"]["orbits"].values() for v in orb["verdicts"] if v != "-"}
            rows = {r["spec"]: r for r in data["rows"]}
            if rows["S(1)"]["udr_verdict"] != KT1T2 or rows["str:a1"]["udr_verdict"] != KT:
                bad.append("e=1: special verdicts missing")
            if not verdicts <= {KT, KT1T2}:
                bad.append(f"e=1: unexpected verdicts {verdicts}")
        for r in data["rows"]:
            if r["spec"].startswith("band:"):
                n, lam = (int(x) for x in r["spec"][5:].split(","))
                if predicted_band(n, lam, 7) == KT and r["udr_verdict"] != KT:
                    bad.append(f"e={e} {r['spec']}: verdict {r['udr_verdict']}")
    verdict(9, bad)


def test_criterion_10_property_suites(verdict, analyze_cache):
    bad = []
    for e in EDGES:
        for p in PRIMES:
            for spec, M in catalog(e, p):
                for check in ALL_CHECKS:
                    try:
                        check(spec, M)
                    except AssertionError as exc:
                        bad.append(f"e={e} p={p} {exc}")
            # Omega-invariance of verdict families: one verdict per orbit
            _, data, _ = analyze_cache(e, p)
            for key, orb in data["summary"]["orbits"].items():
                if len(set(orb["verdicts"])) > 1:
                    bad.append(f"e={e} p={p} orbit {key}: verdicts {orb['verdicts']}")
    verdict(10, bad)
