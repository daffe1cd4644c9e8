"""Modules as quiver representations: simples, projectives, string and band
modules, direct sums, and path actions.

A :class:`Representation` stores one matrix per arrow, of shape
``(dim target, dim source)`` over GF(p), or ``(dim target, dim source, d)``
when the coefficients live in a local algebra of dimension ``d``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .coeff import LocalAlgebra, check_prime, inv_mod, matmul
from .presentation import (
    NotComposable,
    Path,
    PresentationError,
    QuiverPresentation,
    build_presentation,
    compute_path_basis,
)


class RepError(ValueError):
    pass


class BadVertex(RepError):
    pass


class InvalidString(RepError):
    pass


class ZeroLambda(RepError):
    pass


class Mismatch(RepError):
    pass


class RelationViolation(RepError):
    pass


@dataclass(frozen=True, eq=False)
class Representation:
    quiver: QuiverPresentation
    p: int
    dims: tuple[int, ...]
    maps: dict = field(repr=False)
    ring: LocalAlgebra | None = None
    spec: str = ""

    def __post_init__(self):
        q = self.quiver
        if len(self.dims) != q.e:
            raise RepError("dimension vector has the wrong length")
        for arr in q.arrows:
            A = self.maps[arr.name]
            want = (self.dims[arr.target - 1], self.dims[arr.source - 1])
            if A.shape[:2] != want:
                raise RepError(f"matrix for {arr.name} has shape {A.shape[:2]}, expected {want}")
            if self.ring is not None and (A.ndim != 3 or A.shape[2] != self.ring.dimension):
                raise RepError(f"matrix for {arr.name} is not over {self.ring.name}")

    @property
    def e(self) -> int:
        return self.quiver.e

    def dim(self, v: int) -> int:
        return self.dims[v - 1]

    @property
    def dim_vector(self) -> tuple[int, ...]:
        return self.dims

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def over_field(self) -> bool:
        return self.ring is None

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for d in self.dims:
            out.append(acc)
            acc += d
        return tuple(out)

    def __repr__(self):
        tag = self.spec or "Representation"
        over = f" over {self.ring.name}" if self.ring is not None else ""
        return f"<{tag} dims={self.dims}{over}>"

    def identity(self, v: int) -> np.ndarray:
        n = self.dim(v)
        if self.ring is None:
            return np.eye(n, dtype=np.int64)
        return self.ring.identity(n)

    def zero(self, rows: int, cols: int) -> np.ndarray:
        if self.ring is None:
            return np.zeros((rows, cols), dtype=np.int64)
        return np.zeros((rows, cols, self.ring.dimension), dtype=np.int64)

    def _mm(self, A, B):
        if self.ring is None:
            return matmul(A, B, self.p)
        return self.ring.matmul(A, B)

    def act_path(self, path: Path, start: int | None = None) -> np.ndarray:
        """Matrix of a path; the rightmost arrow is applied first."""
        q = self.quiver
        q.check_composable(path)
        if not path:
            if start is None:
                raise NotComposable("the empty path needs an explicit vertex")
            return self.identity(start)
        out = self.maps[path[-1]]
        for name in reversed(path[:-1]):
            out = self._mm(self.maps[name], out)
        return out

    @cached_property
    def path_actions(self) -> dict:
        """For each vertex v, the matrices of the basis paths of P_v acting
        on this module: ``{v: [(normal form, matrix), ...]}``."""
        q = self.quiver
        out = {}
        for v in q.vertices:
            mats = {}
            basis = projective_basis(q, v)
            top = next(nf for nf in basis if nf.depth == 0)
            mats[top] = self.identity(v)
            frontier = [top]
            while frontier:
                nf = frontier.pop(0)
                here = q.vertex_of(nf)
                for arr in q.arrows:
                    if arr.source != here:
                        continue
                    nxt = q.step(nf, arr.name)
                    if nxt is not None and nxt not in mats:
                        mats[nxt] = self._mm(self.maps[arr.name], mats[nf])
                        frontier.append(nxt)
            out[v] = [(nf, mats[nf]) for nf in basis]
        return out

    def relation_residues(self):
        """Yield ``(relation, residue matrix)`` for every violated relation."""
        for rel in self.quiver.relations:
            lhs = self.act_path(rel.lhs)
            res = lhs if rel.rhs is None else (lhs - self.act_path(rel.rhs)) % self.p
            if np.any(res % self.p):
                yield rel, res % self.p

    def check_relations(self) -> None:
        for rel, _ in self.relation_residues():
            raise RelationViolation(f"{self.spec or 'module'} violates {rel}")

    def global_matrix(self, arrow: str) -> np.ndarray:
        """Arrow action on the whole space (over GF(p) only)."""
        n = self.total_dim
        arr = self.quiver.arrow(arrow)
        out = np.zeros((n, n), dtype=np.int64)
        s, t = self.offsets[arr.source - 1], self.offsets[arr.target - 1]
        A = self.maps[arrow]
        out[t : t + A.shape[0], s : s + A.shape[1]] = A
        return out

    def with_spec(self, spec: str) -> "Representation":
        return Representation(self.quiver, self.p, self.dims, self.maps, self.ring, spec)

    def restrict_scalars(self) -> "Representation":
        """Forget the coefficient ring: the same module as a Λ-module over k."""
        if self.ring is None:
            return self
        d = self.ring.dimension
        maps = {k: self.ring.restrict_scalars(A) for k, A in self.maps.items()}
        return Representation(self.quiver, self.p, tuple(x * d for x in self.dims), maps, None, self.spec)

    def reduce_mod_m(self) -> "Representation":
        if self.ring is None:
            return self
        maps = {k: self.ring.reduce(A) for k, A in self.maps.items()}
        return Representation(self.quiver, self.p, self.dims, maps, None, self.spec)

    def extend_scalars(self, ring: LocalAlgebra) -> "Representation":
        """R ⊗ V for a GF(p)-representation V."""
        if self.ring is not None:
            raise RepError("already over a coefficient ring")
        maps = {k: ring.embed(A) for k, A in self.maps.items()}
        return Representation(self.quiver, self.p, self.dims, maps, ring, f"{ring.name} (x) {self.spec}")


def from_global(
    q: QuiverPresentation,
    p: int,
    vertex_of_basis: list[int],
    arrows: dict[str, np.ndarray],
    ring: LocalAlgebra | None = None,
    spec: str = "",
) -> Representation:
    """Assemble a representation from matrices on the whole space.

    Basis vector ``j`` sits at vertex ``vertex_of_basis[j]``; within a vertex
    the global order is kept.  Each global matrix must respect the grading.
    """
    n = len(vertex_of_basis)
    idx = {v: [j for j in range(n) if vertex_of_basis[j] == v] for v in q.vertices}
    dims = tuple(len(idx[v]) for v in q.vertices)
    maps = {}
    for arr in q.arrows:
        G = np.asarray(arrows.get(arr.name, np.zeros((n, n) if ring is None else (n, n, ring.dimension), dtype=np.int64)), dtype=np.int64) % p
        rows, cols = idx[arr.target], idx[arr.source]
        block = G[np.ix_(rows, cols)] if ring is None else G[np.ix_(rows, cols, range(ring.dimension))]
        mask = np.zeros(G.shape[:2], dtype=bool)
        mask[np.ix_(rows, cols)] = True
        if np.any(G[~mask] % p):
            raise RepError(f"global matrix for {arr.name} does not respect the vertex grading")
        maps[arr.name] = block
    return Representation(q, p, dims, maps, ring, spec)


def _zero_maps(q: QuiverPresentation, dims, ring=None) -> dict:
    maps = {}
    for arr in q.arrows:
        shape = (dims[arr.target - 1], dims[arr.source - 1])
        if ring is not None:
            shape = shape + (ring.dimension,)
        maps[arr.name] = np.zeros(shape, dtype=np.int64)
    return maps


def _check_vertex(q: QuiverPresentation, i: int) -> None:
    if not isinstance(i, (int, np.integer)) or not 1 <= i <= q.e:
        raise BadVertex(f"vertex must be in 1..{q.e}, got {i!r}")


def zero_module(q: QuiverPresentation, p: int) -> Representation:
    dims = (0,) * q.e
    return Representation(q, p, dims, _zero_maps(q, dims), None, "0")


def build_simple(q: QuiverPresentation, p: int, i: int) -> Representation:
    _check_vertex(q, i)
    dims = tuple(int(v == i) for v in q.vertices)
    return Representation(q, p, dims, _zero_maps(q, dims), None, f"S({i})")


_BASIS_CACHE: dict = {}


def projective_basis(q: QuiverPresentation, i: int):
    key = q.e
    pb = _BASIS_CACHE.get(key)
    if pb is None:
        pb = _BASIS_CACHE[key] = compute_path_basis(q)
    return pb.basis(i)


def build_projective(q: QuiverPresentation, p: int, i: int) -> Representation:
    _check_vertex(q, i)
    basis = projective_basis(q, i)
    where = {nf: j for j, nf in enumerate(basis)}
    n = len(basis)
    arrows = {}
    for arr in q.arrows:
        G = np.zeros((n, n), dtype=np.int64)
        for j, nf in enumerate(basis):
            if q.vertex_of(nf) != arr.source:
                continue
            nxt = q.step(nf, arr.name)
            if nxt is not None:
                G[where[nxt], j] = 1
        arrows[arr.name] = G
    rep = from_global(q, p, [q.vertex_of(nf) for nf in basis], arrows, spec=f"P({i})")
    rep.check_relations()
    return rep


# ---------------------------------------------------------------------------
# string modules

@dataclass(frozen=True)
class Letter:
    arrow: str
    inverse: bool = False

    def __str__(self):
        return self.arrow + ("~" if self.inverse else "")


@dataclass(frozen=True)
class StringWord:
    """Letters in application order (the textual form is read right to left)."""

    letters: tuple[Letter, ...]
    base: int | None = None

    @classmethod
    def parse(cls, text: str, base: int | None = None) -> "StringWord":
        text = text.strip()
        if not text:
            return cls((), base)
        toks = [t.strip() for t in text.split("*")]
        letters = []
        for t in reversed(toks):
            m = re.fullmatch(r"(a\d+|d)(~?)", t)
            if not m:
                raise InvalidString(f"bad letter {t!r}; letters are a<k> or d, with optional ~")
            letters.append(Letter(m.group(1), bool(m.group(2))))
        return cls(tuple(letters), base)

    def __str__(self):
        return "*".join(str(x) for x in reversed(self.letters))

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "StringWord":
        return StringWord(tuple(Letter(x.arrow, not x.inverse) for x in reversed(self.letters)), None)

    def vertices(self, q: QuiverPresentation) -> list[int]:
        """Vertices of z_0, ..., z_n along the walk."""
        if not self.letters:
            if self.base is None:
                raise InvalidString("the empty word needs a base vertex (str@v:)")
            return [self.base]
        out = []
        for x in self.letters:
            arr = q.arrow(x.arrow)
            a, b = (arr.target, arr.source) if x.inverse else (arr.source, arr.target)
            if out and out[-1] != a:
                raise InvalidString(f"letters do not compose at {x} (walk is at vertex {out[-1]}, letter starts at {a})")
            if not out:
                out.append(a)
            out.append(b)
        if self.base is not None and out[0] != self.base:
            raise InvalidString(f"word starts at vertex {out[0]}, not at the given base {self.base}")
        return out

    def runs(self):
        """Maximal runs of equal direction: ``(start, letters, inverse)``."""
        out = []
        j = 0
        L = self.letters
        while j < len(L):
            k = j
            while k < len(L) and L[k].inverse == L[j].inverse:
                k += 1
            out.append((j, L[j:k], L[j].inverse))
            j = k
        return out

    def spec(self) -> str:
        if not self.letters:
            return f"str@{self.base}:"
        return f"str:{self}"


def validate_string(q: QuiverPresentation, w: StringWord) -> list[int]:
    """Check the string conditions for Λ/soc Λ; return the vertex walk."""
    try:
        verts = w.vertices(q)
    except PresentationError as exc:
        raise InvalidString(str(exc)) from None
    L = w.letters
    for a, b in zip(L, L[1:]):
        if a.arrow == b.arrow and a.inverse != b.inverse:
            raise InvalidString(f"letter {a} is followed by its inverse {b}")
    for start, run, inv in w.runs():
        applied = [x.arrow for x in run]
        # a direct run applies letters in order; an inverse run read backwards
        path = tuple(reversed(applied)) if not inv else tuple(applied)
        try:
            bad = q.is_socle_or_zero(path)
        except NotComposable as exc:
            raise InvalidString(str(exc)) from None
        if bad:
            sub = StringWord(run)
            raise InvalidString(f"run {sub} (letters {start + 1}..{start + len(run)}) is zero or socle in the algebra")
    return verts


def build_string(q: QuiverPresentation, p: int, w: StringWord | str, base: int | None = None) -> Representation:
    if isinstance(w, str):
        w = StringWord.parse(w, base)
    verts = validate_string(q, w)
    n = len(verts)
    arrows = {arr.name: np.zeros((n, n), dtype=np.int64) for arr in q.arrows}
    for j, x in enumerate(w.letters, start=1):
        if x.inverse:
            arrows[x.arrow][j - 1, j] = 1
        else:
            arrows[x.arrow][j, j - 1] = 1
    spec = f"S({verts[0]})" if not w.letters else w.spec()
    rep = from_global(q, p, verts, arrows, spec=spec)
    bad = next(rep.relation_residues(), None)
    if bad is not None:
        raise InvalidString(f"{w.spec()} violates {bad[0]}")
    return rep


def canonical_word(w: StringWord) -> StringWord:
    if not w.letters:
        return w
    a, b = str(w), str(w.inverse())
    return w if a <= b else w.inverse()


def enumerate_strings(q: QuiverPresentation, max_len: int) -> list[StringWord]:
    """All valid strings up to length ``max_len``, one per inverse pair."""
    out: dict[str, StringWord] = {}
    for v in q.vertices:
        out[f"S({v})"] = StringWord((), v)
    frontier: list[tuple[StringWord, int]] = []
    for v in q.vertices:
        frontier.append((StringWord((), v), v))
    candidates = [Letter(a.name, inv) for a in q.arrows for inv in (False, True)]
    for _ in range(max_len):
        nxt = []
        for w, here in frontier:
            for x in candidates:
                arr = q.arrow(x.arrow)
                start, end = (arr.target, arr.source) if x.inverse else (arr.source, arr.target)
                if start != here:
                    continue
                cand = StringWord(w.letters + (x,), None)
                try:
                    validate_string(q, cand)
                except InvalidString:
                    continue
                nxt.append((cand, end))
                c = canonical_word(cand)
                out.setdefault(c.spec(), c)
        frontier = nxt
    return sorted(out.values(), key=lambda w: (len(w), w.spec()))


# ---------------------------------------------------------------------------
# band modules

@dataclass(frozen=True)
class BandSpec:
    n: int
    lam: int

    def spec(self) -> str:
        return f"band:{self.n},{self.lam}"


def jordan_block(n: int, lam: int, p: int) -> np.ndarray:
    J = (lam % p) * np.eye(n, dtype=np.int64)
    for i in range(1, n):
        J[i, i - 1] = 1
    return J


def build_band(q: QuiverPresentation, p: int, b: BandSpec | tuple[int, int]) -> Representation:
    """B(n, λ) on the band a_{e-1}...a_1 a_e d~.

    Vertex e carries (top block, socle block); the other vertices carry one
    block each.
    """
    if not isinstance(b, BandSpec):
        b = BandSpec(*b)
    n, lam = b.n, b.lam % p
    if n < 1:
        raise RepError("band size must be positive")
    if lam == 0:
        raise ZeroLambda("band parameter must be nonzero")
    e = q.e
    dims = tuple([n] * (e - 1) + [2 * n])
    maps = _zero_maps(q, dims)
    I = np.eye(n, dtype=np.int64)
    top, soc = slice(0, n), slice(n, 2 * n)
    maps["d"][soc, top] = jordan_block(n, lam, p)
    if e == 1:
        maps["a1"][soc, top] = I
    else:
        for i in range(1, e - 1):
            maps[f"a{i}"][:, :] = I
        maps[f"a{e - 1}"][soc, :] = I
        maps[f"a{e}"][:, top] = I
    rep = Representation(q, p, dims, maps, None, BandSpec(n, lam).spec())
    rep.check_relations()
    return rep


def direct_sum(*reps: Representation) -> Representation:
    if not reps:
        raise Mismatch("empty direct sum")
    q, p, ring = reps[0].quiver, reps[0].p, reps[0].ring
    for r in reps[1:]:
        if r.quiver.e != q.e or r.p != p or r.ring is not ring:
            raise Mismatch("summands live over different algebras or coefficients")
    dims = tuple(sum(r.dims[v] for r in reps) for v in range(q.e))
    maps = {}
    for arr in q.arrows:
        blocks = [r.maps[arr.name] for r in reps]
        rows = sum(B.shape[0] for B in blocks)
        cols = sum(B.shape[1] for B in blocks)
        shape = (rows, cols) if ring is None else (rows, cols, ring.dimension)
        M = np.zeros(shape, dtype=np.int64)
        i = j = 0
        for B in blocks:
            M[i : i + B.shape[0], j : j + B.shape[1]] = B
            i += B.shape[0]
            j += B.shape[1]
        maps[arr.name] = M
    spec = " + ".join(r.spec for r in reps if r.spec)
    return Representation(q, p, dims, maps, ring, spec)


# ---------------------------------------------------------------------------
# module specs

_SPEC_PATTERNS = (
    (re.compile(r"S\((\d+)\)$"), "simple"),
    (re.compile(r"P\((\d+)\)$"), "projective"),
    (re.compile(r"str(?:@(\d+))?:(.*)$"), "string"),
    (re.compile(r"band:(\d+),(-?\d+)$"), "band"),
)


class ModuleSpecError(RepError):
    def __init__(self, message: str, text: str, position: int, expected=()):
        self.position = position
        self.expected = tuple(expected)
        super().__init__(f"{message} at position {position} in {text!r}" + (f" (expected one of: {', '.join(expected)})" if expected else ""))


def parse_module_spec(text: str, q: QuiverPresentation | int, p: int) -> Representation:
    """Build a module from ``S(i)``, ``P(i)``, ``str@v:<letters>``,
    ``band:<n>,<lambda>``, or a ``+``-separated direct sum of these."""
    if isinstance(q, int):
        q = build_presentation(q)
    check_prime(p)
    parts = []
    pos = 0
    for chunk in text.split("+"):
        stripped = chunk.strip()
        offset = pos + (len(chunk) - len(chunk.lstrip()))
        pos += len(chunk) + 1
        for pat, kind in _SPEC_PATTERNS:
            m = pat.match(stripped)
            if m:
                break
        else:
            raise ModuleSpecError("unrecognised module", text, offset, ("S(i)", "P(i)", "str@v:<letters>", "band:<n>,<lambda>"))
        try:
            if kind == "simple":
                parts.append(build_simple(q, p, int(m.group(1))))
            elif kind == "projective":
                parts.append(build_projective(q, p, int(m.group(1))))
            elif kind == "string":
                base = int(m.group(1)) if m.group(1) else None
                parts.append(build_string(q, p, m.group(2), base))
            else:
                parts.append(build_band(q, p, BandSpec(int(m.group(1)), int(m.group(2)) % p)))
        except (RepError, PresentationError) as exc:
            raise ModuleSpecError(str(exc), text, offset) from None
    if len(parts) == 1:
        return parts[0]
    return direct_sum(*parts)


def lam_inverse_negated(lam: int, p: int) -> int:
    """-λ^{-1} in GF(p)."""
    return (-inv_mod(lam, p)) % p
