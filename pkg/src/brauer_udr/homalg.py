"""Homological linear algebra over the star algebra: hom spaces, maps
factoring through projectives, projective covers, syzygies, isomorphism
tests, Ext^1 and Ω-orbits.

Homomorphisms are tuples of vertex matrices ``f[v-1]`` of shape
``(dim N_v, dim M_v)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .coeff import (
    complement_columns,
    in_row_space,
    inverse,
    is_invertible,
    matmul,
    nullspace,
    rank,
    row_basis,
)
from .repbuild import (
    Mismatch,
    Representation,
    build_band,
    build_projective,
    direct_sum,
    projective_basis,
    zero_module,
)

Hom = tuple  # tuple of vertex matrices


class Inconclusive(RuntimeError):
    """An isomorphism question the bounded search could not decide."""


def _check_pair(M: Representation, N: Representation) -> None:
    if M.quiver.e != N.quiver.e or M.p != N.p:
        raise Mismatch("modules over different algebras")
    if M.ring is not None or N.ring is not None:
        raise Mismatch("hom spaces are computed over the field only")


def _flatten(f: Hom) -> np.ndarray:
    return np.concatenate([np.asarray(x).ravel() for x in f]) if f else np.zeros(0, dtype=np.int64)


def _unflatten(vec: np.ndarray, shapes) -> Hom:
    out, k = [], 0
    for r, c in shapes:
        out.append(vec[k : k + r * c].reshape(r, c).copy())
        k += r * c
    return tuple(out)


def compose(g: Hom, f: Hom, p: int) -> Hom:
    """g after f."""
    return tuple(matmul(a, b, p) for a, b in zip(g, f))


def is_homomorphism(f: Hom, M: Representation, N: Representation) -> bool:
    p = M.p
    for arr in M.quiver.arrows:
        s, t = arr.source - 1, arr.target - 1
        lhs = matmul(N.maps[arr.name], f[s], p)
        rhs = matmul(f[t], M.maps[arr.name], p)
        if np.any((lhs - rhs) % p):
            return False
    return True


def is_iso_map(f: Hom, p: int) -> bool:
    return all(x.shape[0] == x.shape[1] and (x.shape[0] == 0 or is_invertible(x, p)) for x in f)


def identity_hom(M: Representation) -> Hom:
    return tuple(np.eye(d, dtype=np.int64) for d in M.dims)


# ---------------------------------------------------------------------------
# projective covers

@dataclass(frozen=True, eq=False)
class ProjectiveCover:
    module: Representation
    projective: Representation
    epi: Hom
    generators: tuple  # ((vertex, vector in M_vertex), ...)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        e = self.module.e
        return tuple(sum(1 for v, _ in self.generators if v == w) for w in range(1, e + 1))

    def column_index(self) -> dict:
        """(summand j, normal form) -> (vertex, column of P at that vertex)."""
        q = self.module.quiver
        out = {}
        counters = [0] * q.e
        for j, (v, _) in enumerate(self.generators):
            for nf in projective_basis(q, v):
                w = q.vertex_of(nf)
                out[(j, nf)] = (w, counters[w - 1])
                counters[w - 1] += 1
        return out


def radical_basis(M: Representation, v: int) -> np.ndarray:
    """Rows spanning rad(M)_v (sum of the images of arrows into v)."""
    cols = [M.maps[a.name] for a in M.quiver.arrows if a.target == v and M.maps[a.name].size]
    if not cols:
        return np.zeros((0, M.dim(v)), dtype=np.int64)
    return row_basis(np.concatenate(cols, axis=1).T, M.p)


def socle_basis(M: Representation, v: int) -> np.ndarray:
    """Rows spanning soc(M)_v (common kernel of arrows out of v)."""
    rows = [M.maps[a.name] for a in M.quiver.arrows if a.source == v and M.maps[a.name].size]
    if not rows:
        return np.eye(M.dim(v), dtype=np.int64)
    return nullspace(np.concatenate(rows, axis=0), M.p, M.dim(v))


def top_dims(M: Representation) -> tuple[int, ...]:
    return tuple(M.dim(v) - radical_basis(M, v).shape[0] for v in M.quiver.vertices)


def socle_dims(M: Representation) -> tuple[int, ...]:
    return tuple(socle_basis(M, v).shape[0] for v in M.quiver.vertices)


def projective_cover(M: Representation) -> ProjectiveCover:
    """Minimal projective cover: one P_v per top basis vector at v."""
    q, p = M.quiver, M.p
    gens = []
    for v in q.vertices:
        rad = radical_basis(M, v)
        for c in complement_columns(rad, M.dim(v), p):
            g = np.zeros(M.dim(v), dtype=np.int64)
            g[c] = 1
            gens.append((v, g))
    if not gens:
        P = zero_module(q, p)
        epi = tuple(np.zeros((M.dim(v), 0), dtype=np.int64) for v in q.vertices)
        return ProjectiveCover(M, P, epi, ())
    P = direct_sum(*[build_projective(q, p, v) for v, _ in gens])
    cols = {w: [] for w in q.vertices}
    for v, g in gens:
        for nf, A in M.path_actions[v]:
            cols[q.vertex_of(nf)].append(matmul(A, g.reshape(-1, 1), p)[:, 0])
    epi = []
    for w in q.vertices:
        if cols[w]:
            epi.append(np.array(cols[w], dtype=np.int64).T.reshape(M.dim(w), len(cols[w])))
        else:
            epi.append(np.zeros((M.dim(w), 0), dtype=np.int64))
    return ProjectiveCover(M, P, tuple(epi), tuple(gens))


_COVER_CACHE: "dict[int, tuple[Representation, ProjectiveCover]]" = {}


def cover_of(M: Representation) -> ProjectiveCover:
    hit = _COVER_CACHE.get(id(M))
    if hit is not None and hit[0] is M:
        return hit[1]
    cov = projective_cover(M)
    if len(_COVER_CACHE) > 4096:
        _COVER_CACHE.clear()
    _COVER_CACHE[id(M)] = (M, cov)
    return cov


def _right_inverse(A: np.ndarray, p: int) -> np.ndarray:
    """S with A S = I for a surjective A (rows <= cols)."""
    m, n = A.shape
    if m == 0:
        return np.zeros((n, 0), dtype=np.int64)
    from ._kernels import rref

    _, piv = rref(A, p)
    if len(piv) != m:
        raise ValueError("matrix is not surjective")
    sel = [int(c) for c in piv]
    S = np.zeros((n, m), dtype=np.int64)
    S[sel, :] = inverse(A[:, sel], p)
    return S


def _left_inverse(B: np.ndarray, p: int) -> np.ndarray:
    """L with L B = I for B of full column rank."""
    return _right_inverse(B.T % p, p).T.copy()


# ---------------------------------------------------------------------------
# hom spaces

@dataclass(frozen=True, eq=False)
class HomSpace:
    source: Representation
    target: Representation
    vectors: np.ndarray = field(repr=False)  # one flattened hom per row

    @property
    def shapes(self):
        return [(self.target.dim(v), self.source.dim(v)) for v in self.source.quiver.vertices]

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @cached_property
    def basis(self) -> list[Hom]:
        return [_unflatten(v, self.shapes) for v in self.vectors]

    def combine(self, coeffs) -> Hom:
        vec = (np.asarray(coeffs, dtype=np.int64) @ self.vectors) % self.source.p
        return _unflatten(vec, self.shapes)

    @cached_property
    def proj_vectors(self) -> np.ndarray:
        return proj_factoring_vectors(self.source, self.target)

    @property
    def proj_basis(self) -> list[Hom]:
        return [_unflatten(v, self.shapes) for v in self.proj_vectors]

    @property
    def stable_dim(self) -> int:
        return self.dim - self.proj_vectors.shape[0]

    def factors_through_projective(self, f: Hom) -> bool:
        return in_row_space(self.proj_vectors, _flatten(f) % self.source.p, self.source.p)


def hom_space_direct(M: Representation, N: Representation) -> HomSpace:
    """Solve the commutation equations N_x f_s = f_t M_x directly."""
    _check_pair(M, N)
    q, p = M.quiver, M.p
    shapes = [(N.dim(v), M.dim(v)) for v in q.vertices]
    offs = np.cumsum([0] + [r * c for r, c in shapes])
    nunk = int(offs[-1])
    blocks = []
    for arr in q.arrows:
        s, t = arr.source - 1, arr.target - 1
        Nx, Mx = N.maps[arr.name], M.maps[arr.name]
        rows = Nx.shape[0] * Mx.shape[1]
        if rows == 0:
            continue
        E = np.zeros((rows, nunk), dtype=np.int64)
        # vec(Nx f_s) = (Nx ⊗ I) vec(f_s) and vec(f_t Mx) = (I ⊗ Mx^T) vec(f_t), row-major
        E[:, offs[s] : offs[s + 1]] += np.kron(Nx, np.eye(M.dims[s], dtype=np.int64))
        E[:, offs[t] : offs[t + 1]] -= np.kron(np.eye(N.dims[t], dtype=np.int64), Mx.T)
        blocks.append(E % p)
    if nunk == 0:
        return HomSpace(M, N, np.zeros((0, 0), dtype=np.int64))
    A = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, nunk), dtype=np.int64)
    K = nullspace(A, p, nunk)
    return HomSpace(M, N, row_basis(K, p) if K.shape[0] else K)


def hom_space(M: Representation, N: Representation) -> HomSpace:
    """Basis of Hom(M, N) through the generators of M.

    A hom is fixed by the images x_j of the top generators g_j of M; these
    must kill every relation, i.e. the kernel of the cover P(M) -> M.
    """
    _check_pair(M, N)
    q, p = M.quiver, M.p
    shapes = [(N.dim(v), M.dim(v)) for v in q.vertices]
    total = sum(r * c for r, c in shapes)
    if total == 0:
        return HomSpace(M, N, np.zeros((0, total), dtype=np.int64))
    cov = cover_of(M)
    gens = cov.generators
    xoff = np.cumsum([0] + [N.dim(v) for v, _ in gens])
    nunk = int(xoff[-1])
    if nunk == 0:
        return HomSpace(M, N, np.zeros((0, total), dtype=np.int64))
    # G[w]: (N_w, P_w, nunk) -- the map x -> (image of each basis path of P(M)_w)
    G = {w: [] for w in q.vertices}
    for j, (v, _) in enumerate(gens):
        for nf, A in N.path_actions[v]:
            w = q.vertex_of(nf)
            T = np.zeros((N.dim(w), nunk), dtype=np.int64)
            T[:, xoff[j] : xoff[j + 1]] = A
            G[w].append(T)
    eqs = []
    Gw = {}
    for w in q.vertices:
        if G[w]:
            Gw[w] = np.stack(G[w], axis=1)  # (N_w, P_w, nunk)
        else:
            Gw[w] = np.zeros((N.dim(w), 0, nunk), dtype=np.int64)
        epi = cov.epi[w - 1]
        if epi.shape[1] == 0 or N.dim(w) == 0:
            continue
        K = nullspace(epi, p, epi.shape[1])  # kernel vectors as rows
        if K.shape[0] == 0:
            continue
        E = np.einsum("ncu,kc->nku", Gw[w], K) % p
        eqs.append(E.reshape(-1, nunk))
    A = np.concatenate(eqs, axis=0) if eqs else np.zeros((0, nunk), dtype=np.int64)
    X = nullspace(A, p, nunk)
    if X.shape[0] == 0:
        return HomSpace(M, N, np.zeros((0, total), dtype=np.int64))
    vecs = []
    S = {w: _right_inverse(cov.epi[w - 1], p) for w in q.vertices}
    for x in X:
        f = []
        for w in q.vertices:
            if M.dim(w) == 0 or N.dim(w) == 0:
                f.append(np.zeros((N.dim(w), M.dim(w)), dtype=np.int64))
                continue
            psi = np.einsum("ncu,u->nc", Gw[w], x) % p
            f.append(matmul(psi, S[w], p))
        vecs.append(_flatten(tuple(f)))
    return HomSpace(M, N, row_basis(np.array(vecs, dtype=np.int64), p))


def end_space(M: Representation) -> HomSpace:
    return hom_space(M, M)


def proj_factoring_vectors(M: Representation, N: Representation) -> np.ndarray:
    """Echelon basis of the maps M -> N that factor through a projective,
    i.e. through the cover P(N) -> N."""
    p = M.p
    cov = cover_of(N)
    total = sum(N.dim(v) * M.dim(v) for v in M.quiver.vertices)
    if cov.projective.total_dim == 0 or M.total_dim == 0:
        return np.zeros((0, total), dtype=np.int64)
    H = hom_space(M, cov.projective)
    if H.dim == 0:
        return np.zeros((0, total), dtype=np.int64)
    imgs = [_flatten(compose(cov.epi, g, p)) for g in H.basis]
    return row_basis(np.array(imgs, dtype=np.int64), p)


def proj_factoring_subspace(H: HomSpace) -> list[Hom]:
    return H.proj_basis


def stable_hom_dim(M: Representation, N: Representation) -> int:
    return hom_space(M, N).stable_dim


def stable_end_dim(M: Representation) -> int:
    return stable_hom_dim(M, M)


# ---------------------------------------------------------------------------
# submodules, quotients, syzygies

def submodule(M: Representation, bases: dict, spec: str = "") -> Representation:
    """Sub-representation spanned at each vertex by the columns of bases[v]."""
    q, p = M.quiver, M.p
    B = {v: np.asarray(bases[v], dtype=np.int64).reshape(M.dim(v), -1) % p for v in q.vertices}
    L = {v: _left_inverse(B[v], p) if B[v].shape[1] else np.zeros((0, M.dim(v)), dtype=np.int64) for v in q.vertices}
    maps = {}
    for arr in q.arrows:
        s, t = arr.source, arr.target
        img = matmul(M.maps[arr.name], B[s], p)
        Y = matmul(L[t], img, p)
        if np.any((matmul(B[t], Y, p) - img) % p):
            raise ValueError(f"subspace is not closed under {arr.name}")
        maps[arr.name] = Y
    dims = tuple(B[v].shape[1] for v in q.vertices)
    return Representation(q, p, dims, maps, None, spec)


def quotient(M: Representation, bases: dict, spec: str = "") -> tuple[Representation, Hom]:
    """M / U for a submodule U given by column bases; returns (quotient, projection)."""
    q, p = M.quiver, M.p
    proj = {}
    comp = {}
    for v in q.vertices:
        U = np.asarray(bases[v], dtype=np.int64).reshape(M.dim(v), -1) % p
        Ub = row_basis(U.T, p) if U.shape[1] else np.zeros((0, M.dim(v)), dtype=np.int64)
        cols = complement_columns(Ub, M.dim(v), p)
        E = np.zeros((M.dim(v), len(cols)), dtype=np.int64)
        for k, c in enumerate(cols):
            E[c, k] = 1
        full = np.concatenate([Ub.T, E], axis=1)
        if full.shape[1]:
            Q = inverse(full, p)[Ub.shape[0] :, :]
        else:
            Q = np.zeros((0, 0), dtype=np.int64)
        proj[v] = Q.reshape(len(cols), M.dim(v))
        comp[v] = E
    maps = {}
    for arr in q.arrows:
        s, t = arr.source, arr.target
        maps[arr.name] = matmul(proj[t], matmul(M.maps[arr.name], comp[s], p), p)
    dims = tuple(proj[v].shape[0] for v in q.vertices)
    rep = Representation(q, p, dims, maps, None, spec)
    return rep, tuple(proj[v] for v in q.vertices)


def generated_submodule(M: Representation, gens) -> dict:
    """Column bases of the submodule generated by ``[(vertex, vector), ...]``."""
    q, p = M.quiver, M.p
    cols = {v: [] for v in q.vertices}
    for v, g in gens:
        for nf, A in M.path_actions[v]:
            cols[q.vertex_of(nf)].append(matmul(A, np.asarray(g).reshape(-1, 1), p)[:, 0])
    out = {}
    for v in q.vertices:
        if cols[v]:
            out[v] = row_basis(np.array(cols[v]), p).T.copy()
        else:
            out[v] = np.zeros((M.dim(v), 0), dtype=np.int64)
    return out


def projective_multiplicities(M: Representation) -> tuple[int, ...]:
    """Number of P_i summands of M: rank of the socle path of P_i on M_i."""
    q = M.quiver
    out = []
    for i in q.vertices:
        A = M.act_path(q.socle_path(i), start=i)
        out.append(rank(A, M.p) if A.size else 0)
    return tuple(out)


def strip_projectives(M: Representation) -> tuple[Representation, tuple[int, ...]]:
    """Split off projective summands: returns (projective-free part, multiplicities).

    A map P_i -> M is a split mono as soon as it is nonzero on the simple
    socle of P_i (P_i is injective), so columns of M_i with independent
    socle-path images generate a projective summand U and M ≅ U ⊕ M/U.
    """
    q, p = M.quiver, M.p
    mults = projective_multiplicities(M)
    if not any(mults):
        return M, mults
    from ._kernels import rref

    gens = []
    for i in q.vertices:
        if mults[i - 1] == 0:
            continue
        A = M.act_path(q.socle_path(i), start=i)
        _, piv = rref(A, p)
        for c in piv:
            g = np.zeros(M.dim(i), dtype=np.int64)
            g[int(c)] = 1
            gens.append((i, g))
    U = generated_submodule(M, gens)
    rest, _ = quotient(M, U, spec=f"{M.spec} - proj" if M.spec else "")
    return rest, mults


def is_projective(M: Representation) -> bool:
    rest, _ = strip_projectives(M)
    return rest.total_dim == 0


def syzygy(M: Representation) -> Representation:
    """Kernel of the minimal projective cover (projective-free)."""
    cov = cover_of(M)
    q, p = M.quiver, M.p
    K = {}
    for w in q.vertices:
        epi = cov.epi[w - 1]
        if epi.shape[1] == 0:
            K[w] = np.zeros((0, 0), dtype=np.int64)
        else:
            K[w] = nullspace(epi, p, epi.shape[1]).T.copy()
    spec = f"Omega({M.spec})" if M.spec else ""
    return submodule(cov.projective, K, spec=spec)


def injective_envelope(M: Representation) -> tuple[Representation, Hom]:
    """Monomorphism M -> ⊕ P_i with one P_i per socle dimension at i."""
    q, p = M.quiver, M.p
    pieces = []
    maps: list[Hom] = []
    for i in q.vertices:
        soc = socle_basis(M, i)  # rows
        s = soc.shape[0]
        if s == 0:
            continue
        Pi = build_projective(q, p, i)
        H = hom_space(M, Pi)
        sidx = [k for k, nf in enumerate(projective_basis(q, i)) if q.vertex_of(nf) == i]
        soc_nf = q.socle_form(i)
        local = [nf for nf in projective_basis(q, i) if q.vertex_of(nf) == i]
        row = local.index(soc_nf)
        F = np.array([matmul(f[i - 1], soc.T, p)[row] for f in H.basis], dtype=np.int64).reshape(len(H.basis), s)
        from ._kernels import rref

        _, piv = rref(F.T, p)  # pick maps whose socle functionals are independent
        if len(piv) < s:
            raise RuntimeError("socle not detected by maps to projectives")
        for k in piv:
            pieces.append(Pi)
            maps.append(H.basis[int(k)])
        del sidx
    if not pieces:
        return zero_module(q, p), tuple(np.zeros((0, M.dim(v)), dtype=np.int64) for v in q.vertices)
    I = direct_sum(*pieces)
    iota = tuple(np.concatenate([f[v - 1] for f in maps], axis=0) for v in q.vertices)
    return I, iota


def cosyzygy(M: Representation) -> Representation:
    """Ω^{-1}: cokernel of the injective envelope."""
    I, iota = injective_envelope(M)
    img = {v: iota[v - 1] for v in M.quiver.vertices}
    rep, _ = quotient(I, img, spec=f"Omega^-1({M.spec})" if M.spec else "")
    return rep


def omega_power(M: Representation, k: int) -> Representation:
    out = M
    for _ in range(abs(k)):
        out = syzygy(out) if k > 0 else cosyzygy(out)
    return out


# ---------------------------------------------------------------------------
# isomorphism

@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    witness: Hom | None
    reason: str

    def __bool__(self):
        return self.isomorphic


def _rank_profile(M: Representation) -> tuple:
    p = M.p
    arrows = tuple(rank(M.maps[a.name], p) if M.maps[a.name].size else 0 for a in M.quiver.arrows)
    return arrows, top_dims(M), socle_dims(M)


def _residue_of(f_blocks: list[np.ndarray], p: int) -> int | None:
    """The unique c with f - c singular (None if there is not exactly one)."""
    big = _block_diag(f_blocks)
    n = big.shape[0]
    found = [c for c in range(p) if rank((big - c * np.eye(n, dtype=np.int64)) % p, p) < n]
    return found[0] if len(found) == 1 else None


def _block_diag(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.int64)
    k = 0
    for b in blocks:
        out[k : k + b.shape[0], k : k + b.shape[1]] = b
        k += b.shape[0]
    return out


def end_is_local(M: Representation, E: HomSpace | None = None) -> bool:
    """Is End(M) local with residue field k?  Then M is indecomposable."""
    p = M.p
    E = E or end_space(M)
    if M.total_dim == 0 or E.dim == 0:
        return False
    n = M.total_dim
    nil = []
    for f in E.basis:
        c = _residue_of(list(f), p)
        if c is None:
            return False
        nil.append((_block_diag(list(f)) - c * np.eye(n, dtype=np.int64)) % p)
    flat = row_basis(np.array([x.ravel() for x in nil]), p)
    if flat.shape[0] != E.dim - 1:
        return False
    if flat.shape[0] == 0:
        return True
    rad = [x.reshape(n, n) for x in flat]
    power = rad
    for _ in range(n + 1):
        prods = [matmul(a, b, p).ravel() for a in power for b in rad]
        prods = [x for x in prods if np.any(x)]
        if not prods:
            return True
        for x in prods:
            if not in_row_space(flat, x, p):
                return False
        power = [x.reshape(n, n) for x in row_basis(np.array(prods), p)]
    return False


def iso_test(M: Representation, N: Representation, exhaustive_limit: int = 4) -> IsoResult:
    """Decide M ≅ N, returning an invertible witness on success.

    Raises :class:`Inconclusive` only when no certificate either way is found.
    """
    _check_pair(M, N)
    p = M.p
    if M.dims != N.dims:
        return IsoResult(False, None, "dimension vectors differ")
    if M.total_dim == 0:
        return IsoResult(True, tuple(np.zeros((0, 0), dtype=np.int64) for _ in M.dims), "zero modules")
    if _rank_profile(M) != _rank_profile(N):
        return IsoResult(False, None, "arrow rank / top / socle profile differs")
    H = hom_space(M, N)
    if H.dim == 0:
        return IsoResult(False, None, "Hom(M,N) = 0")
    EM = end_space(M)
    if EM.dim != H.dim:
        return IsoResult(False, None, f"dim End(M) = {EM.dim} != dim Hom(M,N) = {H.dim}")
    for f in H.basis:
        if is_iso_map(f, p):
            return IsoResult(True, f, "basis element is invertible")
    if end_is_local(M, EM):
        return IsoResult(False, None, "End(M) is local and no basis map is invertible")
    if end_space(N).dim != H.dim:
        return IsoResult(False, None, "dim End(N) != dim Hom(M,N)")
    basis = H.basis
    for a, b in itertools.combinations(range(len(basis)), 2):
        for c in range(1, p):
            f = tuple((x + c * y) % p for x, y in zip(basis[a], basis[b]))
            if is_iso_map(f, p):
                return IsoResult(True, f, "pair combination is invertible")
    if H.dim <= exhaustive_limit:
        for coeffs in itertools.product(range(p), repeat=H.dim):
            if not any(coeffs):
                continue
            f = H.combine(coeffs)
            if is_iso_map(f, p):
                return IsoResult(True, f, "exhaustive search")
        return IsoResult(False, None, f"exhaustive search over all {p}^{H.dim} maps")
    rng = np.random.default_rng(0)
    for _ in range(400):
        f = H.combine(rng.integers(0, p, size=H.dim))
        if is_iso_map(f, p):
            return IsoResult(True, f, "seeded random combination")
    raise Inconclusive(f"iso_test({M.spec}, {N.spec}): hom space of dimension {H.dim} too large to exhaust")


def isomorphic(M: Representation, N: Representation) -> bool:
    return iso_test(M, N).isomorphic


# ---------------------------------------------------------------------------
# Ext^1 and Ω-orbits

def ext1_dim(V: Representation) -> int:
    """dim Ext^1(V, V) = dim of stable Hom(ΩV, V)."""
    return stable_hom_dim(syzygy(V), V)


@dataclass(frozen=True)
class OmegaOrbit:
    modules: tuple[Representation, ...]
    period: int | None
    isos: tuple = ()

    @property
    def exhausted(self) -> bool:
        return self.period is None


def omega_orbit(V: Representation, max_depth: int) -> OmegaOrbit:
    """V, ΩV, Ω²V, ... until a repeat (period) or ``max_depth`` steps."""
    mods = [V]
    cur = V
    for k in range(1, max_depth + 1):
        cur = syzygy(cur)
        for j, prev in enumerate(mods):
            if prev.dims != cur.dims:
                continue
            res = iso_test(prev, cur)
            if res.isomorphic:
                if j == 0:
                    return OmegaOrbit(tuple(mods), k, (res.witness,))
                # eventually periodic from j on; Ω is injective on iso classes
                return OmegaOrbit(tuple(mods), k - j, (res.witness,))
        mods.append(cur)
    return OmegaOrbit(tuple(mods), None)


def band_module(M: Representation, n: int, lam: int) -> Representation:
    return build_band(M.quiver, M.p, (n, lam))


# ---------------------------------------------------------------------------
# component classification (catalog driven)

@dataclass(frozen=True)
class CatalogMatch:
    label: "ComponentLabel"
    seed: object = None  # catalog.Seed
    shift: int | None = None
    band: tuple[int, int] | None = None
    witness: Hom | None = None
    reason: str = ""

    @property
    def orbit_key(self) -> str | None:
        if self.seed is not None:
            return self.seed.name
        if self.band is not None:
            return f"band:{self.band[0]},{self.band[1]}"
        return None


def _orbit_bound(n: int) -> int:
    return max(16, -(-n // 8) * 8)


def match_catalog(V: Representation, depth: int | None = None) -> CatalogMatch:
    """Locate V among the seed Ω-orbits, the bands and the projectives.

    Modules outside every seed orbit are labelled by Ω-periodicity: a
    periodic non-band module sits in an exceptional tube; otherwise the
    label is Unknown (depth exhausted).
    """
    from .catalog import ComponentLabel, band_representation, seed_orbits

    q, p, e = V.quiver, V.p, V.quiver.e
    if V.total_dim == 0:
        return CatalogMatch(ComponentLabel.UNKNOWN, reason="zero module")
    if is_projective(V):
        return CatalogMatch(ComponentLabel.PROJECTIVE, reason="projective")
    n = V.dims[-1] // 2
    if V.dims[-1] % 2 == 0 and n > 0 and all(d == n for d in V.dims[:-1]):
        for lam in range(1, p):
            B = band_representation(e, p, n, lam)
            res = iso_test(V, B)
            if res.isomorphic:
                return CatalogMatch(ComponentLabel.HOMOGENEOUS_TUBE, band=(n, lam), witness=res.witness,
                                    reason=f"isomorphic to B({n},{lam})")
    for orbit in seed_orbits(e, p, _orbit_bound(V.total_dim)):
        for ent in orbit.entries:
            if ent.module.dims != V.dims:
                continue
            res = iso_test(V, ent.module)
            if res.isomorphic:
                return CatalogMatch(orbit.seed.component, seed=orbit.seed, shift=ent.shift,
                                    witness=res.witness,
                                    reason=f"isomorphic to Omega^{ent.shift}({orbit.seed.name})")
    depth = 2 * e if depth is None else depth
    orb = omega_orbit(V, depth)
    if orb.period is not None:
        return CatalogMatch(ComponentLabel.EXCEPTIONAL_TUBE,
                            reason=f"Omega-periodic (period {orb.period}), not a band, outside the seed orbits")
    return CatalogMatch(ComponentLabel.UNKNOWN, reason=f"no period within {depth} syzygies, no catalog match")


def classify_component(V: Representation, depth: int | None = None) -> "ComponentLabel":
    return match_catalog(V, depth).label
