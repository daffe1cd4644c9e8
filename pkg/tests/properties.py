"""Per-module invariants shared by the unit tests and the acceptance sweep.

Each check raises AssertionError with the module spec on failure.
"""

from __future__ import annotations

import numpy as np

from brauer_udr.coeff import matmul, nullspace, rank, row_basis
from brauer_udr.homalg import (
    cover_of,
    hom_space,
    is_projective,
    projective_multiplicities,
    stable_end_dim,
    syzygy,
)
from brauer_udr.repbuild import build_projective


def global_hom(f, M, N) -> np.ndarray:
    """Vertexwise hom blocks as one (dim N x dim M) matrix."""
    F = np.zeros((N.total_dim, M.total_dim), dtype=np.int64)
    for v in range(M.e):
        block = np.asarray(f[v])
        F[N.offsets[v]:N.offsets[v] + block.shape[0], M.offsets[v]:M.offsets[v] + block.shape[1]] = block
    return F


def socle_space(M) -> np.ndarray:
    """Columns spanning soc M (the common kernel of all arrows)."""
    A = np.vstack([M.global_matrix(a.name) for a in M.quiver.arrows])
    return nullspace(A, M.p, M.total_dim).T


def loewy_length(M) -> int:
    arrows = [M.global_matrix(a.name) for a in M.quiver.arrows]
    span = np.eye(M.total_dim, dtype=np.int64)
    n = 0
    while span.shape[0]:
        span = row_basis(np.vstack([matmul(A, span.T, M.p).T for A in arrows]), M.p)
        n += 1
    return n


def check_socle_containment(spec: str, M) -> bool:
    """Maps of End(M) factoring through a projective land in soc M when
    rad^{e+1} M = 0.  Returns whether the check applied."""
    if loewy_length(M) > M.e + 1:
        return False
    H = hom_space(M, M)
    soc = socle_space(M)
    r = rank(soc.T, M.p) if soc.size else 0
    for f in H.proj_basis:
        F = global_hom(f, M, M)
        for col in F.T:
            if not np.any(col):
                continue
            both = np.column_stack([soc, col]) if soc.size else col.reshape(-1, 1)
            assert rank(both.T, M.p) == r, f"{spec}: projective-factoring map leaves the socle"
    return True


def check_hom_counting(spec: str, M) -> None:
    q, p = M.quiver, M.p
    for i in q.vertices:
        Pi = build_projective(q, p, i)
        left = hom_space(Pi, M).dim
        right = hom_space(M, Pi).dim
        assert left == M.dim(i) == right, f"{spec}: Hom(P_{i},U)={left}, [U:S_{i}]={M.dim(i)}, Hom(U,P_{i})={right}"


def check_syzygy_dimension(spec: str, M) -> None:
    if is_projective(M):
        return
    cov = cover_of(M)
    W = syzygy(M)
    assert W.total_dim == cov.projective.total_dim - M.total_dim, f"{spec}: dim Omega mismatch"
    assert not any(projective_multiplicities(W)), f"{spec}: Omega has a projective summand"


def check_stable_end_invariance(spec: str, M) -> None:
    if is_projective(M):
        return
    a, b = stable_end_dim(M), stable_end_dim(syzygy(M))
    assert a == b, f"{spec}: stable End {a} but {b} after Omega"


ALL_CHECKS = (check_socle_containment, check_hom_counting, check_syzygy_dimension, check_stable_end_invariance)
