import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brauer_udr.coeff import in_row_space, matmul, rank, row_basis
from brauer_udr.presentation import InvalidE, NotComposable, build_presentation, compute_path_basis
from brauer_udr.repbuild import build_projective

P = 3  # field size for the span computations below; relations have +-1 coefficients


def walks(q, start, max_len):
    """Every path from ``start`` of length <= max_len, composition order."""
    out = [()]
    frontier = [((), start)]
    for _ in range(max_len):
        nxt = []
        for path, v in frontier:
            for arr in q.arrows:
                if arr.source == v:
                    np_ = (arr.name,) + path
                    out.append(np_)
                    nxt.append((np_, arr.target))
        frontier = nxt
    return out


def ideal_oracle(q, i, max_len):
    """Paths from i (up to max_len) and a row basis of the two-sided ideal
    intersected with their span; longer paths are treated as zero."""
    paths = walks(q, i, max_len)
    idx = {p: k for k, p in enumerate(paths)}

    def end(path):
        return q.path_target(path, i)

    rows = []
    for v in paths:
        s = end(v)
        for rel in q.relations:
            if q.path_source(rel.lhs) != s:
                continue
            shortest = min(len(rel.lhs), len(rel.rhs) if rel.rhs else 10**6)
            for u in walks(q, q.path_target(rel.lhs), max_len - len(v) - shortest):
                row = np.zeros(len(paths), dtype=np.int64)
                a = u + rel.lhs + v
                if a in idx:
                    row[idx[a]] += 1
                if rel.rhs is not None:
                    b = u + rel.rhs + v
                    if b in idx:
                        row[idx[b]] -= 1
                if np.any(row % P):
                    rows.append(row % P)
    return paths, idx, row_basis(np.array(rows), P)


@pytest.mark.parametrize("e", [1, 2, 3, 4])
def test_normal_forms_against_ideal_span(e):
    q = build_presentation(e)
    pb = compute_path_basis(q)
    for i in q.vertices:
        paths, idx, I = ideal_oracle(q, i, 2 * e + 2)
        assert len(paths) - I.shape[0] == pb.dim(i)
        for path in paths:
            nf = q.normal_form(path, i)
            diff = np.zeros(len(paths), dtype=np.int64)
            diff[idx[path]] = 1
            if nf is not None:
                diff[idx[q.canonical_path(nf)]] -= 1
            assert in_row_space(I, diff % P, P), (path, nf)


def test_relations_e3():
    rels = {str(r) for r in build_presentation(3).relations}
    assert "a2a1a3a2a1a3 = dd" in rels
    assert "a3d = 0" in rels
    assert "da2 = 0" in rels


def test_relations_e1():
    rels = {str(r) for r in build_presentation(1).relations}
    assert rels == {"a1d = 0", "da1 = 0", "a1a1 = dd"}


def test_arrows_e2():
    q = build_presentation(2)
    assert {(a.name, a.source, a.target) for a in q.arrows} == {("a1", 1, 2), ("a2", 2, 1), ("d", 2, 2)}


@pytest.mark.parametrize("e", range(1, 7))
def test_arrow_count(e):
    assert len(build_presentation(e).arrows) == (2 if e == 1 else e + 1)


def test_normal_form_examples():
    q = build_presentation(3)
    assert q.normal_form(("d", "d")) == q.socle_form(3)
    assert q.normal_form(q.cycle(3) * 2) == q.socle_form(3)
    assert q.normal_form(("a3", "d")) is None
    assert q.normal_form((), 2) == (2, 0, "a")
    assert q.normal_form(("d", "d", "d")) is None


def test_path_basis_dims():
    assert compute_path_basis(build_presentation(2)).total_dimension == 11
    pb = compute_path_basis(build_presentation(3))
    assert [pb.dim(i) for i in (1, 2, 3)] == [7, 7, 8]
    assert compute_path_basis(build_presentation(1)).total_dimension == 4


@pytest.mark.parametrize("e", range(1, 7))
def test_projective_shape(e):
    q = build_presentation(e)
    pb = compute_path_basis(q)
    for i in q.vertices:
        assert pb.dim(i) == (2 * e + 2 if i == e else 2 * e + 1)
        for path in walks(q, i, 2 * e + 3):
            if len(path) > 2 * e + 1:
                assert q.normal_form(path, i) is None


def _radical_layers(M):
    """Dimensions of rad^k M for k = 0, 1, ... until zero."""
    arrows = [M.global_matrix(a.name) for a in M.quiver.arrows]
    span = np.eye(M.total_dim, dtype=np.int64)
    dims = [M.total_dim]
    while span.shape[0]:
        imgs = [matmul(A, span.T, M.p).T for A in arrows]
        span = row_basis(np.vstack(imgs), M.p)
        dims.append(span.shape[0])
    return dims


@pytest.mark.parametrize("e", range(1, 7))
def test_loewy_length_and_socle(e):
    q = build_presentation(e)
    for i in q.vertices:
        Pi = build_projective(q, 5, i)
        layers = _radical_layers(Pi)
        assert len(layers) - 1 == 2 * e + 1  # rad^{2e+1} P_i = 0, rad^{2e} P_i != 0
        # socle: common kernel of all arrows is one-dimensional, at vertex i
        K = np.vstack([Pi.global_matrix(a.name) for a in q.arrows])
        assert Pi.total_dim - rank(K, 5) == 1
        soc = [v for v in q.vertices if Pi.dim(v) and rank(np.vstack([Pi.global_matrix(a.name)[:, Pi.offsets[v - 1]:Pi.offsets[v - 1] + Pi.dim(v)] for a in q.arrows]), 5) < Pi.dim(v)]
        assert soc == [i]


@given(st.integers(1, 5), st.data())
def test_normal_form_confluent(e, data):
    q = build_presentation(e)
    i = data.draw(st.integers(1, e))
    path = data.draw(st.sampled_from(walks(q, i, 2 * e + 2)))
    nf = q.normal_form(path, i)
    if nf is not None:
        assert q.normal_form(q.canonical_path(nf), i) == nf


def test_bad_inputs():
    with pytest.raises(InvalidE):
        build_presentation(0)
    with pytest.raises(NotComposable):
        build_presentation(3).normal_form(("a1", "a1"))
