import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from scma.factor_graph import (
    FactorGraph,
    LayerSignature,
    MappingMatrix,
    build_full_graph,
    build_subgraph,
    mapping_matrix,
    overlap,
)


def test_full_graph_4_2():
    g = build_full_graph(4, 2)
    assert g.n_layers == 6
    assert tuple(g.degrees) == (3, 3, 3, 3)
    assert g.overloading == pytest.approx(1.5)
    # columns enumerate the 2-subsets of {0..3} lexicographically
    expected = list(itertools.combinations(range(4), 2))
    got = [tuple(np.flatnonzero(g.matrix[:, j])) for j in range(6)]
    assert got == expected


def test_full_graph_2_1():
    g = build_full_graph(2, 1)
    assert g.n_layers == 2
    assert np.array_equal(g.matrix, np.eye(2, dtype=np.uint8))
    assert g.overloading == pytest.approx(1.0)


def test_full_graph_6_2():
    g = build_full_graph(6, 2)
    assert g.n_layers == 15
    assert tuple(g.degrees) == (5,) * 6
    assert g.overloading == pytest.approx(2.5)


@pytest.mark.parametrize("k", range(2, 9))
def test_full_graph_identities_exhaustive(k):
    for n in range(1, k):
        g = build_full_graph(k, n)
        j = math.comb(k, n)
        df = math.comb(k - 1, n - 1)
        assert g.n_layers == j
        assert set(g.degrees) == {df}
        assert df * k == j * n  # d_f = J*N/K without rational arithmetic


@pytest.mark.parametrize("k", range(2, 9))
def test_overlap_bounds_exhaustive(k):
    for n in range(1, k):
        g = build_full_graph(k, n)
        lo, hi = max(0, 2 * n - k), n - 1
        for a, b in itertools.combinations(range(g.n_layers), 2):
            l = overlap(g.signature(a), g.signature(b))
            assert lo <= l <= hi


def test_overlap_examples():
    f = LayerSignature((1, 1, 0, 0), 0)
    g = LayerSignature((0, 0, 1, 1), 1)
    h = LayerSignature((1, 0, 1, 0), 2)
    assert overlap(f, g) == 0
    assert overlap(f, h) == 1


def test_overlap_k4_n3_always_two():
    g = build_full_graph(4, 3)
    for a, b in itertools.combinations(range(4), 2):
        assert overlap(g.signature(a), g.signature(b)) == 2


def test_overlap_identical_signatures_rejected():
    f = LayerSignature((1, 1, 0, 0), 0)
    g = LayerSignature((1, 1, 0, 0), 1)
    with pytest.raises(ValueError):
        overlap(f, g)


def test_overlap_mismatched_length_rejected():
    f = LayerSignature((1, 1, 0, 0), 0)
    g = LayerSignature((1, 0, 1), 1)
    with pytest.raises(ValueError):
        overlap(f, g)


def test_mapping_matrix_examples():
    v = mapping_matrix(LayerSignature((1, 0, 1, 0), 0))
    assert np.array_equal(v.matrix, [[1, 0], [0, 0], [0, 1], [0, 0]])
    v = mapping_matrix(LayerSignature((0, 0, 1, 1), 0))
    assert np.array_equal(v.matrix, [[0, 0], [0, 0], [1, 0], [0, 1]])


def test_mapping_matrix_orthonormal_columns():
    for k in range(2, 7):
        for n in range(1, k):
            g = build_full_graph(k, n)
            for j in range(g.n_layers):
                v = mapping_matrix(g.signature(j)).matrix.astype(float)
                assert np.array_equal(v.T @ v, np.eye(n))


def test_mapping_matrix_places_support():
    for k in range(2, 7):
        for n in range(1, k):
            g = build_full_graph(k, n)
            for j in range(g.n_layers):
                sig = g.signature(j)
                v = mapping_matrix(sig).matrix
                c = np.arange(1, n + 1, dtype=float)
                placed = v @ c
                assert set(np.flatnonzero(placed)) == set(sig.support)


def test_subgraph_full_load_equals_full_graph():
    assert np.array_equal(build_subgraph(4, 2, 6).matrix, build_full_graph(4, 2).matrix)


def test_subgraph_two_layers_disjoint():
    g = build_subgraph(4, 2, 2)
    assert overlap(g.signature(0), g.signature(1)) == 0
    assert max(g.degrees) <= 1


def test_subgraph_four_layers_balanced():
    g = build_subgraph(4, 2, 4)
    assert max(g.degrees) == 2


def test_subgraph_rejects_overfull():
    with pytest.raises(ValueError):
        build_subgraph(4, 2, 7)


def test_subgraph_deterministic():
    for _ in range(3):
        a = build_subgraph(6, 3, 11)
        b = build_subgraph(6, 3, 11)
        assert np.array_equal(a.matrix, b.matrix)


@given(st.integers(2, 8), st.data())
def test_subgraph_columns_are_distinct_full_columns(k, data):
    n = data.draw(st.integers(1, k - 1))
    j = data.draw(st.integers(1, math.comb(k, n)))
    g = build_subgraph(k, n, j)
    cols = {tuple(g.matrix[:, i]) for i in range(j)}
    assert len(cols) == j
    assert all(sum(c) == n for c in cols)


def test_factor_graph_rejects_bad_columns():
    with pytest.raises(ValueError):
        FactorGraph(np.array([[1, 1], [1, 1], [0, 0]], dtype=np.uint8), n_active=2)
    with pytest.raises(ValueError):  # wrong column weight
        FactorGraph(np.array([[1, 0], [1, 1], [1, 0]], dtype=np.uint8), n_active=2)


def test_signature_invariants():
    with pytest.raises(ValueError):
        LayerSignature((1, 1, 1, 1), 0)  # N = K not allowed
    with pytest.raises(ValueError):
        LayerSignature((0, 0, 0, 0), 0)
    with pytest.raises(ValueError):
        LayerSignature((2, 0, 1, 0), 0)


def test_mapping_matrix_validates_shape():
    with pytest.raises(ValueError):
        MappingMatrix(np.array([[1, 1], [0, 0]], dtype=np.uint8))


def test_full_graph_parameter_errors():
    with pytest.raises(ValueError):
        build_full_graph(4, 0)
    with pytest.raises(ValueError):
        build_full_graph(4, 4)
    with pytest.raises(ValueError):
        build_full_graph(17, 2)
