import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from isonodal.graph import (
    attach_k_leaf_pair,
    build_graph,
    insert_pair_edge,
    laplacian,
    path_graph,
    random_connected_graph,
)
from isonodal.spectra import (
    SpectrumError,
    eig_sym,
    genericity_flags,
    graph_spectrum,
    is_isospectral,
    leaf_symmetry_classify,
    pair_vector,
    rank_one_check,
    split_spectrum,
    symmetric_basis,
)


def closed_form_2x2(M):
    a, b, c = M[0, 0], M[0, 1], M[1, 1]
    r = math.hypot((a - c) / 2, b)
    return np.array([(a + c) / 2 - r, (a + c) / 2 + r])


def _det3(B):
    return (B[0, 0] * (B[1, 1] * B[2, 2] - B[1, 2] * B[2, 1])
            - B[0, 1] * (B[1, 0] * B[2, 2] - B[1, 2] * B[2, 0])
            + B[0, 2] * (B[1, 0] * B[2, 1] - B[1, 1] * B[2, 0]))


def closed_form_3x3(M):
    """Trigonometric solution of the characteristic cubic, in 50-digit arithmetic.

    Extra precision keeps the formula accurate near double roots, where
    acos is ill-conditioned.
    """
    with mpmath.workdps(50):
        A = mpmath.matrix([[mpmath.mpf(float(x)) for x in row] for row in M])
        q = (A[0, 0] + A[1, 1] + A[2, 2]) / 3
        p1 = A[0, 1] ** 2 + A[0, 2] ** 2 + A[1, 2] ** 2
        p2 = sum((A[i, i] - q) ** 2 for i in range(3)) + 2 * p1
        if p2 == 0:
            return np.full(3, float(q))
        p = mpmath.sqrt(p2 / 6)
        B = (A - q * mpmath.eye(3)) / p
        r = max(min(_det3(B) / 2, 1), -1)
        phi = mpmath.acos(r) / 3
        e1 = q + 2 * p * mpmath.cos(phi)
        e3 = q + 2 * p * mpmath.cos(phi + 2 * mpmath.pi / 3)
        return np.sort([float(e1), float(3 * q - e1 - e3), float(e3)])


def _sym(n):
    return arrays(np.float64, (n, n), elements=st.floats(-10, 10)).map(lambda A: (A + A.T) / 2)


@pytest.mark.parametrize("G,expected", [
    (path_graph(2), [0, 2]),
    (path_graph(3), [0, 1, 3]),
    (build_graph(4, [(0, 1), (0, 2), (0, 3)]), [0, 1, 1, 4]),
])
def test_eig_sym_examples(G, expected):
    assert np.allclose(graph_spectrum(G).eigenvalues, expected, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(_sym(2))
def test_agrees_with_2x2_closed_form(M):
    assert np.allclose(eig_sym(M).eigenvalues, closed_form_2x2(M), atol=1e-12 * max(1, np.abs(M).max()))


@settings(max_examples=100, deadline=None)
@given(_sym(3))
def test_agrees_with_3x3_closed_form(M):
    ref = closed_form_3x3(M)
    assert np.allclose(eig_sym(M).eigenvalues, ref, atol=1e-12 * max(1, np.abs(M).max()))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**31))
def test_reconstruction_and_orthonormality(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    M = A + A.T
    S = eig_sym(M)
    Q, lam = S.eigenvectors, S.eigenvalues
    assert np.all(np.diff(lam) >= 0)
    assert np.max(np.abs(Q.T @ Q - np.eye(n))) < 1e-12
    assert np.max(np.abs(M - Q @ np.diag(lam) @ Q.T)) <= 1e-12 * np.abs(M).max()
    assert np.allclose(lam, np.linalg.eigvalsh(M), atol=1e-12 * np.abs(M).max())


def test_rejects_nonsymmetric():
    with pytest.raises(SpectrumError):
        eig_sym([[1.0, 2.0], [0.0, 1.0]])


def test_genericity_examples(k13, paw, p3):
    assert genericity_flags(graph_spectrum(k13)).indices() == [1, 4]
    S = graph_spectrum(paw)
    f3 = S.vector(3)
    assert abs(S.eigenvalues[2] - 3) < 1e-12
    assert np.allclose(np.abs(f3), np.abs([0, 1, -1, 0]) / math.sqrt(2), atol=1e-12)
    assert genericity_flags(S).indices() == [1, 4]
    # the lambda=1 vector of P3 is (1, 0, -1): only indices 1 and 3 are generic
    assert genericity_flags(graph_spectrum(p3)).indices() == [1, 3]


def test_isospectral_examples(k13, paw):
    S = graph_spectrum(k13)
    assert is_isospectral(S, S)
    assert not is_isospectral(S, graph_spectrum(paw))
    with pytest.raises(SpectrumError):
        is_isospectral(S, graph_spectrum(path_graph(3)))


def test_leaf_symmetry_examples(k13, k13_pair):
    S = graph_spectrum(k13)
    labels = leaf_symmetry_classify(k13, k13_pair, S)
    assert labels[0] == "even" and labels[3] == "even"
    assert sorted(labels[1:3]) == ["even", "odd"]
    g = pair_vector(4, k13_pair, 1)
    assert np.allclose(laplacian(k13) @ g, g)
    even, odd = split_spectrum(k13, k13_pair, S)
    assert np.allclose(odd, [1.0])


def test_rank_one_check_examples(k13, k13_pair):
    H = insert_pair_edge(k13, k13_pair, 1)
    assert rank_one_check(k13, H, k13_pair, 1)
    assert not rank_one_check(k13, k13, k13_pair, 1)
    wrong = build_graph(4, [(0, 1), (0, 2), (0, 3), (1, 3)])
    assert not rank_one_check(k13, wrong, k13_pair, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 3), st.integers(1, 2), st.integers(0, 2**31))
def test_even_vectors_survive_insertion(n, extra, k, seed):
    rng = np.random.default_rng(seed)
    G = random_connected_graph(rng, n, extra)
    G, pair = attach_k_leaf_pair(G, int(rng.integers(n)), k)
    j = int(rng.integers(1, k + 1))
    H = insert_pair_edge(G, pair, j)
    S = graph_spectrum(G)
    labels = leaf_symmetry_classify(G, pair, S)
    assert "mixed" not in labels
    vecs = symmetric_basis(S, pair.swap(G.V))
    LH = laplacian(H)
    off_arms = [v for v in range(G.V) if v not in pair.vertices]
    for i, lab in enumerate(labels):
        f = vecs[:, i]
        if lab == "even":
            assert np.max(np.abs(LH @ f - S.eigenvalues[i] * f)) < 1e-10
        else:
            assert np.max(np.abs(f[off_arms]), initial=0) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 4), st.integers(0, 2**31))
def test_single_zero_eigenvalue_with_constant_vector(n, extra, seed):
    G = random_connected_graph(np.random.default_rng(seed), n, extra)
    S = graph_spectrum(G)
    assert abs(S.eigenvalues[0]) < 1e-12
    if n > 1:
        assert S.eigenvalues[1] > 1e-8
    assert np.allclose(S.vector(1), 1 / math.sqrt(n), atol=1e-12)
