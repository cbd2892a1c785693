import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isonodal.metric import build_metric, glue_leaf_pair, star_metric, two_pair_graph
from isonodal.nodal import NonGenericError
from isonodal.qnodal import (
    QNodalProfile,
    check_q_bounds,
    edge_zero_count,
    interlacing_check,
    odd_modes_vanish_off_leaves,
    q_flip_count,
    q_nodal_count,
    q_profiles,
    sampled_nodal_count,
    verify_theorem3,
)
from isonodal.qspectra import EdgeWave, secular_spectrum, spectrum_up_to


def interval():
    return build_metric(2, [(0, 1)], [1.0])


def test_edge_zero_count_examples():
    # cos(kx) is sin(kx + pi/2): mode n of the unit interval has n - 1 interior zeros
    for n in range(2, 12):
        assert edge_zero_count(EdgeWave(0, 1.0, math.pi / 2), (n - 1) * math.pi, 1.0 - 1e-6) == n - 1
    assert edge_zero_count(EdgeWave(0, 1.0, math.pi / 2), 0.0, 1.0) == 0
    k = 3 * math.pi / 4
    assert edge_zero_count(EdgeWave(0, 2.0, math.pi / 2), k, 1.0) == 1
    assert edge_zero_count(EdgeWave(0, 1.0, 3 * math.pi / 2), k, 1.0) == 1
    with pytest.raises(NonGenericError):
        edge_zero_count(EdgeWave(0, 1.0, 0.0), 2.0, 1.0)
    with pytest.raises(NonGenericError):
        edge_zero_count(EdgeWave(0, 1.0, math.pi / 2), math.pi / 2, 1.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 30), st.floats(0, 2 * math.pi, exclude_max=True), st.floats(0.1, 3))
def test_edge_zero_count_matches_sampling(k, phase, length):
    w = EdgeWave(0, 1.0, phase)
    ends = (math.sin(phase), math.sin(k * length + phase))
    if min(abs(e) for e in ends) < 1e-3:
        return
    x = np.linspace(0, length, 20001)
    s = np.sign(np.sin(k * x + phase))
    assert edge_zero_count(w, k, length) == int(np.sum(s[:-1] != s[1:]))


def test_interval_sturm():
    eps = secular_spectrum(interval(), 14.5 * math.pi)
    for n, ep in enumerate(eps, start=1):
        assert q_flip_count(interval(), ep) == n - 1
        assert q_nodal_count(interval(), ep) == n
        assert sampled_nodal_count(interval(), ep) == n


def test_non_generic_rejected():
    G = star_metric([1, 1, 1])
    ep = next(ep for ep in secular_spectrum(G, 3.0) if ep.multiplicity == 2)
    with pytest.raises(NonGenericError):
        q_flip_count(G, ep)
    with pytest.raises(NonGenericError):
        q_nodal_count(G, ep)


def _negated(ep):
    return replace(ep, coeffs=-ep.coeffs, vertex_values=-ep.vertex_values)


GRAPHS = [
    star_metric([1, 1, 1.7]),
    two_pair_graph(),
    glue_leaf_pair(two_pair_graph(), 0, 0.4142),
    glue_leaf_pair(two_pair_graph(), 1, 0.4142),
    build_metric(4, [(0, 1), (1, 2), (2, 0), (2, 3), (1, 3)], [1.0, 0.6, 1.3, 0.45, 0.8]),
]


@pytest.mark.parametrize("G", GRAPHS)
def test_exact_matches_sampling_and_bounds(G):
    eps, _ = spectrum_up_to(G, 20)
    P = q_profiles(G, eps, 20)
    for ep in eps:
        if ep.generic:
            nu = q_nodal_count(G, ep)
            assert nu == sampled_nodal_count(G, ep)
            assert nu == q_nodal_count(G, _negated(ep))
            assert q_flip_count(G, ep) == q_flip_count(G, _negated(ep))
    assert all(ok for _, ok in check_q_bounds(G, P))


@settings(max_examples=6, deadline=None)
@given(st.lists(st.floats(0.3, 2.0), min_size=3, max_size=5), st.integers(0, 2**31))
def test_metric_tree_sturm(lengths, seed):
    rng = np.random.default_rng(seed)
    n = len(lengths) + 1
    edges = [(int(rng.integers(v)), v) for v in range(1, n)]
    G = build_metric(n, edges, lengths)
    eps, _ = spectrum_up_to(G, 12)
    for p in q_profiles(G, eps, 12):
        if p.generic:
            assert p.nu == p.n and p.mu == p.n - 1


def test_profile_row_tagged_quantum():
    row = QNodalProfile(2, 1.5, True, 1, 2).row()
    assert row["quantum"] is True and row["lambda"] == 2.25


def test_gluing_adds_no_zeros_at_even_modes():
    G = two_pair_graph()
    H = glue_leaf_pair(G, 0, 0.4142)
    hk = secular_spectrum(H, 12.0)
    for ep in secular_spectrum(G, 11.5):
        if not ep.generic or ep.k == 0:
            continue
        other = min(hk, key=lambda e: abs(e.k - ep.k))
        assert abs(other.k - ep.k) < 1e-8
        assert q_flip_count(H, other) == q_flip_count(G, ep)
        assert q_nodal_count(H, other) - q_nodal_count(G, ep) in (0, -1)


def test_theorem3_two_pair_graph():
    G = two_pair_graph()
    rep = verify_theorem3(G, G, 0, 1, 0.4142, 20)
    assert rep.verdict == "pass", rep.failures()
    assert any("truncated" in n for n in rep.notes)


def test_theorem3_same_pair_trivial():
    G = two_pair_graph()
    assert verify_theorem3(G, G, 0, 0, 0.4142, 12).verdict == "pass"


def test_theorem3_inconclusive_on_perturbed_spine():
    rep = verify_theorem3(two_pair_graph(), two_pair_graph(spine=1.35), 0, 1, 0.4142, 12)
    assert rep.verdict == "inconclusive"


def test_theorem3_nudges_glue_point():
    # at l1 = 0.5 the mode with k = pi on the unit leaves vanishes at the glue points
    G = two_pair_graph()
    rep = verify_theorem3(G, G, 0, 1, 0.5, 12)
    assert rep.verdict == "pass"
    assert rep.inputs["nudges"] >= 1 and rep.inputs["l1_used"] > 0.5


def test_odd_modes_vanish():
    G = two_pair_graph()
    eps = secular_spectrum(G, 12.0)
    assert odd_modes_vanish_off_leaves(G, 0, eps) < 1e-8
    assert odd_modes_vanish_off_leaves(glue_leaf_pair(G, 0, 0.4142), 0,
                                       secular_spectrum(glue_leaf_pair(G, 0, 0.4142), 12.0)) < 1e-8


def test_interlacing_examples():
    rep = interlacing_check(1.0, 0.4142, 30.0)
    assert rep.verdict == "pass" and rep.inputs["indices_checked"] == 9
    assert interlacing_check(1.0, 0.5, 30.0).verdict == "pass"
    empty = interlacing_check(1.0, 0.4142, 1.0)
    assert empty.verdict == "pass" and empty.inputs["indices_checked"] == 0
    tie = interlacing_check(1.0, 2 / 3, 30.0)
    assert tie.verdict == "fail" and "non-strict" in tie.notes[0]
    with pytest.raises(ValueError):
        interlacing_check(1.0, 1.0, 30.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 0.99))
def test_interlacing_generic_fractions(frac):
    # ties need a rational relation between l1 and l - l1; skip fractions close to simple rationals
    rep = interlacing_check(1.0, frac, 20.0)
    if rep.verdict == "fail":
        from fractions import Fraction
        assert Fraction(frac).limit_denominator(60) == pytest.approx(frac, abs=1e-9)
