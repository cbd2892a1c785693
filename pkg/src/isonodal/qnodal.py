"""Flip and nodal counts for quantum graphs, and the gluing theorem harnesses.

Zero counts are exact: on an edge ``psi(x) = R sin(kx + phase)`` vanishes at
``x = (m pi - phase)/k`` and we count the integers ``m`` that land inside
``(0, l)``.  Nodal domains are then assembled by union-find over vertices;
a sampled sign pattern is kept only as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import UnionFind
from .metric import MetricGraph, glue_leaf_pair
from .nodal import NonGenericError
from .qspectra import (
    DEFAULT_GRID_DENSITY,
    EdgeWave,
    QEigenpair,
    odd_leaf_spectrum,
    positions,
    spectrum_k,
    spectrum_up_to,
    symmetric_modes,
)
from .report import VerificationReport

ENDPOINT_TOL = 1e-9


def edge_zero_count(w: EdgeWave, k: float, length: float, tol: float = ENDPOINT_TOL) -> int:
    """Number of zeros of ``w`` strictly inside ``(0, length)``."""
    if k == 0:
        if abs(math.sin(w.phase)) <= tol:
            raise NonGenericError("constant wave is zero")
        return 0
    end_phase = k * length + w.phase
    if abs(math.sin(w.phase)) <= tol or abs(math.sin(end_phase)) <= tol:
        raise NonGenericError(f"edge {w.edge}: wave vanishes at an endpoint")
    return int(math.floor(end_phase / math.pi) - math.floor(w.phase / math.pi))


def _require_generic(ep: QEigenpair):
    if not ep.generic:
        raise NonGenericError(f"eigenpair at k={ep.k:.12g} is not generic")


def zero_counts(G: MetricGraph, ep: QEigenpair) -> list[int]:
    return [edge_zero_count(w, ep.k, G.lengths[w.edge]) for w in ep.edge_waves]


def q_flip_count(G: MetricGraph, ep: QEigenpair) -> int:
    _require_generic(ep)
    return sum(zero_counts(G, ep))


def q_nodal_count(G: MetricGraph, ep: QEigenpair) -> int:
    """Connected components of the graph with the zero set removed."""
    _require_generic(ep)
    uf = UnionFind(G.V)
    interior = 0
    for (i, j), z in zip(G.edges, zero_counts(G, ep)):
        if z == 0:
            uf.union(i, j)
        else:
            interior += z - 1
    return len(uf.groups()) + interior


def sampled_nodal_count(G: MetricGraph, ep: QEigenpair, points_per_edge: int = 1000) -> int:
    """Sign-component count from a dense sample of every edge (oracle)."""
    uf = UnionFind(G.V + G.E * (points_per_edge + 1))
    base = G.V
    for e, (i, j) in enumerate(G.edges):
        x = np.linspace(0.0, G.lengths[e], points_per_edge + 1)
        vals = ep.evaluate(e, x)
        idx = base + e * (points_per_edge + 1) + np.arange(points_per_edge + 1)
        for a in np.flatnonzero(vals[:-1] * vals[1:] > 0):
            uf.union(int(idx[a]), int(idx[a + 1]))
        uf.union(i, int(idx[0]))
        uf.union(j, int(idx[-1]))
    used = set(range(G.V))
    for e in range(G.E):
        x = np.linspace(0.0, G.lengths[e], points_per_edge + 1)
        vals = ep.evaluate(e, x)
        idx = base + e * (points_per_edge + 1) + np.arange(points_per_edge + 1)
        used.update(int(n) for n, v in zip(idx, vals) if v != 0)
    return len({uf.find(n) for n in used})


@dataclass(frozen=True)
class QNodalProfile:
    n: int
    k: float
    generic: bool
    mu: int | None = None
    nu: int | None = None

    @property
    def eigenvalue(self) -> float:
        return self.k * self.k

    def row(self) -> dict:
        return {"n": self.n, "lambda": self.eigenvalue, "generic": self.generic,
                "mu": self.mu, "nu": self.nu, "quantum": True}


def q_profiles(G: MetricGraph, eigenpairs, n_max: int | None = None) -> list[QNodalProfile]:
    out = []
    for n, ep in positions(eigenpairs, n_max):
        if ep.generic:
            out.append(QNodalProfile(n, ep.k, True, q_flip_count(G, ep), q_nodal_count(G, ep)))
        else:
            out.append(QNodalProfile(n, ep.k, False))
    return out


def check_q_bounds(G: MetricGraph, profiles) -> list[tuple[int, bool]]:
    b = G.betti()
    out = []
    for p in profiles:
        if p.generic:
            n = p.n
            ok = n - b <= p.nu <= n and n - 1 <= p.mu <= n - 1 + b
            if b == 0:
                ok = ok and p.nu == n and p.mu == n - 1
            out.append((n, ok))
    return out


def q_sequences_match(p1, p2) -> bool:
    if len(p1) != len(p2):
        return False
    if [p.generic for p in p1] != [p.generic for p in p2]:
        return False
    return all(a.mu == b.mu and a.nu == b.nu for a, b in zip(p1, p2) if a.generic)


def _match_attr(p1, p2, attr):
    if [p.generic for p in p1] != [p.generic for p in p2]:
        return False
    return all(getattr(a, attr) == getattr(b, attr) for a, b in zip(p1, p2) if a.generic)


# --- leaf geometry helpers ------------------------------------------------

def _from_leaf_end(G: MetricGraph, pair, end: int, edge: int, s):
    """Edge coordinate of the point at distance ``s`` from leaf end ``end``."""
    i, j = G.edges[edge]
    return np.asarray(s) if i == end else G.lengths[edge] - np.asarray(s)


def value_at_glue_points(G: MetricGraph, pair, ep: QEigenpair, l1: float) -> tuple[float, float]:
    """Eigenfunction values at distance ``l1`` from the root on both leaves."""
    out = []
    for end, (e,) in ((pair.end_plus, pair.arm_plus), (pair.end_minus, pair.arm_minus)):
        s = G.lengths[e] - l1
        out.append(float(ep.evaluate(e, _from_leaf_end(G, pair, end, e, s))))
    return out[0], out[1]


def choose_glue_distance(graphs, pair_indices, l1: float, eigenpairs_per_graph, tol: float = 1e-6,
                         max_nudges: int = 50) -> tuple[float, int]:
    """First distance ``l1 + m*0.001*l`` where no generic eigenfunction vanishes at the glue points."""
    length = graphs[0].lengths[graphs[0].leaf_pairs[pair_indices[0]].arm_plus[0]]
    for m in range(max_nudges + 1):
        cand = l1 + m * 0.001 * length
        if not 0 < cand < length:
            break
        ok = True
        for G, idx, eps in zip(graphs, pair_indices, eigenpairs_per_graph):
            pair = G.leaf_pairs[idx]
            for ep in eps:
                if ep.generic:
                    vp, vm = value_at_glue_points(G, pair, ep, cand)
                    if min(abs(vp), abs(vm)) <= tol * np.max(np.abs(ep.vertex_values)):
                        ok = False
        if ok:
            return cand, m
    raise ValueError("no admissible glue distance found")


def _leaf_samples(G, pair, ep, count=41):
    vals = []
    for end, arm in ((pair.end_plus, pair.arm_plus), (pair.end_minus, pair.arm_minus)):
        (e,) = arm
        s = np.linspace(0.0, G.lengths[e], count)
        vals.append(ep.evaluate(e, _from_leaf_end(G, pair, end, e, s)))
    return np.concatenate(vals)


def verify_theorem3(G1: MetricGraph, G2: MetricGraph, pair1: int, pair2: int, l1: float,
                    n_max: int = 20, grid_density: float = DEFAULT_GRID_DENSITY,
                    k_max: float | None = None) -> VerificationReport:
    """Gluing l-leaf-pairs of isospectral metric graphs keeps spectra and nodal data equal.

    ``pair1``/``pair2`` index ``G1.leaf_pairs``/``G2.leaf_pairs``.  Only the
    first ``n_max`` spectral positions are compared.
    """
    rep = VerificationReport("theorem3", {"G1": G1.to_dict(), "G2": G2.to_dict(), "pair1": pair1,
                                          "pair2": pair2, "l1_requested": l1, "n_max": n_max})
    rep.notes.append(f"comparison truncated to the first {n_max} spectral positions")
    eps1, km1 = spectrum_up_to(G1, n_max, grid_density, k_max)
    eps2, km2 = spectrum_up_to(G2, n_max, grid_density, k_max)
    kmax = max(km1, km2)
    ktol = 1e-6 * kmax
    k1, k2 = spectrum_k(eps1, n_max), spectrum_k(eps2, n_max)
    gap = float(np.max(np.abs(k1 - k2)))
    if not rep.require("seeds isospectral (first n_max)", gap <= ktol, gap, ktol):
        return rep
    P1, P2 = q_profiles(G1, eps1, n_max), q_profiles(G2, eps2, n_max)
    if not rep.require("seed generic flip/nodal sequences match", q_sequences_match(P1, P2)):
        return rep

    lp1, lp2 = G1.leaf_pairs[pair1], G2.leaf_pairs[pair2]
    gen1 = [ep for _, ep in positions(eps1, n_max)]
    gen2 = [ep for _, ep in positions(eps2, n_max)]
    l1_used, nudges = choose_glue_distance((G1, G2), (pair1, pair2), l1, (gen1, gen2))
    rep.inputs["l1_used"] = l1_used
    rep.inputs["nudges"] = nudges

    # leaf waves of generic eigenfunctions at shared positions are proportional
    worst_ratio = 0.0
    for (n, a), (_, b) in zip(positions(eps1, n_max), positions(eps2, n_max)):
        if a.generic and b.generic and a.k > 0:
            psi, phi = _leaf_samples(G1, lp1, a), _leaf_samples(G2, lp2, b)
            c = float(psi @ phi / (phi @ phi))
            worst_ratio = max(worst_ratio, float(np.max(np.abs(psi - c * phi)) / np.max(np.abs(psi))))
    rep.check("leaf ratio psi/phi constant on the leaves", worst_ratio <= 1e-7, worst_ratio, 1e-7)

    H1 = glue_leaf_pair(G1, pair1, l1_used)
    H2 = glue_leaf_pair(G2, pair2, l1_used)
    heps1, hk1 = spectrum_up_to(H1, n_max, grid_density, kmax)
    heps2, hk2 = spectrum_up_to(H2, n_max, grid_density, kmax)
    kb1, kb2 = spectrum_k(heps1, n_max), spectrum_k(heps2, n_max)
    gap_bar = float(np.max(np.abs(kb1 - kb2)))
    rep.inputs["k_bar"] = kb1
    rep.check("(i) glued graphs isospectral (first n_max)", gap_bar <= ktol, gap_bar, ktol)
    Q1, Q2 = q_profiles(H1, heps1, n_max), q_profiles(H2, heps2, n_max)
    rep.inputs["mu_bar"] = [p.mu for p in Q1 if p.generic]
    rep.inputs["nu_bar"] = [p.nu for p in Q1 if p.generic]
    rep.inputs["generic_bar"] = [p.n for p in Q1 if p.generic]
    rep.check("(ii) generic flip counts match", _match_attr(Q1, Q2, "mu"))
    rep.check("(iii) generic nodal counts match", _match_attr(Q1, Q2, "nu"))

    for name, G, H, eps, heps in (("G1", G1, H1, eps1, heps1), ("G2", G2, H2, eps2, heps2)):
        kbar = np.array([ep.k for ep in heps])
        survive, flips_same, deltas = True, True, set()
        for ep in eps:
            if not ep.generic or ep.k > kbar[-1]:
                continue
            i = int(np.argmin(np.abs(kbar - ep.k)))
            if abs(kbar[i] - ep.k) > ktol:
                survive = False
                continue
            other = heps[i]
            if not other.generic:
                continue
            flips_same &= q_flip_count(G, ep) == q_flip_count(H, other)
            deltas.add(q_nodal_count(H, other) - q_nodal_count(G, ep))
        rep.check(f"{name}: generic eigenvalues persist after gluing", survive)
        rep.check(f"{name}: gluing adds no zeros", flips_same)
        rep.check(f"{name}: nodal change on gluing is 0 or -1", deltas <= {0, -1}, sorted(deltas))
    return rep


def odd_modes_vanish_off_leaves(G: MetricGraph, pair_index: int, eigenpairs) -> float:
    """Largest coefficient outside the leaf edges over all odd modes (relative)."""
    pair = G.leaf_pairs[pair_index]
    off = [e for e in range(G.E) if e not in pair.leaf_edges]
    worst = 0.0
    for ep in eigenpairs:
        if ep.k == 0:
            continue
        for label, c in symmetric_modes(G, pair, ep):
            if label == "odd" and off:
                worst = max(worst, float(np.max(np.abs(c[off])) / np.max(np.abs(c))))
    return worst


def interlacing_check(length: float, l1: float, k_max: float, rel_tol: float = 1e-12) -> VerificationReport:
    """Odd spectra before/after gluing strictly interlace (compared in lambda = k^2)."""
    if not 0 < l1 < length:
        raise ValueError("need 0 < l1 < length")
    rep = VerificationReport("interlacing", {"l": length, "l1": l1, "k_max": k_max})
    a = odd_leaf_spectrum(length, k_max=k_max + 2 * math.pi / length) ** 2
    b = odd_leaf_spectrum(length, l1, glued=True, k_max=k_max) ** 2
    ties = []
    for n, lb in enumerate(b):
        lo, hi = a[n], a[n + 1]
        lower_ok = lb - lo > rel_tol * lb
        upper_ok = hi - lb > rel_tol * lb
        if not (lower_ok and upper_ok):
            ties.append(n + 1)
        rep.check(f"n={n + 1}: {lo:.10g} < {lb:.10g} < {hi:.10g}", lower_ok and upper_ok,
                  {"lower": lo, "glued": lb, "upper": hi})
    rep.inputs["indices_checked"] = len(b)
    if ties:
        rep.notes.append(f"non-strict at indices {ties}")
    return rep
