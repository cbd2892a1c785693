"""Executable checks of the leaf-pair edge-insertion results on discrete graphs.

Every ``verify_*`` function recomputes everything it needs from the graphs it
is given and returns a :class:`VerificationReport`.  Preconditions of a claim
are checked and reported (an instance violating them is *inconclusive*), never
assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .graph import (
    ISOMORPHISM_CAP,
    DiscreteGraph,
    GraphError,
    LeafPairSpec,
    attach_k_leaf_pair,
    check_leaf_pair,
    find_leaf_pairs,
    insert_pair_edge,
    is_isomorphic,
    laplacian,
)
from .nodal import nodal_count, nodal_profiles, sequences_match
from .report import VerificationReport
from .spectra import (
    ISO_TOL,
    Spectrum,
    genericity_flags,
    graph_spectrum,
    is_isospectral,
    isospectral_gap,
    leaf_symmetry_classify,
    pair_vector,
    rank_one_check,
    symmetric_basis,
)
from .trees import nonisomorphic_trees

RATIO_TOL = 1e-8


def _multiset_equal(a, b, tol=ISO_TOL) -> bool:
    a, b = np.sort(np.asarray(a, float)), np.sort(np.asarray(b, float))
    if a.shape != b.shape:
        return False
    if a.size == 0:
        return True
    return bool(np.max(np.abs(a - b)) <= tol * (1.0 + np.max(np.abs(np.concatenate([a, b])))))


def _validate_pair(G, pair, label):
    problems = check_leaf_pair(G, pair)
    if problems:
        raise GraphError(f"invalid leaf pair in {label}: " + "; ".join(problems))


def _match_attr(p1, p2, attr) -> bool:
    if [p.generic for p in p1] != [p.generic for p in p2]:
        return False
    return all(getattr(a, attr) == getattr(b, attr) for a, b in zip(p1, p2) if a.generic)


def _graph_summary(G, pair=None) -> dict:
    out = G.to_dict()
    if pair is not None:
        out["leaf_pairs"] = [pair.to_dict()]
    return out


def _even_odd(G, pair, S):
    labels = leaf_symmetry_classify(G, pair, S)
    lam = S.eigenvalues
    even = [lam[i] for i, t in enumerate(labels) if t == "even"]
    odd = [lam[i] for i, t in enumerate(labels) if t == "odd"]
    return labels, np.array(even), np.array(odd)


def verify_lemma1(G1: DiscreteGraph, G2: DiscreteGraph, pair1: LeafPairSpec, pair2: LeafPairSpec,
                  j: int) -> VerificationReport:
    """Isospectrality before insertion holds exactly when it holds after."""
    _validate_pair(G1, pair1, "G1")
    _validate_pair(G2, pair2, "G2")
    if pair1.k != pair2.k or not 1 <= j <= pair1.k:
        raise GraphError("leaf pairs must share k and satisfy 1 <= j <= k")
    rep = VerificationReport("lemma1", {"G1": _graph_summary(G1, pair1), "G2": _graph_summary(G2, pair2),
                                        "k": pair1.k, "j": j})
    H1, H2 = insert_pair_edge(G1, pair1, j), insert_pair_edge(G2, pair2, j)
    S1, S2, T1, T2 = (graph_spectrum(G) for G in (G1, G2, H1, H2))

    rep.check("rank-one update G1", rank_one_check(G1, H1, pair1, j))
    rep.check("rank-one update G2", rank_one_check(G2, H2, pair2, j))

    same_size = G1.V == G2.V
    iso_before = same_size and is_isospectral(S1, S2)
    iso_after = same_size and is_isospectral(T1, T2)
    rep.inputs["isospectral_before"] = iso_before
    rep.inputs["isospectral_after"] = iso_after
    rep.check("isospectral before <=> after", iso_before == iso_after,
              {"before": iso_before, "after": iso_after})

    parts = {}
    for name, G, H, pair, S, T in (("G1", G1, H1, pair1, S1, T1), ("G2", G2, H2, pair2, S2, T2)):
        labels, even, odd = _even_odd(G, pair, S)
        labels_bar, even_bar, odd_bar = _even_odd(H, pair, T)
        parts[name] = (odd, odd_bar)
        rep.check(f"{name}: even/odd split complete",
                  "mixed" not in labels + labels_bar,
                  {"mixed": labels.count("mixed") + labels_bar.count("mixed")}, 0)
        rep.check(f"{name}: even spectrum preserved by insertion", _multiset_equal(even, even_bar),
                  {"even": even, "even_bar": even_bar})
        # even eigenvectors survive insertion unchanged
        vecs = symmetric_basis(S, pair.swap(G.V))
        L_bar = laplacian(H)
        worst = 0.0
        for i, t in enumerate(labels):
            if t == "even":
                f = vecs[:, i]
                worst = max(worst, float(np.max(np.abs(L_bar @ f - S.eigenvalues[i] * f))))
        rep.check(f"{name}: even eigenvectors remain eigenvectors", worst <= 1e-9, worst, 1e-9)
        off = [v for v in range(G.V) if v not in set(pair.arm_plus + pair.arm_minus)]
        worst_odd = 0.0
        for i, t in enumerate(labels):
            if t == "odd" and off:
                worst_odd = max(worst_odd, float(np.max(np.abs(vecs[off, i]))))
        rep.check(f"{name}: odd eigenvectors vanish off the arms", worst_odd <= 1e-9, worst_odd, 1e-9)
        if pair.k == 1:
            rep.check(f"{name}: odd spectrum changes under insertion", not _multiset_equal(odd, odd_bar),
                      {"odd": odd, "odd_bar": odd_bar})
        else:
            rep.notes.append(f"{name}: odd spectrum changed under insertion: {not _multiset_equal(odd, odd_bar)}")

    rep.check("odd spectra of G1 and G2 agree", _multiset_equal(parts["G1"][0], parts["G2"][0]))
    rep.check("odd spectra of G1bar and G2bar agree", _multiset_equal(parts["G1"][1], parts["G2"][1]))
    return rep


def _chi(G, H, f):
    return nodal_count(H, f) - nodal_count(G, f)


def verify_theorem1(G1: DiscreteGraph, G2: DiscreteGraph, pair1: LeafPairSpec, pair2: LeafPairSpec,
                    j: int, iso_tol: float = ISO_TOL) -> VerificationReport:
    """Isospectral seeds with equal nodal data keep both after inserting the j-th pair edge."""
    _validate_pair(G1, pair1, "G1")
    _validate_pair(G2, pair2, "G2")
    if pair1.k != pair2.k or not 1 <= j <= pair1.k:
        raise GraphError("leaf pairs must share k and satisfy 1 <= j <= k")
    rep = VerificationReport("theorem1", {"G1": _graph_summary(G1, pair1), "G2": _graph_summary(G2, pair2),
                                          "k": pair1.k, "j": j})
    S1, S2 = graph_spectrum(G1), graph_spectrum(G2)
    P1, P2 = nodal_profiles(G1, S1), nodal_profiles(G2, S2)
    if not rep.require("seeds isospectral", G1.V == G2.V and is_isospectral(S1, S2, iso_tol)):
        return rep
    if not rep.require("seed generic flip/nodal sequences match", sequences_match(P1, P2)):
        return rep

    H1, H2 = insert_pair_edge(G1, pair1, j), insert_pair_edge(G2, pair2, j)
    T1, T2 = graph_spectrum(H1), graph_spectrum(H2)
    Q1, Q2 = nodal_profiles(H1, T1), nodal_profiles(H2, T2)
    gap = isospectral_gap(T1, T2)
    rep.check("(i) outputs isospectral", gap <= iso_tol * (1 + np.max(T1.eigenvalues)), gap, iso_tol)
    rep.check("(ii) generic flip counts match", _match_attr(Q1, Q2, "mu"))
    rep.check("(iii) generic nodal counts match", _match_attr(Q1, Q2, "nu"))

    # proof mechanics: generic eigenvectors are even, so they agree across the new edge
    chis = []
    for name, G, H, pair, S in (("G1", G1, H1, pair1, S1), ("G2", G2, H2, pair2, S2)):
        a, b = pair.arm_plus[j - 1], pair.arm_minus[j - 1]
        worst = 0.0
        chi = {}
        L_bar = laplacian(H)
        for n in genericity_flags(S).indices():
            f = S.vector(n)
            worst = max(worst, abs(f[a] - f[b]) / np.max(np.abs(f)))
            worst = max(worst, float(np.max(np.abs(L_bar @ f - S.eigenvalues[n - 1] * f))))
            chi[n] = _chi(G, H, f)
        rep.check(f"{name}: generic eigenvectors equal on the inserted edge", worst <= 1e-9, worst, 1e-9)
        rep.check(f"{name}: nodal change on insertion is 0 or -1", all(c in (0, -1) for c in chi.values()),
                  sorted(set(chi.values())))
        chis.append(chi)
    shared = sorted(set(chis[0]) & set(chis[1]))
    rep.check("nodal change identical across G1 and G2", all(chis[0][n] == chis[1][n] for n in shared),
              {"indices": shared})

    if max(H1.V, H2.V) <= ISOMORPHISM_CAP:
        iso = is_isomorphic(H1, H2)
        rep.inputs["outputs_isomorphic"] = iso
        if iso:
            rep.notes.append("degenerate instance: the two output graphs are isomorphic")
    return rep


def verify_theorem2(G: DiscreteGraph, pair: LeafPairSpec) -> VerificationReport:
    """Closing a 1-leaf-pair moves one eigenvalue from 1 to 3 and shifts nodal data predictably."""
    _validate_pair(G, pair, "G")
    if pair.k != 1:
        raise GraphError("theorem 2 needs a 1-leaf-pair")
    rep = VerificationReport("theorem2", {"G": _graph_summary(G, pair)})
    H = insert_pair_edge(G, pair, 1)
    S, T = graph_spectrum(G), graph_spectrum(H)
    g = pair_vector(G.V, pair, 1)
    r_before = float(np.max(np.abs(laplacian(G) @ g - g)))
    r_after = float(np.max(np.abs(laplacian(H) @ g - 3 * g)))
    rep.check("difference vector has eigenvalue 1 in G", r_before <= 1e-12, r_before, 1e-12)
    rep.check("difference vector has eigenvalue 3 in Gbar", r_after <= 1e-12, r_after, 1e-12)

    lam, lam_bar = S.eigenvalues, T.eigenvalues
    idx_one = int(np.argmin(np.abs(lam - 1.0)))
    expected = np.sort(np.concatenate([np.delete(lam, idx_one), [3.0]]))
    shift_err = float(np.max(np.abs(expected - lam_bar)))
    rep.check("spectrum shift 1 -> 3, rest unchanged", shift_err <= 1e-9, shift_err, 1e-9)
    rep.inputs["spectrum"] = lam
    rep.inputs["spectrum_bar"] = lam_bar

    P, Q = nodal_profiles(G, S), nodal_profiles(H, T)
    checked = []
    tol = 1e-9
    for n in range(1, H.V + 1):
        lb = lam_bar[n - 1]
        m = n + 1 if 1 + tol < lb < 3 - tol else n
        if m > G.V or not (P[m - 1].generic and Q[n - 1].generic):
            continue
        f, fb = S.vector(m), T.vector(n)
        overlap = abs(float(f @ fb))
        rep.check(f"n={n}: eigenvector relation (source index {m})", abs(overlap - 1) <= 1e-8, overlap, 1.0)
        rep.check(f"n={n}: eigenvalue carried over", abs(lam[m - 1] - lb) <= 1e-9, lam[m - 1] - lb, 1e-9)
        rep.check(f"n={n}: flip count formula", Q[n - 1].mu == P[m - 1].mu,
                  {"mu_bar": Q[n - 1].mu, "mu": P[m - 1].mu})
        want_nu = P[m - 1].nu if lb < 1 else P[m - 1].nu - 1
        rep.check(f"n={n}: nodal count formula", Q[n - 1].nu == want_nu,
                  {"nu_bar": Q[n - 1].nu, "expected": want_nu})
        ratio = f[pair.root] / f[pair.arm_plus[0]]
        rep.check(f"n={n}: root/arm ratio equals 1 - lambda", abs(ratio - (1 - lam[m - 1])) <= 1e-8 * (1 + lb),
                  ratio, 1 - lam[m - 1])
        checked.append(n)
    rep.inputs["checked_indices"] = checked
    return rep


def corollary1_range_counts(S: Spectrum, tol: float = 1e-9) -> tuple[int, int, int]:
    """Eigenvalue counts in [0, 1), [1, 3) and [3, inf); values near 1 or 3 snap onto them."""
    lam = np.array(S.eigenvalues if isinstance(S, Spectrum) else S, dtype=float)
    scale = max(1.0, float(np.max(np.abs(lam)))) if lam.size else 1.0
    for edge in (1.0, 3.0):
        lam[np.abs(lam - edge) <= tol * scale] = edge
    return (int(np.sum(lam < 1)), int(np.sum((lam >= 1) & (lam < 3))), int(np.sum(lam >= 3)))


def leaf_arm_ratios(lam: float, k: int, tol: float = 1e-9):
    """Values ``f(arm[i]) / f(root)`` forced by the eigen-equation on a k-leaf.

    Returns ``None`` when the backward recursion hits a zero denominator.
    """
    rho = [0.0] * k
    denom = 1.0 - lam
    if abs(denom) <= tol:
        return None
    rho[k - 1] = 1.0 / denom
    for i in range(k - 2, -1, -1):
        denom = (2.0 - lam) - rho[i + 1]
        if abs(denom) <= tol:
            return None
        rho[i] = 1.0 / denom
    return np.cumprod(rho)


def leaf_recursion_check(G: DiscreteGraph, pair: LeafPairSpec, S: Spectrum | None = None,
                         others=()) -> VerificationReport:
    """Arm values of generic eigenvectors depend only on the eigenvalue and the root value.

    ``others`` is an optional sequence of ``(G2, pair2, S2)`` with pairs of the
    same length; their arm/root ratios must agree at shared eigenvalues.
    """
    _validate_pair(G, pair, "G")
    S = S if S is not None else graph_spectrum(G)
    rep = VerificationReport("leaf_recursion", {"G": _graph_summary(G, pair), "k": pair.k})
    k = pair.k
    mine = {}
    skipped = []
    for n in genericity_flags(S).indices():
        lam = float(S.eigenvalues[n - 1])
        f = S.vector(n)
        F = leaf_arm_ratios(lam, k)
        if F is None:
            skipped.append(n)
            continue
        scale = np.max(np.abs(f))
        for name, arm in (("plus", pair.arm_plus), ("minus", pair.arm_minus)):
            path = (pair.root,) + arm
            end_err = abs(f[path[-1]] * (1 - lam) - f[path[-2]]) / scale
            rep.check(f"n={n} {name}: end recursion", end_err <= RATIO_TOL, end_err, RATIO_TOL)
            interior = 0.0
            for i in range(1, len(path) - 1):
                interior = max(interior, abs(lam * f[path[i]] - 2 * f[path[i]] + f[path[i - 1]] + f[path[i + 1]]))
            rep.check(f"n={n} {name}: interior recursion", interior / scale <= RATIO_TOL, interior / scale, RATIO_TOL)
            got = f[list(arm)] / f[pair.root]
            err = float(np.max(np.abs(got - F) / (1 + np.abs(F))))
            rep.check(f"n={n} {name}: arm/root ratio is F_i(lambda)", err <= RATIO_TOL, err, RATIO_TOL)
        mine[n] = (lam, f[list(pair.arm_plus)] / f[pair.root])
    for idx, (G2, pair2, S2) in enumerate(others):
        S2 = S2 if S2 is not None else graph_spectrum(G2)
        if pair2.k != k:
            raise GraphError("compared leaf pairs must have equal k")
        for n in genericity_flags(S2).indices():
            lam2 = float(S2.eigenvalues[n - 1])
            f2 = S2.vector(n)
            for lam, r in mine.values():
                if abs(lam - lam2) <= 1e-9 * (1 + lam):
                    r2 = f2[list(pair2.arm_plus)] / f2[pair2.root]
                    err = float(np.max(np.abs(r - r2)))
                    rep.check(f"other[{idx}] n={n}: ratios agree at lambda={lam2:.6g}", err <= RATIO_TOL, err, RATIO_TOL)
    if skipped:
        rep.notes.append(f"singular recursion, skipped generic indices {skipped}")
    rep.inputs["skipped"] = skipped
    return rep


# --- instance generation -------------------------------------------------

@dataclass
class Theorem1Instance:
    base: DiscreteGraph
    graph: DiscreteGraph
    pair_a: LeafPairSpec
    pair_b: LeafPairSpec
    j: int

    def outputs(self):
        return insert_pair_edge(self.graph, self.pair_a, self.j), insert_pair_edge(self.graph, self.pair_b, self.j)


def theorem1_instances(count: int, k: int = 1, j: int = 1, min_base: int = 2, max_base: int = 6,
                       max_vertices: int = ISOMORPHISM_CAP):
    """Trees carrying two k-leaf-pairs whose two single insertions are non-isomorphic.

    Base trees are taken in canonical enumeration order; for each ordered
    root choice ``a < b`` a k-leaf-pair is grown at both roots.  Yields at
    most ``count`` instances.
    """
    found = 0
    for order in range(min_base, max_base + 1):
        if order + 4 * k > max_vertices:
            break
        for T in nonisomorphic_trees(order):
            for a, b in combinations(range(order), 2):
                G, pa = attach_k_leaf_pair(T, a, k)
                G, pb = attach_k_leaf_pair(G, b, k)
                H1, H2 = insert_pair_edge(G, pa, j), insert_pair_edge(G, pb, j)
                if is_isomorphic(H1, H2):
                    continue
                yield Theorem1Instance(T, G, pa, pb, j)
                found += 1
                if found >= count:
                    return


# --- Corollary-1 search ----------------------------------------------------

@dataclass
class _Seed:
    tree: DiscreteGraph
    pair: LeafPairSpec
    spectrum: Spectrum
    key: tuple
    closed: DiscreteGraph
    closed_spectrum: Spectrum
    closed_profiles: list


def _seed(tree, pair):
    S = graph_spectrum(tree)
    key = (tree.V, tuple(genericity_flags(S).indices()), corollary1_range_counts(S))
    H = insert_pair_edge(tree, pair, 1)
    T = graph_spectrum(H)
    return _Seed(tree, pair, S, key, H, T, nodal_profiles(H, T))


def verify_corollary1(G1: DiscreteGraph, G2: DiscreteGraph, pair1: LeafPairSpec, pair2: LeafPairSpec,
                      require_non_isospectral: bool = False) -> VerificationReport:
    """Seeds with equal generic nodal data and equal range counts give outputs with equal nodal data."""
    _validate_pair(G1, pair1, "G1")
    _validate_pair(G2, pair2, "G2")
    if pair1.k != 1 or pair2.k != 1:
        raise GraphError("corollary 1 needs 1-leaf-pairs")
    rep = VerificationReport("corollary1", {"G1": _graph_summary(G1, pair1), "G2": _graph_summary(G2, pair2)})
    if not rep.require("same vertex count", G1.V == G2.V):
        return rep
    S1, S2 = graph_spectrum(G1), graph_spectrum(G2)
    P1, P2 = nodal_profiles(G1, S1), nodal_profiles(G2, S2)
    rep.require("seed generic flip/nodal sequences match", sequences_match(P1, P2))
    c1, c2 = corollary1_range_counts(S1), corollary1_range_counts(S2)
    rep.require("seed range counts match", c1 == c2, {"G1": c1, "G2": c2})
    if not rep.conclusive:
        return rep
    H1, H2 = insert_pair_edge(G1, pair1, 1), insert_pair_edge(G2, pair2, 1)
    T1, T2 = graph_spectrum(H1), graph_spectrum(H2)
    Q1, Q2 = nodal_profiles(H1, T1), nodal_profiles(H2, T2)
    rep.check("output generic flip counts match", _match_attr(Q1, Q2, "mu"))
    rep.check("output generic nodal counts match", _match_attr(Q1, Q2, "nu"))
    gap = isospectral_gap(T1, T2)
    iso = is_isospectral(T1, T2)
    rep.inputs["outputs_isospectral"] = iso
    rep.inputs["spectrum_bar_1"] = T1.eigenvalues
    rep.inputs["spectrum_bar_2"] = T2.eigenvalues
    rep.inputs["generic_bar"] = [p.n for p in Q1 if p.generic]
    rep.inputs["mu_bar"] = [p.mu for p in Q1 if p.generic]
    rep.inputs["nu_bar"] = [p.nu for p in Q1 if p.generic]
    if require_non_isospectral:
        rep.check("outputs non-isospectral", not iso, gap, ISO_TOL)
    return rep


@dataclass
class SearchResult:
    found: list = field(default_factory=list)  # (Gbar1, Gbar2, report)
    candidates_scanned: int = 0
    pairs_compared: int = 0
    seeds_by_order: dict = field(default_factory=dict)

    def stats(self) -> dict:
        return {"candidates_scanned": self.candidates_scanned, "pairs_compared": self.pairs_compared,
                "seeds_by_order": self.seeds_by_order, "found": len(self.found)}


def search_noniso_pairs(min_vertices: int = 4, max_vertices: int = 11, max_candidates: int | None = None,
                        max_results: int | None = None) -> SearchResult:
    """Find non-isospectral graphs with identical generic flip and nodal counts.

    Seeds are (tree, 1-leaf-pair) combinations over all non-isomorphic trees
    in the order range, one pair per root.  Seeds agreeing on order, generic
    index set and range counts are paired; pairs whose closed graphs are
    non-isospectral yet share flip and nodal sequences are re-verified from
    scratch and returned in enumeration order.
    """
    result = SearchResult()
    budget = float("inf") if max_candidates is None else max_candidates
    for order in range(max(min_vertices, 3), max_vertices + 1):
        groups: dict[tuple, list[_Seed]] = {}
        count = 0
        for tree in nonisomorphic_trees(order):
            for pair in find_leaf_pairs(tree, 1):
                if result.candidates_scanned >= budget:
                    break
                result.candidates_scanned += 1
                count += 1
                seed = _seed(tree, pair)
                groups.setdefault(seed.key, []).append(seed)
        result.seeds_by_order[order] = count
        for key in sorted(groups, key=repr):
            for s1, s2 in combinations(groups[key], 2):
                result.pairs_compared += 1
                if s1.tree == s2.tree:
                    continue
                if is_isospectral(s1.closed_spectrum, s2.closed_spectrum):
                    continue
                if not sequences_match(s1.closed_profiles, s2.closed_profiles):
                    continue
                rep = verify_corollary1(s1.tree, s2.tree, s1.pair, s2.pair, require_non_isospectral=True)
                if rep.passed:
                    result.found.append((s1.closed, s2.closed, rep))
                    if max_results is not None and len(result.found) >= max_results:
                        return result
        if result.candidates_scanned >= budget:
            break
    return result
