"""Spectra of Neumann quantum graphs.

Eigenvalues ``lambda = k**2`` (k > 0) are the wavenumbers where the
directed-bond evolution ``U(k) = S exp(i k L)`` has eigenvalue 1.  Each
edge carries two directed bonds; at a vertex of degree ``d`` a wave
arriving on bond ``b`` leaves on bond ``b'`` with amplitude
``2/d - [b' is the reversal of b]``.  We scan ``k`` for minima of the
smallest singular value of ``I - U(k)``, polish them by golden-section
search and read eigenfunctions off the null space.

On edge ``e`` with length ``l`` an eigenfunction is stored as
``psi_e(x) = A_e cos(kx) + B_e sin(kx)`` with ``x`` measured from the
first endpoint of the edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .metric import MetricGraph, MetricLeafPairSpec

SV_TOL = 1e-7
QZERO_TOL = 1e-6
DEFAULT_GRID_DENSITY = 20
FD_MAX_NODES = 2_000_000
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_GRID_OFFSET = 0.381966


class SecularError(RuntimeError):
    pass


@dataclass(frozen=True)
class EdgeWave:
    """``psi(x) = amplitude * sin(k x + phase)`` on ``[0, length]``."""

    edge: int
    amplitude: float
    phase: float

    def __call__(self, x, k):
        return self.amplitude * np.sin(k * np.asarray(x) + self.phase)


@dataclass(frozen=True)
class QEigenpair:
    k: float
    multiplicity: int
    vertex_values: np.ndarray
    coeffs: np.ndarray  # shape (E, 2): columns A (cos) and B (sin)
    generic: bool
    basis: tuple = ()  # all real basis coefficient arrays when degenerate
    continuity_residual: float = 0.0
    current_residual: float = 0.0
    imag_residual: float = 0.0

    @property
    def eigenvalue(self) -> float:
        return self.k * self.k

    @property
    def edge_waves(self) -> list[EdgeWave]:
        return [_wave(e, A, B) for e, (A, B) in enumerate(self.coeffs)]

    def evaluate(self, edge: int, x):
        A, B = self.coeffs[edge]
        return A * np.cos(self.k * np.asarray(x)) + B * np.sin(self.k * np.asarray(x))


def _wave(e, A, B):
    return EdgeWave(e, float(math.hypot(A, B)), float(math.atan2(A, B) % (2 * math.pi)))


# --- bond scattering -----------------------------------------------------

def _bond_data(G: MetricGraph):
    E = G.E
    deg = G.degrees()
    start = np.empty(2 * E, dtype=int)
    end = np.empty(2 * E, dtype=int)
    for e, (i, j) in enumerate(G.edges):
        start[2 * e], end[2 * e] = i, j
        start[2 * e + 1], end[2 * e + 1] = j, i
    S = np.zeros((2 * E, 2 * E))
    for b in range(2 * E):
        v = end[b]
        for b2 in np.flatnonzero(start == v):
            S[b2, b] = 2.0 / deg[v] - (1.0 if b2 == (b ^ 1) else 0.0)
    bond_len = np.repeat(np.asarray(G.lengths, dtype=float), 2)
    return S, bond_len


class _Secular:
    def __init__(self, G: MetricGraph):
        self.G = G
        self.S, self.bond_len = _bond_data(G)
        self.eye = np.eye(len(self.bond_len))
        self.total_bond = float(np.sum(self.bond_len))

    def unitary(self, k: float) -> np.ndarray:
        return self.S * np.exp(1j * k * self.bond_len)[None, :]

    def matrix(self, k: float) -> np.ndarray:
        return self.eye - self.unitary(k)

    def smallest_sv(self, k: float) -> float:
        return float(np.linalg.svd(self.matrix(k), compute_uv=False)[-1])

    def phase_sum(self, k: float) -> float:
        """Sum of the eigenphases of ``U(k)``, each wrapped into ``[0, 2 pi)``."""
        ev = np.linalg.eigvals(self.unitary(k))
        return float(np.sum(np.mod(np.angle(ev), 2 * math.pi)))

    def count(self, a: float, b: float, pa: float | None = None, pb: float | None = None) -> int:
        """Number of eigenvalues (with multiplicity) with ``a < k <= b``.

        Eigenphases of ``U(k)`` increase with ``k`` and their unwrapped sum
        grows exactly like ``arg det U = const + k * sum(bond lengths)``, so
        the number of phases that passed through zero follows from the
        wrapped phases at the two ends alone.
        """
        pa = self.phase_sum(a) if pa is None else pa
        pb = self.phase_sum(b) if pb is None else pb
        n = (self.total_bond * (b - a) - pb + pa) / (2 * math.pi)
        if abs(n - round(n)) > 0.25:
            raise SecularError(f"eigenphase count on ({a:.6g}, {b:.6g}] is not an integer ({n:.3f})")
        return int(round(n))

    def roots_in(self, a: float, b: float, count: int, sv_tol: float, depth: int = 0) -> list[tuple[float, int]]:
        """Roots with multiplicities in ``(a, b]`` given their total ``count``."""
        if count == 0:
            return []
        k, val = _golden(self.smallest_sv, a, b, 1e-13 * max(1.0, b))
        if val < sv_tol:
            s = np.linalg.svd(self.matrix(k), compute_uv=False)
            if int(np.sum(s < sv_tol)) == count:
                return [(k, count)]
        if depth > 40 or b - a < 1e-12 * max(1.0, b):
            raise SecularError(f"could not resolve {count} roots near k={k:.12g}; increase grid_density")
        cuts = np.linspace(a, b, 5)
        out = []
        for lo, hi in zip(cuts, cuts[1:]):
            out += self.roots_in(lo, hi, self.count(lo, hi), sv_tol, depth + 1)
        return out


def bond_evolution(G: MetricGraph, k: float) -> np.ndarray:
    """The 2E x 2E unitary ``U(k)``; bond ``2e`` runs along edge ``e``, ``2e+1`` against it."""
    S, bond_len = _bond_data(G)
    return S * np.exp(1j * k * bond_len)[None, :]


def _golden(f, a, b, tol):
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def scan_step(G: MetricGraph, grid_density: float) -> float:
    return math.pi / (grid_density * G.total_length)


def scan_grid(G: MetricGraph, k_max: float, grid_density: float = DEFAULT_GRID_DENSITY) -> np.ndarray:
    """Uniform grid covering ``(0, k_max]``, offset so commensurate roots avoid grid points."""
    dk = scan_step(G, grid_density)
    return dk * (np.arange(int(math.ceil(k_max / dk)) + 2) + _GRID_OFFSET)


def secular_trace(G: MetricGraph, k_max: float, grid_density: float = DEFAULT_GRID_DENSITY):
    """Grid ``k`` values and the smallest singular value of ``I - U(k)`` on them."""
    sec = _Secular(G)
    ks = scan_grid(G, k_max, grid_density)
    return ks, np.array([sec.smallest_sv(k) for k in ks])


def secular_spectrum(G: MetricGraph, k_max: float, grid_density: float = DEFAULT_GRID_DENSITY,
                     sv_tol: float = SV_TOL, zero_tol: float = QZERO_TOL) -> list[QEigenpair]:
    """All eigenpairs with ``0 <= k <= k_max``, sorted by ``k``, ``k = 0`` first.

    Every grid cell is first given an exact root count; cells holding more
    roots than the singular-value minimum resolves are subdivided.
    """
    if k_max <= 0:
        raise SecularError("k_max must be positive")
    if grid_density <= 0:
        raise SecularError("grid_density must be positive")
    sec = _Secular(G)
    ks = scan_grid(G, k_max, grid_density)
    edges = np.concatenate([[1e-9 * ks[0]], ks])
    phases = [sec.phase_sum(k) for k in edges]
    roots = []
    for i in range(len(edges) - 1):
        c = sec.count(edges[i], edges[i + 1], phases[i], phases[i + 1])
        roots += sec.roots_in(edges[i], edges[i + 1], c, sv_tol)
    roots = [(k, m) for k, m in roots if k <= k_max]
    merge_tol = 1e-10 * k_max
    for (a, _), (b, _) in zip(roots, roots[1:]):
        if b - a <= merge_tol:
            raise SecularError(f"roots near k={a:.12g} collide; increase grid_density")
    pairs = [constant_mode(G)]
    for k, mult in roots:
        _, s, vh = np.linalg.svd(sec.matrix(k))
        null = vh[len(s) - mult:].conj()
        pairs.append(eigenfunction(G, k, null, zero_tol=zero_tol))
    return pairs


def constant_mode(G: MetricGraph) -> QEigenpair:
    c = 1.0 / math.sqrt(G.total_length)
    coeffs = np.zeros((G.E, 2))
    coeffs[:, 0] = c
    return QEigenpair(0.0, 1, np.full(G.V, c), coeffs, True, (coeffs,))


def _coeffs_from_bonds(G: MetricGraph, k: float, a: np.ndarray) -> np.ndarray:
    L = np.asarray(G.lengths)
    fwd, back = a[0::2], a[1::2] * np.exp(1j * k * L)
    return np.column_stack([fwd + back, 1j * (fwd - back)])


def vertex_data(G: MetricGraph, k: float, coeffs: np.ndarray):
    """Vertex values (averaged over incident edges) and the two Neumann residuals."""
    L = np.asarray(G.lengths)
    A, B = coeffs[:, 0], coeffs[:, 1]
    at_end = A * np.cos(k * L) + B * np.sin(k * L)
    out_deriv_start = k * B
    out_deriv_end = k * (A * np.sin(k * L) - B * np.cos(k * L))
    samples = [[] for _ in range(G.V)]
    flux = np.zeros(G.V)
    for e, (i, j) in enumerate(G.edges):
        samples[i].append(A[e])
        samples[j].append(at_end[e])
        flux[i] += out_deriv_start[e]
        flux[j] += out_deriv_end[e]
    values = np.array([np.mean(s) for s in samples])
    cont = max(np.max(np.abs(np.asarray(s) - np.mean(s))) for s in samples)
    scale = max(np.max(np.abs(coeffs)), 1e-300)
    return values, float(cont / scale), float(np.max(np.abs(flux)) / (max(k, 1.0) * scale))


def _l2_norm(G, k, coeffs):
    total = 0.0
    for e, l in enumerate(G.lengths):
        A, B = coeffs[e]
        if k == 0:
            total += A * A * l
            continue
        s2 = math.sin(2 * k * l)
        c2 = math.cos(2 * k * l)
        total += (A * A * (l / 2 + s2 / (4 * k)) + B * B * (l / 2 - s2 / (4 * k))
                  + A * B * (1 - c2) / (2 * k))
    return math.sqrt(max(total, 0.0))


def _normalise(G, k, coeffs):
    coeffs = coeffs / _l2_norm(G, k, coeffs)
    values, _, _ = vertex_data(G, k, coeffs)
    ref = values if np.max(np.abs(values)) > 1e-6 * np.max(np.abs(coeffs)) else coeffs.ravel()
    i = int(np.argmax(np.abs(ref) > 0.5 * np.max(np.abs(ref))))
    return -coeffs if ref[i] < 0 else coeffs


def eigenfunction(G: MetricGraph, k: float, null_vectors, zero_tol: float = QZERO_TOL) -> QEigenpair:
    """Real eigenfunction(s) at ``k`` from null vectors of ``I - U(k)`` (rows)."""
    null = np.atleast_2d(np.asarray(null_vectors))
    mult = null.shape[0]
    zs = [_coeffs_from_bonds(G, k, a).ravel() for a in null]
    stacked = np.vstack([part for z in zs for part in (z.real, z.imag)])
    _, s, vh = np.linalg.svd(stacked, full_matrices=False)
    imag_res = float(s[mult] / s[0]) if len(s) > mult else 0.0
    basis = tuple(_normalise(G, k, vh[i].reshape(G.E, 2)) for i in range(mult))
    coeffs = basis[0]
    values, cont, cur = vertex_data(G, k, coeffs)
    # zeros are judged against the sup norm, which is the largest edge amplitude
    sup = float(np.max(np.hypot(coeffs[:, 0], coeffs[:, 1])))
    generic = mult == 1 and bool(np.min(np.abs(values)) > zero_tol * sup)
    return QEigenpair(float(k), mult, values, coeffs, generic, basis, cont, cur, imag_res)


def positions(eigenpairs, n_max: int | None = None) -> list[tuple[int, QEigenpair]]:
    """Spectral positions ``(n, eigenpair)`` counting multiplicity, 1-based."""
    out = []
    for ep in eigenpairs:
        for _ in range(ep.multiplicity):
            out.append((len(out) + 1, ep))
    return out if n_max is None else out[:n_max]


def spectrum_k(eigenpairs, n_max: int | None = None) -> np.ndarray:
    return np.array([ep.k for _, ep in positions(eigenpairs, n_max)])


def spectrum_up_to(G: MetricGraph, n_max: int, grid_density: float = DEFAULT_GRID_DENSITY,
                   k_max: float | None = None) -> tuple[list[QEigenpair], float]:
    """Eigenpairs covering at least ``n_max + 1`` positions; returns them and the k_max used."""
    if k_max is None:
        k_max = (n_max + 3) * math.pi / G.total_length
    while True:
        pairs = secular_spectrum(G, k_max, grid_density)
        if len(positions(pairs)) > n_max:
            return pairs, k_max
        k_max *= 1.5


# --- symmetry ------------------------------------------------------------

def _reverse(k, length, A, B):
    c, s = math.cos(k * length), math.sin(k * length)
    return A * c + B * s, A * s - B * c


def swap_coeffs(G: MetricGraph, pair: MetricLeafPairSpec, k: float, coeffs: np.ndarray) -> np.ndarray:
    """Coefficients of the eigenfunction with the two arms of ``pair`` exchanged."""
    perm = G.vertex_swap(pair)
    out = coeffs.copy()
    for ea, eb in zip(pair.arm_plus, pair.arm_minus):
        for src, dst in ((ea, eb), (eb, ea)):
            i, j = G.edges[src]
            A, B = coeffs[src]
            if (perm[i], perm[j]) == G.edges[dst]:
                out[dst] = (A, B)
            else:
                out[dst] = _reverse(k, G.lengths[src], A, B)
    return out


def symmetric_modes(G: MetricGraph, pair: MetricLeafPairSpec, ep: QEigenpair) -> list[tuple[str, np.ndarray]]:
    """Eigenspace basis re-projected onto even/odd parts under the arm exchange."""
    basis = np.array([b.ravel() for b in ep.basis])
    swapped = np.array([swap_coeffs(G, pair, ep.k, b).ravel() for b in ep.basis])
    scale = np.linalg.norm(basis, 2)
    out = []
    for label, sign in (("even", 1.0), ("odd", -1.0)):
        P = 0.5 * (basis + sign * swapped)
        _, s, vh = np.linalg.svd(P, full_matrices=False)
        for i in range(int(np.sum(s > 1e-6 * scale))):
            out.append((label, vh[i].reshape(G.E, 2)))
    return out


# --- independent finite-difference oracle ---------------------------------

def fd_oracle(G: MetricGraph, points_per_unit_length: int = 2000, count: int = 15) -> np.ndarray:
    """Lowest ``count`` eigenvalues of a lumped-mass finite-difference Laplacian.

    Each edge is cut into ``round(ppu * l)`` equal cells; vertex nodes are
    shared between edges, which enforces continuity, and the natural
    boundary term of the stencil enforces zero total outgoing derivative.
    """
    if points_per_unit_length < 100:
        raise ValueError("points_per_unit_length must be at least 100")
    cells = [max(2, int(round(points_per_unit_length * l))) for l in G.lengths]
    n_nodes = G.V + sum(c - 1 for c in cells)
    if n_nodes > FD_MAX_NODES:
        raise ValueError(f"finite-difference system with {n_nodes} nodes exceeds bound {FD_MAX_NODES}")
    rows, cols, vals = [], [], []
    mass = np.zeros(n_nodes)
    nxt = G.V
    for e, (i, j) in enumerate(G.edges):
        c = cells[e]
        h = G.lengths[e] / c
        nodes = [i] + list(range(nxt, nxt + c - 1)) + [j]
        nxt += c - 1
        p = np.array(nodes[:-1])
        q = np.array(nodes[1:])
        w = np.full(c, 1.0 / h)
        rows += [p, q, p, q]
        cols += [p, q, q, p]
        vals += [w, w, -w, -w]
        np.add.at(mass, p, h / 2)
        np.add.at(mass, q, h / 2)
    K = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n_nodes, n_nodes))
    Dm = sp.diags(1.0 / np.sqrt(mass))
    A = (Dm @ K @ Dm).tocsc()
    count = min(count, n_nodes - 1)
    lam = eigsh(A, k=count, sigma=-1.0, which="LM", return_eigenvectors=False)
    lam = np.sort(lam)
    lam[np.abs(lam) < 1e-9] = 0.0
    return lam


# --- closed-form odd spectra ----------------------------------------------

def odd_leaf_spectrum(length: float, l1: float | None = None, glued: bool = False,
                      k_max: float = 30.0) -> np.ndarray:
    """Wavenumbers of modes antisymmetric under the arm exchange, up to ``k_max``.

    Unglued: Dirichlet at the root, Neumann at the leaf end.  Glued at
    distance ``l1``: Dirichlet-Dirichlet on the root side plus
    Dirichlet-Neumann on the pendant side.
    """
    def dn(l):
        m = np.arange(0, int(k_max * 2 * l / math.pi) + 2)
        return (2 * m + 1) * math.pi / (2 * l)

    if not glued:
        ks = dn(length)
    else:
        if l1 is None or not 0 < l1 < length:
            raise ValueError("glued spectrum needs 0 < l1 < length")
        m = np.arange(1, int(k_max * l1 / math.pi) + 2)
        ks = np.concatenate([m * math.pi / l1, dn(length - l1)])
    ks = np.sort(ks)
    return ks[ks <= k_max * (1 + 1e-15)]
