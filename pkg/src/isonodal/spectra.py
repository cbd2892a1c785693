"""Dense symmetric eigensolver, genericity and leaf-exchange symmetry.

The eigensolver is a cyclic two-sided Jacobi iteration.  It is only meant
for desk-scale Laplacians (tens of vertices), where it is accurate to a few
ulps and needs no external LAPACK call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DiscreteGraph, LeafPairSpec, laplacian

DEGENERACY_TOL = 1e-8
ZERO_TOL = 1e-8
ISO_TOL = 1e-9


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column n is the n-th eigenvector
    degeneracy_tol: float = DEGENERACY_TOL
    zero_tol: float = ZERO_TOL

    def __len__(self):
        return len(self.eigenvalues)

    def vector(self, n: int) -> np.ndarray:
        """Eigenvector at 1-based spectral position ``n``."""
        return self.eigenvectors[:, n - 1]

    @property
    def scale(self) -> float:
        lam = self.eigenvalues
        return max(float(lam[-1] - lam[0]), 1.0) if len(lam) else 1.0

    def clusters(self) -> list[list[int]]:
        """0-based index groups of numerically equal eigenvalues."""
        groups: list[list[int]] = []
        tol = self.degeneracy_tol * self.scale
        for i, lam in enumerate(self.eigenvalues):
            if groups and lam - self.eigenvalues[groups[-1][-1]] <= tol:
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups

    def to_dict(self, vectors: bool = False) -> dict:
        out = {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "generic": [bool(g) for g in genericity_flags(self).generic],
        }
        if vectors:
            out["eigenvectors"] = [[float(x) for x in self.eigenvectors[:, n]] for n in range(len(self))]
        return out


@dataclass(frozen=True)
class GenericityFlags:
    simple: tuple[bool, ...]
    nowhere_zero: tuple[bool, ...]

    @property
    def generic(self) -> tuple[bool, ...]:
        return tuple(s and z for s, z in zip(self.simple, self.nowhere_zero))

    def indices(self) -> list[int]:
        """1-based positions of generic eigenvectors."""
        return [n + 1 for n, g in enumerate(self.generic) if g]


def _jacobi(A: np.ndarray, tol: float, max_sweeps: int):
    n = A.shape[0]
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if norm == 0.0 or n == 1:
        return np.diag(A).copy(), V
    target = tol * norm
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                colp, colq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp, rowq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise SpectrumError("Jacobi iteration did not converge")
    return np.diag(A).copy(), V


def eig_sym(M, tol: float = 1e-14, max_sweeps: int = 60,
            degeneracy_tol: float = DEGENERACY_TOL, zero_tol: float = ZERO_TOL) -> Spectrum:
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps continue until the off-diagonal Frobenius norm drops below
    ``tol * ||M||_F``.  Eigenvalues are returned ascending with matching
    orthonormal eigenvector columns.
    """
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise SpectrumError("matrix must be square")
    scale = max(np.max(np.abs(M)), 1.0) if M.size else 1.0
    if np.max(np.abs(M - M.T), initial=0.0) > 1e-12 * scale:
        raise SpectrumError("matrix is not symmetric")
    lam, vecs = _jacobi(0.5 * (M + M.T), tol, max_sweeps)
    order = np.argsort(lam, kind="stable")
    lam, vecs = lam[order], vecs[:, order]
    # fix the sign so output does not depend on rotation order details
    for n in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, n]) > 0.5 * np.max(np.abs(vecs[:, n]))))
        if vecs[i, n] < 0:
            vecs[:, n] = -vecs[:, n]
    return Spectrum(lam, vecs, degeneracy_tol, zero_tol)


def graph_spectrum(G: DiscreteGraph, **kwargs) -> Spectrum:
    return eig_sym(laplacian(G), **kwargs)


def genericity_flags(S: Spectrum) -> GenericityFlags:
    lam = S.eigenvalues
    tol = S.degeneracy_tol * S.scale
    simple = []
    for n in range(len(lam)):
        gaps = []
        if n > 0:
            gaps.append(lam[n] - lam[n - 1])
        if n + 1 < len(lam):
            gaps.append(lam[n + 1] - lam[n])
        simple.append(not gaps or min(gaps) > tol)
    nonzero = []
    for n in range(len(lam)):
        f = S.eigenvectors[:, n]
        nonzero.append(bool(np.min(np.abs(f)) > S.zero_tol * np.max(np.abs(f))))
    return GenericityFlags(tuple(simple), tuple(nonzero))


def is_isospectral(S1: Spectrum, S2: Spectrum, tol: float = ISO_TOL) -> bool:
    return isospectral_gap(S1, S2) <= tol * (1.0 + max(np.max(np.abs(S1.eigenvalues)),
                                                       np.max(np.abs(S2.eigenvalues))))


def isospectral_gap(S1: Spectrum, S2: Spectrum) -> float:
    if len(S1) != len(S2):
        raise SpectrumError("spectra have different dimensions")
    return float(np.max(np.abs(S1.eigenvalues - S2.eigenvalues)))


def symmetric_basis(S: Spectrum, perm: np.ndarray) -> np.ndarray:
    """Re-project each degenerate cluster onto the even/odd subspaces of ``perm``.

    Returns eigenvector columns in the same eigenvalue order.  Simple
    eigenvectors are left untouched.
    """
    vecs = S.eigenvectors.copy()
    for cluster in S.clusters():
        Q = S.eigenvectors[:, cluster]
        if len(cluster) > 1:
            parts = []
            for sign in (1.0, -1.0):
                P = 0.5 * (Q + sign * Q[perm, :])
                u, sv, _ = np.linalg.svd(P, full_matrices=False)
                rank = int(np.sum(sv > 1e-6))
                parts.extend(u[:, i] for i in range(rank))
            if len(parts) == len(cluster):
                Q = np.column_stack(parts)
        for col, idx in enumerate(cluster):
            vecs[:, idx] = Q[:, col]
    return vecs


def leaf_symmetry_classify(G: DiscreteGraph, pair: LeafPairSpec, S: Spectrum,
                           tol: float = 1e-8) -> list[str]:
    """Label each eigenvector 'even', 'odd' or 'mixed' under the arm exchange."""
    perm = pair.swap(G.V)
    vecs = symmetric_basis(S, perm)
    labels = []
    for n in range(len(S)):
        f = vecs[:, n]
        scale = np.max(np.abs(f))
        if np.max(np.abs(f[perm] - f)) <= tol * scale:
            labels.append("even")
        elif np.max(np.abs(f[perm] + f)) <= tol * scale:
            labels.append("odd")
        else:
            labels.append("mixed")
    return labels


def split_spectrum(G: DiscreteGraph, pair: LeafPairSpec, S: Spectrum) -> tuple[np.ndarray, np.ndarray]:
    """Even and odd parts of the spectrum (multisets as sorted arrays)."""
    labels = leaf_symmetry_classify(G, pair, S)
    lam = S.eigenvalues
    even = np.array([lam[i] for i, t in enumerate(labels) if t == "even"])
    odd = np.array([lam[i] for i, t in enumerate(labels) if t == "odd"])
    return even, odd


def pair_vector(V: int, pair: LeafPairSpec, j: int) -> np.ndarray:
    """The difference vector of the j-th arm vertices (+1 on plus, -1 on minus)."""
    g = np.zeros(V)
    g[pair.arm_plus[j - 1]] = 1.0
    g[pair.arm_minus[j - 1]] = -1.0
    return g


def rank_one_check(G: DiscreteGraph, Gbar: DiscreteGraph, pair: LeafPairSpec, j: int) -> bool:
    """True iff L(Gbar) = L(G) + g g^T for the arm difference vector g."""
    if G.V != Gbar.V:
        return False
    g = pair_vector(G.V, pair, j)
    return bool(np.array_equal(laplacian(Gbar), laplacian(G) + np.outer(g, g)))
