"""Flip counts and nodal counts of Laplacian eigenvectors on discrete graphs."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .graph import DiscreteGraph, betti, connected_components, is_tree
from .report import fmt
from .spectra import ZERO_TOL, Spectrum, genericity_flags


class NonGenericError(ValueError):
    """Nodal quantities are undefined for vectors with (numerical) zeros."""


@dataclass(frozen=True)
class NodalProfile:
    n: int
    eigenvalue: float
    generic: bool
    flips: frozenset | None = None
    mu: int | None = None
    nu: int | None = None

    def row(self) -> dict:
        return {"n": self.n, "lambda": self.eigenvalue, "generic": self.generic,
                "mu": self.mu, "nu": self.nu}


def _check_generic(f, zero_tol):
    f = np.asarray(f, dtype=float)
    if np.min(np.abs(f)) <= zero_tol * np.max(np.abs(f)):
        raise NonGenericError("non-generic vector: entry at or below zero tolerance")
    return f


def flip_set(G: DiscreteGraph, f, zero_tol: float = ZERO_TOL) -> frozenset:
    """Edges whose endpoint values have strictly opposite signs."""
    f = _check_generic(f, zero_tol)
    return frozenset(e for e in G.edges if f[e[0]] * f[e[1]] < 0)


def nodal_count(G: DiscreteGraph, f, zero_tol: float = ZERO_TOL) -> int:
    return len(connected_components(G, flip_set(G, f, zero_tol)))


def nodal_profiles(G: DiscreteGraph, S: Spectrum) -> list[NodalProfile]:
    """One profile per spectral position; non-generic positions stay as gaps."""
    flags = genericity_flags(S).generic
    out = []
    for n in range(1, len(S) + 1):
        lam = float(S.eigenvalues[n - 1])
        if not flags[n - 1]:
            out.append(NodalProfile(n, lam, False))
            continue
        f = S.vector(n)
        flips = flip_set(G, f, S.zero_tol)
        nu = len(connected_components(G, flips))
        out.append(NodalProfile(n, lam, True, flips, len(flips), nu))
    return out


@dataclass(frozen=True)
class BoundCheck:
    n: int
    passed: bool
    detail: str


def check_bounds(G: DiscreteGraph, profiles) -> list[BoundCheck]:
    """Check ``n - b <= nu <= n`` and ``n - 1 <= mu <= n - 1 + b`` at generic positions.

    On trees the Sturm equalities ``nu = n`` and ``mu = n - 1`` are required.
    """
    b = betti(G)
    tree = is_tree(G)
    out = []
    for p in profiles:
        if not p.generic:
            continue
        n = p.n
        ok = n - b <= p.nu <= n and n - 1 <= p.mu <= n - 1 + b
        if tree:
            ok = ok and p.nu == n and p.mu == n - 1
        out.append(BoundCheck(n, ok, f"n={n} beta={b} mu={p.mu} nu={p.nu}"))
    return out


def sequences_match(p1, p2) -> bool:
    """Equal generic index sets with equal mu and nu at each of them."""
    if len(p1) != len(p2):
        raise ValueError("profile sequences have different lengths")
    if [p.generic for p in p1] != [p.generic for p in p2]:
        return False
    return all(a.mu == b.mu and a.nu == b.nu for a, b in zip(p1, p2) if a.generic)


def generic_sequence(profiles, attr: str) -> list[int]:
    return [getattr(p, attr) for p in profiles if p.generic]


def profiles_to_rows(profiles, quantum: bool = False) -> list[dict]:
    rows = []
    for p in profiles:
        row = p.row()
        if quantum:
            row["quantum"] = True
        rows.append(row)
    return rows


def profiles_to_csv(profiles) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "lambda", "generic", "mu", "nu"])
    for p in profiles:
        writer.writerow([p.n, fmt(p.eigenvalue), int(p.generic),
                         "" if p.mu is None else p.mu, "" if p.nu is None else p.nu])
    return buf.getvalue()
