"""Command-line entry point.

Every command writes one JSON document (stdout or ``--output``) and, where
there is tabular data, optional CSV files for plotting elsewhere.  The exit
status is 0 exactly when every assertion in the run passed.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import qnodal, theorems
from .graph import GraphError, find_leaf_pairs
from .graphio import GraphFileError, catalog, graph_to_dict, is_metric, load_graph
from .nodal import check_bounds, nodal_profiles, profiles_to_rows
from .qspectra import (DEFAULT_GRID_DENSITY, QZERO_TOL, SecularError, fd_oracle, positions, secular_spectrum,
                       secular_trace, spectrum_k, spectrum_up_to)
from .report import VerificationReport, dumps, jsonable, rows_to_csv
from .spectra import DEGENERACY_TOL, ISO_TOL, ZERO_TOL, graph_spectrum

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3
PROFILE_COLUMNS = ["n", "lambda", "generic", "mu", "nu"]


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    output: str | None = None
    tol_degeneracy: float = DEGENERACY_TOL
    tol_zero: float = ZERO_TOL
    tol_iso: float = ISO_TOL
    k_max: float | None = None
    grid_density: float = DEFAULT_GRID_DENSITY
    seed: int = 0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("tol_degeneracy", "tol_zero", "tol_iso", "grid_density"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


class InputError(Exception):
    pass


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _inputs(cfg, count, metric=None):
    if len(cfg.inputs) < count:
        raise InputError(f"'{cfg.command}' needs {count} --input file(s)")
    out = []
    for p in cfg.inputs[:count]:
        G, pairs = load_graph(p)
        if metric is not None and is_metric(G) != metric:
            raise InputError(f"{p}: expected a {'metric' if metric else 'discrete'} graph")
        out.append((G, pairs))
    return out


def _first_pair(G, pairs, path, k=None):
    if not pairs:
        raise InputError(f"{path}: missing leaf_pairs entry")
    if k is not None and pairs[0].k != k:
        raise InputError(f"{path}: need a {k}-leaf-pair")
    return pairs[0]


# --- commands --------------------------------------------------------------

def cmd_spectrum(cfg):
    ((G, pairs),) = _inputs(cfg, 1, metric=False)
    S = graph_spectrum(G, degeneracy_tol=cfg.tol_degeneracy, zero_tol=cfg.tol_zero)
    profiles = nodal_profiles(G, S)
    rep = VerificationReport("bounds", {"graph": graph_to_dict(G, pairs)})
    for b in check_bounds(G, profiles):
        rep.check(b.detail, b.passed)
    doc = {"graph": graph_to_dict(G, pairs), "spectrum": S.to_dict(cfg.options.get("vectors", False)),
           "profiles": profiles_to_rows(profiles), "report": rep.to_dict()}
    if cfg.options.get("csv"):
        Path(cfg.options["csv"]).write_text(rows_to_csv(profiles_to_rows(profiles), PROFILE_COLUMNS))
    return doc, rep.passed


def _quantum_eigenpairs(cfg, G):
    n_max = cfg.options.get("nmax")
    if cfg.k_max is None and n_max is None:
        n_max = 20
    if cfg.k_max is not None:
        eps = secular_spectrum(G, cfg.k_max, cfg.grid_density, zero_tol=cfg.options.get("qzero", QZERO_TOL))
        return eps, cfg.k_max, n_max
    eps, k_max = spectrum_up_to(G, n_max, cfg.grid_density)
    return eps, k_max, n_max


def cmd_qspectrum(cfg):
    ((G, _),) = _inputs(cfg, 1, metric=True)
    eps, k_max, n_max = _quantum_eigenpairs(cfg, G)
    if n_max is not None:
        cut = positions(eps, n_max)[-1][1].k
        eps = [ep for ep in eps if ep.k <= cut]
    profiles = qnodal.q_profiles(G, eps)
    rep = VerificationReport("quantum bounds", {"k_max": k_max, "grid_density": cfg.grid_density})
    for n, ok in qnodal.check_q_bounds(G, profiles):
        rep.check(f"n={n}", ok)
    worst = max((ep.continuity_residual for ep in eps), default=0.0)
    rep.check("vertex continuity residual", worst < 1e-8, worst, 1e-8)
    spectrum = {"k": [ep.k for ep in eps], "lambda": [ep.eigenvalue for ep in eps],
                "multiplicity": [ep.multiplicity for ep in eps], "generic": [ep.generic for ep in eps]}
    rows = [p.row() for p in profiles]
    doc = {"graph": G.to_dict(), "spectrum": spectrum, "profiles": rows, "report": rep.to_dict()}
    if cfg.options.get("csv"):
        Path(cfg.options["csv"]).write_text(rows_to_csv(rows, PROFILE_COLUMNS + ["quantum"]))
    if cfg.options.get("trace"):
        ks, sv = secular_trace(G, k_max, cfg.grid_density)
        Path(cfg.options["trace"]).write_text(rows_to_csv([{"k": a, "sigma_min": b} for a, b in zip(ks, sv)]))
    return doc, rep.passed


def _verify_lemma_like(cfg, fn, **kw):
    (G1, p1), (G2, p2) = _inputs(cfg, 2, metric=False)
    pair1 = _first_pair(G1, p1, cfg.inputs[0])
    pair2 = _first_pair(G2, p2, cfg.inputs[1])
    return fn(G1, G2, pair1, pair2, cfg.options.get("j", 1), **kw)


def cmd_verify(cfg):
    case = cfg.options["case"]
    if case == "lemma1":
        rep = _verify_lemma_like(cfg, theorems.verify_lemma1)
    elif case == "thm1":
        rep = _verify_lemma_like(cfg, theorems.verify_theorem1, iso_tol=cfg.tol_iso)
    elif case == "thm2":
        ((G, pairs),) = _inputs(cfg, 1, metric=False)
        rep = theorems.verify_theorem2(G, _first_pair(G, pairs, cfg.inputs[0], k=1))
    elif case == "cor1":
        (G1, p1), (G2, p2) = _inputs(cfg, 2, metric=False)
        rep = theorems.verify_corollary1(G1, G2, _first_pair(G1, p1, cfg.inputs[0], 1),
                                         _first_pair(G2, p2, cfg.inputs[1], 1))
    elif case == "thm3":
        loaded = _inputs(cfg, 1, metric=True) if len(cfg.inputs) == 1 else _inputs(cfg, 2, metric=True)
        G1 = loaded[0][0]
        G2 = loaded[-1][0]
        idx = cfg.options.get("pairs") or ([0, 1] if len(loaded) == 1 else [0, 0])
        for G, i in ((G1, idx[0]), (G2, idx[-1])):
            if not 0 <= i < len(G.leaf_pairs):
                raise InputError(f"leaf pair index {i} missing")
        rep = qnodal.verify_theorem3(G1, G2, idx[0], idx[-1], cfg.options.get("l1", 0.4142),
                                     cfg.options.get("nmax") or 20, cfg.grid_density, cfg.k_max)
    elif case == "interlacing":
        rep = qnodal.interlacing_check(cfg.options.get("length", 1.0), cfg.options.get("l1", 0.4142),
                                       cfg.k_max if cfg.k_max is not None else 30.0)
    else:
        raise InputError(f"unknown verify case {case!r}")
    return rep.to_dict(), rep.passed


def cmd_search(cfg):
    result = theorems.search_noniso_pairs(cfg.options.get("min_vertices", 4), cfg.options.get("max_vertices", 11),
                                          max_results=cfg.options.get("max_results"))
    doc = catalog(result)
    doc["seed"] = cfg.seed
    return doc, bool(result.found) and all(rep.passed for _, _, rep in result.found)


def oracle_table(G, count=10, ppu=2000):
    """Secular vs finite-difference eigenvalues with an observed convergence order."""
    eps, _ = spectrum_up_to(G, count + 1)
    lam = spectrum_k(eps, count + 1) ** 2
    lam = lam[lam > 0][:count]
    fine = fd_oracle(G, ppu, count + 1)
    coarse = fd_oracle(G, ppu // 2, count + 1)
    fine, coarse = fine[fine > 0][:count], coarse[coarse > 0][:count]
    rows = []
    for n, (a, f, c) in enumerate(zip(lam, fine, coarse), start=1):
        ef, ec = abs(f - a) / a, abs(c - a) / a
        order = math.log2(ec / ef) if ef > 0 and ec > 0 else float("nan")
        rows.append({"n": n, "lambda": a, "lambda_fd": f, "rel_error": ef, "rel_error_half": ec, "order": order})
    return rows


def cmd_oracle(cfg):
    ((G, _),) = _inputs(cfg, 1, metric=True)
    count = cfg.options.get("nmax") or 10
    rows = oracle_table(G, count, cfg.options.get("ppu", 2000))
    rep = VerificationReport("fd oracle", {"graph": G.to_dict(), "count": count,
                                           "points_per_unit_length": cfg.options.get("ppu", 2000)})
    worst = max(r["rel_error"] for r in rows)
    rep.check("relative agreement", worst <= 1e-3, worst, 1e-3)
    orders = [r["order"] for r in rows if np.isfinite(r["order"])]
    rep.check("second-order convergence", bool(orders) and float(np.median(orders)) > 1.8,
              float(np.median(orders)) if orders else None, 1.8)
    if cfg.options.get("csv"):
        Path(cfg.options["csv"]).write_text(rows_to_csv(rows))
    return {"table": rows, "report": rep.to_dict()}, rep.passed


COMMANDS = {"spectrum": cmd_spectrum, "qspectrum": cmd_qspectrum, "verify": cmd_verify,
            "search": cmd_search, "oracle": cmd_oracle}
VERIFY_CASES = ["lemma1", "thm1", "thm2", "cor1", "thm3", "interlacing"]


def run(cfg: RunConfig) -> int:
    try:
        doc, ok = COMMANDS[cfg.command](cfg)
    except (InputError, GraphFileError, GraphError, SecularError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(cfg.output, dumps(jsonable(doc)))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", default=[], help="graph JSON file (repeatable)")
    common.add_argument("--output", help="write the JSON document here instead of stdout")
    common.add_argument("--csv", help="write the main table as CSV")
    common.add_argument("--kmax", type=float, help="largest wavenumber (quantum commands)")
    common.add_argument("--grid-density", type=float, default=DEFAULT_GRID_DENSITY)
    common.add_argument("--tol-degeneracy", type=float, default=DEGENERACY_TOL)
    common.add_argument("--tol-zero", type=float, default=ZERO_TOL)
    common.add_argument("--tol-iso", type=float, default=ISO_TOL)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--nmax", type=int, help="number of spectral positions")

    p = argparse.ArgumentParser(prog="isonodal", description="Nodal counts of isospectral graphs.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("spectrum", parents=[common], help="discrete spectrum and nodal table").add_argument(
        "--vectors", action="store_true", help="include eigenvectors")
    q = sub.add_parser("qspectrum", parents=[common], help="quantum spectrum, nodal table, secular trace")
    q.add_argument("--trace", help="CSV file for the (k, smallest singular value) scan")
    v = sub.add_parser("verify", parents=[common], help="check one claim on given graphs")
    v.add_argument("case", choices=VERIFY_CASES)
    v.add_argument("--j", type=int, default=1, help="arm position of the inserted edge")
    v.add_argument("--l1", type=float, default=0.4142, help="glue distance from the root")
    v.add_argument("--length", type=float, default=1.0, help="leaf length for interlacing")
    v.add_argument("--pair", type=int, action="append", help="metric leaf-pair index (once per graph)")
    s = sub.add_parser("search", parents=[common], help="search trees for equal-count non-isospectral pairs")
    s.add_argument("--min-vertices", type=int, default=4)
    s.add_argument("--max-vertices", type=int, default=11)
    s.add_argument("--max-results", type=int)
    o = sub.add_parser("oracle", parents=[common], help="finite-difference cross-check table")
    o.add_argument("--ppu", type=int, default=2000, help="finite-difference points per unit length")
    return p


def config_from_args(args) -> RunConfig:
    known = {"command", "input", "output", "kmax", "grid_density", "tol_degeneracy", "tol_zero", "tol_iso", "seed"}
    options = {k: v for k, v in vars(args).items() if k not in known and v is not None}
    if "pair" in options:
        options["pairs"] = options.pop("pair")
    if args.command == "verify":
        options["case"] = options.pop("case")
    return RunConfig(args.command, args.input, args.output, args.tol_degeneracy, args.tol_zero, args.tol_iso,
                     args.kmax, args.grid_density, args.seed, options)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
