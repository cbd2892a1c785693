"""JSON graph files: discrete graphs, metric graphs and search catalogs."""

from __future__ import annotations

import json
from pathlib import Path

from .graph import DiscreteGraph, GraphError, LeafPairSpec, build_graph, check_leaf_pair
from .metric import MetricGraph, build_metric, glue_leaf_pair
from .report import jsonable


class GraphFileError(ValueError):
    """Malformed or inconsistent graph JSON."""


def _leaf_pair(d) -> LeafPairSpec:
    try:
        return LeafPairSpec(int(d["root"]), tuple(int(v) for v in d["arm_plus"]),
                            tuple(int(v) for v in d["arm_minus"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFileError(f"bad leaf pair entry {d!r}") from exc


def graph_from_dict(d: dict):
    """Discrete graph (with leaf pairs) or metric graph when ``lengths`` is present."""
    if not isinstance(d, dict) or "vertices" not in d or "edges" not in d:
        raise GraphFileError("graph JSON needs 'vertices' and 'edges'")
    pairs = d.get("leaf_pairs", [])
    try:
        if "lengths" in d:
            G = build_metric(d["vertices"], d["edges"], d["lengths"], pairs)
            for g in d.get("glues", []):
                G = glue_leaf_pair(G, int(g["pair"]), float(g["l1"]))
            return G, list(range(len(G.leaf_pairs)))
        G = build_graph(d["vertices"], d["edges"])
    except GraphError as exc:
        raise GraphFileError(str(exc)) from exc
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise GraphFileError(f"malformed graph entry ({type(exc).__name__}: {exc})") from exc
    specs = [_leaf_pair(p) for p in pairs]
    for p in specs:
        problems = check_leaf_pair(G, p)
        if problems:
            raise GraphFileError(f"leaf pair at root {p.root}: " + "; ".join(problems))
    return G, specs


def graph_to_dict(G, pairs=()) -> dict:
    out = G.to_dict()
    if isinstance(G, DiscreteGraph) and pairs:
        out["leaf_pairs"] = [p.to_dict() for p in pairs]
    return out


def load_graph(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphFileError(f"{path}: malformed JSON ({exc})") from exc
    return graph_from_dict(data)


def is_metric(G) -> bool:
    return isinstance(G, MetricGraph)


def catalog(result) -> dict:
    """Search result as a JSON-ready catalog of graph pairs with their reports."""
    entries = []
    for H1, H2, rep in result.found:
        entries.append({"graph_1": H1.to_dict(), "graph_2": H2.to_dict(), "report": rep.to_dict()})
    return jsonable({"stats": result.stats(), "pairs": entries})
