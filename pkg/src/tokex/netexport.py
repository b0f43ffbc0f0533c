"""Undirected weighted network of a game, force-directed layout, GraphML/DOT export."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from pathlib import Path

import networkx as nx
import numpy as np

from .core import CumulativeCounts
from .influence import InfluenceScores

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"

# (attribute, domain, graphml type)
GRAPHML_KEYS = (
    ("group", "node", "int"),
    ("influence_size", "node", "double"),
    ("self_giving", "node", "int"),
    ("x", "node", "double"),
    ("y", "node", "double"),
    ("weight", "edge", "int"),
)


@dataclass(frozen=True)
class Node:
    group: int
    influence_size: float
    self_giving: int
    x: float | None = None
    y: float | None = None


@dataclass(frozen=True)
class GameGraph:
    nodes: dict[int, Node]
    edges: dict[tuple[int, int], int] = field(default_factory=dict)  # keys (i, j) with i < j

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        for p, node in sorted(self.nodes.items()):
            G.add_node(p, **{k: v for k, v in vars(node).items() if v is not None})
        for (i, j), w in sorted(self.edges.items()):
            G.add_edge(i, j, weight=w)
        return G


def build_graph(counts: CumulativeCounts, scores: InfluenceScores | None = None) -> GameGraph:
    """Edges carry the total exchanges in either direction by the last round.

    Node size is the sum of the two standardized influence scores when given.
    """
    Y = counts.at(counts.n_rounds)
    n = counts.n_players
    if scores is not None:
        if len(scores.players) != n:
            raise ValueError(f"scores cover {len(scores.players)} players, game has {n}")
        size = scores.std_rho + scores.std_gamma
    else:
        size = np.ones(n)
    group = counts.groups or (1,) * n
    nodes = {p + 1: Node(int(group[p]), float(size[p]), int(Y[p, p])) for p in range(n)}
    W = Y + Y.T
    edges = {(i + 1, j + 1): int(W[i, j]) for i in range(n) for j in range(i + 1, n) if W[i, j] > 0}
    return GameGraph(nodes, edges)


def layout_fr(graph: GameGraph, iterations: int = 50, seed: int = 0) -> GameGraph:
    """Fruchterman-Reingold layout (networkx ``spring_layout``), weights as attraction.

    Coordinates are scaled uniformly into the unit square and centred.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    G = graph.to_networkx()
    pos = nx.spring_layout(G, weight="weight", iterations=iterations, seed=seed)
    players = sorted(graph.nodes)
    xy = np.array([pos[p] for p in players], dtype=float)
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    span = (hi - lo).max()
    if span > 0:
        xy = (xy - lo) / span + (1 - (hi - lo) / span) / 2
    else:
        xy = np.full_like(xy, 0.5)
    nodes = {p: replace(graph.nodes[p], x=float(x), y=float(y)) for p, (x, y) in zip(players, xy)}
    return replace(graph, nodes=nodes)


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def _graphml(graph: GameGraph) -> bytes:
    ET.register_namespace("", GRAPHML_NS)
    root = ET.Element(f"{{{GRAPHML_NS}}}graphml")
    for name, domain, typ in GRAPHML_KEYS:
        ET.SubElement(root, f"{{{GRAPHML_NS}}}key", {
            "id": name, "for": domain, "attr.name": name, "attr.type": typ})
    g = ET.SubElement(root, f"{{{GRAPHML_NS}}}graph", {"id": "G", "edgedefault": "undirected"})
    for p, node in sorted(graph.nodes.items()):
        el = ET.SubElement(g, f"{{{GRAPHML_NS}}}node", {"id": str(p)})
        for name, value in vars(node).items():
            if value is not None:
                ET.SubElement(el, f"{{{GRAPHML_NS}}}data", {"key": name}).text = _fmt(value)
    for (i, j), w in sorted(graph.edges.items()):
        el = ET.SubElement(g, f"{{{GRAPHML_NS}}}edge", {"source": str(i), "target": str(j)})
        ET.SubElement(el, f"{{{GRAPHML_NS}}}data", {"key": "weight"}).text = str(w)
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def _dot(graph: GameGraph) -> bytes:
    lines = ["graph tokens {"]
    for p, node in sorted(graph.nodes.items()):
        attrs = ", ".join(f"{k}={_fmt(v)}" for k, v in vars(node).items() if v is not None)
        lines.append(f"  {p} [{attrs}];")
    for (i, j), w in sorted(graph.edges.items()):
        lines.append(f"  {i} -- {j} [weight={w}];")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode()


def export(graph: GameGraph, format: str, path) -> Path:
    """Write ``graph`` as GraphML 1.0 or Graphviz DOT."""
    writers = {"graphml": _graphml, "dot": _dot}
    if format not in writers:
        raise ValueError(f"format must be one of {sorted(writers)}, got {format!r}")
    path = Path(path)
    path.write_bytes(writers[format](graph))
    return path


def read_graphml(path) -> GameGraph:
    G = nx.read_graphml(path, node_type=int)
    nodes = {int(p): Node(**attrs) for p, attrs in G.nodes(data=True)}
    edges = {tuple(sorted((int(i), int(j)))): int(d["weight"]) for i, j, d in G.edges(data=True)}
    return GameGraph(nodes, edges)
