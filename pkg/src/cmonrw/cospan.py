"""Cospans of hypergraphs with finite-function legs.

A cospan packages a carrier hypergraph with two interface maps: ``left``
lists the input boundary nodes in order, ``right`` the output boundary.
Composition glues output boundary to input boundary node-by-node.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    Cyclic,
    InterfaceMismatch,
    NotDiscrete,
    NotRightMonogamous,
    UnknownNode,
)
from .hypergraph import (
    Edge,
    Hypergraph,
    UnionFind,
    canonical_form,
    graph_dot_lines,
    in_degree,
    is_acyclic,
    terminal_nodes,
)


@dataclass(frozen=True)
class FinFunction:
    """A function between finite ordinals, as a lookup table."""

    dom: int
    cod: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != self.dom:
            raise InterfaceMismatch(
                f"table length {len(self.table)} != domain {self.dom}"
            )
        for i, j in enumerate(self.table):
            if not 0 <= j < self.cod:
                raise InterfaceMismatch(
                    f"entry {i} maps to {j}, outside codomain {self.cod}"
                )

    def __call__(self, i: int) -> int:
        return self.table[i]

    def is_mono(self) -> bool:
        return len(set(self.table)) == self.dom

    def compose(self, other: "FinFunction") -> "FinFunction":
        """self ; other (apply self first)."""
        if self.cod != other.dom:
            raise InterfaceMismatch(
                f"cannot compose: codomain {self.cod} != domain {other.dom}"
            )
        return FinFunction(
            self.dom, other.cod, tuple(other.table[j] for j in self.table)
        )

    @staticmethod
    def identity(n: int) -> "FinFunction":
        return FinFunction(n, n, tuple(range(n)))


@dataclass(frozen=True, eq=False)
class Cospan:
    """Carrier graph with ordered input and output boundary node lists."""

    carrier: Hypergraph
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        for v in self.left + self.right:
            if v not in self.carrier.nodes:
                raise UnknownNode(f"interface node {v} not in carrier")

    @property
    def arity(self) -> int:
        return len(self.left)

    @property
    def coarity(self) -> int:
        return len(self.right)


def identity_cospan(n: int) -> Cospan:
    g = Hypergraph(frozenset(range(n)), {})
    wires = tuple(range(n))
    return Cospan(g, wires, wires)


def symmetry_cospan(m: int, n: int) -> Cospan:
    g = Hypergraph(frozenset(range(m + n)), {})
    left = tuple(range(m + n))
    right = tuple(range(m, m + n)) + tuple(range(m))
    return Cospan(g, left, right)


def compose(a: Cospan, b: Cospan) -> Cospan:
    """Glue a's output boundary to b's input boundary positionwise."""
    if a.coarity != b.arity:
        raise InterfaceMismatch(
            f"cannot compose: coarity {a.coarity} != arity {b.arity}"
        )
    # Tag nodes (0, v) from a and (1, v) from b, then merge along the shared
    # boundary and renumber densely by smallest tagged key per class.
    uf = UnionFind()
    for i in range(a.coarity):
        uf.union((0, a.right[i]), (1, b.left[i]))
    keys = [(0, v) for v in sorted(a.carrier.nodes)] + [
        (1, v) for v in sorted(b.carrier.nodes)
    ]
    rep_rank: dict = {}
    rename: dict = {}
    for key in keys:
        r = uf.find(key)
        if r not in rep_rank:
            rep_rank[r] = len(rep_rank)
        rename[key] = rep_rank[r]
    edges: dict[int, Edge] = {}
    for eid in sorted(a.carrier.edges):
        e = a.carrier.edges[eid]
        edges[len(edges)] = Edge(
            e.label,
            tuple(rename[(0, v)] for v in e.sources),
            tuple(rename[(0, v)] for v in e.targets),
        )
    for eid in sorted(b.carrier.edges):
        e = b.carrier.edges[eid]
        edges[len(edges)] = Edge(
            e.label,
            tuple(rename[(1, v)] for v in e.sources),
            tuple(rename[(1, v)] for v in e.targets),
        )
    g = Hypergraph(frozenset(range(len(rep_rank))), edges)
    return Cospan(
        g,
        tuple(rename[(0, v)] for v in a.left),
        tuple(rename[(1, v)] for v in b.right),
    )


def tensor(a: Cospan, b: Cospan) -> Cospan:
    """Place b beside a, disjointly."""
    shift = (max(a.carrier.nodes) + 1) if a.carrier.nodes else 0
    nodes = frozenset(a.carrier.nodes) | frozenset(
        v + shift for v in b.carrier.nodes
    )
    edges: dict[int, Edge] = {}
    for eid in sorted(a.carrier.edges):
        edges[len(edges)] = a.carrier.edges[eid]
    for eid in sorted(b.carrier.edges):
        e = b.carrier.edges[eid]
        edges[len(edges)] = Edge(
            e.label,
            tuple(v + shift for v in e.sources),
            tuple(v + shift for v in e.targets),
        )
    g = Hypergraph(nodes, edges)
    return Cospan(
        g,
        a.left + tuple(v + shift for v in b.left),
        a.right + tuple(v + shift for v in b.right),
    )


def function_to_cospan(f: FinFunction) -> Cospan:
    """A discrete cospan whose left leg is f and right leg the identity."""
    g = Hypergraph(frozenset(range(f.cod)), {})
    return Cospan(g, f.table, tuple(range(f.cod)))


def cospan_to_function(c: Cospan) -> FinFunction:
    """Inverse of function_to_cospan, when the shape allows it."""
    if c.carrier.edges:
        raise NotDiscrete(
            f"carrier has {len(c.carrier.edges)} edges; expected none"
        )
    if len(set(c.right)) != len(c.right) or set(c.right) != c.carrier.nodes:
        raise NotRightMonogamous(
            "output boundary must list each carrier node exactly once"
        )
    pos = {v: j for j, v in enumerate(c.right)}
    return FinFunction(
        len(c.left), len(c.right), tuple(pos[v] for v in c.left)
    )


def is_right_monogamous(c: Cospan) -> bool:
    """Right leg mono, image exactly the terminal nodes, out-degree <= 1."""
    if len(set(c.right)) != len(c.right):
        return False
    if frozenset(c.right) != terminal_nodes(c.carrier):
        return False
    seen: set[int] = set()
    for e in c.carrier.edges.values():
        for v in e.sources:
            if v in seen:
                return False
            seen.add(v)
    return True


def is_monogamous(c: Cospan) -> bool:
    """Both legs mono, matching the no-input and no-output nodes exactly,
    with every node used at most once as a source and once as a target."""
    if not is_right_monogamous(c):
        return False
    if len(set(c.left)) != len(c.left):
        return False
    starts = {v for v in c.carrier.nodes if in_degree(c.carrier, v) == 0}
    if frozenset(c.left) != starts:
        return False
    seen: set[int] = set()
    for e in c.carrier.edges.values():
        for v in e.targets:
            if v in seen:
                return False
            seen.add(v)
    return True


def cospan_key(c: Cospan) -> tuple:
    """Hashable key equal for two cospans iff they are isomorphic as
    cospans (same arities, carrier iso fixing both boundaries in order)."""
    return (
        len(c.left),
        len(c.right),
        canonical_form(c.carrier, pins=c.left + c.right),
    )


def iso_equal(a: Cospan, b: Cospan) -> bool:
    return cospan_key(a) == cospan_key(b)


def validate_right_monogamous_acyclic(c: Cospan) -> None:
    if not is_right_monogamous(c):
        raise NotRightMonogamous("cospan is not right-monogamous")
    if not is_acyclic(c.carrier):
        raise Cyclic("carrier has a directed cycle")


def cospan_to_document(c: Cospan) -> dict:
    """JSON-ready description of a cospan."""
    return {
        "nodes": sorted(c.carrier.nodes),
        "edges": [
            {
                "id": eid,
                "label": e.label,
                "sources": list(e.sources),
                "targets": list(e.targets),
            }
            for eid, e in sorted(c.carrier.edges.items())
        ],
        "left": list(c.left),
        "right": list(c.right),
    }


def cospan_from_document(doc: dict) -> Cospan:
    edges = {
        int(e["id"]): Edge(
            e["label"], tuple(e["sources"]), tuple(e["targets"])
        )
        for e in doc["edges"]
    }
    g = Hypergraph(frozenset(int(v) for v in doc["nodes"]), edges)
    return Cospan(g, tuple(doc["left"]), tuple(doc["right"]))


def cospan_to_dot(c: Cospan, name: str = "cospan") -> str:
    """DOT rendering with the two interfaces drawn as labelled rails."""
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    lines.append("  subgraph cluster_left {")
    lines.append('    label="left"; color=blue;')
    for i in range(len(c.left)):
        lines.append(f'    l{i} [shape=plaintext, label="{i}"];')
    if len(c.left) > 1:
        chain = " -> ".join(f"l{i}" for i in range(len(c.left)))
        lines.append(f"    {chain} [style=invis];")
    lines.append("  }")
    lines.append("  subgraph cluster_right {")
    lines.append('    label="right"; color=blue;')
    for i in range(len(c.right)):
        lines.append(f'    r{i} [shape=plaintext, label="{i}"];')
    if len(c.right) > 1:
        chain = " -> ".join(f"r{i}" for i in range(len(c.right)))
        lines.append(f"    {chain} [style=invis];")
    lines.append("  }")
    lines.extend(graph_dot_lines(c.carrier))
    for i, v in enumerate(c.left):
        lines.append(f"  l{i} -> n{v} [style=dashed, arrowhead=none];")
    for i, v in enumerate(c.right):
        lines.append(f"  n{v} -> r{i} [style=dashed, arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"
