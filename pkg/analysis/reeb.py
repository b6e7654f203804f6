"""
Kronrod-Reeb graph of a validated field.

The graph is built by a sweep over the critical and boundary levels. At
every such level the level set is split into connected components; a
component holding a critical or a boundary vertex becomes a graph vertex,
any other component is a regular circle that merely passes through the
level. Between two consecutive levels the regular curves are traced once,
at a sample value, and matched to the components at both ends through the
connected pieces of the slabs in between. Chains of curves joined through
regular components make up the edges.
"""

import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Optional

import networkx as nx

from surfaces.exceptions import InconsistentCellStructure
from surfaces.field import (
    MorseField,
    critical_values,
    curve_element,
    level_components,
    level_curves,
    slab_labels,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReebNode:
    id: int
    level: float
    critical: tuple = ()  # critical vertices in the component
    boundary: tuple = ()  # boundary cycle indices
    elements: frozenset = dc_field(default=frozenset(), repr=False)
    kinds: tuple = ()

    @property
    def is_boundary(self):
        return bool(self.boundary)

    @property
    def label(self):
        if self.is_boundary:
            return "boundary"
        return ", ".join(str(kind) for kind in self.kinds) or "critical"

    def as_dict(self):
        return {
            "id": self.id,
            "level": self.level,
            "kind": "boundary" if self.is_boundary else "critical",
            "critical": [
                {"vertex": v, "kind": str(kind)} for v, kind in zip(self.critical, self.kinds)
            ],
            "boundary": list(self.boundary),
        }


@dataclass(frozen=True)
class ReebEdge:
    id: int
    lower: int
    upper: int
    lo: float
    hi: float
    samples: tuple = dc_field(default=(), repr=False)  # ((slab index, LevelCurve), ...)

    def as_dict(self):
        return {"id": self.id, "lower": self.lower, "upper": self.upper, "interval": [self.lo, self.hi]}


@dataclass(frozen=True, eq=False)
class ReebGraph:
    nodes: tuple
    edges: tuple
    v0: Optional[int] = None
    field: Optional[MorseField] = None
    levels: tuple = ()

    @classmethod
    def from_edges(cls, edges, v0=0):
        """
        Bare graph from ``(lower, upper)`` pairs, levels taken from the node ids.

        Useful for checking graph-level statements on hand-made trees.
        """
        ids = sorted({v for edge in edges for v in edge} | {v0})
        nodes = tuple(ReebNode(id=v, level=float(v), boundary=(0,) if v == v0 else ()) for v in ids)
        built = tuple(
            ReebEdge(id=i, lower=a, upper=b, lo=float(a), hi=float(b)) for i, (a, b) in enumerate(edges)
        )
        return cls(nodes=nodes, edges=built, v0=v0)

    @cached_property
    def graph(self):
        multigraph = nx.MultiGraph()
        multigraph.add_nodes_from(node.id for node in self.nodes)
        for edge in self.edges:
            multigraph.add_edge(edge.lower, edge.upper, key=edge.id)
        return multigraph

    @property
    def n_vertices(self):
        return len(self.nodes)

    @property
    def n_edges(self):
        return len(self.edges)

    def incident(self, node_id):
        return [edge for edge in self.edges if node_id in (edge.lower, edge.upper)]

    def degree(self, node_id):
        return sum((edge.lower == node_id) + (edge.upper == node_id) for edge in self.edges)

    def other_end(self, edge, node_id):
        return edge.upper if edge.lower == node_id else edge.lower

    def edges_containing(self, value):
        return [edge for edge in self.edges if edge.lo < value < edge.hi]

    def summary(self):
        return {
            "vertices": self.n_vertices,
            "edges": self.n_edges,
            "is_tree": is_tree(self),
            "v0": self.v0,
            "nodes": [node.as_dict() for node in self.nodes],
            "edge_list": [edge.as_dict() for edge in self.edges],
        }


def _is_node(component, field, boundary_of):
    critical = field.critical_kinds
    for kind, item in component:
        if kind == "v" and (item in critical or item in boundary_of):
            return True
    return False


def build_reeb(mesh, field: MorseField) -> ReebGraph:
    """
    Sweep the critical and boundary levels and assemble the graph.

    Raises:
        InconsistentCellStructure: a slab piece meets two components of one
            level, which a valid field cannot produce.
    """
    levels = critical_values(field)
    boundary_of = mesh.boundary_cycle_of_vertex
    critical = field.critical_kinds

    components = [level_components(field, level) for level in levels]

    # (level index, component index) -> provisional node key, or None when regular
    raw_nodes = []
    node_key = {}
    for k, level in enumerate(levels):
        for index, component in enumerate(components[k]):
            if _is_node(component, field, boundary_of):
                node_key[(k, index)] = len(raw_nodes)
                raw_nodes.append((level, min(component), k, index))

    # curves per slab with their components at both ends
    slabs = []
    for k in range(len(levels) - 1):
        lo, hi = levels[k], levels[k + 1]
        sample = field.regular_value(lo, hi)
        curves = level_curves(field, sample)
        below = _match_curves(field, curves, components[k], lo, sample, ends="lower")
        above = _match_curves(field, curves, components[k + 1], sample, hi, ends="upper")
        slabs.append([(curve, below[i], above[i]) for i, curve in enumerate(curves)])
        logger.debug(f"slab ({lo}, {hi}): {len(curves)} curve(s) at {sample}")

    # regular component -> the curve leaving it upward
    continuation = {}
    for k, slab in enumerate(slabs):
        for position, (_, lower, _) in enumerate(slab):
            if (k, lower) not in node_key:
                if (k, lower) in continuation:
                    raise InconsistentCellStructure(
                        f"regular level component at {levels[k]} continues into two curves"
                    )
                continuation[(k, lower)] = position

    raw_edges = []
    for k, slab in enumerate(slabs):
        for position, (curve, lower, upper) in enumerate(slab):
            if (k, lower) not in node_key:
                continue
            chain = [(k, curve)]
            slab_index, end = k, upper
            while (slab_index + 1, end) not in node_key:
                next_position = continuation.get((slab_index + 1, end))
                if next_position is None:
                    raise InconsistentCellStructure(
                        f"regular level component at {levels[slab_index + 1]} has no curve above it"
                    )
                slab_index += 1
                next_curve, _, end = slabs[slab_index][next_position]
                chain.append((slab_index, next_curve))
            raw_edges.append((node_key[(k, lower)], node_key[(slab_index + 1, end)], tuple(chain)))

    order = sorted(range(len(raw_nodes)), key=lambda i: raw_nodes[i][:2])
    renumber = {old: new for new, old in enumerate(order)}
    nodes = []
    for old in order:
        level, _, k, index = raw_nodes[old]
        component = components[k][index]
        vertices = sorted(item for kind, item in component if kind == "v")
        crit = tuple(v for v in vertices if v in critical)
        cycles = tuple(sorted({boundary_of[v] for v in vertices if v in boundary_of}))
        nodes.append(
            ReebNode(
                id=renumber[old],
                level=float(level),
                critical=crit,
                boundary=cycles,
                elements=component,
                kinds=tuple(critical[v] for v in crit),
            )
        )

    def edge_order(raw):
        lower, upper, chain = raw
        first_slab, first_curve = chain[0]
        return (renumber[lower], renumber[upper], first_slab, min(first_curve.edges))

    edges = []
    for new_id, (lower, upper, chain) in enumerate(sorted(raw_edges, key=edge_order)):
        a, b = renumber[lower], renumber[upper]
        edges.append(ReebEdge(id=new_id, lower=a, upper=b, lo=nodes[a].level, hi=nodes[b].level, samples=chain))

    boundary_nodes = [node.id for node in nodes if node.is_boundary]
    v0 = boundary_nodes[0] if boundary_nodes else None
    graph = ReebGraph(nodes=tuple(nodes), edges=tuple(edges), v0=v0, field=field, levels=tuple(levels))
    logger.info(f"Reeb graph built: {graph.n_vertices} vertices, {graph.n_edges} edges")
    return graph


def _match_curves(field, curves, level_comps, lo, hi, ends):
    """Index of the level component each curve reaches through the slab [lo, hi]."""
    labels = slab_labels(field, lo, hi)
    by_label = {}
    for index, component in enumerate(level_comps):
        label = labels[min(component)]
        if label in by_label:
            raise InconsistentCellStructure(
                f"two level components at {lo if ends == 'lower' else hi} share a slab piece"
            )
        by_label[label] = index
    matched = []
    for curve in curves:
        label = labels[curve_element(curve)]
        if label not in by_label:
            raise InconsistentCellStructure(f"curve at {curve.value} reaches no {ends} level component")
        matched.append(by_label[label])
    return matched


def is_tree(g: ReebGraph) -> bool:
    graph = g.graph
    if graph.number_of_nodes() == 0:
        return False
    return graph.number_of_edges() == graph.number_of_nodes() - 1 and nx.is_connected(graph)


def representative_curve(g: ReebGraph, edge_id, fraction=0.5):
    """
    A regular level curve of the edge's family.

    The value is ``fraction`` of the way through the edge's interval,
    moved off any vertex value; the curve is found by following the edge's
    sample curve through the slab between the two values.
    """
    field = g.field
    edge = g.edges[edge_id]
    value = field.regular_value(edge.lo, edge.hi, fraction)
    for slab_index, sample in edge.samples:
        if g.levels[slab_index] < value < g.levels[slab_index + 1]:
            break
    else:
        raise InconsistentCellStructure(f"edge {edge_id} has no sample around {value}")
    if value == sample.value:
        return sample
    labels = slab_labels(field, min(value, sample.value), max(value, sample.value))
    target = labels[curve_element(sample)]
    for curve in level_curves(field, value):
        if labels[curve_element(curve)] == target:
            return curve
    raise InconsistentCellStructure(f"no curve at {value} continues edge {edge_id}")


def level_count_mismatches(g: ReebGraph):
    """
    Compare traced curve counts with the number of edges over each slab sample.

    Returns a list of (value, traced, expected) triples that disagree.
    """
    mismatches = []
    levels = g.levels
    for k in range(len(levels) - 1):
        value = g.field.regular_value(levels[k], levels[k + 1])
        traced = len(level_curves(g.field, value))
        expected = len(g.edges_containing(value))
        if traced != expected:
            mismatches.append((value, traced, expected))
    return mismatches


def to_dot(g: ReebGraph, types=None) -> str:
    """DOT digraph, lower end to upper end, one rank per level."""
    types = types or {}
    lines = ["digraph reeb {", "  rankdir=BT;", "  node [shape=box];"]
    for node in g.nodes:
        lines.append(f'  n{node.id} [label="{node.level:g}\\n{node.label}"];')
    by_level = {}
    for node in g.nodes:
        by_level.setdefault(node.level, []).append(node.id)
    for level in sorted(by_level):
        members = "; ".join(f"n{i}" for i in by_level[level])
        lines.append(f"  {{ rank=same; {members}; }}")
    for edge in g.edges:
        tag = types.get(edge.id)
        label = f' [label="{tag}"]' if tag is not None else ""
        lines.append(f"  n{edge.lower} -> n{edge.upper}{label};")
    lines.append("}")
    return "\n".join(lines) + "\n"
