"""
Edge types of the Reeb graph of a field on a Moebius band.

A regular level curve on a Moebius band either runs parallel to the
boundary (type A: cutting along it leaves an annulus holding the boundary
and a Moebius band) or bounds a disk (type B: a disk and a Moebius band
with a hole). The classification of an edge is read off by cutting along
representative curves of the edge and recognising the two pieces.

On a tree-shaped graph the A-edges form one path starting at the boundary
vertex; its far end is the distinguished critical component.
"""

import logging
from dataclasses import dataclass, field as dc_field
from enum import Enum

import networkx as nx

from surfaces.cover import lift_curve
from surfaces.exceptions import (
    LemmaViolated,
    NotAMoebiusBand,
    NotATree,
    UnexpectedCutPattern,
)
from surfaces.mesh import PieceTag, classify_piece, cut_along_curve

from .reeb import ReebGraph, is_tree, representative_curve

logger = logging.getLogger(__name__)

DEFAULT_FRACTIONS = (0.25, 0.5, 0.75)


class EdgeType(str, Enum):
    A = "A"
    B = "B"


def require_moebius(mesh):
    if len(mesh.components) != 1:
        raise NotAMoebiusBand(f"surface has {len(mesh.components)} components")
    kind = classify_piece(mesh, 0)
    if kind.tag is not PieceTag.MOEBIUS:
        raise NotAMoebiusBand(
            f"surface is {kind.tag.value} (chi={kind.chi}, orientable={kind.orientable}, "
            f"boundary circles={kind.boundary_count})",
            details=kind.as_dict(),
        )
    return kind


def cut_pattern(mesh, curve):
    """
    Cut along ``curve`` and name the outcome.

    Returns (EdgeType or None, pieces) where pieces lists
    (PieceKind, holds the boundary) for each component of the cut.
    """
    cut = cut_along_curve(mesh, curve)
    marker = mesh.boundary_cycles[0][0]
    pieces = []
    for component in range(len(cut.components)):
        kind = classify_piece(cut, component)
        pieces.append((kind, cut.vertex_component[marker] == component))
    tags = sorted((kind.tag.value, holds) for kind, holds in pieces)
    if tags == sorted([(PieceTag.ANNULUS.value, True), (PieceTag.MOEBIUS.value, False)]):
        return EdgeType.A, pieces
    if tags == sorted([(PieceTag.DISK.value, False), (PieceTag.MOEBIUS_WITH_HOLE.value, True)]):
        return EdgeType.B, pieces
    return None, pieces


def classify_edge(mesh, field, g: ReebGraph, edge, fractions=DEFAULT_FRACTIONS) -> EdgeType:
    """
    Type of an edge, checked at several levels inside its interval.

    Raises:
        NotAMoebiusBand: the mesh is not a single Moebius band.
        UnexpectedCutPattern: a cut gives neither expected pair of pieces,
            or two levels of the same edge disagree.
    """
    require_moebius(mesh)
    edge_id = edge.id if hasattr(edge, "id") else edge
    found = set()
    for fraction in fractions:
        curve = representative_curve(g, edge_id, fraction)
        edge_type, pieces = cut_pattern(mesh, curve)
        if edge_type is None:
            described = ", ".join(
                f"{kind.tag.value}{' with boundary' if holds else ''}" for kind, holds in pieces
            )
            raise UnexpectedCutPattern(
                f"cutting edge {edge_id} at {curve.value} gives {described}",
                details={"edge": edge_id, "value": curve.value, "pieces": [k.as_dict() for k, _ in pieces]},
            )
        found.add(edge_type)
    if len(found) != 1:
        raise UnexpectedCutPattern(f"edge {edge_id} changes type inside its interval")
    (edge_type,) = found
    logger.debug(f"edge {edge_id} is of type {edge_type.value}")
    return edge_type


def classify_edges(mesh, field, g: ReebGraph, fractions=DEFAULT_FRACTIONS):
    return {edge.id: classify_edge(mesh, field, g, edge.id, fractions) for edge in g.edges}


def lift_edge_type(cover, total_field, curve) -> EdgeType:
    """
    Type of a curve seen from the orientation cover, an annulus.

    Both kinds of curve lift to two circles. An essential lift separates the
    two boundary circles of the cover, a lift bounding a disk does not.
    """
    lifts = lift_curve(cover, total_field, curve)
    if len(lifts) != 2:
        raise UnexpectedCutPattern(f"curve at {curve.value} lifts to {len(lifts)} circle(s), expected 2")
    total = cover.total
    cut = cut_along_curve(total, lifts[0])
    first, second = total.boundary_cycles[0][0], total.boundary_cycles[1][0]
    if cut.vertex_component[first] != cut.vertex_component[second]:
        return EdgeType.A
    return EdgeType.B


# ----------------------------------------------------------------------
# edge lemma
# ----------------------------------------------------------------------


@dataclass
class EdgeLemmaReport:
    passed: bool
    max_a_degree: int
    violations: list = dc_field(default_factory=list)

    def as_dict(self):
        return {
            "passed": self.passed,
            "max_a_degree": self.max_a_degree,
            "violations": self.violations,
        }


def _type_of(types, edge_id):
    value = types[edge_id]
    return value if isinstance(value, EdgeType) else EdgeType(value)


def a_degrees(g: ReebGraph, types):
    degrees = {node.id: 0 for node in g.nodes}
    for edge in g.edges:
        if _type_of(types, edge.id) is EdgeType.A:
            degrees[edge.lower] += 1
            degrees[edge.upper] += 1
    return degrees


def verify_edge_lemma(g: ReebGraph, types) -> EdgeLemmaReport:
    """
    Check the two rules the edge types obey on a Moebius band:
    no vertex meets more than two A-edges, and past any B-edge (seen from
    the boundary vertex) every edge is of type B.
    """
    degrees = a_degrees(g, types)
    violations = []
    for node_id, degree in sorted(degrees.items()):
        if degree > 2:
            violations.append({"rule": "a_degree", "vertex": node_id, "a_degree": degree})

    graph = g.graph
    for edge in g.edges:
        if _type_of(types, edge.id) is not EdgeType.B:
            continue
        rest = graph.copy()
        rest.remove_edge(edge.lower, edge.upper, key=edge.id)
        if g.v0 is not None and nx.has_path(rest, edge.lower, g.v0) and nx.has_path(rest, edge.upper, g.v0):
            # edge on a cycle, nothing lies past it
            continue
        far = edge.upper if g.v0 is None or nx.has_path(rest, edge.lower, g.v0) else edge.lower
        side = nx.node_connected_component(rest, far)
        for other in g.edges:
            if other.lower in side and other.upper in side and _type_of(types, other.id) is EdgeType.A:
                path = nx.shortest_path(rest, far, other.lower)
                violations.append(
                    {"rule": "b_subtree", "edge": edge.id, "witness": other.id, "path": path}
                )
                break

    max_degree = max(degrees.values(), default=0)
    report = EdgeLemmaReport(passed=not violations, max_a_degree=max_degree, violations=violations)
    logger.info(f"edge lemma {'holds' if report.passed else 'fails'}: max A-degree {max_degree}")
    return report


# ----------------------------------------------------------------------
# distinguished vertex
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class DistinguishedVertex:
    vertex: int
    path: tuple  # graph vertices from v0
    edges: tuple  # A-edges walked

    def as_dict(self):
        return {"vertex": self.vertex, "path": list(self.path), "edges": list(self.edges)}


def find_distinguished_vertex(g: ReebGraph, types) -> DistinguishedVertex:
    """
    Walk the A-edges from the boundary vertex to the far end of their path.

    Raises:
        NotATree: the graph has a cycle or is disconnected.
        LemmaViolated: the edge types break the edge lemma, or the walk and
            an exhaustive scan disagree about the end vertex.
    """
    if not is_tree(g):
        raise NotATree(f"Reeb graph with {g.n_vertices} vertices and {g.n_edges} edges is not a tree")
    report = verify_edge_lemma(g, types)
    if not report.passed:
        raise LemmaViolated("edge types break the edge lemma", details=report.violations)
    if g.v0 is None:
        raise LemmaViolated("graph has no boundary vertex to start from")

    path = [g.v0]
    walked = []
    current, previous_edge = g.v0, None
    while True:
        step = [
            edge
            for edge in g.incident(current)
            if _type_of(types, edge.id) is EdgeType.A and edge.id != previous_edge
        ]
        if not step:
            break
        if len(step) > 1:
            raise LemmaViolated(f"A-walk branches at vertex {current}")
        edge = step[0]
        walked.append(edge.id)
        previous_edge = edge.id
        current = g.other_end(edge, current)
        path.append(current)

    degrees = a_degrees(g, types)
    ends = [node_id for node_id, degree in degrees.items() if degree == 1 and node_id != g.v0]
    if ends != [current] or current == g.v0:
        raise LemmaViolated(
            f"A-walk ends at {current}, vertices with one A-edge: {ends}",
            details={"walk": path, "candidates": ends},
        )
    logger.info(f"distinguished vertex {current} reached by A-walk of length {len(walked)}")
    return DistinguishedVertex(vertex=current, path=tuple(path), edges=tuple(walked))
