"""
Decomposition of a Moebius band around its distinguished critical component.

Let K be the distinguished component at level c. A thin slab
``f^-1[c - eps, c + eps]`` around K is a regular neighborhood N. The level
curves bounding N cut the band into one annulus Y_0 holding the boundary
and disks Y_1..Y_n. Capping the boundary turns the band into a projective
plane with a cell structure: the saddles of K are the 0-cells, the arcs of
K between them the 1-cells and the capped pieces the 2-cells.

The cell structure is stored as a combinatorial map. A flag is a corner
``(saddle, sector, end)``: ``sector`` numbers the same-sign runs of the
saddle's link and ``end`` says whether the flag sits at the start (0) or
the end (1) of that run. ``sigma1`` switches the end, ``sigma2`` crosses
into the neighbouring sector, ``sigma0`` follows the arc to its other
saddle. ``sigma0`` is read off by walking the curves bounding N.
"""

import logging
from collections import Counter
from dataclasses import dataclass, replace
from functools import cached_property

from networkx.utils import UnionFind

from surfaces.exceptions import (
    EpsilonCollapse,
    InconsistentCellStructure,
    InvalidComponent,
    PieceMismatch,
)
from surfaces.field import LevelCurve, curve_element, level_curves, slab_labels
from surfaces.mesh import PieceTag, classify_piece, cut_along_curve

from .moebius import find_distinguished_vertex, require_moebius

logger = logging.getLogger(__name__)

INF = float("inf")


@dataclass(frozen=True, eq=False)
class RegularNeighborhood:
    vertex: int
    level: float
    epsilon: float
    elements: frozenset
    curves: tuple  # ((side, LevelCurve), ...), side -1 below, +1 above
    complement: tuple  # one frozenset of slab pieces per complementary component

    @property
    def complement_count(self):
        return len(self.complement)


def _level_gap(g, level):
    others = [x for x in g.levels if x != level]
    return min(abs(x - level) for x in others) if others else None


def _clear_offset(values, level, epsilon):
    taken = {float(x) for x in values}
    while level - epsilon in taken or level + epsilon in taken:
        epsilon /= 2.0
    return epsilon


def regular_neighborhood(mesh, field, g, v, epsilon=None) -> RegularNeighborhood:
    """
    The slab component around the critical component of graph vertex ``v``.

    ``epsilon`` defaults to half the distance from the component's level to
    the nearest other critical or boundary level.

    Raises:
        InvalidComponent: ``v`` is a boundary vertex.
        EpsilonCollapse: the slab picks up another critical point or the boundary.
    """
    node = g.nodes[v]
    if node.is_boundary:
        raise InvalidComponent(f"graph vertex {v} is a boundary component")
    level = node.level
    if epsilon is None:
        gap = _level_gap(g, level)
        epsilon = gap / 2.0 if gap is not None else 1.0
    epsilon = _clear_offset(field.values, level, epsilon)
    lo, hi = level - epsilon, level + epsilon

    middle = slab_labels(field, lo, hi)
    own = middle[min(node.elements)]
    elements = frozenset(element for element, label in middle.items() if label == own)

    critical = field.critical_kinds
    boundary_of = mesh.boundary_cycle_of_vertex
    for kind, item in sorted(elements):
        if kind != "v":
            continue
        if item in boundary_of:
            raise EpsilonCollapse(f"neighborhood of vertex {v} reaches boundary vertex {item}")
        if item in critical and item not in node.critical:
            raise EpsilonCollapse(f"neighborhood of vertex {v} holds critical vertex {item}")

    below = slab_labels(field, -INF, lo)
    above = slab_labels(field, hi, INF)
    pieces = UnionFind()
    for label in set(below.values()):
        pieces[("lo", label)]
    for label in set(above.values()):
        pieces[("hi", label)]
    for label in set(middle.values()) - {own}:
        pieces[("mid", label)]

    curves = []
    for side, value in ((-1, lo), (1, hi)):
        outside = below if side < 0 else above
        tag = "lo" if side < 0 else "hi"
        for curve in level_curves(field, value):
            element = curve_element(curve)
            if middle[element] == own:
                curves.append((side, curve))
            else:
                pieces.union((tag, outside[element]), ("mid", middle[element]))

    complement = tuple(sorted((frozenset(group) for group in pieces.to_sets()), key=min))
    logger.debug(
        f"neighborhood of vertex {v} at {level} +- {epsilon}: {len(curves)} boundary curve(s), "
        f"{len(complement)} complementary piece(s)"
    )
    return RegularNeighborhood(
        vertex=v,
        level=level,
        epsilon=epsilon,
        elements=elements,
        curves=tuple(curves),
        complement=complement,
    )


# ----------------------------------------------------------------------
# pieces
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Piece:
    index: int
    side: int
    curve: object
    kind: object  # PieceKind
    holds_boundary: bool
    critical: tuple  # ((vertex, CriticalKind, value), ...)

    @property
    def signature(self):
        return (
            self.holds_boundary,
            self.side,
            tuple(sorted((value, str(kind)) for _, kind, value in self.critical)),
        )

    @property
    def orientation(self):
        """
        The least boundary dart: the least crossing point followed by the
        smaller of its two neighbours. The boundary curve is stored walking
        this way, so it is also the direction taken as positive.
        """
        return self.curve.edges[:2]

    def as_dict(self):
        return {
            "index": self.index,
            "kind": self.kind.tag.value,
            "side": "below" if self.side < 0 else "above",
            "holds_boundary": self.holds_boundary,
            "boundary_level": self.curve.value,
            "critical": [
                {"vertex": v, "kind": str(kind), "value": value} for v, kind, value in self.critical
            ],
        }


@dataclass(frozen=True, eq=False)
class Decomposition:
    vertex: int
    level: float
    epsilon: float
    saddles: tuple  # ((vertex, CriticalKind), ...) of K
    pieces: tuple  # Y_0 first, then the disks
    neighborhood: RegularNeighborhood

    @property
    def n(self):
        return len(self.pieces) - 1

    @property
    def annulus(self):
        return self.pieces[0]

    @property
    def disks(self):
        return self.pieces[1:]

    @property
    def neighborhood_euler_characteristic(self):
        return -self.n

    def as_dict(self):
        return {
            "n": self.n,
            "vertex": self.vertex,
            "level": self.level,
            "epsilon": self.epsilon,
            "saddles": [{"vertex": v, "kind": str(kind)} for v, kind in self.saddles],
            "pieces": [piece.as_dict() for piece in self.pieces],
        }


def least_dart_first(curve):
    """Walk ``curve`` from its least crossed edge towards the smaller neighbouring one."""
    edges = curve.edges
    start = edges.index(min(edges))
    if start:
        records = curve.crossings[start:] + curve.crossings[:start]
        curve = LevelCurve(value=curve.value, crossings=records, points=curve.points)
        edges = curve.edges
    if edges[-1] < edges[1]:
        curve = curve.reversed()
    return curve


def decompose(mesh, field, g, types, distinguished=None) -> Decomposition:
    """
    Cut the band along the boundary curves of a thin neighborhood of K.

    The slab is made thin enough that it holds no vertex off the critical
    level. Each boundary curve separates the band; the side away from K is
    one piece.

    Raises:
        PieceMismatch: a curve does not separate, or the pieces are not one
            annulus holding the boundary plus disks.
    """
    require_moebius(mesh)
    if distinguished is None:
        distinguished = find_distinguished_vertex(g, types)
    v = getattr(distinguished, "vertex", distinguished)
    node = g.nodes[v]
    level = node.level

    gap = _level_gap(g, level)
    offsets = [abs(float(x) - level) for x in field.values if float(x) != level]
    epsilon = min(gap / 2.0 if gap is not None else INF, min(offsets) / 2.0)
    hood = regular_neighborhood(mesh, field, g, v, epsilon)

    critical = field.critical_kinds
    saddles = tuple((x, critical[x]) for x in node.critical)
    if not saddles:
        raise PieceMismatch(f"graph vertex {v} holds no critical vertex")
    anchor = node.critical[0]
    marker = mesh.boundary_cycles[0][0]

    annuli, disks = [], []
    for side, curve in hood.curves:
        cut = cut_along_curve(mesh, curve)
        if len(cut.components) != 2:
            raise PieceMismatch(f"curve at {curve.value} does not separate the band")
        component = 1 - cut.vertex_component[anchor]
        kind = classify_piece(cut, component)
        inside = [x for x in cut.components[component] if x < mesh.n_vertices]
        holds = marker in inside
        found = tuple((x, critical[x], field.value(x)) for x in inside if x in critical)
        record = (side, least_dart_first(curve), kind, holds, found)
        if holds and kind.tag is PieceTag.ANNULUS:
            annuli.append(record)
        elif not holds and kind.tag is PieceTag.DISK:
            disks.append(record)
        else:
            raise PieceMismatch(
                f"piece beyond the curve at {curve.value} is {kind.tag.value}"
                f"{' holding the boundary' if holds else ''}",
                details=kind.as_dict(),
            )
    if len(annuli) != 1:
        raise PieceMismatch(f"expected one annulus holding the boundary, found {len(annuli)}")

    pieces = [
        Piece(index=i, side=side, curve=curve, kind=kind, holds_boundary=holds, critical=found)
        for i, (side, curve, kind, holds, found) in enumerate(annuli + disks)
    ]
    # disks sharing a signature with another disk go last, in curve order
    shared = Counter(piece.signature for piece in pieces[1:])
    twins_last = sorted(pieces[1:], key=lambda piece: shared[piece.signature] > 1)
    pieces = (pieces[0],) + tuple(replace(piece, index=i) for i, piece in enumerate(twins_last, start=1))
    decomposition = Decomposition(
        vertex=v,
        level=level,
        epsilon=epsilon,
        saddles=saddles,
        pieces=pieces,
        neighborhood=hood,
    )
    logger.info(f"decomposition around vertex {v}: annulus and {decomposition.n} disk(s)")
    return decomposition


@dataclass(frozen=True)
class SignedComponentSet:
    elements: tuple  # ((disk index, +1 or -1), ...)

    def __len__(self):
        return len(self.elements)

    def index(self, element):
        return self.elements.index(element)


def signed_components(decomposition) -> SignedComponentSet:
    return SignedComponentSet(
        elements=tuple((k, sign) for k in range(1, decomposition.n + 1) for sign in (1, -1))
    )


# ----------------------------------------------------------------------
# cell structure of the capped band
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Sector:
    neighbors: tuple  # link order
    sign: int  # +1 above the critical level, -1 below
    before: int  # link neighbour preceding the first one


def saddle_sectors(mesh, field, v):
    """Maximal same-sign runs of the link of ``v``, starting at a sign change."""
    ring = mesh.links[v].neighbors
    values = field.plain_values
    level = values[v]
    signs = [1 if values[u] > level else -1 for u in ring]
    size = len(ring)
    start = next(i for i in range(size) if signs[i] != signs[i - 1])
    runs = [[start]]
    for step in range(1, size):
        position = (start + step) % size
        if signs[position] == signs[runs[-1][-1]]:
            runs[-1].append(position)
        else:
            runs.append([position])
    return tuple(
        Sector(
            neighbors=tuple(ring[p] for p in run),
            sign=signs[run[0]],
            before=ring[run[0] - 1],
        )
        for run in runs
    )


@dataclass(frozen=True, eq=False)
class CWPartition:
    flags: tuple  # ((saddle, sector, end), ...)
    sigma0: tuple
    sigma1: tuple
    sigma2: tuple
    face_of: tuple  # piece index per flag
    sign_of: tuple  # sector sign per flag
    multiplicity_of: tuple  # saddle multiplicity per flag
    positive: frozenset  # flags where the boundary walk of their piece enters a corner
    face_signatures: tuple
    level: float

    @property
    def n_flags(self):
        return len(self.flags)

    @property
    def sigmas(self):
        return (self.sigma0, self.sigma1, self.sigma2)

    def _orbits(self, generators):
        groups = UnionFind(range(self.n_flags))
        for sigma in generators:
            for x, y in enumerate(sigma):
                groups.union(x, y)
        return tuple(sorted((frozenset(group) for group in groups.to_sets()), key=min))

    @cached_property
    def cells0(self):
        return self._orbits((self.sigma1, self.sigma2))

    @cached_property
    def cells1(self):
        return self._orbits((self.sigma0, self.sigma2))

    @cached_property
    def cells2(self):
        faces = {}
        for x, face in enumerate(self.face_of):
            faces.setdefault(face, set()).add(x)
        return tuple(frozenset(faces[face]) for face in sorted(faces))

    @property
    def counts(self):
        return (len(self.cells0), len(self.cells1), len(self.cells2))

    @property
    def euler_characteristic(self):
        c0, c1, c2 = self.counts
        return c0 - c1 + c2

    @property
    def total_cells(self):
        return sum(self.counts)

    def positive_class(self, face):
        return frozenset(x for x in self.cells2[face] if x in self.positive)

    def boundary_word(self, face):
        """1-cells met walking round a 2-cell, with the direction of travel."""
        cell_index = {x: i for i, cell in enumerate(self.cells1) for x in cell}
        start = min(self.positive_class(face))
        word = []
        x = start
        while True:
            leaving = self.sigma1[x]
            cell = cell_index[leaving]
            reference = min(self.cells1[cell])
            forward = leaving in (reference, self.sigma2[reference])
            word.append((cell, 1 if forward else -1))
            x = self.sigma0[leaving]
            if x == start:
                return tuple(word)

    def as_dict(self):
        return {
            "cells": list(self.counts),
            "flags": self.n_flags,
            "euler_characteristic": self.euler_characteristic,
            "boundary_words": [
                [f"{'+' if direction > 0 else '-'}{cell}" for cell, direction in self.boundary_word(face)]
                for face in range(len(self.cells2))
            ],
        }


def _visits(curve, sector_of):
    """
    Corner visits of a boundary curve as (saddle, sector, entry end).

    Crossings of edges at a saddle of K are keyed by the sector of the far
    endpoint; a maximal run of equal keys is one visit.
    """
    crossings = curve.crossings
    size = len(crossings)

    def key(edge):
        u, w = edge
        if u in sector_of:
            return (u, sector_of[u][w])
        if w in sector_of:
            return (w, sector_of[w][u])
        return None

    keys = [key(record.entry) for record in crossings]
    starts = [i for i in range(size) if keys[i] != keys[i - 1]]
    if not starts:
        raise InconsistentCellStructure(f"boundary curve at {curve.value} never meets a saddle of K")
    offset = starts[0]
    visits = []
    for step in range(size):
        i = (offset + step) % size
        if keys[i] is None or keys[i] == keys[i - 1]:
            continue
        visits.append((i, keys[i]))
    return visits, crossings


def cw_partition(mesh, field, decomposition) -> CWPartition:
    """
    Flag structure of the capped band.

    Raises:
        InconsistentCellStructure: the boundary walks do not close up into a
            map, or its Euler count differs from that of the projective plane.
    """
    sectors = {v: saddle_sectors(mesh, field, v) for v, _ in decomposition.saddles}
    multiplicity = {v: kind.multiplicity for v, kind in decomposition.saddles}
    sector_of = {
        v: {u: j for j, sector in enumerate(runs) for u in sector.neighbors} for v, runs in sectors.items()
    }

    flags = tuple((v, j, end) for v in sorted(sectors) for j in range(len(sectors[v])) for end in (0, 1))
    index = {flag: i for i, flag in enumerate(flags)}
    sigma1 = [index[(v, j, 1 - end)] for v, j, end in flags]
    sigma2 = [
        index[(v, (j + 1) % len(sectors[v]), 0)] if end == 1 else index[(v, (j - 1) % len(sectors[v]), 1)]
        for v, j, end in flags
    ]

    sigma0 = [None] * len(flags)
    face_of = [None] * len(flags)
    positive = set()

    def pair(x, y):
        for a, b in ((x, y), (y, x)):
            if sigma0[a] is not None and sigma0[a] != b:
                raise InconsistentCellStructure(f"flag {flags[a]} follows two arcs")
            sigma0[a] = b

    for piece in decomposition.pieces:
        visits, crossings = _visits(piece.curve, sector_of)
        corners = []
        for i, (v, j) in visits:
            previous_entry = crossings[i - 1].entry
            entry_end = 0 if sectors[v][j].before in previous_entry else 1
            entry, exit_ = index[(v, j, entry_end)], index[(v, j, 1 - entry_end)]
            for x in (entry, exit_):
                if face_of[x] is not None:
                    raise InconsistentCellStructure(f"corner {flags[x][:2]} visited twice")
                face_of[x] = piece.index
            positive.add(entry)
            corners.append((entry, exit_))
        for k, (_, exit_) in enumerate(corners):
            pair(exit_, corners[(k + 1) % len(corners)][0])

    missing = [flags[x] for x in range(len(flags)) if sigma0[x] is None or face_of[x] is None]
    if missing:
        raise InconsistentCellStructure(f"{len(missing)} flag(s) left unmatched, first {missing[0]}")
    for x in range(len(flags)):
        if sigma0[sigma2[x]] != sigma2[sigma0[x]]:
            raise InconsistentCellStructure(f"arc pairing and sector crossing disagree at {flags[x]}")

    cw = CWPartition(
        flags=flags,
        sigma0=tuple(sigma0),
        sigma1=tuple(sigma1),
        sigma2=tuple(sigma2),
        face_of=tuple(face_of),
        sign_of=tuple(sectors[v][j].sign for v, j, _ in flags),
        multiplicity_of=tuple(multiplicity[v] for v, _, _ in flags),
        positive=frozenset(positive),
        face_signatures=tuple(piece.signature for piece in decomposition.pieces),
        level=decomposition.level,
    )
    if cw.euler_characteristic != 1:
        raise InconsistentCellStructure(
            f"cell counts {cw.counts} give Euler characteristic {cw.euler_characteristic}, expected 1",
            details={"cells": list(cw.counts)},
        )
    logger.info(f"cell structure: {cw.counts[0]} vertices, {cw.counts[1]} arcs, {cw.counts[2]} faces")
    return cw
