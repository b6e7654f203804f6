"""
Symmetries of the cell structure of the capped band.

An automorphism is a permutation of flags commuting with the three
involutions. It must keep sector signs, saddle multiplicities and piece
signatures, and it must map the annulus piece to itself with its
orientation, which stands in for symmetries fixed near the boundary.
Because the flag graph is connected an automorphism is fixed by the image
of one flag, so the search tries every flag of the annulus's positive class
as the image of a root flag and propagates.
"""

import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property

from sympy.combinatorics import Permutation, PermutationGroup

from surfaces.exceptions import InconsistentCellStructure, TheoremViolation

from .decomp import CWPartition, SignedComponentSet
from .groupexpr import Atom, Product, Trivial, Zn, simplify

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CellAutomorphism:
    images: tuple

    def __call__(self, flag):
        return self.images[flag]

    @property
    def is_identity(self):
        return all(x == y for x, y in enumerate(self.images))

    def compose(self, other):
        """``self`` after ``other``."""
        return CellAutomorphism(tuple(self.images[y] for y in other.images))

    def inverse(self):
        inverse = [0] * len(self.images)
        for x, y in enumerate(self.images):
            inverse[y] = x
        return CellAutomorphism(tuple(inverse))


def _extend(cw: CWPartition, root, image):
    """Propagate ``root -> image`` along the involutions; None when it clashes."""
    mapping = {root: image}
    stack = [root]
    while stack:
        x = stack.pop()
        fx = mapping[x]
        for sigma in cw.sigmas:
            y, fy = sigma[x], sigma[fx]
            if y in mapping:
                if mapping[y] != fy:
                    return None
            else:
                mapping[y] = fy
                stack.append(y)
    if len(mapping) != cw.n_flags or len(set(mapping.values())) != cw.n_flags:
        return None
    return tuple(mapping[x] for x in range(cw.n_flags))


def _respects_labels(cw: CWPartition, images):
    for x, y in enumerate(images):
        if cw.sign_of[x] != cw.sign_of[y] or cw.multiplicity_of[x] != cw.multiplicity_of[y]:
            return False
        if cw.face_signatures[cw.face_of[x]] != cw.face_signatures[cw.face_of[y]]:
            return False
        if (x in cw.positive) != (y in cw.positive) and cw.face_of[x] == 0:
            return False
    return True


def enumerate_automorphisms(cw: CWPartition):
    """All label-preserving flag automorphisms fixing the annulus face with orientation, identity first."""
    candidates = sorted(cw.positive_class(0))
    root = candidates[0]
    found = []
    for image in candidates:
        images = _extend(cw, root, image)
        if images is None:
            logger.debug(f"root image {image}: propagation clashes")
            continue
        if not _respects_labels(cw, images):
            logger.debug(f"root image {image}: labels not preserved")
            continue
        found.append(CellAutomorphism(images))
    found.sort(key=lambda aut: aut.images)
    logger.info(f"{len(found)} cell automorphism(s)")
    return found


# ----------------------------------------------------------------------
# action on signed disks
# ----------------------------------------------------------------------


def signed_permutation(aut: CellAutomorphism, cw: CWPartition, signed: SignedComponentSet):
    """Image index of every signed disk."""
    images = []
    for k, sign in signed.elements:
        flag = min(cw.positive_class(k))
        target = aut(flag)
        m = cw.face_of[target]
        kept = 1 if target in cw.positive else -1
        images.append(signed.index((m, sign * kept)))
    return tuple(images)


@dataclass(frozen=True)
class QuotientAction:
    signed: SignedComponentSet
    elements: tuple  # distinct permutations of signed.elements, identity first
    table: tuple
    kernel_order: int
    group_order: int

    @property
    def order(self):
        return len(self.elements)

    @cached_property
    def group(self):
        return PermutationGroup([Permutation(list(element)) for element in self.elements])

    def orbit(self, index):
        return sorted(self.group.orbit(index))

    @property
    def orbits(self):
        """Orbits as lists of signed disks, ordered by their least index."""
        return [
            [self.signed.elements[i] for i in orbit]
            for orbit in sorted(sorted(found) for found in self.group.orbits())
        ]


def action_on_signed(auts, cw: CWPartition, signed: SignedComponentSet = None) -> QuotientAction:
    """
    Permutations the automorphisms induce on signed disks, and their group.

    Raises:
        InconsistentCellStructure: the induced permutations are not closed
            under composition.
    """
    if signed is None:
        signed = SignedComponentSet(
            elements=tuple((k, s) for k in range(1, len(cw.cells2)) for s in (1, -1))
        )
    identity = tuple(range(len(signed)))
    permutations = {signed_permutation(aut, cw, signed) for aut in auts}
    permutations.add(identity)
    elements = [identity] + sorted(p for p in permutations if p != identity)
    position = {p: i for i, p in enumerate(elements)}

    table = []
    for a in elements:
        row = []
        for b in elements:
            composed = tuple(a[b[i]] for i in range(len(signed)))
            if composed not in position:
                raise InconsistentCellStructure("induced action on signed disks is not closed")
            row.append(position[composed])
        table.append(tuple(row))

    kernel = sum(1 for aut in auts if signed_permutation(aut, cw, signed) == identity)
    return QuotientAction(
        signed=signed,
        elements=tuple(elements),
        table=tuple(table),
        kernel_order=kernel,
        group_order=len(auts),
    )


@dataclass
class FreeActionCertificate:
    passed: bool
    orbits: list
    witness: dict = dc_field(default=None)

    def as_dict(self):
        return {"passed": self.passed, "orbits": self.orbits, "witness": self.witness}


def check_free_action(q: QuotientAction) -> FreeActionCertificate:
    """No non-identity element fixes a signed disk; every orbit has |Q| elements."""
    orbits = [[[k, s] for k, s in orbit] for orbit in q.orbits]
    for number, element in enumerate(q.elements[1:], start=1):
        for index, image in enumerate(element):
            if image == index:
                witness = {"element": number, "fixes": list(q.signed.elements[index])}
                return FreeActionCertificate(passed=False, orbits=orbits, witness=witness)
    for orbit in orbits:
        if len(orbit) != q.order:
            witness = {"orbit": orbit, "expected_size": q.order}
            return FreeActionCertificate(passed=False, orbits=orbits, witness=witness)
    return FreeActionCertificate(passed=True, orbits=orbits)


# ----------------------------------------------------------------------
# fixed cells
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantCells:
    count: int
    total: int
    trace: int
    fixed: tuple  # fixed cells per dimension

    def as_dict(self):
        return {"count": self.count, "total": self.total, "trace": self.trace, "fixed": list(self.fixed)}


def invariant_cell_count(aut: CellAutomorphism, cw: CWPartition) -> InvariantCells:
    """
    Cells kept by ``aut`` with their orientation, and the Lefschetz trace.

    A fixed vertex counts only when the map keeps the cyclic order of the
    corners around it. The trace adds +1 per fixed vertex, -1 or +1 per
    fixed arc as it keeps or reverses direction and +1 or -1 per fixed face
    as it keeps or reverses orientation.

    Raises:
        TheoremViolation: the count is neither 1 nor the number of cells.
        InconsistentCellStructure: the trace is not 1.
    """
    count = trace = 0
    fixed = [0, 0, 0]
    for cell in cw.cells0:
        if {aut(x) for x in cell} != cell:
            continue
        fixed[0] += 1
        trace += 1
        start = next(x for x in sorted(cell) if cw.flags[x][2] == 0)
        if cw.flags[aut(start)][2] == 0:
            count += 1
    for cell in cw.cells1:
        if {aut(x) for x in cell} != cell:
            continue
        fixed[1] += 1
        x = min(cell)
        if aut(x) in (x, cw.sigma2[x]):
            count += 1
            trace -= 1
        else:
            trace += 1
    for face, cell in enumerate(cw.cells2):
        if {aut(x) for x in cell} != cell:
            continue
        fixed[2] += 1
        if aut(min(cw.positive_class(face))) in cw.positive:
            count += 1
            trace += 1
        else:
            trace -= 1

    result = InvariantCells(count=count, total=cw.total_cells, trace=trace, fixed=tuple(fixed))
    if count not in (1, cw.total_cells):
        raise TheoremViolation(
            f"automorphism keeps {count} of {cw.total_cells} cells",
            details=result.as_dict(),
        )
    if trace != 1:
        raise InconsistentCellStructure(f"Lefschetz trace {trace} over fixed cells, expected 1")
    return result


# ----------------------------------------------------------------------
# group recognition
# ----------------------------------------------------------------------


def regular_group(table):
    """Permutation group of a multiplication table acting on itself from the left."""
    return PermutationGroup([Permutation(list(row)) for row in table])


def identify_group(q, max_order=64):
    """
    Name a small group given as a QuotientAction or a multiplication table.

    Cyclic and abelian groups are recognised, the latter by their primary
    invariants; anything else, or anything larger than ``max_order``, becomes
    an opaque atom.
    """
    group = q.group if isinstance(q, QuotientAction) else regular_group(q)
    n = group.order()
    if group.is_trivial:
        return Trivial()
    if n > max_order:
        return Atom(f"Q({n})")
    if group.is_cyclic:
        return Zn(n)
    if not group.is_abelian:
        return Atom(f"Q({n})")
    return simplify(Product(tuple(Zn(m) for m in sorted(group.abelian_invariants()))))
