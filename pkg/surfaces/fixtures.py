"""
Named test surfaces and the seeded random Moebius-band generator.

Moebius fixtures share one grid. Columns ``i`` run over ``0..N-1`` and rows
``j`` over ``0..6``; column ``N`` is glued back to column 0 upside down, so
``(N, j)`` is ``(0, 6 - j)``. Rows 0 and 6 form the single boundary circle
at level 0. Rows 1/5 and 2/4 are collar layers at roughly 1 and 2, each
nudged by ``0.0005 * (index + 1)`` so no two neighbours tie. Row 3 is the
core circle and carries a profile: its local minima are saddles of the band
and its local maxima are maxima.

A bump raises a collar vertex next to the core to a saddle value and the
vertex under it to a peak, adding one saddle and one maximum. Row-2 bumps
sit at ``(i, 2)`` over ``(i, 1)``; row-4 bumps at ``(i, 4)`` over ``(i, 5)``.
"""

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from .exceptions import FieldError, GeneratorExhausted, UnknownFixture
from .field import validate_field
from .mesh import build_surface, cap_boundary

logger = logging.getLogger(__name__)

ROWS = 6
CORE_ROW = 3
SADDLE_LEVEL = 3.0
COLLAR_STEP = 0.0005


@dataclass(frozen=True)
class Bump:
    column: int
    row: int  # 2 or 4
    saddle_value: float
    peak_value: float

    @property
    def peak_row(self):
        return 1 if self.row == 2 else 5

    def core_neighbors(self):
        """Core columns adjacent to the bump saddle."""
        if self.row == 2:
            return (self.column, self.column + 1)
        return (self.column - 1, self.column)


@dataclass(frozen=True)
class Fixture:
    name: str
    mesh: object
    values: np.ndarray
    description: str = ""


def moebius_grid(core, bumps=(), with_coords=False):
    """
    Faces and values of a Moebius band whose core row carries ``core``.

    Returns (mesh, values).
    """
    n = len(core)
    if n < 5:
        raise FieldError(f"a Moebius grid needs at least 5 columns, got {n}")

    def vid(i, j):
        if i == n:
            i, j = 0, ROWS - j
        return j * n + i

    faces = []
    for j in range(ROWS):
        for i in range(n):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((a, b, c))
            faces.append((a, c, d))

    values = np.zeros(n * (ROWS + 1))
    for j in range(ROWS + 1):
        layer = min(j, ROWS - j)
        for i in range(n):
            if j == CORE_ROW:
                values[vid(i, j)] = float(core[i])
            elif layer > 0:
                values[vid(i, j)] = layer + COLLAR_STEP * (j * n + i + 1)

    for bump in bumps:
        if not 2 <= bump.column <= n - 3:
            raise FieldError(f"bump column {bump.column} too close to the seam")
        values[vid(bump.column, bump.row)] = bump.saddle_value
        values[vid(bump.column, bump.peak_row)] = bump.peak_value

    coords = None
    if with_coords:
        coords = []
        for j in range(ROWS + 1):
            for i in range(n):
                theta = 2 * np.pi * i / n
                w = (j - CORE_ROW) / ROWS
                radius = 1.0 + w * np.cos(theta / 2)
                coords.append((radius * np.cos(theta), radius * np.sin(theta), w * np.sin(theta / 2)))
    mesh = build_surface(faces, n_vertices=n * (ROWS + 1), coords=coords)
    return mesh, values


def grid_vertex(n_columns, column, row):
    return row * n_columns + column


# ----------------------------------------------------------------------
# named fixtures
# ----------------------------------------------------------------------

MB_MIN_CORE = [3.0, 3.2, 3.6, 4.0, 3.5, 3.1]
MB_LONG_CORE = [3.0, 3.2, 3.4, 3.6, 3.8, 4.0, 4.4, 4.2, 3.9, 3.7, 3.5, 3.1]


def _mb_min():
    return moebius_grid(MB_MIN_CORE, with_coords=True)


def _mb_case_a():
    # one saddle on the critical level; the single disk holds a saddle and two maxima
    return moebius_grid([3.0, 3.3, 4.0, 3.5, 3.4, 3.6, 4.2, 3.2])


def _mb_case_b():
    # two congruent halves: the shift by half the core permutes both disks
    return moebius_grid([3.0, 3.3, 4.0, 3.4, 3.0, 3.3, 4.0, 3.4])


def _mb_case_c():
    bumps = (Bump(3, 2, 3.0, 5.0), Bump(8, 2, 3.0, 5.5))
    return moebius_grid(MB_LONG_CORE, bumps)


def _mb_case_d():
    core = [3.0, 3.2, 3.5, 4.1, 3.6, 3.3, 3.0, 3.4, 3.9, 4.6, 3.8, 3.1]
    bumps = (Bump(2, 2, 3.0, 5.0), Bump(2, 4, 3.0, 5.0))
    return moebius_grid(core, bumps)


def _mb_chain():
    bumps = (Bump(3, 2, 2.4, 2.9), Bump(8, 2, 2.6, 2.95))
    return moebius_grid(MB_LONG_CORE, bumps)


def _disk_cone():
    rim = 6
    faces = [(0, i, i % rim + 1) for i in range(1, rim + 1)]
    coords = [(0.0, 0.0, 1.0)] + [
        (float(np.cos(2 * np.pi * k / rim)), float(np.sin(2 * np.pi * k / rim)), 0.0)
        for k in range(rim)
    ]
    values = np.array([1.0] + [0.0] * rim)
    return build_surface(faces, coords=coords), values


def _annulus_linear():
    n = 6
    faces = []
    for j in range(2):
        for i in range(n):
            a, b = j * n + i, j * n + (i + 1) % n
            c, d = (j + 1) * n + (i + 1) % n, (j + 1) * n + i
            faces.append((a, b, c))
            faces.append((a, c, d))
    values = np.array([0.0] * n + [0.30 + 0.01 * i for i in range(n)] + [1.0] * n)
    return build_surface(faces), values


def _sphere_octa():
    faces = [
        (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 2),
        (1, 3, 2), (1, 4, 3), (1, 5, 4), (1, 2, 5),
    ]
    coords = [(0, 0, 1), (0, 0, -1), (1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)]
    values = np.array([1.0, -1.0, 0.1, 0.2, 0.3, 0.4])
    return build_surface(faces, coords=coords), values


def _rp2():
    band, band_values = moebius_grid(MB_MIN_CORE)
    cycle = band.boundary_cycles[0]
    closed = cap_boundary(band, 0)
    values = np.append(band_values, -1.0)
    for position, v in enumerate(cycle):
        values[v] = 0.0001 * position
    return closed, values


def _torus_height():
    columns, rows = 6, 4
    height_i = [0.0, 1.0, 2.0, 3.0, 2.1, 1.1]
    height_j = [0.0, 0.2, 0.4, 0.1]
    faces = []
    for j in range(rows):
        for i in range(columns):
            a = j * columns + i
            b = j * columns + (i + 1) % columns
            c = ((j + 1) % rows) * columns + (i + 1) % columns
            d = ((j + 1) % rows) * columns + i
            faces.append((a, b, c))
            faces.append((a, c, d))
    values = np.array([height_i[i] + height_j[j] for j in range(rows) for i in range(columns)])
    return build_surface(faces), values


FIXTURES = {
    "mb-min": (_mb_min, "Moebius band with one saddle and one maximum"),
    "mb-case-a": (_mb_case_a, "one saddle on the critical level, one composite disk"),
    "mb-case-b": (_mb_case_b, "two saddles, two disks swapped by a quarter turn"),
    "mb-case-c": (_mb_case_c, "three saddles, three distinguishable disks"),
    "mb-case-d": (_mb_case_d, "four saddles, two core disks and two twin bumps"),
    "mb-chain": (_mb_chain, "two boundary-parallel saddle levels below the critical one"),
    "disk-cone": (_disk_cone, "hexagonal cone, boundary at 0 and apex at 1"),
    "annulus-linear": (_annulus_linear, "cylinder with a height function"),
    "sphere-octa": (_sphere_octa, "octahedron with a height function"),
    "rp2": (_rp2, "capped mb-min, a projective plane"),
    "torus-height": (_torus_height, "separable height on a torus, Reeb graph with a cycle"),
}


def fixture_names():
    return sorted(FIXTURES)


def load_fixture(name) -> Fixture:
    try:
        builder, description = FIXTURES[name]
    except KeyError:
        raise UnknownFixture(
            f"unknown fixture {name!r}; choose one of {', '.join(fixture_names())}",
            details={"name": name, "available": fixture_names()},
        ) from None
    mesh, values = builder()
    return Fixture(name=name, mesh=mesh, values=np.asarray(values, dtype=float), description=description)


# ----------------------------------------------------------------------
# random Moebius fields
# ----------------------------------------------------------------------


class RandomFieldSpec(BaseModel):
    saddles: int = Field(ge=1, le=6, description="Number of saddles in the field")
    seed: int = Field(ge=0, description="Seed for numpy's default_rng")


def random_moebius_field(spec: RandomFieldSpec, max_attempts=50) -> Fixture:
    """
    Rejection-sample a valid field on a Moebius grid with ``spec.saddles`` saddles.

    The saddle budget is split between core minima (at least one, the lowest
    exactly at the saddle level) and bumps. Every draw is validated; a draw
    is kept once validation passes and the saddle count matches.

    Raises:
        GeneratorExhausted: no valid draw within ``max_attempts``.
    """
    rng = np.random.default_rng(spec.seed)
    for attempt in range(1, max_attempts + 1):
        core, bumps = _draw_profile(rng, spec.saddles)
        try:
            mesh, values = moebius_grid(core, bumps)
            field = validate_field(mesh, values)
        except FieldError as exc:
            logger.debug(f"seed {spec.seed} attempt {attempt} rejected: {exc}")
            continue
        found = sum(1 for _, kind in field.critical_vertices if kind.is_saddle)
        if found != spec.saddles:
            logger.debug(f"seed {spec.seed} attempt {attempt}: {found} saddles, wanted {spec.saddles}")
            continue
        name = f"random-s{spec.saddles}-seed{spec.seed}"
        logger.info(f"generated {name} after {attempt} attempt(s)")
        return Fixture(name=name, mesh=mesh, values=values, description="random Moebius field")
    raise GeneratorExhausted(
        f"no valid field with {spec.saddles} saddles after {max_attempts} attempts (seed {spec.seed})"
    )


def _jitter(rng):
    return float(rng.uniform(-0.04, 0.04))


def _draw_profile(rng, saddles):
    n = 4 * saddles + 8
    n_minima = int(rng.integers(1, saddles + 1))
    n_bumps = saddles - n_minima

    # gaps between consecutive core minima, at least 3 apart
    gaps = [3] * n_minima
    for _ in range(n - 3 * n_minima):
        gaps[int(rng.integers(0, n_minima))] += 1
    positions = [0]
    for gap in gaps[:-1]:
        positions.append(positions[-1] + gap)

    minima = [SADDLE_LEVEL]
    for _ in range(n_minima - 1):
        tied = rng.random() < 0.3
        minima.append(SADDLE_LEVEL if tied else round(float(rng.uniform(3.05, 3.5)), 6))

    core = [0.0] * n
    for k, start in enumerate(positions):
        core[start] = minima[k]
        interior = gaps[k] - 1
        peak = int(rng.integers(1, interior + 1))
        for step in range(1, interior + 1):
            column = (start + step) % n
            if step < peak:
                rise = step
            elif step > peak:
                rise = interior + 1 - step
            else:
                rise = max(peak, interior + 1 - peak) + 1
            core[column] = round(3.5 + 0.1 * rise + _jitter(rng), 6)

    bumps = []
    if n_bumps:
        slack = (n - 5) - 5 * (n_bumps - 1)
        column = 2
        for b in range(n_bumps):
            extra = int(rng.integers(0, slack + 1)) if slack > 0 else 0
            slack -= extra
            column += extra
            row = 2 if rng.random() < 0.5 else 4
            bump = Bump(column, row, 0.0, 0.0)
            neighbors_clear = all(core[c % n] > SADDLE_LEVEL for c in bump.core_neighbors())
            if neighbors_clear and rng.random() < 0.2:
                saddle_value = SADDLE_LEVEL
            else:
                saddle_value = round(float(rng.uniform(2.2, 2.95)), 6)
            peak_value = round(float(rng.uniform(saddle_value + 0.1, 6.0)), 6)
            bumps.append(Bump(column, row, saddle_value, peak_value))
            column += 5
    return core, tuple(bumps)
