import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pydantic
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from rest_framework.test import APIClient

from .cover import lift_curve, orientation_double_cover, preimage_components
from .exceptions import (
    CriticalOnBoundary,
    CurveTouchesVertex,
    EmptyInput,
    EqualAdjacentInteriorValues,
    FieldSizeMismatch,
    GeneratorExhausted,
    InvalidComponent,
    NonConstantBoundary,
    NonManifoldEdge,
    NonManifoldVertex,
    NotABoundaryCycle,
    ParseError,
    PlateauFace,
    UnknownFixture,
)
from .field import (
    MAX,
    MIN,
    critical_values,
    index_sum,
    level_curves,
    saddle,
    validate_field,
)
from .fixtures import RandomFieldSpec, fixture_names, load_fixture, random_moebius_field
from .mesh import (
    PieceTag,
    build_surface,
    cap_boundary,
    classify_piece,
    cut_along_curve,
    edge_key,
    orientability,
)
from .meshio import parse_mesh, parse_sidecar, write_mesh, write_sidecar

OCTAHEDRON = [
    (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 2),
    (1, 3, 2), (1, 4, 3), (1, 5, 4), (1, 2, 5),
]


def fixture_field(name):
    fixture = load_fixture(name)
    return fixture, validate_field(fixture.mesh, fixture.values)


def saddle_count(field):
    return sum(1 for _, kind in field.critical_vertices if kind.is_saddle)


def barycentric_subdivision(mesh):
    """Split every triangle into six around its centre and edge midpoints."""
    n = mesh.n_vertices
    midpoint = {edge: n + i for i, edge in enumerate(mesh.edge_faces)}
    first_centre = n + len(midpoint)
    faces = []
    for f, (a, b, c) in enumerate(mesh.faces):
        o = first_centre + f
        ab, bc, ca = (midpoint[edge_key(u, v)] for u, v in ((a, b), (b, c), (c, a)))
        faces += [(a, ab, o), (ab, b, o), (b, bc, o), (bc, c, o), (c, ca, o), (ca, a, o)]
    return build_surface(faces)


def barycentric_values(mesh, values):
    """Linear interpolation of ``values`` in the vertex numbering of barycentric_subdivision."""
    values = np.asarray(values, dtype=float)
    midpoints = [(values[u] + values[v]) / 2 for u, v in mesh.edge_faces]
    centres = [values[list(face)].mean() for face in mesh.faces]
    return np.concatenate([values, midpoints, centres])


def split_regular_faces(field):
    """
    Cone every triangle without a critical corner from a new centre vertex.

    The centre value lies strictly between the lowest and highest corner and
    differs from the middle one, so no link changes its sign pattern.
    """
    mesh = field.mesh
    values = field.plain_values
    critical = set(field.critical_kinds)
    faces, centres = [], []
    for a, b, c in mesh.faces:
        if critical & {a, b, c}:
            faces.append((a, b, c))
            continue
        lo, mid, hi = sorted((values[a], values[b], values[c]))
        centre = (lo + hi) / 2
        if centre == mid:
            centre = (mid + hi) / 2
        o = mesh.n_vertices + len(centres)
        centres.append(centre)
        faces += [(a, b, o), (b, c, o), (c, a, o)]
    return build_surface(faces), np.concatenate([field.values, centres])


class BuildSurfaceTests(SimpleTestCase):
    def test_octahedron_is_a_sphere(self):
        mesh = build_surface(OCTAHEDRON)
        self.assertEqual(mesh.euler_characteristic(), 2)
        self.assertTrue(orientability(mesh, 0))
        self.assertEqual(mesh.boundary_cycles, ())

    def test_single_triangle_is_a_disk(self):
        mesh = build_surface([(0, 1, 2)])
        kind = classify_piece(mesh, 0)
        self.assertEqual(kind.tag, PieceTag.DISK)
        self.assertEqual(len(mesh.boundary_cycles[0]), 3)

    def test_empty_input(self):
        with self.assertRaises(EmptyInput):
            build_surface([])

    def test_edge_in_three_triangles(self):
        with self.assertRaises(NonManifoldEdge):
            build_surface([(0, 1, 2), (0, 1, 3), (0, 1, 4)])

    def test_bowtie_vertex(self):
        with self.assertRaises(NonManifoldVertex):
            build_surface([(0, 1, 2), (0, 3, 4)])

    def test_unused_vertex_in_range(self):
        with self.assertRaises(NonManifoldVertex):
            build_surface([(0, 1, 2)], n_vertices=4)

    def test_moebius_fixture(self):
        mesh = load_fixture("mb-min").mesh
        kind = classify_piece(mesh, 0)
        self.assertEqual(kind.tag, PieceTag.MOEBIUS)
        self.assertEqual((kind.chi, kind.orientable, kind.boundary_count), (0, False, 1))
        self.assertEqual(len(mesh.boundary_cycles[0]), 12)

    def test_orientability_is_per_component(self):
        band = load_fixture("mb-min").mesh
        shifted = [tuple(v + 3 for v in face) for face in band.faces]
        mesh = build_surface([(0, 1, 2)] + shifted)
        self.assertEqual([orientability(mesh, k) for k in range(2)], [True, False])
        self.assertEqual(classify_piece(mesh, 1).tag, PieceTag.MOEBIUS)

    def test_invalid_component(self):
        with self.assertRaises(InvalidComponent):
            classify_piece(build_surface([(0, 1, 2)]), 1)

    def test_annulus_fixture(self):
        kind = classify_piece(load_fixture("annulus-linear").mesh, 0)
        self.assertEqual(kind.tag, PieceTag.ANNULUS)

    def test_torus_is_other(self):
        kind = classify_piece(load_fixture("torus-height").mesh, 0)
        self.assertEqual(kind.tag, PieceTag.OTHER)
        self.assertEqual((kind.chi, kind.orientable, kind.boundary_count), (0, True, 0))

    def test_fan_links_are_walked_in_order(self):
        mesh = build_surface([(0, 1, 2), (0, 2, 3), (0, 3, 4)])
        self.assertEqual(mesh.links[0].neighbors, (1, 2, 3, 4))
        self.assertFalse(mesh.links[0].closed)
        self.assertEqual(mesh.links[2].neighbors, (1, 0, 3))
        self.assertEqual(classify_piece(mesh, 0).tag, PieceTag.DISK)

    def test_closed_link_of_degree_four(self):
        link = build_surface(OCTAHEDRON).links[0]
        self.assertEqual(link.neighbors, (2, 3, 4, 5))
        self.assertTrue(link.closed)


class SurgeryTests(SimpleTestCase):
    def test_cap_disk_gives_sphere(self):
        capped = cap_boundary(build_surface([(0, 1, 2)]), 0)
        self.assertEqual(capped.euler_characteristic(), 2)
        self.assertEqual(capped.boundary_cycles, ())

    def test_cap_annulus_once_gives_disk(self):
        annulus = load_fixture("annulus-linear").mesh
        capped = cap_boundary(annulus, annulus.boundary_cycles[1])
        self.assertEqual(classify_piece(capped, 0).tag, PieceTag.DISK)

    def test_cap_moebius_gives_projective_plane(self):
        capped = cap_boundary(load_fixture("mb-min").mesh, 0)
        self.assertEqual(capped.euler_characteristic(), 1)
        self.assertFalse(orientability(capped, 0))
        self.assertEqual(capped.boundary_cycles, ())

    def test_cap_accepts_numpy_index(self):
        capped = cap_boundary(build_surface([(0, 1, 2)]), np.int64(0))
        self.assertEqual(capped.euler_characteristic(), 2)

    def test_cap_rejects_non_boundary(self):
        mesh = build_surface([(0, 1, 2)])
        with self.assertRaises(NotABoundaryCycle):
            cap_boundary(mesh, 3)
        with self.assertRaises(NotABoundaryCycle):
            cap_boundary(mesh, (0, 1))

    def test_cut_annulus_along_core(self):
        fixture, field = fixture_field("annulus-linear")
        (curve,) = level_curves(field, 0.5)
        cut = cut_along_curve(fixture.mesh, curve)
        self.assertEqual(cut.euler_characteristic(), 0)
        self.assertEqual(len(cut.components), 2)
        self.assertEqual(
            [classify_piece(cut, k).tag for k in range(2)], [PieceTag.ANNULUS, PieceTag.ANNULUS]
        )
        self.assertEqual(len(cut.boundary_cycles), 4)

    def test_cut_keeps_original_vertex_numbers(self):
        fixture, field = fixture_field("annulus-linear")
        (curve,) = level_curves(field, 0.2)
        cut = cut_along_curve(fixture.mesh, curve)
        self.assertEqual(cut.n_vertices, fixture.mesh.n_vertices + 2 * len(curve))
        untouched = [face for f, face in enumerate(fixture.mesh.faces) if f not in set(curve.faces)]
        for face in untouched:
            self.assertIn(face, cut.faces)


class SubdivisionTests(SimpleTestCase):
    names = ("mb-min", "annulus-linear", "disk-cone")

    def test_barycentric_subdivision_keeps_piece_kind(self):
        for name in self.names:
            with self.subTest(name=name):
                mesh = load_fixture(name).mesh
                fine = barycentric_subdivision(mesh)
                self.assertEqual(fine.n_faces, 6 * mesh.n_faces)
                self.assertEqual(classify_piece(fine, 0), classify_piece(mesh, 0))

    def test_subdividing_twice_keeps_piece_kind(self):
        mesh = load_fixture("mb-min").mesh
        finer = barycentric_subdivision(barycentric_subdivision(mesh))
        self.assertEqual(classify_piece(finer, 0).tag, PieceTag.MOEBIUS)

    def test_splitting_regular_faces_keeps_critical_vertices(self):
        for name in ("mb-min", "annulus-linear"):
            with self.subTest(name=name):
                _, field = fixture_field(name)
                mesh, values = split_regular_faces(field)
                self.assertGreater(mesh.n_faces, field.mesh.n_faces)
                refined = validate_field(mesh, values)
                self.assertEqual(refined.critical_vertices, field.critical_vertices)
                self.assertEqual(refined.boundary_levels, field.boundary_levels)
                self.assertEqual(critical_values(refined), critical_values(field))

    def test_cone_refined_then_split_keeps_its_maximum(self):
        fixture, field = fixture_field("disk-cone")
        # every triangle of the cone meets the apex, so refine it first
        mesh = barycentric_subdivision(fixture.mesh)
        refined = validate_field(mesh, barycentric_values(fixture.mesh, fixture.values))
        self.assertEqual(refined.critical_vertices, ((0, MAX),))
        split_mesh, values = split_regular_faces(refined)
        self.assertGreater(split_mesh.n_faces, mesh.n_faces)
        split = validate_field(split_mesh, values)
        self.assertEqual(split.critical_vertices, field.critical_vertices)
        self.assertEqual(split.boundary_levels, field.boundary_levels)


class FieldTests(SimpleTestCase):
    def test_cone_disk(self):
        _, field = fixture_field("disk-cone")
        self.assertEqual(field.critical_vertices, ((0, MAX),))
        self.assertEqual(critical_values(field), [0.0, 1.0])

    def test_linear_annulus_has_no_critical_vertices(self):
        _, field = fixture_field("annulus-linear")
        self.assertEqual(field.critical_vertices, ())
        self.assertEqual(critical_values(field), [0.0, 1.0])

    def test_mb_min(self):
        _, field = fixture_field("mb-min")
        kinds = sorted(str(kind) for _, kind in field.critical_vertices)
        self.assertEqual(kinds, ["Max", "Saddle(1)"])
        self.assertEqual(critical_values(field), [0.0, 3.0, 4.0])
        self.assertEqual(field.critical_kinds[3 * 6], saddle(1))

    def test_sphere_has_one_min_and_one_max(self):
        _, field = fixture_field("sphere-octa")
        self.assertEqual(dict(field.critical_vertices), {0: MAX, 1: MIN})
        self.assertEqual(index_sum(field), 2)

    def test_index_sum_matches_euler_characteristic(self):
        for name in ("rp2", "torus-height", "sphere-octa", "mb-min", "mb-case-d"):
            fixture, field = fixture_field(name)
            with self.subTest(name=name):
                self.assertEqual(index_sum(field), fixture.mesh.euler_characteristic())

    def test_torus_critical_points(self):
        _, field = fixture_field("torus-height")
        kinds = sorted(str(kind) for _, kind in field.critical_vertices)
        self.assertEqual(kinds, ["Max", "Min", "Saddle(1)", "Saddle(1)"])

    def test_size_mismatch(self):
        with self.assertRaises(FieldSizeMismatch):
            validate_field(build_surface([(0, 1, 2)]), [0.0, 0.0])

    def test_non_constant_boundary(self):
        fixture = load_fixture("disk-cone")
        values = fixture.values.copy()
        values[1] = 0.5
        with self.assertRaises(NonConstantBoundary):
            validate_field(fixture.mesh, values)

    def test_equal_interior_neighbours(self):
        fixture = load_fixture("sphere-octa")
        values = fixture.values.copy()
        values[3] = values[2]
        with self.assertRaises(EqualAdjacentInteriorValues) as ctx:
            validate_field(fixture.mesh, values)
        self.assertEqual(ctx.exception.error_type, "equal_adjacent_interior_values")

    def test_critical_point_on_boundary(self):
        fixture = load_fixture("annulus-linear")
        values = fixture.values.copy()
        values[6] = -0.5
        with self.assertRaises(CriticalOnBoundary):
            validate_field(fixture.mesh, values)

    def test_flat_triangle(self):
        with self.assertRaises(PlateauFace):
            validate_field(build_surface([(0, 1, 2)]), [0.0, 0.0, 0.0])

    def test_level_through_vertex(self):
        _, field = fixture_field("mb-min")
        with self.assertRaises(CurveTouchesVertex):
            level_curves(field, 3.5)

    def test_level_curves_on_mb_min(self):
        _, field = fixture_field("mb-min")
        self.assertEqual(len(level_curves(field, 1.5)), 1)
        self.assertEqual(len(level_curves(field, 3.9)), 1)

    def test_regular_value_avoids_vertex_values(self):
        _, field = fixture_field("mb-min")
        value = field.regular_value(3.0, 4.0)
        self.assertTrue(3.0 < value < 4.0)
        self.assertNotIn(value, set(field.values.tolist()))


class CoverTests(SimpleTestCase):
    def test_moebius_cover_is_an_annulus(self):
        mesh = load_fixture("mb-min").mesh
        cover = orientation_double_cover(mesh)
        self.assertEqual(classify_piece(cover.total, 0).tag, PieceTag.ANNULUS)
        self.assertEqual(cover.total.euler_characteristic(), 0)
        boundary = preimage_components(cover, mesh.boundary_cycles[0])
        self.assertEqual(boundary.count, 2)
        self.assertTrue(boundary.xi_swaps)

    def test_sphere_cover_is_two_spheres(self):
        cover = orientation_double_cover(build_surface(OCTAHEDRON))
        self.assertEqual(len(cover.total.components), 2)
        self.assertEqual(cover.total.euler_characteristic(), 4)
        faces = preimage_components(cover, range(8))
        self.assertEqual(faces.count, 2)
        self.assertTrue(faces.xi_swaps)

    def test_projective_plane_cover_is_a_sphere(self):
        fixture = load_fixture("rp2")
        cover = orientation_double_cover(fixture.mesh)
        self.assertEqual(len(cover.total.components), 1)
        self.assertEqual(cover.total.euler_characteristic(), 2)
        self.assertTrue(orientability(cover.total, 0))

    def test_deck_involution(self):
        cover = orientation_double_cover(load_fixture("mb-case-a").mesh)
        for x in range(cover.total.n_vertices):
            self.assertNotEqual(cover.xi_vertex(x), x)
            self.assertEqual(cover.project_vertex(cover.xi_vertex(x)), cover.project_vertex(x))
        darts = cover.xi_darts
        self.assertEqual(len(darts), 3 * cover.total.n_faces)
        for dart, image in enumerate(darts):
            self.assertNotEqual(image, dart)
            self.assertEqual(darts[image], dart)

    def test_lifted_field_is_valid_and_xi_invariant(self):
        fixture, field = fixture_field("mb-case-b")
        cover = orientation_double_cover(fixture.mesh)
        lifted = cover.lift_values(fixture.values)
        for x in range(cover.total.n_vertices):
            self.assertEqual(lifted[x], lifted[cover.xi_vertex(x)])
        total_field = validate_field(cover.total, lifted)
        self.assertEqual(len(total_field.critical_vertices), 2 * len(field.critical_vertices))
        projected = sorted(cover.project_vertex(x) for x, _ in total_field.critical_vertices)
        expected = sorted(v for v, _ in field.critical_vertices for _ in range(2))
        self.assertEqual(projected, expected)

    def test_lifted_level_curve(self):
        fixture, field = fixture_field("mb-min")
        cover = orientation_double_cover(fixture.mesh)
        total_field = validate_field(cover.total, cover.lift_values(fixture.values))
        (curve,) = level_curves(field, 3.9)
        lifts = lift_curve(cover, total_field, curve)
        self.assertEqual(len(lifts), 2)
        self.assertEqual(preimage_components(cover, curve).count, 2)

    def test_random_moebius_covers(self):
        for saddles in range(1, 7):
            for seed in range(5):
                fixture = random_moebius_field(RandomFieldSpec(saddles=saddles, seed=seed))
                cover = orientation_double_cover(fixture.mesh)
                with self.subTest(name=fixture.name):
                    self.assertEqual(len(cover.total.components), 1)
                    self.assertEqual(classify_piece(cover.total, 0).tag, PieceTag.ANNULUS)
                    self.assertEqual(
                        cover.total.euler_characteristic(), 2 * fixture.mesh.euler_characteristic()
                    )
                    lifted = cover.lift_values(fixture.values)
                    for x in range(cover.total.n_vertices):
                        self.assertNotEqual(cover.xi_vertex(x), x)
                        self.assertEqual(cover.xi_vertex(cover.xi_vertex(x)), x)
                        self.assertEqual(lifted[x], lifted[cover.xi_vertex(x)])
                    boundary = preimage_components(cover, fixture.mesh.boundary_cycles[0])
                    self.assertEqual(boundary.count, 2)
                    self.assertTrue(boundary.xi_swaps)


class MeshTextTests(SimpleTestCase):
    def test_written_fixture_reads_back(self):
        fixture = load_fixture("mb-min")
        parsed = parse_mesh(write_mesh(fixture.mesh, fixture.values))
        self.assertEqual(parsed.mesh.faces, fixture.mesh.faces)
        self.assertTrue(np.array_equal(parsed.values, fixture.values))
        self.assertIsNotNone(parsed.coords)

    def test_comments_and_blank_lines(self):
        text = "# a triangle\nplmorse 1\n\n3 1\n0\n0.5\n1\n# faces\n0 1 2\n"
        parsed = parse_mesh(text)
        self.assertEqual(parsed.mesh.n_faces, 1)
        self.assertIsNone(parsed.coords)

    def test_bad_header(self):
        with self.assertRaises(ParseError) as ctx:
            parse_mesh("plmorse 2\n3 1\n0\n0\n1\n0 1 2\n")
        self.assertEqual(ctx.exception.line, 1)

    def test_bad_number_reports_column(self):
        with self.assertRaises(ParseError) as ctx:
            parse_mesh("plmorse 1\n3 1\n0\n0 1 x 2\n1\n0 1 2\n")
        self.assertEqual((ctx.exception.line, ctx.exception.column), (4, 5))

    def test_face_index_out_of_range(self):
        with self.assertRaises(ParseError) as ctx:
            parse_mesh("plmorse 1\n3 1\n0\n0\n1\n0 1 7\n")
        self.assertEqual((ctx.exception.line, ctx.exception.column), (6, 5))
        self.assertEqual(ctx.exception.details["reason"], "vertex index 7 out of range")

    def test_truncated_input(self):
        with self.assertRaises(ParseError):
            parse_mesh("plmorse 1\n3 1\n0\n0\n")

    def test_trailing_content(self):
        with self.assertRaises(ParseError) as ctx:
            parse_mesh("plmorse 1\n3 1\n0\n0\n1\n0 1 2\n0 1 2\n")
        self.assertEqual(ctx.exception.line, 7)

    def test_sidecar(self):
        cover = orientation_double_cover(load_fixture("mb-min").mesh)
        rows = parse_sidecar(write_sidecar(cover))
        self.assertEqual(len(rows), 84)
        self.assertEqual(rows[0], (0, 0, 1))
        self.assertEqual(rows[5], (5, 2, 4))


class FixtureTests(SimpleTestCase):
    def test_every_named_fixture_is_valid(self):
        for name in fixture_names():
            with self.subTest(name=name):
                fixture, field = fixture_field(name)
                self.assertEqual(len(field.values), fixture.mesh.n_vertices)

    def test_moebius_saddle_counts(self):
        expected = {
            "mb-min": 1,
            "mb-case-a": 2,
            "mb-case-b": 2,
            "mb-case-c": 3,
            "mb-case-d": 4,
            "mb-chain": 3,
        }
        for name, count in expected.items():
            with self.subTest(name=name):
                _, field = fixture_field(name)
                self.assertEqual(saddle_count(field), count)
                self.assertEqual(classify_piece(field.mesh, 0).tag, PieceTag.MOEBIUS)

    def test_unknown_fixture(self):
        with self.assertRaises(UnknownFixture):
            load_fixture("klein-bottle")

    def test_random_field_is_reproducible(self):
        spec = RandomFieldSpec(saddles=3, seed=7)
        first = random_moebius_field(spec)
        second = random_moebius_field(spec)
        self.assertEqual(first.mesh.faces, second.mesh.faces)
        self.assertTrue(np.array_equal(first.values, second.values))

    def test_random_field_saddle_budget(self):
        for saddles in range(1, 7):
            for seed in (0, 1, 2):
                with self.subTest(saddles=saddles, seed=seed):
                    fixture = random_moebius_field(RandomFieldSpec(saddles=saddles, seed=seed))
                    field = validate_field(fixture.mesh, fixture.values)
                    self.assertEqual(saddle_count(field), saddles)

    def test_random_parameters_are_checked(self):
        with self.assertRaises(pydantic.ValidationError):
            RandomFieldSpec(saddles=7, seed=0)
        with self.assertRaises(pydantic.ValidationError):
            RandomFieldSpec(saddles=2, seed=-1)

    def test_generator_gives_up(self):
        with self.assertRaises(GeneratorExhausted):
            random_moebius_field(RandomFieldSpec(saddles=2, seed=0), max_attempts=0)


class CommandTests(SimpleTestCase):
    def test_gen_named_fixture_to_stdout(self):
        out = StringIO()
        call_command("gen", "mb-min", stdout=out)
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[:2], ["plmorse 1", "42 72"])

    def test_gen_unknown_fixture_exits_2(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("gen", "nope", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_gen_random_is_byte_identical(self):
        with tempfile.TemporaryDirectory() as tmp:
            paths = [Path(tmp) / "a.plm", Path(tmp) / "b.plm"]
            for path in paths:
                call_command(
                    "gen", "--random", "--saddles", "3", "--seed", "7", "--out", str(path),
                    stdout=StringIO(),
                )
            self.assertEqual(paths[0].read_bytes(), paths[1].read_bytes())

    def test_gen_random_rejects_budget(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("gen", "--random", "--saddles", "9", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_cover_writes_mesh_and_map(self):
        with tempfile.TemporaryDirectory() as tmp:
            source = Path(tmp) / "mb.plm"
            call_command("gen", "mb-min", "--out", str(source), stdout=StringIO())
            target = Path(tmp) / "cover.plm"
            out = StringIO()
            call_command("cover", str(source), "--out", str(target), stdout=out)
            parsed = parse_mesh(target.read_text())
            self.assertEqual(classify_piece(parsed.mesh, 0).tag, PieceTag.ANNULUS)
            rows = parse_sidecar(Path(f"{target}.map").read_text())
            self.assertEqual(len(rows), parsed.mesh.n_vertices)
            self.assertIn("2 boundary cycle(s)", out.getvalue())

    def test_cover_of_sphere_has_two_components(self):
        with tempfile.TemporaryDirectory() as tmp:
            source = Path(tmp) / "sphere.plm"
            call_command("gen", "sphere-octa", "--out", str(source), stdout=StringIO())
            out = StringIO()
            call_command("cover", str(source), stdout=out)
            parsed = parse_mesh(out.getvalue())
            self.assertEqual(len(parsed.mesh.components), 2)

    def test_cover_reports_parse_errors(self):
        with tempfile.TemporaryDirectory() as tmp:
            source = Path(tmp) / "bad.plm"
            source.write_text("not a mesh\n")
            with self.assertRaises(CommandError) as ctx:
                call_command("cover", str(source), stdout=StringIO(), stderr=StringIO())
            self.assertEqual(ctx.exception.returncode, 2)


class SurfaceApiTests(SimpleTestCase):
    def setUp(self):
        self.client = APIClient()

    def test_cover_endpoint(self):
        fixture = load_fixture("rp2")
        response = self.client.post(
            "/api/surfaces/cover/",
            {"mesh": write_mesh(fixture.mesh, fixture.values)},
            format="json",
        )
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data["components"], 1)
        self.assertEqual(response.data["euler_characteristic"], 2)

    def test_cover_endpoint_parse_error(self):
        response = self.client.post("/api/surfaces/cover/", {"mesh": "plmorse 1\n"}, format="json")
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.json()["error_type"], "parse_error")

    def test_fixture_list(self):
        response = self.client.get("/api/surfaces/fixtures/")
        self.assertEqual(response.status_code, 200)
        self.assertEqual([item["name"] for item in response.data], fixture_names())

    def test_fixture_detail(self):
        response = self.client.get("/api/surfaces/fixtures/disk-cone/")
        self.assertEqual(response.status_code, 200)
        self.assertTrue(response.data["mesh"].startswith("plmorse 1\n7 6\n"))

    def test_unknown_fixture_is_404(self):
        response = self.client.get("/api/surfaces/fixtures/nope/")
        self.assertEqual(response.status_code, 404)
        self.assertEqual(response.json()["error_type"], "unknown_fixture")

    def test_random_fixture_validates_budget(self):
        response = self.client.post(
            "/api/surfaces/fixtures/random/", {"saddles": 0, "seed": 1}, format="json"
        )
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.json()["error_type"], "validation_error")

    def test_random_fixture(self):
        response = self.client.post(
            "/api/surfaces/fixtures/random/", {"saddles": 2, "seed": 4}, format="json"
        )
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data["name"], "random-s2-seed4")
