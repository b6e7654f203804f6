import json
import tempfile
from functools import lru_cache
from io import StringIO
from itertools import product
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from rest_framework.test import APIClient

from surfaces.cover import orientation_double_cover
from surfaces.exceptions import (
    BadPieceKind,
    ExpressionSyntaxError,
    GroupExprError,
    InvalidComponent,
    LemmaViolated,
    NotAMoebiusBand,
    NotAnnulusAtom,
    NotATree,
)
from surfaces.field import level_curves, validate_field
from surfaces.fixtures import RandomFieldSpec, load_fixture, random_moebius_field
from surfaces.mesh import PieceTag
from surfaces.meshio import write_mesh

from .decomp import (
    SignedComponentSet,
    cw_partition,
    decompose,
    least_dart_first,
    regular_neighborhood,
    signed_components,
)
from .groupexpr import (
    Atom,
    Product,
    Trivial,
    Wreath1,
    Wreath2,
    Z,
    Zn,
    annulus_split,
    kernel_factors,
    kernel_group,
    parse,
    reduce_negative_chi,
    render,
    simplify,
    torus_rule,
)
from .moebius import (
    EdgeType,
    a_degrees,
    classify_edge,
    classify_edges,
    find_distinguished_vertex,
    lift_edge_type,
    verify_edge_lemma,
)
from .pipeline import analyze_text, dump_report, reeb_dot
from .reeb import ReebGraph, build_reeb, is_tree, level_count_mismatches, representative_curve, to_dot
from .symmetry import (
    QuotientAction,
    action_on_signed,
    check_free_action,
    enumerate_automorphisms,
    identify_group,
    invariant_cell_count,
)

MOEBIUS_FIXTURES = ["mb-min", "mb-case-a", "mb-case-b", "mb-case-c", "mb-case-d", "mb-chain"]
CLOSED_OR_OTHER = ["disk-cone", "annulus-linear", "sphere-octa", "rp2", "torus-height"]


@lru_cache(maxsize=None)
def fixture_graph(name):
    fixture = load_fixture(name)
    field = validate_field(fixture.mesh, fixture.values)
    return fixture, field, build_reeb(fixture.mesh, field)


@lru_cache(maxsize=None)
def fixture_structure(name):
    """Edge types, distinguished vertex, decomposition and cells of a Moebius fixture."""
    fixture, field, g = fixture_graph(name)
    types = classify_edges(fixture.mesh, field, g)
    found = find_distinguished_vertex(g, types)
    decomposition = decompose(fixture.mesh, field, g, types, found)
    cw = cw_partition(fixture.mesh, field, decomposition)
    return types, found, decomposition, cw


@lru_cache(maxsize=None)
def fixture_report(name):
    fixture = load_fixture(name)
    return analyze_text(write_mesh(fixture.mesh, fixture.values), name=name)


def cyclic_table(n):
    return tuple(tuple((a + b) % n for b in range(n)) for a in range(n))


def klein_table():
    elements = [(0, 0), (1, 0), (0, 1), (1, 1)]
    index = {e: i for i, e in enumerate(elements)}
    return tuple(
        tuple(index[((a[0] + b[0]) % 2, (a[1] + b[1]) % 2)] for b in elements) for a in elements
    )


def s3_table():
    elements = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)]
    index = {e: i for i, e in enumerate(elements)}
    return tuple(
        tuple(index[tuple(a[b[i]] for i in range(3))] for b in elements) for a in elements
    )


def abelian_table(*moduli):
    elements = list(product(*(range(m) for m in moduli)))
    index = {e: i for i, e in enumerate(elements)}
    return tuple(
        tuple(index[tuple((x + y) % m for x, y, m in zip(a, b, moduli))] for b in elements)
        for a in elements
    )


class ReebTests(SimpleTestCase):
    def test_mb_min_graph(self):
        _, _, g = fixture_graph("mb-min")
        self.assertEqual([node.level for node in g.nodes], [0.0, 3.0, 4.0])
        self.assertEqual(g.n_edges, 2)
        self.assertEqual(g.v0, 0)
        self.assertTrue(g.nodes[0].is_boundary)
        self.assertEqual(g.degree(1), 2)
        self.assertTrue(is_tree(g))

    def test_disk_cone_is_a_path(self):
        _, _, g = fixture_graph("disk-cone")
        self.assertEqual((g.n_vertices, g.n_edges), (2, 1))
        self.assertEqual(g.nodes[1].label, "Max")
        self.assertTrue(is_tree(g))

    def test_annulus_has_two_boundary_vertices(self):
        _, _, g = fixture_graph("annulus-linear")
        self.assertEqual((g.n_vertices, g.n_edges), (2, 1))
        self.assertTrue(all(node.is_boundary for node in g.nodes))

    def test_closed_surfaces(self):
        _, _, sphere = fixture_graph("sphere-octa")
        self.assertEqual((sphere.n_vertices, sphere.n_edges), (2, 1))
        self.assertIsNone(sphere.v0)
        _, _, rp2 = fixture_graph("rp2")
        self.assertEqual((rp2.n_vertices, rp2.n_edges), (3, 2))
        self.assertIsNone(rp2.v0)
        self.assertTrue(is_tree(rp2))

    def test_torus_graph_has_a_cycle(self):
        _, _, g = fixture_graph("torus-height")
        self.assertEqual((g.n_vertices, g.n_edges), (4, 4))
        self.assertFalse(is_tree(g))

    def test_curve_counts_match_edges(self):
        for name in MOEBIUS_FIXTURES + CLOSED_OR_OTHER:
            with self.subTest(name=name):
                _, _, g = fixture_graph(name)
                self.assertEqual(level_count_mismatches(g), [])

    def test_boundary_vertices_have_degree_one(self):
        for name in MOEBIUS_FIXTURES + ["disk-cone", "annulus-linear"]:
            _, _, g = fixture_graph(name)
            for node in g.nodes:
                if node.is_boundary:
                    self.assertEqual(g.degree(node.id), 1, msg=name)

    def test_moebius_fixtures_give_trees(self):
        for name in MOEBIUS_FIXTURES:
            _, _, g = fixture_graph(name)
            self.assertTrue(is_tree(g), msg=name)

    def test_edges_run_upwards(self):
        for name in MOEBIUS_FIXTURES + CLOSED_OR_OTHER:
            _, _, g = fixture_graph(name)
            for edge in g.edges:
                self.assertLess(g.nodes[edge.lower].level, g.nodes[edge.upper].level)

    def test_annulus_representative_curve(self):
        _, _, g = fixture_graph("annulus-linear")
        curve = representative_curve(g, 0)
        self.assertEqual(curve.value, 0.5)
        self.assertEqual(len(curve), 12)

    def test_representative_curve_follows_its_edge(self):
        _, field, g = fixture_graph("mb-min")
        curve = representative_curve(g, 1, 0.25)
        self.assertEqual(curve.value, 3.25)
        self.assertEqual(len(level_curves(field, 3.25)), 1)

    def test_dot_export(self):
        _, _, g = fixture_graph("disk-cone")
        dot = to_dot(g)
        self.assertTrue(dot.startswith("digraph reeb {"))
        self.assertEqual(dot.count(" -> "), 1)
        self.assertIn('n1 [label="1\\nMax"];', dot)
        self.assertEqual(dot.count("rank=same"), 2)

    def test_dot_labels_moebius_edges(self):
        fixture = load_fixture("mb-min")
        dot, _ = reeb_dot(fixture.mesh, fixture.values)
        self.assertIn('n0 -> n1 [label="A"];', dot)
        self.assertIn('n1 -> n2 [label="B"];', dot)

    def test_from_edges(self):
        g = ReebGraph.from_edges([(0, 1), (1, 2), (1, 3)])
        self.assertTrue(is_tree(g))
        self.assertEqual(g.degree(1), 3)
        cycle = ReebGraph.from_edges([(0, 1), (1, 2), (0, 2)])
        self.assertFalse(is_tree(cycle))


class MoebiusTests(SimpleTestCase):
    def test_mb_min_edge_types(self):
        fixture, field, g = fixture_graph("mb-min")
        self.assertEqual(classify_edge(fixture.mesh, field, g, 0), EdgeType.A)
        self.assertEqual(classify_edge(fixture.mesh, field, g, 1), EdgeType.B)

    def test_only_moebius_bands_are_classified(self):
        fixture, field, g = fixture_graph("disk-cone")
        with self.assertRaises(NotAMoebiusBand):
            classify_edge(fixture.mesh, field, g, 0)

    def test_cover_lift_agrees_with_cuts(self):
        for name in MOEBIUS_FIXTURES:
            fixture, field, g = fixture_graph(name)
            types, _, _, _ = fixture_structure(name)
            cover = orientation_double_cover(fixture.mesh)
            total_field = validate_field(cover.total, cover.lift_values(fixture.values))
            for edge in g.edges:
                with self.subTest(name=name, edge=edge.id):
                    lifted = lift_edge_type(cover, total_field, representative_curve(g, edge.id))
                    self.assertEqual(lifted, types[edge.id])

    def test_edge_lemma_on_fixtures(self):
        _, _, g = fixture_graph("mb-min")
        types, _, _, _ = fixture_structure("mb-min")
        report = verify_edge_lemma(g, types)
        self.assertTrue(report.passed)
        self.assertEqual(report.max_a_degree, 1)
        _, _, g = fixture_graph("mb-case-b")
        types, _, _, _ = fixture_structure("mb-case-b")
        self.assertTrue(verify_edge_lemma(g, types).passed)

    def test_edge_lemma_reports_a_edge_past_b_edge(self):
        g = ReebGraph.from_edges([(0, 1), (1, 2), (2, 3)])
        report = verify_edge_lemma(g, {0: "A", 1: "B", 2: "A"})
        self.assertFalse(report.passed)
        self.assertEqual(report.violations[0]["rule"], "b_subtree")
        self.assertEqual(report.violations[0]["edge"], 1)
        self.assertEqual(report.violations[0]["witness"], 2)

    def test_edge_lemma_reports_a_degree(self):
        g = ReebGraph.from_edges([(0, 1), (1, 2), (1, 3)])
        report = verify_edge_lemma(g, {0: "A", 1: "A", 2: "A"})
        self.assertFalse(report.passed)
        self.assertEqual(report.max_a_degree, 3)
        self.assertEqual(report.violations[0], {"rule": "a_degree", "vertex": 1, "a_degree": 3})

    def test_mb_min_distinguished_vertex(self):
        _, found, _, _ = fixture_structure("mb-min")
        self.assertEqual(found.vertex, 1)
        self.assertEqual(found.path, (0, 1))
        self.assertEqual(found.edges, (0,))

    def test_chain_walks_three_a_edges(self):
        _, _, g = fixture_graph("mb-chain")
        types, found, _, _ = fixture_structure("mb-chain")
        self.assertEqual(len(found.edges), 3)
        degrees = a_degrees(g, types)
        for vertex in found.path[1:-1]:
            self.assertEqual(degrees[vertex], 2)

    def test_case_c_disk_edges_are_b(self):
        _, _, g = fixture_graph("mb-case-c")
        types, found, _, _ = fixture_structure("mb-case-c")
        others = [e for e in g.incident(found.vertex) if e.id not in found.edges]
        self.assertEqual([types[e.id] for e in others], [EdgeType.B] * 3)

    def test_walk_needs_a_tree(self):
        g = ReebGraph.from_edges([(0, 1), (1, 2), (0, 2)])
        with self.assertRaises(NotATree):
            find_distinguished_vertex(g, {0: "A", 1: "A", 2: "B"})

    def test_walk_needs_the_lemma(self):
        g = ReebGraph.from_edges([(0, 1), (1, 2), (2, 3)])
        with self.assertRaises(LemmaViolated):
            find_distinguished_vertex(g, {0: "A", 1: "B", 2: "A"})

    def test_walk_on_hand_made_tree(self):
        g = ReebGraph.from_edges([(0, 1), (1, 2), (2, 3), (2, 4)])
        found = find_distinguished_vertex(g, {0: "A", 1: "A", 2: "B", 3: "B"})
        self.assertEqual(found.vertex, 2)
        self.assertEqual(found.path, (0, 1, 2))


class DecompositionTests(SimpleTestCase):
    def test_mb_min_neighborhood(self):
        fixture, field, g = fixture_graph("mb-min")
        hood = regular_neighborhood(fixture.mesh, field, g, 1)
        self.assertEqual(hood.complement_count, 2)
        self.assertEqual(sorted(side for side, _ in hood.curves), [-1, 1])

    def test_neighborhood_of_boundary_vertex_is_rejected(self):
        fixture, field, g = fixture_graph("mb-min")
        with self.assertRaises(InvalidComponent):
            regular_neighborhood(fixture.mesh, field, g, 0)

    def test_complement_counts(self):
        for name, expected in (("mb-case-a", 2), ("mb-case-d", 5)):
            fixture, field, g = fixture_graph(name)
            _, found, _, _ = fixture_structure(name)
            hood = regular_neighborhood(fixture.mesh, field, g, found.vertex)
            self.assertEqual(hood.complement_count, expected, msg=name)

    def test_thinner_neighborhood_keeps_the_pieces(self):
        fixture, field, g = fixture_graph("mb-case-b")
        _, found, _, _ = fixture_structure("mb-case-b")
        wide = regular_neighborhood(fixture.mesh, field, g, found.vertex)
        thin = regular_neighborhood(fixture.mesh, field, g, found.vertex, wide.epsilon * 0.3)
        self.assertEqual(thin.complement_count, wide.complement_count)
        self.assertEqual(len(thin.curves), len(wide.curves))

    def test_mb_min_decomposition(self):
        _, _, decomposition, cw = fixture_structure("mb-min")
        self.assertEqual(decomposition.n, 1)
        self.assertAlmostEqual(decomposition.epsilon, 0.05)
        self.assertEqual(decomposition.pieces[0].kind.tag, PieceTag.ANNULUS)
        self.assertTrue(decomposition.pieces[0].holds_boundary)
        self.assertEqual(decomposition.pieces[1].kind.tag, PieceTag.DISK)
        self.assertEqual(cw.counts, (1, 2, 2))
        self.assertEqual(cw.n_flags, 8)

    def test_disk_counts(self):
        for name, n in (("mb-case-a", 1), ("mb-case-b", 2), ("mb-case-c", 3), ("mb-case-d", 4)):
            _, _, decomposition, cw = fixture_structure(name)
            self.assertEqual(decomposition.n, n, msg=name)
            self.assertEqual(len(cw.cells2), n + 1, msg=name)
            self.assertEqual(len(signed_components(decomposition)), 2 * n, msg=name)

    def test_pieces_are_oriented_by_least_dart(self):
        for name in MOEBIUS_FIXTURES:
            _, _, decomposition, _ = fixture_structure(name)
            for piece in decomposition.pieces:
                edges = piece.curve.edges
                self.assertEqual(piece.orientation, (min(edges), min(edges[1], edges[-1])), msg=name)
                for record, following in zip(piece.curve.crossings, piece.curve.crossings[1:]):
                    self.assertEqual(record.exit, following.entry, msg=name)

    def test_least_dart_ignores_walking_direction(self):
        _, field, _ = fixture_graph("annulus-linear")
        (curve,) = level_curves(field, 0.5)
        forward = least_dart_first(curve)
        backward = least_dart_first(curve.reversed())
        self.assertEqual(forward.edges, backward.edges)
        self.assertEqual(forward.faces, backward.faces)

    def test_case_d_twin_disks_come_last(self):
        _, _, decomposition, _ = fixture_structure("mb-case-d")
        signatures = [piece.signature for piece in decomposition.disks]
        self.assertEqual(signatures[2], signatures[3])
        self.assertNotIn(signatures[0], signatures[1:])
        self.assertNotIn(signatures[1], signatures[2:])
        self.assertEqual([piece.index for piece in decomposition.pieces], [0, 1, 2, 3, 4])

    def test_pieces_are_one_annulus_and_disks(self):
        for name in MOEBIUS_FIXTURES:
            _, _, decomposition, _ = fixture_structure(name)
            tags = [piece.kind.tag for piece in decomposition.pieces]
            self.assertEqual(tags, [PieceTag.ANNULUS] + [PieceTag.DISK] * decomposition.n, msg=name)
            self.assertEqual(decomposition.neighborhood_euler_characteristic, -decomposition.n)

    def test_cells_form_a_projective_plane(self):
        for name in MOEBIUS_FIXTURES:
            _, _, _, cw = fixture_structure(name)
            self.assertEqual(cw.euler_characteristic, 1, msg=name)
            words = [cw.boundary_word(face) for face in range(len(cw.cells2))]
            self.assertEqual(sum(len(word) for word in words), 2 * len(cw.cells1), msg=name)

    def test_involutions(self):
        _, _, _, cw = fixture_structure("mb-case-d")
        for sigma in cw.sigmas:
            for x, y in enumerate(sigma):
                self.assertNotEqual(x, y)
                self.assertEqual(sigma[y], x)

    def test_case_d_critical_component(self):
        _, _, decomposition, cw = fixture_structure("mb-case-d")
        self.assertEqual(len(decomposition.saddles), 4)
        self.assertEqual(len(cw.cells0), 4)


class SymmetryTests(SimpleTestCase):
    def quotient(self, name):
        _, _, decomposition, cw = fixture_structure(name)
        auts = enumerate_automorphisms(cw)
        return auts, action_on_signed(auts, cw, signed_components(decomposition)), cw

    def test_mb_min_symmetries(self):
        auts, action, cw = self.quotient("mb-min")
        self.assertEqual(len(auts), 2)
        self.assertTrue(auts[0].is_identity)
        self.assertEqual(invariant_cell_count(auts[0], cw).count, cw.total_cells)
        flipped = invariant_cell_count(auts[1], cw)
        self.assertEqual(flipped.count, 1)
        self.assertEqual(flipped.trace, 1)
        self.assertEqual(action.order, 2)

    def test_automorphisms_form_a_group(self):
        for name in MOEBIUS_FIXTURES:
            auts, _, _ = self.quotient(name)
            images = {aut.images for aut in auts}
            for a in auts:
                self.assertIn(a.inverse().images, images, msg=name)
                for b in auts:
                    self.assertIn(a.compose(b).images, images, msg=name)

    def test_case_a_is_z2_and_transitive(self):
        _, action, _ = self.quotient("mb-case-a")
        self.assertEqual(identify_group(action), Zn(2))
        self.assertEqual(action.orbits, [[(1, 1), (1, -1)]])

    def test_case_b_is_z4_with_one_orbit(self):
        _, action, _ = self.quotient("mb-case-b")
        self.assertEqual(identify_group(action), Zn(4))
        certificate = check_free_action(action)
        self.assertTrue(certificate.passed)
        self.assertEqual([len(orbit) for orbit in certificate.orbits], [4])
        self.assertEqual(action.group.order(), 4)
        self.assertTrue(action.group.is_cyclic)

    def test_case_c_is_trivial(self):
        auts, action, _ = self.quotient("mb-case-c")
        self.assertEqual(len(auts), 1)
        self.assertEqual(identify_group(action), Trivial())

    def test_case_d_action(self):
        _, action, _ = self.quotient("mb-case-d")
        self.assertEqual(identify_group(action), Zn(2))
        certificate = check_free_action(action)
        self.assertTrue(certificate.passed)
        self.assertEqual(len(certificate.orbits), 4)
        flips = [orbit for orbit in certificate.orbits if orbit[0][0] == orbit[1][0]]
        swaps = [orbit for orbit in certificate.orbits if orbit[0][0] != orbit[1][0]]
        self.assertEqual((len(flips), len(swaps)), (2, 2))
        self.assertEqual(flips, [[[1, 1], [1, -1]], [[2, 1], [2, -1]]])
        for orbit in swaps:
            self.assertEqual(sorted(k for k, _ in orbit), [3, 4])

    def test_invariant_cells_are_one_or_all(self):
        for name in MOEBIUS_FIXTURES:
            auts, _, cw = self.quotient(name)
            for aut in auts:
                result = invariant_cell_count(aut, cw)
                self.assertIn(result.count, (1, cw.total_cells), msg=name)
                self.assertEqual(result.trace, 1, msg=name)

    def test_kernel_fixes_every_signed_disk(self):
        for name in ("mb-case-a", "mb-case-b", "mb-case-d"):
            auts, action, _ = self.quotient(name)
            self.assertEqual(action.kernel_order * action.order, len(auts), msg=name)

    def test_identify_group_tables(self):
        self.assertEqual(identify_group(cyclic_table(1)), Trivial())
        self.assertEqual(identify_group(cyclic_table(6)), Zn(6))
        self.assertEqual(identify_group(klein_table()), Product((Zn(2), Zn(2))))
        self.assertEqual(render(identify_group(klein_table())), "Z_2 × Z_2")
        self.assertEqual(identify_group(s3_table()), Atom("Q(6)"))
        self.assertEqual(identify_group(cyclic_table(4), max_order=2), Atom("Q(4)"))

    def test_identify_abelian_products(self):
        self.assertEqual(render(identify_group(abelian_table(2, 4))), "Z_2 × Z_4")
        self.assertEqual(render(identify_group(abelian_table(2, 2, 2))), "Z_2 × Z_2 × Z_2")
        self.assertEqual(identify_group(abelian_table(3, 5)), Zn(15))
        self.assertEqual(identify_group(abelian_table(2, 2, 2), max_order=4), Atom("Q(8)"))

    def test_free_action_failure_has_witness(self):
        signed = SignedComponentSet(elements=((1, 1), (1, -1), (2, 1), (2, -1)))
        identity, swap = (0, 1, 2, 3), (1, 0, 2, 3)
        action = QuotientAction(
            signed=signed,
            elements=(identity, swap),
            table=((0, 1), (1, 0)),
            kernel_order=1,
            group_order=2,
        )
        certificate = check_free_action(action)
        self.assertFalse(certificate.passed)
        self.assertEqual(certificate.witness, {"element": 1, "fixes": [2, 1]})

    def test_trivial_action_is_free(self):
        signed = SignedComponentSet(elements=((1, 1), (1, -1)))
        action = QuotientAction(signed=signed, elements=((0, 1),), table=((0,),), kernel_order=1, group_order=1)
        self.assertTrue(check_free_action(action).passed)


def random_expr(rng, depth):
    leaves = [Trivial(), Z(), Z(2), Zn(2), Zn(3), Zn(5), Atom("a"), Atom("b"), Atom("ST(Y_2)"), Atom("ST(Y_10)")]
    if depth == 0 or rng.random() < 0.3:
        return leaves[int(rng.integers(0, len(leaves)))]
    choice = int(rng.integers(0, 3))
    if choice == 0:
        size = int(rng.integers(2, 4))
        return Product(tuple(random_expr(rng, depth - 1) for _ in range(size)))
    if choice == 1:
        k = int(rng.integers(1, 4)) if rng.random() < 0.7 else "k"
        return Wreath1(random_expr(rng, depth - 1), k)
    return Wreath2(random_expr(rng, depth - 1), int(rng.integers(1, 3)), "b")


class GroupExprTests(SimpleTestCase):
    def test_render(self):
        self.assertEqual(render(Zn(4)), "Z_4")
        self.assertEqual(render(Z(3)), "Z^3")
        self.assertEqual(render(Trivial()), "trivial")
        self.assertEqual(render(Wreath2(Atom("a"), 2, 3)), "a wr[2,3] Z^2")
        self.assertEqual(render(Wreath1(Atom("c"))), "c wr[k] Z")

    def test_simplify(self):
        self.assertEqual(simplify(Product((Product((Z(), Z())), Trivial()))), Z(2))
        self.assertEqual(render(simplify(Product((Atom("b"), Atom("a"))))), "a × b")
        self.assertEqual(render(simplify(Wreath1(Product((Trivial(), Atom("a"))), 3))), "a wr[3] Z")
        self.assertEqual(simplify(Product((Trivial(), Trivial()))), Trivial())
        self.assertEqual(
            render(simplify(Product((Atom("ST(Y_10)"), Atom("ST(Y_2)"), Zn(3), Z())))),
            "Z × Z_3 × ST(Y_2) × ST(Y_10)",
        )

    def test_kernel_group(self):
        self.assertEqual(render(kernel_group(3)), "Z × ST(Y_0) × ST(Y_1) × ST(Y_2) × ST(Y_3)")
        self.assertEqual(
            render(kernel_group(4)), "Z × ST(Y_0) × ST(Y_1) × ST(Y_2) × ST(Y_3) × ST(Y_4)"
        )
        self.assertEqual(render(kernel_group(0)), "Z × ST(Y_0)")
        self.assertEqual(render(kernel_group(1, leaves={1: Trivial()})), "Z × ST(Y_0)")
        self.assertEqual(len(kernel_factors(5)), 7)

    def test_kernel_group_of_decompositions(self):
        for name in MOEBIUS_FIXTURES:
            _, _, decomposition, _ = fixture_structure(name)
            factors = kernel_factors(decomposition.n)
            self.assertEqual(len(factors), decomposition.n + 2)
            self.assertEqual(len(kernel_group(decomposition).factors), decomposition.n + 2)

    def test_annulus_split(self):
        split = annulus_split(Atom("π0 S(f|Y0,∂Y0)"))
        self.assertEqual(render(split), "Z × π0 S_id(f|Y0,∂Y0)")
        with self.assertRaises(NotAnnulusAtom):
            annulus_split(split)
        with self.assertRaises(NotAnnulusAtom):
            annulus_split(Atom("ST(Y_1)"))
        self.assertEqual(annulus_split(Atom("π0 S(f|C,∂C)"), Trivial()), Z())

    def test_reduce_negative_chi(self):
        pieces = [(PieceTag.DISK, Atom("a")), (PieceTag.MOEBIUS, Atom("b"))]
        self.assertEqual(render(reduce_negative_chi(pieces)), "a × b")
        self.assertEqual(reduce_negative_chi([("Annulus", Atom("c"))]), Atom("c"))
        self.assertEqual(reduce_negative_chi([("Disk", Trivial()), ("Disk", Atom("d"))]), Atom("d"))
        with self.assertRaises(BadPieceKind):
            reduce_negative_chi([(PieceTag.MOEBIUS_WITH_HOLE, Atom("a"))])

    def test_torus_rule(self):
        tree = torus_rule(True, [Atom("d1"), Atom("d2")], a=1, b=1)
        self.assertEqual(tree, Wreath2(Product((Atom("d1"), Atom("d2"))), 1, 1))
        self.assertEqual(render(tree), "(d1 × d2) wr[1,1] Z^2")
        self.assertEqual(torus_rule(False, Atom("c"), k=2), Wreath1(Atom("c"), 2))
        self.assertEqual(render(torus_rule(False, Atom("c"))), "c wr[k] Z")
        self.assertEqual(render(torus_rule(True, [Atom("d")])), "d wr[a,b] Z^2")

    def test_parse(self):
        self.assertEqual(parse("Z × ST(Y_0)"), Product((Z(), Atom("ST(Y_0)"))))
        self.assertEqual(parse("(d1 × d2) wr[1,1] Z^2"), Wreath2(Product((Atom("d1"), Atom("d2"))), 1, 1))
        self.assertEqual(parse("(a wr[2] Z) wr[k] Z"), Wreath1(Wreath1(Atom("a"), 2), "k"))
        self.assertEqual(parse("Z^2"), Z(2))
        self.assertEqual(parse("trivial"), Trivial())

    def test_parse_errors(self):
        with self.assertRaises(ExpressionSyntaxError):
            parse("(a × b")
        with self.assertRaises(ExpressionSyntaxError):
            parse("")
        with self.assertRaises(ExpressionSyntaxError):
            parse("a wr[2] Z^2")
        with self.assertRaises(GroupExprError):
            parse("a wr[0] Z")

    def test_constructors_check_parameters(self):
        with self.assertRaises(GroupExprError):
            Zn(1)
        with self.assertRaises(GroupExprError):
            Wreath2(Atom("a"), 0, 1)

    def test_random_expressions(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            x, y, z = (random_expr(rng, 6) for _ in range(3))
            simple = simplify(x)
            self.assertEqual(simplify(simple), simple)
            self.assertEqual(parse(render(simple)), simple)
            self.assertEqual(
                simplify(Product((x, Product((y, z))))), simplify(Product((Product((x, y)), z)))
            )
            self.assertEqual(simplify(Product((x, y))), simplify(Product((y, x))))


class PipelineTests(SimpleTestCase):
    def test_mb_min_report(self):
        result = fixture_report("mb-min")
        report = result.report
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(report["schema"], 1)
        self.assertEqual(report["errors"], [])
        self.assertEqual(report["reeb"]["vertices"], 3)
        self.assertEqual([e["type"] for e in report["edge_types"]], ["A", "B"])
        self.assertEqual([e["oracle"] for e in report["edge_types"]], ["A", "B"])
        self.assertEqual(report["distinguished"]["vertex"], 1)
        self.assertEqual(report["decomposition"]["n"], 1)
        self.assertEqual(report["decomposition"]["cw_cells"], [1, 2, 2])
        self.assertEqual(report["group"]["kernel_expr"], "Z × ST(Y_0) × ST(Y_1)")

    def test_named_cases(self):
        expected = {"mb-case-a": "Z_2", "mb-case-b": "Z_4", "mb-case-c": "trivial", "mb-case-d": "Z_2"}
        for name, quotient in expected.items():
            with self.subTest(name=name):
                report = fixture_report(name).report
                self.assertEqual(report["symmetry"]["quotient"], quotient)
                self.assertTrue(report["symmetry"]["free_action"])

    def test_case_c_group(self):
        report = fixture_report("mb-case-c").report
        self.assertEqual(report["group"]["expr"], "Z × ST(Y_0) × ST(Y_1) × ST(Y_2) × ST(Y_3)")
        self.assertEqual(report["symmetry"]["quotient_order"], 1)

    def test_case_d_group(self):
        report = fixture_report("mb-case-d").report
        self.assertEqual(
            report["group"]["kernel_expr"], "Z × ST(Y_0) × ST(Y_1) × ST(Y_2) × ST(Y_3) × ST(Y_4)"
        )
        self.assertEqual(report["decomposition"]["n"], 4)

    def test_other_surfaces_stop_after_reeb(self):
        report = fixture_report("disk-cone").report
        self.assertEqual(fixture_report("disk-cone").exit_code, 0)
        self.assertEqual(report["reeb"]["edges"], 1)
        self.assertIsNone(report["edge_types"])
        self.assertEqual(report["skipped"][0], "edge_types")

    def test_invalid_field_exits_2(self):
        fixture = load_fixture("disk-cone")
        values = fixture.values.copy()
        values[1] = 0.5
        result = analyze_text(write_mesh(fixture.mesh, values), name="bad")
        self.assertEqual(result.exit_code, 2)
        self.assertEqual(result.report["errors"][0]["type"], "non_constant_boundary")
        self.assertEqual(result.report["errors"][0]["stage"], "validation")
        self.assertIsNone(result.report["reeb"])
        self.assertIsNone(result.report["counterexample"])

    def test_parse_error_exits_2(self):
        result = analyze_text("nonsense\n")
        self.assertEqual(result.exit_code, 2)
        self.assertEqual(result.report["errors"][0]["type"], "parse_error")
        self.assertEqual(result.report["errors"][0]["details"]["line"], 1)

    def test_reports_are_deterministic(self):
        fixture = load_fixture("mb-case-b")
        text = write_mesh(fixture.mesh, fixture.values)
        first = dump_report(analyze_text(text, name="b").report)
        second = dump_report(analyze_text(text, name="b").report)
        self.assertEqual(first, second)

    def test_random_corpus(self):
        # one cut per edge; agreement across levels is covered by MoebiusTests
        for saddles in range(1, 7):
            for seed in range(34):
                fixture = random_moebius_field(RandomFieldSpec(saddles=saddles, seed=seed))
                text = write_mesh(fixture.mesh, fixture.values)
                result = analyze_text(text, name=fixture.name, fractions=(0.5,))
                with self.subTest(name=fixture.name):
                    report = result.report
                    self.assertEqual(result.exit_code, 0, msg=report["errors"])
                    self.assertTrue(report["reeb"]["is_tree"])
                    self.assertTrue(report["lemma"]["passed"])
                    self.assertLessEqual(report["lemma"]["max_a_degree"], 2)
                    types = [e["type"] for e in report["edge_types"]]
                    self.assertEqual(types, [e["oracle"] for e in report["edge_types"]])
                    self.assertEqual(len(report["distinguished"]["edges"]), types.count("A"))
                    self.assertEqual(report["decomposition"]["cw_euler_characteristic"], 1)
                    self.assertTrue(report["symmetry"]["free_action"])
                    total = sum(report["decomposition"]["cw_cells"])
                    for cells in report["symmetry"]["invariant_cells"]:
                        self.assertIn(cells["count"], (1, total))
                    n = report["decomposition"]["n"]
                    self.assertEqual(len(report["group"]["kernel_expr"].split(" × ")), n + 2)


class AnalysisCommandTests(SimpleTestCase):
    def write_fixture(self, tmp, name, values=None):
        fixture = load_fixture(name)
        path = Path(tmp) / f"{name}.plm"
        path.write_text(write_mesh(fixture.mesh, fixture.values if values is None else values))
        return path

    def test_analyze_prints_report(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = self.write_fixture(tmp, "mb-case-c")
            out = StringIO()
            call_command("analyze", str(path), stdout=out)
            report = json.loads(out.getvalue())
            self.assertEqual(report["symmetry"]["quotient"], "trivial")
            self.assertEqual(report["group"]["expr"], "Z × ST(Y_0) × ST(Y_1) × ST(Y_2) × ST(Y_3)")

    def test_analyze_rejects_bad_boundary(self):
        with tempfile.TemporaryDirectory() as tmp:
            fixture = load_fixture("disk-cone")
            values = fixture.values.copy()
            values[2] = 0.25
            path = self.write_fixture(tmp, "disk-cone", values)
            err = StringIO()
            with self.assertRaises(CommandError) as ctx:
                call_command("analyze", str(path), stdout=StringIO(), stderr=err)
            self.assertEqual(ctx.exception.returncode, 2)
            self.assertIn("non_constant_boundary", err.getvalue())

    def test_analyze_compact_output(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = self.write_fixture(tmp, "sphere-octa")
            out = StringIO()
            call_command("analyze", str(path), "--json-compact", stdout=out)
            text = out.getvalue().strip()
            self.assertNotIn("\n", text)
            self.assertEqual(json.loads(text)["reeb"]["vertices"], 2)

    def test_analyze_directory(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.write_fixture(tmp, "mb-min")
            self.write_fixture(tmp, "annulus-linear")
            target = Path(tmp) / "reports"
            call_command("analyze", "--dir", tmp, "--out", str(target), stdout=StringIO())
            self.assertEqual(sorted(p.name for p in target.iterdir()), ["annulus-linear.json", "mb-min.json"])
            out = StringIO()
            call_command("analyze", "--dir", tmp, stdout=out)
            self.assertEqual(sorted(json.loads(out.getvalue())), ["annulus-linear.plm", "mb-min.plm"])

    def test_analyze_needs_one_input(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("analyze", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_reeb_dot(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = StringIO()
            call_command("reeb", str(self.write_fixture(tmp, "disk-cone")), "--dot", stdout=out)
            self.assertEqual(out.getvalue().count(" -> "), 1)
            out = StringIO()
            call_command("reeb", str(self.write_fixture(tmp, "mb-case-a")), "--dot", stdout=out)
            self.assertEqual(out.getvalue().count('[label="A"]'), 1)
            out = StringIO()
            call_command("reeb", str(self.write_fixture(tmp, "torus-height")), stdout=out)
            self.assertIn("not a tree", out.getvalue())


class AnalysisApiTests(SimpleTestCase):
    def setUp(self):
        self.client = APIClient()

    def post_fixture(self, url, name):
        fixture = load_fixture(name)
        return self.client.post(url, {"mesh": write_mesh(fixture.mesh, fixture.values)}, format="json")

    def test_analyze_endpoint(self):
        response = self.post_fixture("/api/analysis/analyze/", "mb-min")
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data["schema"], 1)
        self.assertEqual(response.data["decomposition"]["n"], 1)

    def test_analyze_endpoint_reports_input_errors(self):
        response = self.client.post("/api/analysis/analyze/", {"mesh": "plmorse 1\n"}, format="json")
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.data["errors"][0]["type"], "parse_error")

    def test_reeb_endpoint(self):
        response = self.post_fixture("/api/analysis/reeb/", "torus-height")
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data["vertices"], 4)
        self.assertFalse(response.data["is_tree"])

    def test_reeb_endpoint_parse_error(self):
        response = self.client.post("/api/analysis/reeb/", {"mesh": "garbage"}, format="json")
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.json()["error_type"], "parse_error")
