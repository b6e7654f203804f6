"""
The analyze pipeline.

Stages run in order and each fills one section of the report. The first
PLMorseError stops the run: it is recorded under ``errors`` with the stage
it came from, the sections of later stages stay null and the error's exit
code becomes the exit code of the run. Theorem violations (exit code 3)
also embed the offending mesh so the case can be replayed.

Inputs that are not a single Moebius band stop after the Reeb graph; the
remaining stages are listed under ``skipped``.
"""

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from django.conf import settings

from surfaces.cover import orientation_double_cover
from surfaces.exceptions import (
    InconsistentCellStructure,
    LemmaViolated,
    ParseError,
    PLMorseError,
    TheoremViolation,
    UnexpectedCutPattern,
)
from surfaces.field import index_sum, validate_field
from surfaces.mesh import PieceTag, classify_piece
from surfaces.meshio import parse_mesh, write_mesh

from .decomp import cw_partition, decompose, signed_components
from .groupexpr import Atom, Trivial, kernel_group, render
from .moebius import classify_edges, find_distinguished_vertex, lift_edge_type, verify_edge_lemma
from .reeb import build_reeb, level_count_mismatches, representative_curve, to_dot
from .symmetry import (
    action_on_signed,
    check_free_action,
    enumerate_automorphisms,
    identify_group,
    invariant_cell_count,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
STAGES = (
    "validation",
    "reeb",
    "edge_types",
    "lemma",
    "distinguished",
    "decomposition",
    "symmetry",
    "group",
)


@dataclass
class AnalysisResult:
    report: dict
    exit_code: int


def empty_report(name, text):
    report = {
        "schema": SCHEMA_VERSION,
        "input": {
            "name": name,
            "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
            "vertices": None,
            "faces": None,
        },
        "errors": [],
        "skipped": [],
        "counterexample": None,
    }
    for stage in STAGES:
        report[stage] = None
    return report


def validation_summary(mesh, field):
    return {
        "valid": True,
        "surface": [classify_piece(mesh, k).as_dict() for k in range(len(mesh.components))],
        "euler_characteristic": mesh.euler_characteristic(),
        "boundary_levels": [float(x) for x in field.boundary_levels],
        "critical": [
            {"vertex": v, "kind": str(kind), "value": field.value(v)} for v, kind in field.critical_vertices
        ],
        "index_sum": index_sum(field),
    }


def is_moebius_band(mesh):
    return len(mesh.components) == 1 and classify_piece(mesh, 0).tag is PieceTag.MOEBIUS


class _Run:
    """Mutable state of one analysis: the report and the stage in progress."""

    def __init__(self, name, text):
        self.name = name
        self.text = text
        self.report = empty_report(name, text)
        self.stage = STAGES[0]
        self.parsed = None

    def enter(self, stage):
        self.stage = stage
        logger.debug(f"{self.name}: stage {stage}")

    def fail(self, error: PLMorseError):
        entry = error.as_dict(self.stage)
        entry["details"] = error.details
        self.report["errors"].append(entry)
        if error.exit_code == TheoremViolation.exit_code and self.parsed is not None:
            self.report["counterexample"] = {
                "stage": self.stage,
                "mesh": write_mesh(self.parsed.mesh, self.parsed.values),
            }
        return AnalysisResult(report=self.report, exit_code=error.exit_code)


def analyze_text(text, name="<input>", fractions=None, max_order=None) -> AnalysisResult:
    fractions = fractions or settings.PLMORSE_EDGE_SAMPLE_FRACTIONS
    max_order = max_order or settings.PLMORSE_MAX_QUOTIENT_ORDER
    run = _Run(name, text)
    report = run.report
    try:
        run.parsed = parse_mesh(text)
        mesh, values = run.parsed.mesh, run.parsed.values
        report["input"]["vertices"] = mesh.n_vertices
        report["input"]["faces"] = mesh.n_faces
        field = validate_field(mesh, values)
        report["validation"] = validation_summary(mesh, field)

        run.enter("reeb")
        g = build_reeb(mesh, field)
        mismatches = level_count_mismatches(g)
        if mismatches:
            raise InconsistentCellStructure(
                f"level curve counts disagree with the graph at {len(mismatches)} value(s)",
                details=[{"value": v, "curves": t, "edges": e} for v, t, e in mismatches],
            )
        report["reeb"] = g.summary()

        if not is_moebius_band(mesh):
            report["skipped"] = list(STAGES[2:])
            logger.info(f"{name}: not a Moebius band, stopping after the Reeb graph")
            return AnalysisResult(report=report, exit_code=0)

        run.enter("edge_types")
        types = classify_edges(mesh, field, g, fractions)
        cover = orientation_double_cover(mesh)
        total_field = validate_field(cover.total, cover.lift_values(values))
        entries = []
        for edge in g.edges:
            oracle = lift_edge_type(cover, total_field, representative_curve(g, edge.id))
            if oracle is not types[edge.id]:
                raise UnexpectedCutPattern(
                    f"edge {edge.id}: cut gives {types[edge.id].value}, cover lift gives {oracle.value}"
                )
            entries.append({"edge": edge.id, "type": types[edge.id].value, "oracle": oracle.value})
        report["edge_types"] = entries

        run.enter("lemma")
        lemma = verify_edge_lemma(g, types)
        report["lemma"] = lemma.as_dict()
        if not lemma.passed:
            raise LemmaViolated("edge types break the edge lemma", details=lemma.violations)

        run.enter("distinguished")
        found = find_distinguished_vertex(g, types)
        node = g.nodes[found.vertex]
        report["distinguished"] = {
            **found.as_dict(),
            "level": node.level,
            "critical": [{"vertex": v, "kind": str(k)} for v, k in zip(node.critical, node.kinds)],
        }

        run.enter("decomposition")
        decomposition = decompose(mesh, field, g, types, found)
        cw = cw_partition(mesh, field, decomposition)
        report["decomposition"] = {
            **decomposition.as_dict(),
            "cw_cells": list(cw.counts),
            "cw_euler_characteristic": cw.euler_characteristic,
        }

        run.enter("symmetry")
        auts = enumerate_automorphisms(cw)
        signed = signed_components(decomposition)
        action = action_on_signed(auts, cw, signed)
        certificate = check_free_action(action)
        if not certificate.passed:
            raise TheoremViolation(
                "symmetries do not act freely on signed disks", details=certificate.witness
            )
        invariant = [invariant_cell_count(aut, cw).as_dict() for aut in auts]
        quotient = identify_group(action, max_order=max_order)
        report["symmetry"] = {
            "automorphisms": len(auts),
            "kernel_order": action.kernel_order,
            "quotient_order": action.order,
            "quotient": render(quotient),
            "free_action": certificate.passed,
            "orbits": certificate.orbits,
            "invariant_cells": invariant,
        }

        run.enter("group")
        kernel = render(kernel_group(decomposition))
        if isinstance(quotient, Trivial):
            expr = kernel
        else:
            # extension of the quotient by the kernel, kept opaque
            expr = render(Atom(f"ext[{render(quotient)}]({kernel})"))
        report["group"] = {"expr": expr, "kernel_expr": kernel, "quotient": render(quotient)}
    except PLMorseError as e:
        logger.warning(f"{name}: {run.stage} stage failed: {e}", exc_info=True)
        return run.fail(e)

    logger.info(f"{name}: analysis complete, quotient {report['group']['quotient']}")
    return AnalysisResult(report=report, exit_code=0)


def analyze_path(path, **kwargs) -> AnalysisResult:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        run = _Run(path.name, "")
        return run.fail(ParseError(f"cannot read {path}: {exc}", 1))
    return analyze_text(text, name=path.name, **kwargs)


def analyze_batch(paths, workers=None, **kwargs):
    """Analyze files concurrently; results keyed by file name in input order."""
    paths = [Path(p) for p in paths]
    workers = workers or settings.PLMORSE_BATCH_WORKERS
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda p: analyze_path(p, **kwargs), paths))
    return {path.name: result for path, result in zip(paths, results)}


def dump_report(report, compact=False) -> str:
    if compact:
        return json.dumps(report, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return json.dumps(report, indent=settings.PLMORSE_JSON_INDENT, sort_keys=True, ensure_ascii=False)


def reeb_dot(mesh, values, fractions=None):
    """DOT text of the Reeb graph, edges tagged A/B on a Moebius band, and the graph itself."""
    field = validate_field(mesh, values)
    g = build_reeb(mesh, field)
    types = {}
    if is_moebius_band(mesh):
        fractions = fractions or settings.PLMORSE_EDGE_SAMPLE_FRACTIONS
        types = {edge_id: kind.value for edge_id, kind in classify_edges(mesh, field, g, fractions).items()}
    return to_dot(g, types), g
