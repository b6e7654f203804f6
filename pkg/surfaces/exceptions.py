"""
Error hierarchy shared by every stage of the analysis.

Each error knows how it surfaces: an ``error_type`` slug for JSON payloads,
an HTTP ``status_code`` and a process ``exit_code`` for management commands.
Exit code 2 means the input was rejected, exit code 3 means a structural
theorem failed on an input that passed validation.
"""


class PLMorseError(Exception):
    error_type = "plmorse_error"
    status_code = 400
    exit_code = 2

    def __init__(self, message, details=None):
        super().__init__(message)
        self.message = message
        self.details = details if details is not None else message

    def as_dict(self, stage=None):
        payload = {"type": self.error_type, "message": self.message}
        if stage is not None:
            payload["stage"] = stage
        return payload


class ParseError(PLMorseError):
    error_type = "parse_error"

    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.details = {"line": line, "column": column, "reason": message}


class UnknownFixture(PLMorseError):
    error_type = "unknown_fixture"
    status_code = 404


class GeneratorExhausted(PLMorseError):
    error_type = "generator_exhausted"
    status_code = 422


# Surface construction and surgery


class SurfaceError(PLMorseError):
    error_type = "surface_error"


class EmptyInput(SurfaceError):
    error_type = "empty_input"


class NonManifoldEdge(SurfaceError):
    error_type = "non_manifold_edge"


class NonManifoldVertex(SurfaceError):
    error_type = "non_manifold_vertex"


class DegenerateTriangle(SurfaceError):
    error_type = "degenerate_triangle"


class InvalidComponent(SurfaceError):
    error_type = "invalid_component"


class CurveNotSimple(SurfaceError):
    error_type = "curve_not_simple"


class CurveTouchesVertex(SurfaceError):
    error_type = "curve_touches_vertex"


class NotABoundaryCycle(SurfaceError):
    error_type = "not_a_boundary_cycle"


class NotAMoebiusBand(SurfaceError):
    error_type = "not_a_moebius_band"


# Field validation


class FieldError(PLMorseError):
    error_type = "field_error"


class FieldSizeMismatch(FieldError):
    error_type = "field_size_mismatch"


class NonConstantBoundary(FieldError):
    error_type = "non_constant_boundary"


class CriticalOnBoundary(FieldError):
    error_type = "critical_on_boundary"


class EqualAdjacentInteriorValues(FieldError):
    error_type = "equal_adjacent_interior_values"


class PlateauFace(FieldError):
    error_type = "plateau_face"


# Group expressions


class GroupExprError(PLMorseError):
    error_type = "group_expr_error"


class NotAnnulusAtom(GroupExprError):
    error_type = "not_annulus_atom"


class BadPieceKind(GroupExprError):
    error_type = "bad_piece_kind"


class ExpressionSyntaxError(GroupExprError):
    error_type = "expression_syntax_error"


# Structural theorems checked at runtime


class TheoremViolation(PLMorseError):
    error_type = "theorem_violation"
    status_code = 500
    exit_code = 3


class UnexpectedCutPattern(TheoremViolation):
    error_type = "unexpected_cut_pattern"


class LemmaViolated(TheoremViolation):
    error_type = "lemma_violated"


class NotATree(TheoremViolation):
    error_type = "not_a_tree"


class PieceMismatch(TheoremViolation):
    error_type = "piece_mismatch"


class EpsilonCollapse(TheoremViolation):
    error_type = "epsilon_collapse"


class InconsistentCellStructure(TheoremViolation):
    error_type = "inconsistent_cell_structure"
