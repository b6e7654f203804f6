"""
Symbolic group expressions for stabilizer structure formulas.

Expressions are small immutable trees. ``simplify`` brings them to a
canonical form (products flattened, trivial factors dropped, Z factors
collected into one power, factors sorted) and two expressions are treated
as isomorphic exactly when their canonical forms are equal. Wreath
products are opaque constructors; only their inner expression is
simplified.

Rendering is plain text: ``trivial``, ``Z``, ``Z^2``, ``Z_4``, ``a × b``,
``a wr[2,3] Z^2`` and ``a wr[k] Z``. ``parse`` reads that text back.
"""

import logging
import re
from dataclasses import dataclass
from typing import Union

from surfaces.exceptions import (
    BadPieceKind,
    ExpressionSyntaxError,
    GroupExprError,
    NotAnnulusAtom,
)
from surfaces.mesh import PieceKind, PieceTag

logger = logging.getLogger(__name__)

PRODUCT_SEPARATOR = " × "


@dataclass(frozen=True)
class Trivial:
    pass


@dataclass(frozen=True)
class Z:
    rank: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise GroupExprError(f"Z rank must be positive, got {self.rank}")


@dataclass(frozen=True)
class Zn:
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise GroupExprError(f"cyclic order must be at least 2, got {self.m}")


@dataclass(frozen=True)
class Atom:
    label: str


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))


def _check_parameter(value):
    if isinstance(value, bool):
        raise GroupExprError(f"invalid wreath parameter {value!r}")
    if isinstance(value, int):
        if value < 1:
            raise GroupExprError(f"wreath parameter must be positive, got {value}")
        return
    if not isinstance(value, str) or not re.fullmatch(r"[A-Za-z]\w*", value):
        raise GroupExprError(f"invalid wreath parameter {value!r}")


@dataclass(frozen=True)
class Wreath2:
    inner: object
    a: Union[int, str] = "a"
    b: Union[int, str] = "b"

    def __post_init__(self):
        _check_parameter(self.a)
        _check_parameter(self.b)


@dataclass(frozen=True)
class Wreath1:
    inner: object
    k: Union[int, str] = "k"

    def __post_init__(self):
        _check_parameter(self.k)


GroupExpr = Union[Trivial, Z, Zn, Atom, Product, Wreath2, Wreath1]


# ----------------------------------------------------------------------
# canonical form
# ----------------------------------------------------------------------


def _natural(label):
    return tuple(int(part) if part.isdigit() else part for part in re.split(r"(\d+)", label))


def _sort_key(expr):
    if isinstance(expr, Z):
        return (0, 0, (), "")
    if isinstance(expr, Zn):
        return (1, expr.m, (), "")
    if isinstance(expr, Atom):
        return (2, 0, _natural(expr.label), expr.label)
    return (3, 0, (), render(expr))


def simplify(expr):
    if isinstance(expr, Product):
        rank = 0
        factors = []
        pending = [simplify(f) for f in expr.factors]
        while pending:
            factor = pending.pop(0)
            if isinstance(factor, Product):
                pending[:0] = list(factor.factors)
            elif isinstance(factor, Z):
                rank += factor.rank
            elif not isinstance(factor, Trivial):
                factors.append(factor)
        if rank:
            factors.append(Z(rank))
        factors.sort(key=_sort_key)
        if not factors:
            return Trivial()
        if len(factors) == 1:
            return factors[0]
        return Product(tuple(factors))
    if isinstance(expr, Wreath2):
        return Wreath2(simplify(expr.inner), expr.a, expr.b)
    if isinstance(expr, Wreath1):
        return Wreath1(simplify(expr.inner), expr.k)
    return expr


def is_isomorphic(left, right):
    return simplify(left) == simplify(right)


# ----------------------------------------------------------------------
# text
# ----------------------------------------------------------------------


def _operand(expr):
    text = render(expr)
    if isinstance(expr, (Product, Wreath1, Wreath2)):
        return f"({text})"
    return text


def render(expr) -> str:
    if isinstance(expr, Trivial):
        return "trivial"
    if isinstance(expr, Z):
        return "Z" if expr.rank == 1 else f"Z^{expr.rank}"
    if isinstance(expr, Zn):
        return f"Z_{expr.m}"
    if isinstance(expr, Atom):
        return expr.label
    if isinstance(expr, Product):
        return PRODUCT_SEPARATOR.join(_operand(f) for f in expr.factors)
    if isinstance(expr, Wreath2):
        return f"{_operand(expr.inner)} wr[{expr.a},{expr.b}] Z^2"
    if isinstance(expr, Wreath1):
        return f"{_operand(expr.inner)} wr[{expr.k}] Z"
    raise GroupExprError(f"not a group expression: {expr!r}")


def _depth_zero_positions(text, token):
    depth = 0
    found = []
    for i, char in enumerate(text):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
            if depth < 0:
                raise ExpressionSyntaxError(f"unbalanced ')' at offset {i} in {text!r}")
        elif depth == 0 and text.startswith(token, i):
            found.append(i)
    if depth != 0:
        raise ExpressionSyntaxError(f"unbalanced '(' in {text!r}")
    return found


def _wraps(text):
    """True when the whole text is one parenthesized group."""
    if not (text.startswith("(") and text.endswith(")")):
        return False
    depth = 0
    for i, char in enumerate(text):
        depth += char == "("
        depth -= char == ")"
        if depth == 0 and i < len(text) - 1:
            return False
    return True


def _parameter(token, text):
    token = token.strip()
    if token.isdigit():
        return int(token)
    if re.fullmatch(r"[A-Za-z]\w*", token):
        return token
    raise ExpressionSyntaxError(f"bad wreath parameter {token!r} in {text!r}")


def parse(text: str):
    """Read a rendered expression back into a tree."""
    text = text.strip()
    if not text:
        raise ExpressionSyntaxError("empty expression")
    if _wraps(text):
        return parse(text[1:-1])

    splits = _depth_zero_positions(text, PRODUCT_SEPARATOR)
    if splits:
        parts = []
        start = 0
        for position in splits:
            parts.append(text[start:position])
            start = position + len(PRODUCT_SEPARATOR)
        parts.append(text[start:])
        return Product(tuple(parse(part) for part in parts))

    wreaths = _depth_zero_positions(text, " wr[")
    if wreaths:
        position = wreaths[-1]
        inner = parse(text[:position])
        rest = text[position + len(" wr[") :]
        close = rest.find("]")
        if close < 0:
            raise ExpressionSyntaxError(f"missing ']' in {text!r}")
        params = [_parameter(p, text) for p in rest[:close].split(",")]
        tail = rest[close + 1 :].strip()
        if len(params) == 2 and tail == "Z^2":
            return Wreath2(inner, params[0], params[1])
        if len(params) == 1 and tail == "Z":
            return Wreath1(inner, params[0])
        raise ExpressionSyntaxError(f"malformed wreath product in {text!r}")

    if text == "trivial":
        return Trivial()
    if text == "Z":
        return Z()
    power = re.fullmatch(r"Z\^(\d+)", text)
    if power:
        return Z(int(power.group(1)))
    cyclic = re.fullmatch(r"Z_(\d+)", text)
    if cyclic:
        return Zn(int(cyclic.group(1)))
    return Atom(text)


# ----------------------------------------------------------------------
# structure formulas
# ----------------------------------------------------------------------


def piece_atom(index):
    return Atom(f"ST(Y_{index})")


def kernel_factors(n, leaves=None):
    """``[Z, leaf(Y_0), ..., leaf(Y_n)]`` before canonicalization."""
    leaves = leaves or {}
    return [Z()] + [leaves.get(i, piece_atom(i)) for i in range(n + 1)]


def kernel_group(decomposition, leaves=None):
    """
    Group of symmetries that keep every disk with its orientation:
    one Z for the twist along the annulus, times the leaf group of every
    piece. ``decomposition`` may be a Decomposition or the disk count.
    """
    n = decomposition if isinstance(decomposition, int) else decomposition.n
    return simplify(Product(tuple(kernel_factors(n, leaves))))


ANNULUS_ATOM = re.compile(r"π0 S\((.*)\)")


def annulus_split(atom, isotopy_part=None):
    """Split off the Dehn twist of an annulus stabilizer: ``π0 S(x)`` -> ``Z × π0 S_id(x)``."""
    if not isinstance(atom, Atom):
        raise NotAnnulusAtom(f"{render(atom)!r} is not an annulus stabilizer atom")
    match = ANNULUS_ATOM.fullmatch(atom.label)
    if match is None:
        raise NotAnnulusAtom(f"{atom.label!r} is not an annulus stabilizer atom")
    rest = isotopy_part if isotopy_part is not None else Atom(f"π0 S_id({match.group(1)})")
    return simplify(Product((Z(), rest)))


ALLOWED_REDUCTION_PIECES = (PieceTag.DISK, PieceTag.ANNULUS, PieceTag.MOEBIUS)


def reduce_negative_chi(pieces):
    """
    Product over the pieces of a surface with negative Euler characteristic.

    ``pieces`` holds (kind, expression) pairs; kinds may be PieceKind,
    PieceTag or their string tags.
    """
    exprs = []
    for kind, expr in pieces:
        tag = kind.tag if isinstance(kind, PieceKind) else PieceTag(kind)
        if tag not in ALLOWED_REDUCTION_PIECES:
            raise BadPieceKind(f"piece of kind {tag.value} cannot appear in the reduction")
        exprs.append(expr)
    return simplify(Product(tuple(exprs)))


def torus_rule(tree_case, inner, a=None, b=None, k=None):
    """
    Wreath forms on the torus: ``(∏ inner) wr[a,b] Z^2`` when the graph is a
    tree, ``inner wr[k] Z`` when it has a cycle. Missing parameters stay symbolic.
    """
    if tree_case:
        factors = tuple(inner) if isinstance(inner, (list, tuple)) else (inner,)
        return simplify(Wreath2(Product(factors), a if a is not None else "a", b if b is not None else "b"))
    if isinstance(inner, (list, tuple)):
        if len(inner) != 1:
            raise GroupExprError("the cycle case takes exactly one inner expression")
        inner = inner[0]
    return simplify(Wreath1(inner, k if k is not None else "k"))
