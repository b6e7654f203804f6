"""
Reader and writer for the ``plmorse 1`` mesh text format.

    plmorse 1
    V F
    f_value [x y z]      (V lines)
    i j k                (F lines, 0-based vertex indices)

Blank lines and lines starting with ``#`` are ignored. Field values are
written with ``repr`` so a written file reads back to identical floats.
"""

import logging
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import ParseError
from .mesh import SurfaceMesh, build_surface

logger = logging.getLogger(__name__)

HEADER = "plmorse 1"


class MeshInput(NamedTuple):
    mesh: SurfaceMesh
    values: np.ndarray
    coords: Optional[tuple] = None


def _content_lines(text):
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, raw


def _tokens(raw):
    """Tokens of a line with their 1-based columns."""
    tokens = []
    column = 0
    for token in raw.split():
        column = raw.index(token, column)
        tokens.append((token, column + 1))
        column += len(token)
    return tokens


def _number(token, column, line, kind):
    try:
        return kind(token)
    except ValueError:
        raise ParseError(f"expected {kind.__name__}, found {token!r}", line, column) from None


def parse_mesh(text: str) -> MeshInput:
    """
    Parse ``plmorse 1`` text into a mesh and its per-vertex values.

    Raises:
        ParseError: malformed text, with the line and column of the problem.
        SurfaceError subclasses: the triangles do not form a surface.
    """
    lines = iter(_content_lines(text))

    def next_line(what):
        try:
            return next(lines)
        except StopIteration:
            last = len(text.splitlines()) + 1
            raise ParseError(f"unexpected end of input, expected {what}", last) from None

    number, raw = next_line("header")
    if raw.strip() != HEADER:
        raise ParseError(f"expected header {HEADER!r}", number)

    number, raw = next_line("counts line")
    counts = _tokens(raw)
    if len(counts) != 2:
        raise ParseError("counts line must be 'V F'", number)
    n_vertices = _number(*counts[0], number, int)
    n_faces = _number(*counts[1], number, int)
    if n_vertices < 0 or n_faces < 0:
        raise ParseError("counts must be non-negative", number)

    values = []
    coords = []
    for _ in range(n_vertices):
        number, raw = next_line("vertex line")
        tokens = _tokens(raw)
        if len(tokens) not in (1, 4):
            raise ParseError("vertex line must be 'f' or 'f x y z'", number)
        parsed = [_number(token, column, number, float) for token, column in tokens]
        values.append(parsed[0])
        if len(parsed) == 4:
            coords.append(tuple(parsed[1:]))

    faces = []
    for _ in range(n_faces):
        number, raw = next_line("face line")
        tokens = _tokens(raw)
        if len(tokens) != 3:
            raise ParseError("face line must be 'i j k'", number)
        face = []
        for token, column in tokens:
            index = _number(token, column, number, int)
            if not 0 <= index < n_vertices:
                raise ParseError(f"vertex index {index} out of range", number, column)
            face.append(index)
        faces.append(tuple(face))

    leftover = next(lines, None)
    if leftover is not None:
        raise ParseError("unexpected content after the last face", leftover[0])

    if coords and len(coords) != n_vertices:
        raise ParseError("either every vertex line has coordinates or none does", 3)

    mesh = build_surface(faces, n_vertices=n_vertices, coords=coords or None)
    logger.debug(f"parsed mesh: V={n_vertices} F={n_faces}")
    return MeshInput(mesh=mesh, values=np.asarray(values, dtype=float), coords=mesh.coords)


def read_mesh_file(path) -> MeshInput:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}", 1) from exc
    return parse_mesh(text)


def write_mesh(mesh: SurfaceMesh, values) -> str:
    lines = [HEADER, f"{mesh.n_vertices} {mesh.n_faces}"]
    for v in range(mesh.n_vertices):
        row = [repr(float(values[v]))]
        if mesh.coords is not None:
            row.extend(repr(float(x)) for x in mesh.coords[v])
        lines.append(" ".join(row))
    lines.extend(f"{a} {b} {c}" for a, b, c in mesh.faces)
    return "\n".join(lines) + "\n"


def write_sidecar(cover) -> str:
    return "\n".join(cover.sidecar_lines()) + "\n"


def parse_sidecar(text: str):
    """Read ``total base xi`` triples back."""
    rows = []
    for number, raw in _content_lines(text):
        tokens = _tokens(raw)
        if len(tokens) != 3:
            raise ParseError("sidecar line must be 'total base xi'", number)
        rows.append(tuple(_number(token, column, number, int) for token, column in tokens))
    return rows
