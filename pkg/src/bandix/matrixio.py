"""Plain-text band matrix format consumed by the CLI.

Layout::

    penta N            (or: tri N)
    <sub2 values>      (penta only, N-2 values)
    <sub1 values>      (N-1 values)
    <main values>      (N values)
    <sup1 values>      (N-1 values)
    <sup2 values>      (penta only, N-2 values)
    rhs <N values>     (optional; values may continue on following lines)

Values are decimal literals or exact rationals ``p/q``.  A matrix whose
values are all integers or rationals is loaded exactly (Fractions);
any decimal-point or exponent literal switches the whole matrix to
64-bit floats.
"""

from __future__ import annotations

from fractions import Fraction

from .core import PentaMatrix, TriMatrix, to_float
from .errors import InvalidInput


def _parse_value(token: str):
    try:
        if "/" in token:
            num, den = token.split("/", 1)
            return Fraction(int(num), int(den)), True
        if token.lstrip("+-").isdigit():
            return Fraction(int(token)), True
        return float(token), False
    except (ValueError, ZeroDivisionError) as err:
        raise InvalidInput(f"cannot parse value {token!r}") from err


def parse_matrix_text(text: str):
    """Parse the text format; returns (matrix, rhs_or_None)."""
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.extend(line.split())
    if len(tokens) < 2:
        raise InvalidInput("matrix text needs a 'penta N' or 'tri N' header")
    kind = tokens[0].lower()
    if kind not in ("penta", "tri"):
        raise InvalidInput(f"unknown matrix kind {tokens[0]!r}")
    try:
        n = int(tokens[1])
    except ValueError as err:
        raise InvalidInput(f"bad dimension {tokens[1]!r}") from err
    lengths = [n - 2, n - 1, n, n - 1, n - 2] if kind == "penta" else [n - 1, n, n - 1]
    pos = 2
    values = []
    all_exact = True
    for length in lengths:
        if length < 1:
            raise InvalidInput(f"dimension {n} too small for a {kind} matrix")
        if pos + length > len(tokens):
            raise InvalidInput("matrix text ended before all diagonals were read")
        diag = []
        for tok in tokens[pos:pos + length]:
            value, exact = _parse_value(tok)
            all_exact = all_exact and exact
            diag.append(value)
        values.append(diag)
        pos += length
    rhs = None
    if pos < len(tokens):
        if tokens[pos].lower() != "rhs":
            raise InvalidInput(f"unexpected token {tokens[pos]!r} after diagonals")
        pos += 1
        if pos + n > len(tokens):
            raise InvalidInput("rhs needs exactly N values")
        rhs = []
        for tok in tokens[pos:pos + n]:
            value, exact = _parse_value(tok)
            all_exact = all_exact and exact
            rhs.append(value)
        pos += n
        if pos != len(tokens):
            raise InvalidInput("trailing tokens after rhs values")
    if not all_exact:
        values = [[to_float(v) for v in diag] for diag in values]
        if rhs is not None:
            rhs = [to_float(v) for v in rhs]
    if kind == "penta":
        matrix = PentaMatrix.from_diagonals(*values, exact=all_exact)
    else:
        matrix = TriMatrix.from_diagonals(*values, exact=all_exact)
    if rhs is not None:
        rhs = tuple(rhs) if all_exact else [float(v) for v in rhs]
    return matrix, rhs


def format_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def serialize_matrix(matrix, rhs=None) -> str:
    kind = "penta" if isinstance(matrix, PentaMatrix) else "tri"
    lines = [f"{kind} {matrix.n}"]
    for diag in matrix.diagonals():
        lines.append(" ".join(format_value(v) for v in diag))
    if rhs is not None:
        lines.append("rhs " + " ".join(format_value(v) for v in rhs))
    return "\n".join(lines) + "\n"
