"""Exact rational values and fraction-free integer linear algebra.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  Matrices are small dense integer matrices; every routine works
over Python integers, so nothing can overflow and no floating point is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from tropcount.errors import InvalidInput

Rational = Fraction

MAX_DIM = 64


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a reduced :class:`Fraction`."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidInput(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        if sep:
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational: {text!r}") from exc
    return value


def format_rational(x: Fraction | int) -> str:
    """Render as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class IntMatrix:
    """Dense rectangular integer matrix (rows of Python ints)."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise InvalidInput("matrix rows have different lengths")
        if len(rows) > MAX_DIM or (rows and len(rows[0]) > MAX_DIM):
            raise InvalidInput(f"matrix dimensions exceed {MAX_DIM}")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def permuted(self, row_order: Sequence[int], col_order: Sequence[int]) -> "IntMatrix":
        return IntMatrix(tuple(tuple(self.entries[i][j] for j in col_order) for i in row_order))


def _as_rows(m: IntMatrix | Sequence[Sequence[int]]) -> list[list[int]]:
    if isinstance(m, IntMatrix):
        return m.tolist()
    return IntMatrix.of(m).tolist()


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            f = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - f * row_k[j]) // prev
        prev = pivot
    return sign * a[n - 1][n - 1] if n else 1


def determinant(m: IntMatrix | Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    a = _as_rows(m)
    if a and len(a) != len(a[0]):
        raise InvalidInput(f"determinant of non-square {len(a)}x{len(a[0])} matrix")
    return _bareiss_det(a)


def det_solve(m: IntMatrix | Sequence[Sequence[int]],
              rhs: Sequence[Fraction | int]) -> tuple[int, list[Fraction] | None]:
    """Return ``(det(m), x)`` with ``m @ x == rhs``, or ``(0, None)`` if singular.

    Fraction-free Gauss-Jordan on the augmented matrix: after the sweep every
    diagonal entry equals the last pivot (= +-det) and the extra column holds
    pivot * x.  All intermediate divisions are exact.
    """
    a = _as_rows(m)
    n = len(a)
    if any(len(row) != n for row in a):
        raise InvalidInput("solve needs a square matrix")
    if len(rhs) != n:
        raise InvalidInput(f"right-hand side has length {len(rhs)}, expected {n}")
    b = [Fraction(v) for v in rhs]
    scale = lcm(*(v.denominator for v in b)) if b else 1
    for row, v in zip(a, b):
        row.append(v.numerator * (scale // v.denominator))
    sign = 1
    prev = 1
    for k in range(n):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0, None
        pivot = a[k][k]
        row_k = a[k]
        for i in range(n):
            if i == k:
                continue
            row_i = a[i]
            f = row_i[k]
            for j in range(n + 1):
                if j != k:
                    row_i[j] = (pivot * row_i[j] - f * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    if n == 0:
        return 1, []
    last = a[n - 1][n - 1]
    den = last * scale
    return sign * last, [Fraction(a[i][n], den) for i in range(n)]


def solve(m: IntMatrix | Sequence[Sequence[int]],
          rhs: Sequence[Fraction | int]) -> list[Fraction] | None:
    """Unique exact solution of ``m x = rhs``; ``None`` when ``m`` is singular."""
    return det_solve(m, rhs)[1]


def matvec(m: IntMatrix | Sequence[Sequence[int]], x: Sequence[Fraction | int]) -> list[Fraction]:
    rows = m.entries if isinstance(m, IntMatrix) else m
    return [sum((Fraction(c) * v for c, v in zip(row, x)), Fraction(0)) for row in rows]
