"""Exact linear solves over the integers and the rationals."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix


def integer_solve(columns: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> tuple[int, ...] | None:
    """Some integer ``x`` with ``sum x_j * columns[j] == rhs``, or ``None``.

    Entries may be rational; the system is scaled to integers first and then
    solved through the Smith normal form ``D = S M T``.
    """
    if not columns:
        return () if all(v == 0 for v in rhs) else None
    n = len(rhs)
    den = lcm(*(Fraction(v).denominator for col in columns for v in col), *(Fraction(v).denominator for v in rhs))
    m = Matrix(n, len(columns), lambda i, j: int(Fraction(columns[j][i]) * den))
    b = Matrix(n, 1, [int(Fraction(v) * den) for v in rhs])
    d, s, t = smith_normal_decomp(m, domain=ZZ)
    sb = s * b
    y = [0] * len(columns)
    for i in range(n):
        diag = d[i, i] if i < len(columns) else 0
        if diag == 0:
            if sb[i] != 0:
                return None
            continue
        if sb[i] % diag:
            return None
        y[i] = sb[i] // diag
    x = t * Matrix(y)
    return tuple(int(v) for v in x)


def _qq(rows: Sequence[Sequence[object]], ncols: int) -> DomainMatrix:
    entries = [[QQ(Fraction(v).numerator, Fraction(v).denominator) for v in row] for row in rows]
    return DomainMatrix(entries, (len(entries), ncols), QQ)


def _fraction(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def rational_solve(columns: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
    """The unique rational solution of a full-column-rank system, or ``None``."""
    n = len(columns)
    augmented = [[columns[j][i] for j in range(n)] + [rhs[i]] for i in range(len(rhs))]
    reduced, pivots = _qq(augmented, n + 1).rref()
    if n in pivots:
        if len(pivots) - 1 < n:
            raise ValueError("columns are linearly dependent")
        return None
    if len(pivots) < n:
        raise ValueError("columns are linearly dependent")
    rows = reduced.to_list()
    return tuple(_fraction(rows[i][n]) for i in range(n))


def determinant(rows: Sequence[Sequence[object]]) -> Fraction:
    if not rows:
        return Fraction(1)
    return _fraction(_qq(rows, len(rows[0])).det())
