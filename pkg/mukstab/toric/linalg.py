"""Exact rational helpers shared by the polytope code.

Rows are sequences of ``Fraction`` (ints are accepted and promoted). Matrix
work goes through ``flint.fmpq_mat`` and comes back as ``Fraction``.
"""
import numbers
from collections.abc import Sequence
from fractions import Fraction
from math import gcd, lcm

from flint import fmpq, fmpq_mat

Vector = tuple[Fraction, ...]


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Real) and not isinstance(value, numbers.Rational):
        # floats (numpy ones included) are taken at face value, not as their
        # binary expansion
        return Fraction(repr(float(value)))
    return Fraction(value)


def to_vector(values) -> Vector:
    return tuple(to_fraction(v) for v in values)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def sub(a: Sequence, b: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def to_fmpq_mat(rows: Sequence[Sequence]) -> fmpq_mat:
    entries = [to_fraction(v) for row in rows for v in row]
    n_cols = len(rows[0]) if rows else 0
    return fmpq_mat(
        len(rows), n_cols, [fmpq(v.numerator, v.denominator) for v in entries]
    )


def from_fmpq(value: fmpq) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def rank(rows: Sequence[Sequence]) -> int:
    if not rows or not rows[0]:
        return 0
    _, result = to_fmpq_mat(rows).rref()
    return int(result)


def det(rows: Sequence[Sequence]) -> Fraction:
    if not rows:
        return Fraction(1)
    return from_fmpq(to_fmpq_mat(rows).det())


def affine_rank(points: Sequence[Sequence]) -> int:
    if not points:
        return -1
    base = points[0]
    return rank([sub(p, base) for p in points[1:]])


def inverse_columns(matrix: Sequence[Sequence]) -> list[Vector] | None:
    """Columns of the inverse of a square matrix; ``None`` when it is singular."""
    try:
        inverse = to_fmpq_mat(matrix).inv()
    except ZeroDivisionError:
        return None
    rows = inverse.tolist()
    return [tuple(from_fmpq(x) for x in column) for column in zip(*rows)]


def primitive(vector: Sequence) -> tuple[tuple[int, ...], Fraction]:
    """Scale a non-zero rational vector to a primitive integer vector.

    Returns ``(primitive, factor)`` with ``primitive == factor * vector`` and
    ``factor > 0``.
    """
    entries = to_vector(vector)
    denominator = lcm(*(v.denominator for v in entries))
    integers = [int(v * denominator) for v in entries]
    divisor = gcd(*integers)
    if divisor == 0:
        raise ZeroDivisionError('zero vector has no primitive multiple')
    return tuple(v // divisor for v in integers), Fraction(denominator, divisor)
