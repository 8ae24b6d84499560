"""Convex piecewise-linear functions ``q(x) = max_i (<a_i, x> + b_i)``.

A toric test configuration is encoded by such a function on the moment
polytope; affine functions are the product configurations.
"""
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from mukstab.errors import NotConvexError, ValidationError
from mukstab.toric.linalg import Vector, dot, to_fraction, to_vector


@dataclass(frozen=True, order=True)
class AffinePiece:
    gradient: Vector
    constant: Fraction

    def __call__(self, point: Sequence):
        return dot(self.gradient, point) + self.constant

    @property
    def dim(self) -> int:
        return len(self.gradient)

    @cached_property
    def gradient_array(self) -> np.ndarray:
        return np.array([float(a) for a in self.gradient], dtype=float)

    def pullback(self, origin: Sequence, basis: Sequence[Sequence]) -> 'AffinePiece':
        """Compose with the affine map ``y -> origin + sum_j y_j * basis[j]``."""
        return AffinePiece(
            gradient=tuple(dot(self.gradient, column) for column in basis),
            constant=dot(self.gradient, origin) + self.constant,
        )

    def __add__(self, other: 'AffinePiece') -> 'AffinePiece':
        return AffinePiece(
            gradient=tuple(a + b for a, b in zip(self.gradient, other.gradient)),
            constant=self.constant + other.constant,
        )


@dataclass(frozen=True)
class PLFunction:
    pieces: tuple[AffinePiece, ...]

    @classmethod
    def from_pieces(cls, pieces: Iterable) -> 'PLFunction':
        normalized = set()
        for piece in pieces:
            if not isinstance(piece, AffinePiece):
                gradient, constant = piece
                piece = AffinePiece(to_vector(gradient), to_fraction(constant))
            normalized.add(piece)
        if not normalized:
            raise ValidationError('a PL function needs at least one affine piece')
        if len({p.dim for p in normalized}) != 1:
            raise ValidationError('affine pieces have gradients of mixed dimensions')
        return cls(pieces=tuple(sorted(normalized)))

    @classmethod
    def affine(cls, gradient: Sequence, constant=0) -> 'PLFunction':
        return cls.from_pieces([(gradient, constant)])

    @classmethod
    def constant(cls, value, dim: int) -> 'PLFunction':
        return cls.affine([0] * dim, value)

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    @property
    def is_affine(self) -> bool:
        return len(self.pieces) == 1

    def __call__(self, point: Sequence):
        return max(piece(point) for piece in self.pieces)

    def active_piece(self, point: Sequence) -> AffinePiece:
        """The first piece attaining the maximum at ``point``."""
        values = [piece(point) for piece in self.pieces]
        return self.pieces[values.index(max(values))]

    def __add__(self, other: 'PLFunction') -> 'PLFunction':
        # max_i f_i + max_j g_j = max_{i,j} (f_i + g_j)
        return PLFunction.from_pieces(
            f + g for f in self.pieces for g in other.pieces
        )

    def shift(self, value) -> 'PLFunction':
        value = to_fraction(value)
        return PLFunction.from_pieces(
            AffinePiece(p.gradient, p.constant + value) for p in self.pieces
        )

    def scale(self, factor) -> 'PLFunction':
        factor = to_fraction(factor)
        if factor < 0:
            raise NotConvexError('a negative multiple of a convex function is concave')
        return PLFunction.from_pieces(
            AffinePiece(tuple(factor * a for a in p.gradient), factor * p.constant)
            for p in self.pieces
        )

    def __str__(self) -> str:
        def term(piece: AffinePiece) -> str:
            parts = [f'{a}*x{i + 1}' for i, a in enumerate(piece.gradient) if a]
            parts.append(str(piece.constant))
            return ' + '.join(parts)

        return 'max(' + ', '.join(term(p) for p in self.pieces) + ')'


def product_configuration(zeta: Sequence, hbar) -> PLFunction:
    """The toric function ``q(x) = -<x, hbar * zeta>`` of the product configuration.

    The sign follows the reversed moment map: the Hamiltonian of ``hbar * zeta``
    reads ``-<x, hbar * zeta>`` in Duistermaat–Heckman coordinates.
    """
    hbar = to_fraction(hbar)
    return PLFunction.affine([-hbar * to_fraction(z) for z in zeta], 0)
