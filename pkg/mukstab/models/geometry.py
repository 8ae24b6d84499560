from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from mukstab.errors import ValidationError
from mukstab.models.utils import format_rational, format_vector, parse_rational
from mukstab.toric.plfunction import AffinePiece, PLFunction
from mukstab.toric.polytope import Polytope, from_halfspaces, from_vertices


def _parse_vector(values) -> list[Fraction]:
    if not isinstance(values, list | tuple):
        raise ValueError('expected a list of rationals')
    return [parse_rational(v) for v in values]


def _parse_points(points) -> list[list[Fraction]]:
    if not isinstance(points, list | tuple):
        raise ValueError('expected a list of points')
    return [_parse_vector(p) for p in points]


def _parse_optional_points(points) -> list[list[Fraction]] | None:
    return None if points is None else _parse_points(points)


class RationalModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)


class HalfspaceModel(RationalModel):
    normal: list[Fraction]
    offset: Fraction

    parse_normal = field_validator('normal', mode='before')(_parse_vector)
    parse_offset = field_validator('offset', mode='before')(parse_rational)

    @field_serializer('normal')
    def dump_normal(self, normal):
        return format_vector(normal)

    @field_serializer('offset')
    def dump_offset(self, offset):
        return format_rational(offset)


class PolytopeModel(RationalModel):
    """``{"dim", "halfspaces", "vertices"}``; either representation may be omitted."""

    dim: int
    halfspaces: list[HalfspaceModel] | None = None
    vertices: list[list[Fraction]] | None = None

    parse_vertices = field_validator('vertices', mode='before')(
        _parse_optional_points
    )

    @field_serializer('vertices')
    def dump_vertices(self, vertices):
        if vertices is None:
            return None
        return [format_vector(v) for v in vertices]

    def to_polytope(self) -> Polytope:
        if self.dim < 1:
            raise ValidationError(f'dim must be positive, got {self.dim}')
        if self.halfspaces is None and self.vertices is None:
            raise ValidationError('polytope needs halfspaces or vertices')
        hull = from_vertices(self.vertices) if self.vertices is not None else None
        if self.halfspaces is None:
            polytope = hull
        else:
            polytope = from_halfspaces((h.normal, h.offset) for h in self.halfspaces)
            if hull is not None and (
                hull.halfspaces != polytope.halfspaces
                or hull.vertices != polytope.vertices
            ):
                raise ValidationError('vertices do not match the halfspaces')
        if polytope.dim != self.dim:
            raise ValidationError(
                f'dim is {self.dim} but the data live in dimension {polytope.dim}'
            )
        return polytope

    @classmethod
    def from_polytope(cls, polytope: Polytope) -> 'PolytopeModel':
        return cls(
            dim=polytope.dim,
            halfspaces=[
                HalfspaceModel(normal=list(h.normal), offset=h.offset)
                for h in polytope.halfspaces
            ],
            vertices=[list(v) for v in polytope.vertices],
        )


class AffinePieceModel(RationalModel):
    gradient: list[Fraction]
    constant: Fraction = Fraction(0)

    parse_gradient = field_validator('gradient', mode='before')(_parse_vector)
    parse_constant = field_validator('constant', mode='before')(parse_rational)

    @field_serializer('gradient')
    def dump_gradient(self, gradient):
        return format_vector(gradient)

    @field_serializer('constant')
    def dump_constant(self, constant):
        return format_rational(constant)


class PLFunctionModel(RationalModel):
    pieces: list[AffinePieceModel]

    def to_pl(self) -> PLFunction:
        return PLFunction.from_pieces(
            AffinePiece(tuple(p.gradient), p.constant) for p in self.pieces
        )

    @classmethod
    def from_pl(cls, q: PLFunction) -> 'PLFunctionModel':
        return cls(
            pieces=[
                AffinePieceModel(gradient=list(p.gradient), constant=p.constant)
                for p in q.pieces
            ]
        )


class SamplerSpec(BaseModel):
    count: int = Field(default=100, ge=1)
    max_pieces: int = Field(default=3, ge=1)
    coeff_bound: float = Field(default=2.0, gt=0)
    seed: int = 0
