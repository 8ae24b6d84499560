"""Named moment polytopes of small smooth toric varieties.

=============  ==========================================  =========================
name           polytope                                    variety, polarization
=============  ==========================================  =========================
interval       [0, 1]                                      P^1, O(1)
sym_interval   [-1, 1]                                     P^1, O(2) = -K
square         [0, 1]^2                                    P^1 x P^1, O(1, 1)
simplex2       conv{0, e_1, e_2}                           P^2, O(1)
blp2           x >= -1, y >= -1, -1 <= x + y <= 1          Bl_p P^2, -K
cube           [-1, 1]^3                                   (P^1)^3, -K
=============  ==========================================  =========================
"""
from functools import cache

from mukstab.errors import ValidationError
from mukstab.toric.polytope import Polytope, from_halfspaces, from_vertices

FIXTURE_NAMES = ('interval', 'sym_interval', 'square', 'simplex2', 'blp2', 'cube')


def _box(low: int, high: int, dim: int) -> Polytope:
    halfspaces = []
    for j in range(dim):
        unit = [0] * dim
        unit[j] = 1
        halfspaces.append((unit, -low))
        halfspaces.append(([-u for u in unit], high))
    return from_halfspaces(halfspaces)


_BUILDERS = {
    'interval': lambda: _box(0, 1, 1),
    'sym_interval': lambda: _box(-1, 1, 1),
    'square': lambda: _box(0, 1, 2),
    'simplex2': lambda: from_vertices([(0, 0), (1, 0), (0, 1)]),
    'blp2': lambda: from_halfspaces(
        [((1, 0), 1), ((0, 1), 1), ((-1, -1), 1), ((1, 1), 1)]
    ),
    'cube': lambda: _box(-1, 1, 3),
}


@cache
def fixture(name: str) -> Polytope:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValidationError(
            f'unknown fixture {name!r}, expected one of {", ".join(FIXTURE_NAMES)}'
        ) from None
    return builder()


def fixtures() -> dict[str, Polytope]:
    return {name: fixture(name) for name in FIXTURE_NAMES}
