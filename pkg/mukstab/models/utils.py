import math
from fractions import Fraction

from mukstab.errors import ParseError


def parse_rational(value) -> Fraction:
    """Read ``"p/q"`` strings, integers and decimal literals as exact rationals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f'expected a rational, got {value!r}')
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ParseError(f'rational must be finite, got {value!r}')
        return Fraction(repr(float(value)))
    try:
        return Fraction(value.strip() if isinstance(value, str) else value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f'cannot read {value!r} as a rational') from exc


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def format_vector(values) -> list[str]:
    return [format_rational(v) for v in values]


def finite_or_none(value: float) -> float | None:
    # JSON has no inf/nan; reports carry null instead
    value = float(value)
    return value if math.isfinite(value) else None


def sanitize(value):
    """Replace non-finite floats by ``None`` throughout a JSON-like structure."""
    if isinstance(value, dict):
        return {key: sanitize(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [sanitize(item) for item in value]
    if isinstance(value, float):
        return finite_or_none(value)
    return value


def flatten(value, prefix: str = '') -> list[tuple[str, object]]:
    """``[(dotted.key, leaf), ...]`` for the table rendering of a report."""
    if isinstance(value, dict):
        rows = []
        for key, item in value.items():
            rows.extend(flatten(item, f'{prefix}.{key}' if prefix else str(key)))
        return rows
    if isinstance(value, list) and any(isinstance(v, dict | list) for v in value):
        rows = []
        for index, item in enumerate(value):
            rows.extend(flatten(item, f'{prefix}[{index}]'))
        return rows
    return [(prefix, value)]
