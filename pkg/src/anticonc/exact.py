"""Helpers for exact rational values and their wire format.

Rationals travel as "num/den" strings in every JSON interface of the
package; `fractions.Fraction` (always in lowest terms, positive
denominator) is the in-memory representation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(
            "refusing to coerce float to exact rational; pass a string or Fraction"
        )
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_vector(items: Sequence) -> tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in items)


def vector_str(vec: Iterable[Fraction]) -> list[str]:
    return [fraction_str(x) for x in vec]
