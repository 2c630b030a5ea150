"""Exact arithmetic in real quadratic fields Q(sqrt(m)).

Used by the verification scenarios whose point coordinates involve sqrt(2)
(regular octagon) or sqrt(3) (unit-rhombus five-point set): squared
distances of such configurations stay inside the field, so comparisons
against 1 are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import as_fraction


@dataclass(frozen=True)
class QuadExt:
    """Field element a + b*sqrt(m) with rational a, b and squarefree m > 1."""

    a: Fraction
    b: Fraction
    m: int

    def __post_init__(self):
        if self.m < 2 or math.isqrt(self.m) ** 2 == self.m:
            raise ValueError(f"m must be a non-square above 1, got {self.m}")

    @classmethod
    def of(cls, a, b=0, m=2) -> "QuadExt":
        return cls(as_fraction(a), as_fraction(b), m)

    def _check(self, other: "QuadExt") -> None:
        if self.m != other.m:
            raise ValueError("mixing different quadratic fields")

    def __add__(self, other):
        other = self._coerce(other)
        return QuadExt(self.a + other.a, self.b + other.b, self.m)

    def __sub__(self, other):
        other = self._coerce(other)
        return QuadExt(self.a - other.a, self.b - other.b, self.m)

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.m)

    def __mul__(self, other):
        other = self._coerce(other)
        return QuadExt(
            self.a * other.a + self.m * self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.m,
        )

    def _coerce(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            self._check(other)
            return other
        return QuadExt(as_fraction(other), Fraction(0), self.m)

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(m)."""
        if self.a == 0 and self.b == 0:
            return 0
        if self.a >= 0 and self.b >= 0:
            return 1
        if self.a <= 0 and self.b <= 0:
            return -1
        # signs differ: compare a^2 with m*b^2, the larger magnitude wins
        lhs = self.a * self.a
        rhs = self.m * self.b * self.b
        if lhs == rhs:
            return 0
        if self.a > 0:
            return 1 if lhs > rhs else -1
        return -1 if lhs > rhs else 1

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.m)
