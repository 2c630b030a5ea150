"""Exact probability measures on the half-integer lattice.

A measure stores an integer ``offset_index`` and a dense weight vector; the
atom behind ``weights[i]`` sits at ``(offset_index + i) / 2``. Storing the
lattice densely (interior zero weights allowed) keeps convolution trivial
even when factors living on integers and on half-integers mix.

Everything in this module is pure and exact: weights are Fractions and no
comparison ever goes through floating point. A separate compensated
floating-point convolution path is provided for long products (hundreds of
factors) where exact arithmetic is possible but wasteful; results carry an
explicit exactness flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .caps import Caps, resolve
from .errors import DomainError
from .exact import as_fraction, fraction_str

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class LatticeMeasure:
    """Finitely supported probability measure on (1/2)Z."""

    offset_index: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        weights = tuple(as_fraction(w) for w in self.weights)
        if not weights:
            raise DomainError("lattice measure needs at least one atom")
        if any(w < 0 for w in weights):
            raise DomainError("negative weight in lattice measure")
        lo = 0
        hi = len(weights)
        while lo < hi and weights[lo] == 0:
            lo += 1
        while hi > lo and weights[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            raise DomainError("lattice measure has zero total mass")
        trimmed = weights[lo:hi]
        if sum(trimmed) != 1:
            raise DomainError("lattice weights must sum to exactly 1")
        object.__setattr__(self, "offset_index", self.offset_index + lo)
        object.__setattr__(self, "weights", trimmed)

    def __len__(self) -> int:
        return len(self.weights)

    def point(self, i: int) -> Fraction:
        return Fraction(self.offset_index + i, 2)

    def support(self) -> list[tuple[Fraction, Fraction]]:
        return [
            (self.point(i), w) for i, w in enumerate(self.weights) if w != 0
        ]

    def mass_at(self, position: Fraction) -> Fraction:
        idx = 2 * as_fraction(position) - self.offset_index
        if idx.denominator != 1:
            return ZERO
        i = int(idx)
        if 0 <= i < len(self.weights):
            return self.weights[i]
        return ZERO

    def moment(self, order: int) -> Fraction:
        return sum(
            (w * self.point(i) ** order for i, w in enumerate(self.weights)),
            ZERO,
        )

    def abs_moment(self, order: int) -> Fraction:
        return sum(
            (w * abs(self.point(i)) ** order for i, w in enumerate(self.weights)),
            ZERO,
        )

    def is_symmetric(self) -> bool:
        """True when the measure is invariant under x -> -x."""
        if 2 * self.offset_index != -(len(self.weights) - 1):
            return False
        return self.weights == self.weights[::-1]

    def to_json(self) -> dict:
        return {
            "offset_index": self.offset_index,
            "weights": [fraction_str(w) for w in self.weights],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LatticeMeasure":
        return cls(int(data["offset_index"]), tuple(as_fraction(w) for w in data["weights"]))


def delta(position: Fraction | int | str = 0) -> LatticeMeasure:
    """Point mass at a half-integer position."""
    pos = as_fraction(position)
    idx = 2 * pos
    if idx.denominator != 1:
        raise DomainError(f"{pos} is not on the half-integer lattice")
    return LatticeMeasure(int(idx), (ONE,))


@dataclass(frozen=True)
class ExtremalSpec:
    """Parameters of the two-uniform mixture with concentration alpha.

    ``k`` is floor(1/alpha) and ``p`` the unique mixture weight with
    p/k + (1-p)/(k+1) = alpha; for alpha = 1/k the second component vanishes.
    """

    alpha: Fraction
    k: int
    p: Fraction

    @classmethod
    def from_alpha(cls, alpha) -> "ExtremalSpec":
        a = as_fraction(alpha)
        if not (0 < a <= 1):
            raise DomainError(f"alpha must lie in (0, 1], got {a}")
        k = int(1 / a)  # floor since a in (0, 1]
        p = k * (a * (k + 1) - 1)
        spec = cls(a, k, p)
        if not (0 < p <= 1) or Fraction(p, k) + Fraction(1 - p, k + 1) != a:
            raise DomainError(f"inconsistent mixture parameters for alpha={a}")
        return spec


def _centered_uniform(count: int) -> LatticeMeasure:
    # uniform on {1, ..., count} - (count+1)/2: atoms step 1 apart, so every
    # other lattice slot carries weight
    w = Fraction(1, count)
    weights = []
    for i in range(2 * count - 1):
        weights.append(w if i % 2 == 0 else ZERO)
    return LatticeMeasure(-(count - 1), tuple(weights))


def mixture(terms: Sequence[tuple[Fraction, LatticeMeasure]]) -> LatticeMeasure:
    coeffs = [as_fraction(c) for c, _ in terms]
    if any(c < 0 for c in coeffs) or sum(coeffs) != 1:
        raise DomainError("mixture coefficients must be nonnegative and sum to 1")
    lo = min(m.offset_index for _, m in terms)
    hi = max(m.offset_index + len(m.weights) for _, m in terms)
    acc = [ZERO] * (hi - lo)
    for c, m in zip(coeffs, (m for _, m in terms)):
        if c == 0:
            continue
        base = m.offset_index - lo
        for i, w in enumerate(m.weights):
            acc[base + i] += c * w
    return LatticeMeasure(lo, tuple(acc))


def extremal_measure(alpha) -> LatticeMeasure:
    """Worst-case measure with 1-d concentration exactly alpha.

    Mixes the centered uniform distribution on k points (weight p) with the
    one on k+1 points (weight 1-p), k = floor(1/alpha). Symmetric about 0.
    """
    spec = ExtremalSpec.from_alpha(alpha)
    inner = _centered_uniform(spec.k)
    if spec.p == 1:
        return inner
    outer = _centered_uniform(spec.k + 1)
    return mixture([(spec.p, inner), (1 - spec.p, outer)])


def extremal_variance(alpha) -> Fraction:
    """Second moment of ``extremal_measure(alpha)``, in closed form.

    Piecewise linear in alpha; agrees with (alpha**-2 - 1)/12 whenever
    1/alpha is an integer.
    """
    a = as_fraction(alpha)
    if not (0 < a <= 1):
        raise DomainError(f"alpha must lie in (0, 1], got {a}")
    k = int(1 / a)
    return Fraction(k * (1 + k), 12) * (3 - a - 2 * a * k)


def third_abs_moment(alpha) -> Fraction:
    """Exact E|Y|^3 for Y distributed by ``extremal_measure(alpha)``."""
    return extremal_measure(alpha).abs_moment(3)


def convolve(a: LatticeMeasure, b: LatticeMeasure) -> LatticeMeasure:
    """Exact convolution; offsets add, total mass stays 1."""
    out = [ZERO] * (len(a.weights) + len(b.weights) - 1)
    for i, wa in enumerate(a.weights):
        if wa == 0:
            continue
        for j, wb in enumerate(b.weights):
            if wb != 0:
                out[i + j] += wa * wb
    return LatticeMeasure(a.offset_index + b.offset_index, tuple(out))


def convolve_many(measures: Sequence[LatticeMeasure]) -> LatticeMeasure:
    if not measures:
        raise DomainError("need at least one measure")
    acc = measures[0]
    for m in measures[1:]:
        acc = convolve(acc, m)
    return acc


def t_value(alphas: Sequence) -> Fraction:
    """Mass the sum of independent extremal variables puts on {0, 1/2}.

    Exact; when all factor supports share a parity only one of the two
    points carries mass, otherwise both contributions are summed.
    """
    fracs = [as_fraction(a) for a in alphas]
    if not fracs:
        raise DomainError("need at least one alpha")
    conv = convolve_many([extremal_measure(a) for a in fracs])
    return conv.mass_at(ZERO) + conv.mass_at(HALF)


def concentration_1d(m: LatticeMeasure) -> Fraction:
    """Largest mass of a window of span strictly below 1.

    On the half-integer lattice such a window holds one atom or two atoms
    half a unit apart, so the maximum runs over single weights and sums of
    adjacent weights.
    """
    best = max(m.weights)
    for i in range(len(m.weights) - 1):
        pair = m.weights[i] + m.weights[i + 1]
        if pair > best:
            best = pair
    return best


@dataclass(frozen=True)
class VarianceProfile:
    """Per-term extremal variances together with their partial sums."""

    per_term: tuple[Fraction, ...]
    partial_sums: tuple[Fraction, ...]
    total: Fraction

    def __post_init__(self):
        acc = ZERO
        for v, s in zip(self.per_term, self.partial_sums):
            if v < 0:
                raise DomainError("negative variance term")
            acc += v
            if acc != s:
                raise DomainError("partial sums do not match per-term variances")
        if self.total != acc:
            raise DomainError("total does not match partial sums")


def variance_profile(alphas: Sequence) -> VarianceProfile:
    per = tuple(extremal_variance(a) for a in alphas)
    sums = []
    acc = ZERO
    for v in per:
        acc += v
        sums.append(acc)
    return VarianceProfile(per, tuple(sums), acc)


@dataclass(frozen=True)
class ParityRestrictionReport:
    """Structure report for one parity class of a lattice measure."""

    parity: str
    empty: bool
    symmetric: bool
    unimodal: bool
    log_concave: bool

    @property
    def ok(self) -> bool:
        return self.empty or (self.symmetric and self.unimodal and self.log_concave)


def check_unimodal_logconcave(m: LatticeMeasure, parity: str) -> ParityRestrictionReport:
    """Check symmetry, unimodality and log-concavity on one parity class.

    ``parity`` selects the integer or half-integer sublattice. This is a
    checker, not a prover: it reports on the measure it is given. An empty
    restriction is trivially fine.
    """
    if parity not in ("integer", "half-integer"):
        raise DomainError("parity must be 'integer' or 'half-integer'")
    want = 0 if parity == "integer" else 1
    entries = [
        w
        for i, w in enumerate(m.weights)
        if (m.offset_index + i) % 2 == want
    ]
    # strip the zero fringe of the restriction but keep interior zeros
    while entries and entries[0] == 0:
        entries.pop(0)
    while entries and entries[-1] == 0:
        entries.pop()
    if not entries:
        return ParityRestrictionReport(parity, True, True, True, True)
    symmetric = entries == entries[::-1]
    peak = entries.index(max(entries))
    rising = all(entries[i] <= entries[i + 1] for i in range(peak))
    falling = all(entries[i] >= entries[i + 1] for i in range(peak, len(entries) - 1))
    unimodal = rising and falling
    log_concave = all(
        entries[i] * entries[i] >= entries[i - 1] * entries[i + 1]
        for i in range(1, len(entries) - 1)
    )
    return ParityRestrictionReport(parity, False, symmetric, unimodal, log_concave)


# --- compensated floating-point path for long products ---------------------


@dataclass(frozen=True)
class FloatLattice:
    """Floating-point mirror of LatticeMeasure for long convolutions."""

    offset_index: int
    weights: tuple[float, ...]

    @classmethod
    def from_exact(cls, m: LatticeMeasure) -> "FloatLattice":
        return cls(m.offset_index, tuple(float(w) for w in m.weights))

    def mass_near(self, position: Fraction) -> float:
        idx = 2 * as_fraction(position) - self.offset_index
        if idx.denominator != 1:
            return 0.0
        i = int(idx)
        if 0 <= i < len(self.weights):
            return self.weights[i]
        return 0.0


def convolve_float(a: FloatLattice, b: FloatLattice) -> FloatLattice:
    """Convolution with Kahan-compensated accumulation per output cell."""
    la, lb = len(a.weights), len(b.weights)
    out = [0.0] * (la + lb - 1)
    comp = [0.0] * (la + lb - 1)
    for i, wa in enumerate(a.weights):
        if wa == 0.0:
            continue
        for j, wb in enumerate(b.weights):
            if wb == 0.0:
                continue
            term = wa * wb
            k = i + j
            y = term - comp[k]
            t = out[k] + y
            comp[k] = (t - out[k]) - y
            out[k] = t
    return FloatLattice(a.offset_index + b.offset_index, tuple(out))


@dataclass(frozen=True)
class TValueResult:
    """t-value together with the arithmetic path that produced it."""

    value: float
    exact: bool
    fraction: Fraction | None


def t_value_auto(alphas: Sequence, caps: Caps | None = None) -> TValueResult:
    """t-value through the exact path when the factor count permits.

    Up to ``caps.exact_factors`` factors the exact rational convolution is
    used; beyond that the compensated float path is taken and the result is
    flagged as non-exact.
    """
    caps = resolve(caps)
    fracs = [as_fraction(a) for a in alphas]
    if not fracs:
        raise DomainError("need at least one alpha")
    if len(fracs) <= caps.exact_factors:
        t = t_value(fracs)
        return TValueResult(float(t), True, t)
    acc = FloatLattice.from_exact(extremal_measure(fracs[0]))
    for a in fracs[1:]:
        acc = convolve_float(acc, FloatLattice.from_exact(extremal_measure(a)))
    return TValueResult(acc.mass_near(ZERO) + acc.mass_near(HALF), False, None)
