"""Core data types: interval domains, weighted samples, and mean-kind tags.

Weighted samples keep their weights exactly as given (never rescaled), so
weight-nullhomogeneity is a testable property of every mean rather than a
hidden normalization.  Extended exponents are plain floats: ``float("inf")``
and ``float("-inf")`` select the max/min limiting cases of the power mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

from .errors import (
    AllWeightsZero,
    EntryOutOfDomain,
    LengthMismatch,
    MismatchedEntries,
    NegativeWeight,
)

# Relative margin used whenever a solver has to evaluate near an open endpoint.
ENDPOINT_MARGIN = 1e-12


def endpoint_margin(value: float) -> float:
    return ENDPOINT_MARGIN * max(1.0, abs(value))


def sign(v: float) -> int:
    """Sign with sign(0) = 0."""
    return (v > 0.0) - (v < 0.0)


@dataclass(frozen=True)
class IntervalDomain:
    """A real interval; endpoints may be infinite and are open by default."""

    lo: float = 0.0
    hi: float = math.inf
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    def contains(self, x: float) -> bool:
        if math.isnan(x):
            return False
        lo_ok = x > self.lo if (self.lo_open or math.isinf(self.lo)) else x >= self.lo
        hi_ok = x < self.hi if (self.hi_open or math.isinf(self.hi)) else x <= self.hi
        return lo_ok and hi_ok

    @property
    def starts_at_zero(self) -> bool:
        """True for the canonical scaling domain: open lower endpoint at 0."""
        return self.lo == 0.0 and self.lo_open

    def inner_lo(self) -> float:
        """Lowest point a solver is allowed to touch."""
        if math.isinf(self.lo):
            return -1e300
        return self.lo + endpoint_margin(self.lo) if self.lo_open else self.lo

    def inner_hi(self) -> float:
        if math.isinf(self.hi):
            return 1e300
        return self.hi - endpoint_margin(self.hi) if self.hi_open else self.hi

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo}, {self.hi}{right}"


def positive_reals() -> IntervalDomain:
    return IntervalDomain(0.0, math.inf)


def all_reals() -> IntervalDomain:
    return IntervalDomain(-math.inf, math.inf)


def open_interval(lo: float, hi: float) -> IntervalDomain:
    return IntervalDomain(lo, hi)


def probe_points(domain: IntervalDomain, count: int, span: float = 16.0) -> list[float]:
    """Uniform points on an interior window of ``domain``, for admission probes.

    Infinite ends are replaced by a window of width ``span``; finite ends are
    padded by 5% of the window so probes stay clear of singular endpoints.
    """
    if count < 2:
        raise ValueError("need at least 2 probe points")
    lo_fin, hi_fin = not math.isinf(domain.lo), not math.isinf(domain.hi)
    if lo_fin and hi_fin:
        pad = 0.05 * (domain.hi - domain.lo)
        a, b = domain.lo + pad, domain.hi - pad
    elif lo_fin:
        a, b = domain.lo + 0.05 * span, domain.lo + span
    elif hi_fin:
        a, b = domain.hi - span, domain.hi - 0.05 * span
    else:
        a, b = -span / 2.0, span / 2.0
    step = (b - a) / (count - 1)
    return [a + j * step for j in range(count)]


@dataclass(frozen=True)
class WeightedSample:
    """Entry vector with nonnegative weights (at least one positive)."""

    entries: tuple[float, ...]
    weights: tuple[float, ...]
    domain: IntervalDomain

    def __len__(self) -> int:
        return len(self.entries)

    def hull(self) -> tuple[float, float]:
        return min(self.entries), max(self.entries)

    def total_weight(self) -> float:
        return math.fsum(self.weights)

    def is_constant(self) -> bool:
        return min(self.entries) == max(self.entries)

    def scaled(self, t: float, domain: IntervalDomain | None = None) -> "WeightedSample":
        return make_weighted_sample(
            [t * x for x in self.entries], self.weights, domain or self.domain
        )

    def rescaled_weights(self, t: float) -> "WeightedSample":
        return make_weighted_sample(self.entries, [t * w for w in self.weights], self.domain)

    def permuted(self, order: Sequence[int]) -> "WeightedSample":
        return make_weighted_sample(
            [self.entries[i] for i in order],
            [self.weights[i] for i in order],
            self.domain,
        )

    def with_domain(self, domain: IntervalDomain) -> "WeightedSample":
        return make_weighted_sample(self.entries, self.weights, domain)


def make_weighted_sample(
    entries: Sequence[float], weights: Sequence[float], domain: IntervalDomain
) -> WeightedSample:
    """Validate and freeze a weighted sample.

    Weights must be nonnegative with a positive total; entries must lie in
    ``domain``.  Weights are stored exactly as given.
    """
    if len(entries) != len(weights):
        raise LengthMismatch(f"{len(entries)} entries vs {len(weights)} weights")
    if len(entries) == 0:
        raise LengthMismatch("sample must not be empty")
    ent = tuple(float(x) for x in entries)
    wts = tuple(float(w) for w in weights)
    for w in wts:
        if math.isnan(w) or w < 0.0:
            raise NegativeWeight(f"weight {w} is negative or NaN")
    if all(w == 0.0 for w in wts):
        raise AllWeightsZero("at least one weight must be positive")
    for x in ent:
        if not domain.contains(x):
            raise EntryOutOfDomain(f"entry {x} outside {domain}")
    return WeightedSample(ent, wts, domain)


def shuffle_merge(s1: WeightedSample, s2: WeightedSample) -> WeightedSample:
    """Interleave two samples over the same entries: (x, lam), (x, mu) ->
    ((x1, x1, ..., xn, xn), (lam1, mu1, ..., lamn, mun)).

    Used to test the reduction principle M(x, lam + mu) = M(merged).
    """
    if s1.entries != s2.entries or s1.domain != s2.domain:
        raise MismatchedEntries("samples must share entries and domain")
    entries: list[float] = []
    weights: list[float] = []
    for x, a, b in zip(s1.entries, s1.weights, s2.weights):
        entries.extend((x, x))
        weights.extend((a, b))
    return make_weighted_sample(entries, weights, s1.domain)


def eliminate_zero_weights(s: WeightedSample) -> WeightedSample:
    """Drop coordinates whose weight is exactly zero."""
    kept = [(x, w) for x, w in zip(s.entries, s.weights) if w != 0.0]
    return make_weighted_sample([x for x, _ in kept], [w for _, w in kept], s.domain)


class MeanKind(Enum):
    """The four sign-change means of a deviation kernel.

    For the weighted deviation sum D(y) = sum_i w_i K(x_i, y):
      LOWER_WEAK   = inf{y : D(y) <= 0}
      LOWER_STRICT = inf{y : D(y) <  0}
      UPPER_STRICT = sup{y : D(y) >  0}
      UPPER_WEAK   = sup{y : D(y) >= 0}
    """

    LOWER_WEAK = "lower-weak"
    LOWER_STRICT = "lower-strict"
    UPPER_STRICT = "upper-strict"
    UPPER_WEAK = "upper-weak"

    @property
    def is_inf_kind(self) -> bool:
        return self in (MeanKind.LOWER_WEAK, MeanKind.LOWER_STRICT)

    @classmethod
    def from_label(cls, label: str) -> "MeanKind":
        for kind in cls:
            if kind.value == label:
                return kind
        raise ValueError(f"unknown mean kind {label!r}")


def restrict(domain: IntervalDomain, lo: float, hi: float) -> IntervalDomain:
    """Sub-interval of ``domain`` (open), validated to be inside it."""
    sub = replace(domain, lo=lo, hi=hi, lo_open=True, hi_open=True)
    if not (domain.contains(lo) or lo == domain.lo) or not (domain.contains(hi) or hi == domain.hi):
        raise ValueError(f"({lo}, {hi}) is not inside {domain}")
    return sub
