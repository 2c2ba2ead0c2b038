"""Homogeneous envelopes, local scaling limits, and kernel scale profiles.

Three constructions attach a homogeneous mean to a given one:

* the lower/upper envelopes inf/sup over all admissible scalings t of
  M(t x, w) / t, the tightest homogeneous means sandwiching M;
* the local homogenization, the t -> 0 limit of the same ratio (requires the
  mean's domain to have infimum 0);
* for deviation kernels, the scale profile h(r) = lim K*(r t, t) / t of the
  normalized kernel, whose ratio kernel h(x / y) generates the homogeneous
  counterpart of the kernel's mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

from .classic_means import power_mean, quasiarithmetic_mean
from .domain import (
    IntervalDomain,
    MeanKind,
    WeightedSample,
    make_weighted_sample,
    positive_reals,
    sign,
)
from .errors import (
    EmptyAdmissibleSet,
    AllEvaluationsFailed,
    MeanKitError,
    NotConverged,
    SignPropertyViolated,
)
from .expr import Kernel2, ScalarFunction
from .limits import LimitEstimate, largest_halving_start, limit_at_zero
from .semideviation import (
    SemidevMeanConfig,
    deviation_mean,
    normalize_kernel,
    semideviation_mean,
)

__all__ = [
    "LimitEstimate",
    "limit_at_zero",
    "MeanHandle",
    "power_handle",
    "quasiarithmetic_handle",
    "translated_power_handle",
    "semideviation_handle",
    "deviation_handle",
    "envelope",
    "envelope_pair",
    "local_homogenization",
    "kernel_homogenization",
    "homogenization_profile",
    "homogeneous_semidev_mean",
]

#: Log-grid resolution of the envelope search.
ENVELOPE_GRID = 256

#: Octaves explored around the admissible range when an endpoint is missing.
#: 2^-28 keeps the smallest scale above the cancellation floor of solver-based
#: means (absolute error ~ ulp / t stays below 1e-7).
ENVELOPE_OCTAVES = 28


@dataclass(frozen=True)
class MeanHandle:
    """A fixed mean as an opaque sample -> value map with its domain."""

    name: str
    domain: IntervalDomain
    fn: Callable[[WeightedSample], float]

    def __call__(self, sample: WeightedSample) -> float:
        return self.fn(sample)


def power_handle(exponent: float, domain: IntervalDomain | None = None) -> MeanHandle:
    dom = domain or positive_reals()
    return MeanHandle(f"power({exponent:g})", dom, lambda s: power_mean(s, exponent))


def quasiarithmetic_handle(generator: ScalarFunction) -> MeanHandle:
    return MeanHandle(
        f"qa({generator.name})",
        generator.domain,
        lambda s: quasiarithmetic_mean(s, generator),
    )


def translated_power_handle(
    exponent: float, shift: float, domain: IntervalDomain | None = None
) -> MeanHandle:
    """Power mean of shifted entries, shifted back: entries x -> x + shift.

    Evaluated in closed form (no inversion solver).  Concave in the entries
    whenever exponent <= 1, which makes it the catalog example of a concave
    non-homogeneous mean.
    """
    dom = domain or positive_reals()

    def fn(s: WeightedSample) -> float:
        total = s.total_weight()
        if exponent == 0.0:
            avg = math.fsum(
                w * math.log(x + shift) for x, w in zip(s.entries, s.weights)
            )
            return math.exp(avg / total) - shift
        avg = math.fsum(
            w * (x + shift) ** exponent for x, w in zip(s.entries, s.weights)
        )
        return (avg / total) ** (1.0 / exponent) - shift

    return MeanHandle(f"translated_power({exponent:g},{shift:g})", dom, fn)


def semideviation_handle(
    kernel: Kernel2, kind: MeanKind, cfg: SemidevMeanConfig | None = None
) -> MeanHandle:
    return MeanHandle(
        f"semidev({kernel.name},{kind.value})",
        kernel.domain_x,
        lambda s: semideviation_mean(kernel, s, kind, cfg),
    )


def deviation_handle(kernel: Kernel2, cfg: SemidevMeanConfig | None = None) -> MeanHandle:
    return MeanHandle(
        f"deviation({kernel.name})",
        kernel.domain_x,
        lambda s: deviation_mean(kernel, s, cfg),
    )


# --- envelopes ------------------------------------------------------------------------


def _scaled_ratio(handle: MeanHandle, sample: WeightedSample, t: float) -> float:
    try:
        scaled = make_weighted_sample(
            [t * x for x in sample.entries], sample.weights, handle.domain
        )
        return handle.fn(scaled) / t
    except (MeanKitError, OverflowError, ZeroDivisionError):
        return math.nan


def _admissible_scales(handle: MeanHandle, sample: WeightedSample) -> tuple[float, float]:
    xmin, xmax = sample.hull()
    if xmin <= 0.0:
        raise ValueError("envelope scaling needs positive entries")
    dom = handle.domain
    t_hi = dom.inner_hi() / xmax if not math.isinf(dom.hi) else math.nan
    t_lo = dom.inner_lo() / xmin if dom.lo > 0.0 else math.nan
    if math.isnan(t_hi):
        anchor = t_lo if not math.isnan(t_lo) else 1.0
        t_hi = max(1.0, anchor) * 2.0**ENVELOPE_OCTAVES
    if math.isnan(t_lo):
        t_lo = t_hi * 2.0**-ENVELOPE_OCTAVES
    if not t_lo < t_hi:
        raise EmptyAdmissibleSet(f"no scaling keeps {sample.entries} inside {dom}")
    return t_lo, t_hi


def _golden_refine(
    fun: Callable[[float], float], a: float, b: float, rel_tol: float = 1e-8
) -> float:
    """Golden-section minimum of ``fun`` over [a, b]; returns the best value."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fun(x1), fun(x2)
    candidates = [v for v in (f1, f2, fun(a), fun(b)) if not math.isnan(v)]
    best = min(candidates) if candidates else math.inf
    for _ in range(200):
        if b - a <= rel_tol * max(abs(a), abs(b)):
            break
        if math.isnan(f1) or (not math.isnan(f2) and f2 < f1):
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fun(x2)
            if not math.isnan(f2):
                best = min(best, f2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fun(x1)
            if not math.isnan(f1):
                best = min(best, f1)
    return best


def envelope_pair(handle: MeanHandle, sample: WeightedSample) -> tuple[float, float]:
    """(lower, upper) homogeneous envelope estimates from one shared scan.

    Scans M(t x, w) / t on a 256-point log grid over the admissible scalings
    (t = 1 is always included, so the defining inequalities lower <= M(x, w)
    <= upper hold numerically) and refines each extremum by golden section.
    The scan assumes a profile without needle-thin basins; the grid density
    is the guard against missing one.
    """
    t_lo, t_hi = _admissible_scales(handle, sample)
    log_lo, log_hi = math.log(t_lo), math.log(t_hi)
    ts = [math.exp(log_lo + j * (log_hi - log_lo) / (ENVELOPE_GRID - 1)) for j in range(ENVELOPE_GRID)]
    if t_lo <= 1.0 <= t_hi:
        ts.append(1.0)
    ts.sort()
    values = [_scaled_ratio(handle, sample, t) for t in ts]
    if all(math.isnan(v) for v in values):
        raise AllEvaluationsFailed("scaled mean ratio failed at every sampled scale")

    def refine(direction: float) -> float:
        # direction +1 searches the minimum, -1 the maximum.
        keyed = [direction * v if not math.isnan(v) else math.inf for v in values]
        best_idx = min(range(len(ts)), key=keyed.__getitem__)
        lo_idx, hi_idx = max(best_idx - 1, 0), min(best_idx + 1, len(ts) - 1)
        refined = _golden_refine(
            lambda u: direction * _scaled_ratio(handle, sample, math.exp(u)),
            math.log(ts[lo_idx]),
            math.log(ts[hi_idx]),
        )
        return direction * min(refined, keyed[best_idx])

    return refine(1.0), refine(-1.0)


def envelope(
    handle: MeanHandle, sample: WeightedSample, which: Literal["lower", "upper"]
) -> float:
    """Lower or upper homogeneous envelope estimate (see ``envelope_pair``)."""
    lower, upper = envelope_pair(handle, sample)
    if which == "lower":
        return lower
    if which == "upper":
        return upper
    raise ValueError("which must be 'lower' or 'upper'")


# --- local homogenization ------------------------------------------------------------


def local_homogenization(
    handle: MeanHandle,
    sample: WeightedSample,
    *,
    ratio: float = 0.5,
    max_steps: int = 60,
    window: int = 8,
    tol: float = 1e-6,
) -> LimitEstimate:
    """Limit estimate of M(t x, w) / t as t -> 0+.

    tail_min proxies the lower homogenization (liminf), tail_max the upper
    one (limsup).  The start scale is the largest power of 1/2 that keeps the
    scaled entries inside the handle's domain, which must have infimum 0.
    Entries may lie anywhere on the positive half-line.
    """
    if not handle.domain.starts_at_zero:
        raise ValueError(f"domain {handle.domain} must have infimum 0")
    xmin, xmax = sample.hull()
    if xmin <= 0.0:
        raise ValueError("local homogenization needs positive entries")
    t0 = largest_halving_start(handle.domain.inner_hi() / xmax)
    return limit_at_zero(
        lambda t: _scaled_ratio(handle, sample, t),
        t0,
        ratio=ratio,
        max_steps=max_steps,
        window=window,
        tol=tol,
    )


# --- kernel scale profile --------------------------------------------------------------


def kernel_homogenization(
    kernel: Kernel2,
    ratio_value: float,
    *,
    normalized: Kernel2 | None = None,
    scan_ratio: float = 0.5,
    max_steps: int = 60,
    window: int = 8,
    tol: float = 1e-6,
) -> LimitEstimate:
    """Limit estimate of K*(r t, t) / t as t -> 0+ for the normalized kernel.

    tail_min / tail_max proxy the lower / upper scale profile of the kernel
    at ratio r.  Pass ``normalized`` to reuse an already-normalized kernel.
    """
    if ratio_value <= 0.0:
        raise ValueError("ratio must be positive")
    if not kernel.domain_y.starts_at_zero:
        raise ValueError(f"kernel domain {kernel.domain_y} must have infimum 0")
    scaled_kernel = normalized if normalized is not None else normalize_kernel(kernel)
    t0 = largest_halving_start(kernel.domain_y.inner_hi() / max(ratio_value, 1.0))

    def g(t: float) -> float:
        try:
            return scaled_kernel.fn(ratio_value * t, t) / t
        except (MeanKitError, OverflowError, ZeroDivisionError):
            return math.nan

    return limit_at_zero(g, t0, ratio=scan_ratio, max_steps=max_steps, window=window, tol=tol)


def _round_significant(r: float, digits: int = 12) -> float:
    if r == 0.0:
        return 0.0
    return float(f"{r:.{digits - 1}e}")


def homogenization_profile(
    kernel: Kernel2,
    mode: Literal["estimate", "lower", "upper"] = "estimate",
    *,
    normalized: Kernel2 | None = None,
    tol: float = 1e-5,
    window: int = 4,
) -> Callable[[float], float]:
    """Memoized scale profile r -> h(r) of a deviation kernel.

    Mode "estimate" demands convergence of each pointwise limit and returns
    the tail midpoint; "lower"/"upper" return the tail min/max (liminf and
    limsup proxies) without requiring convergence.  The memo key rounds r to
    12 significant digits, so nearby ratios met during root refinement reuse
    the same (deterministic) value.  The default tail window is shorter and
    the tolerance looser than the raw limit engine's because the profile is
    queried across wide ratio ranges where cancellation noise in the scaled
    kernel sets a floor on the achievable window spread.
    """
    base = normalized if normalized is not None else normalize_kernel(kernel)
    memo: dict[float, float] = {}

    def profile(r: float) -> float:
        key = _round_significant(r)
        if key in memo:
            return memo[key]
        est = kernel_homogenization(kernel, key, normalized=base, tol=tol, window=window)
        if mode == "estimate":
            if not est.converged:
                raise NotConverged(
                    f"scale profile of {kernel.name} did not converge at r={key} "
                    f"(spread {est.spread:.3e})"
                )
            value = est.estimate
        elif mode == "lower":
            value = est.tail_min
        else:
            value = est.tail_max
        memo[key] = value
        return value

    return profile


SIGN_PROBE_RATIOS = (0.25, 0.5, 0.8, 1.25, 2.0, 4.0)


def ratio_kernel_from_profile(name: str, profile: Callable[[float], float]) -> Kernel2:
    """Degree-0 homogeneous kernel (x, y) -> h(x / y) on the positive quadrant."""
    dom = positive_reals()
    return Kernel2(name, lambda x, y: profile(x / y), dom, dom)


def homogeneous_semidev_mean(
    kernel: Kernel2,
    sample: WeightedSample,
    kind: MeanKind,
    cfg: SemidevMeanConfig | None = None,
    *,
    profile: Callable[[float], float] | None = None,
) -> float:
    """Sign-change mean of the ratio kernel built from the kernel's scale
    profile; scaling the sample by t > 0 scales the result by t.

    The profile must satisfy sign(h(r)) = sign(r - 1) (verified on probe
    ratios); otherwise the homogeneous construction is not a deviation kernel
    and SignPropertyViolated is raised.
    """
    h = profile if profile is not None else homogenization_profile(kernel)
    for r in SIGN_PROBE_RATIOS:
        value = h(r)
        if sign(value) != sign(r - 1.0):
            raise SignPropertyViolated(
                f"scale profile has value {value} at ratio {r}; expected sign {sign(r - 1.0)}"
            )
    ratio_k = ratio_kernel_from_profile(f"scale_profile({kernel.name})", h)
    positive_sample = make_weighted_sample(sample.entries, sample.weights, positive_reals())
    return semideviation_mean(ratio_k, positive_sample, kind, cfg)
