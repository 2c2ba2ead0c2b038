import math
import random

import pytest

from meankit import (
    MeanKind,
    SemidevMeanConfig,
    arithmetic_kernel,
    check_quasideviation,
    check_semideviation,
    cosh_generator,
    deviation_mean,
    deviation_sum,
    difference_kernel,
    kernel_from_expression,
    log_generator,
    make_weighted_sample,
    normalize_kernel,
    power_generator,
    quasiarithmetic_mean,
    ratio_kernel,
    semideviation_mean,
    shifted_power_generator,
    sign_kernel,
)
from meankit.domain import all_reals, open_interval, positive_reals
from meankit.errors import (
    AmbiguousClassification,
    KernelEvaluationError,
    NoSignChange,
    NotNormalizable,
)
from meankit.expr import Kernel2

POS = positive_reals()
REALS = all_reals()
KINDS = list(MeanKind)


def test_deviation_sum_linear_kernel():
    # K = x - y, entries (1, 5), weights (1, 3): sum is 16 - 4 y.
    s = make_weighted_sample([1, 5], [1, 3], REALS)
    d = deviation_sum(arithmetic_kernel(), s)
    for y in (0.0, 1.0, 4.0, 6.5):
        assert d(y) == pytest.approx(16.0 - 4.0 * y, abs=1e-12)


def test_deviation_sum_sign_kernel():
    s = make_weighted_sample([1, 3], [1, 1], REALS)
    d = deviation_sum(sign_kernel(), s)
    assert d(2.0) == 0.0
    assert d(0.0) == 2.0
    assert d(4.0) == -2.0


def test_deviation_sum_single_entry():
    s = make_weighted_sample([2.0], [3.0], REALS)
    d = deviation_sum(arithmetic_kernel(), s)
    assert d(2.0) == 0.0
    assert d(1.0) == 3.0


def test_deviation_sum_reports_offending_pair():
    bad = kernel_from_expression("log(x - y)", REALS)
    s = make_weighted_sample([1, 3], [1, 1], REALS)
    d = deviation_sum(bad, s)
    with pytest.raises(KernelEvaluationError):
        d(2.0)


class TestSignKernelMedians:
    def test_two_point_plateau(self):
        s = make_weighted_sample([1, 3], [1, 1], REALS)
        S = sign_kernel()
        assert semideviation_mean(S, s, MeanKind.LOWER_WEAK) == pytest.approx(1.0, abs=1e-10)
        assert semideviation_mean(S, s, MeanKind.UPPER_STRICT) == pytest.approx(1.0, abs=1e-10)
        assert semideviation_mean(S, s, MeanKind.LOWER_STRICT) == pytest.approx(3.0, abs=1e-10)
        assert semideviation_mean(S, s, MeanKind.UPPER_WEAK) == pytest.approx(3.0, abs=1e-10)

    def test_three_point_median(self):
        s = make_weighted_sample([1, 2, 3], [1, 1, 1], REALS)
        for kind in KINDS:
            assert semideviation_mean(sign_kernel(), s, kind) == pytest.approx(2.0, abs=1e-10)

    def test_weighted_median(self):
        s = make_weighted_sample([1, 3], [1, 2], REALS)
        for kind in KINDS:
            assert semideviation_mean(sign_kernel(), s, kind) == pytest.approx(3.0, abs=1e-10)


def test_linear_kernel_mean_is_weighted_average():
    s = make_weighted_sample([1, 5], [1, 3], REALS)
    for kind in KINDS:
        assert semideviation_mean(arithmetic_kernel(), s, kind) == pytest.approx(4.0, abs=1e-10)


def test_cosh_kernel_matches_quasiarithmetic_closed_form():
    s = make_weighted_sample([1, 7], [1, 1], POS)
    kernel = difference_kernel(cosh_generator())
    expected = math.acosh((math.cosh(1) + math.cosh(7)) / 2.0)
    for kind in KINDS:
        assert semideviation_mean(kernel, s, kind) == pytest.approx(expected, abs=1e-10)


def test_constant_sample_short_circuits():
    s = make_weighted_sample([2, 2, 2], [1, 2, 3], REALS)
    counting = Kernel2("count", lambda x, y: 1 / 0, REALS, REALS)  # must never be called
    assert semideviation_mean(counting, s, MeanKind.LOWER_WEAK) == 2.0


class TestNormalize:
    def test_cosh_kernel_normalization_closed_form(self):
        kernel = difference_kernel(cosh_generator())
        scaled = normalize_kernel(kernel)
        rng = random.Random(2)
        for _ in range(50):
            x, y = rng.uniform(0.2, 5), rng.uniform(0.2, 5)
            expected = (math.cosh(x) - math.cosh(y)) / math.sinh(y)
            assert scaled(x, y) == pytest.approx(expected, rel=1e-12)

    def test_arithmetic_kernel_is_fixed_point(self):
        kernel = arithmetic_kernel()
        scaled = normalize_kernel(kernel)
        for x, y in ((1.0, 2.0), (-3.0, 5.0), (0.5, 0.25)):
            assert scaled(x, y) == pytest.approx(kernel(x, y), abs=1e-12)

    def test_square_kernel_normalization(self):
        scaled = normalize_kernel(difference_kernel(power_generator(2)))
        rng = random.Random(3)
        for _ in range(50):
            x, y = rng.uniform(0.2, 5), rng.uniform(0.2, 5)
            assert scaled(x, y) == pytest.approx((x * x - y * y) / (2 * y), rel=1e-12)

    def test_diagonal_slope_is_minus_one(self):
        scaled = normalize_kernel(difference_kernel(cosh_generator()))
        for y in (0.3, 1.0, 2.7, 6.0):
            assert scaled.partial2(y, y) == pytest.approx(-1.0, abs=1e-5)

    def test_idempotent_within_tolerance(self):
        scaled = normalize_kernel(difference_kernel(power_generator(2)))
        twice = normalize_kernel(scaled)
        rng = random.Random(4)
        for _ in range(30):
            x, y = rng.uniform(0.3, 4), rng.uniform(0.3, 4)
            assert abs(twice(x, y) - scaled(x, y)) <= 1e-9 * (1 + abs(scaled(x, y)))

    def test_sign_kernel_not_normalizable(self):
        with pytest.raises(NotNormalizable):
            normalize_kernel(sign_kernel())

    def test_reversed_kernel_not_normalizable(self):
        with pytest.raises(NotNormalizable):
            normalize_kernel(kernel_from_expression("y - x", POS))

    def test_normalization_preserves_means(self):
        kernel = difference_kernel(cosh_generator())
        scaled = normalize_kernel(kernel)
        cfg = SemidevMeanConfig(grid_size=256)
        rng = random.Random(5)
        for _ in range(20):
            n = rng.randint(1, 5)
            s = make_weighted_sample(
                [rng.uniform(0.3, 5) for _ in range(n)],
                [rng.uniform(0.1, 3) for _ in range(n)],
                POS,
            )
            for kind in KINDS:
                a = semideviation_mean(kernel, s, kind, cfg)
                b = semideviation_mean(scaled, s, kind, cfg)
                assert abs(a - b) <= max(2 * cfg.refine_tol * max(map(abs, s.hull())), 1e-10)


class TestAdmissionChecks:
    def test_sign_kernel_is_semideviation(self):
        assert check_semideviation(sign_kernel(), REALS).holds

    def test_reversed_kernel_fails_with_witness(self):
        verdict = check_semideviation(kernel_from_expression("y - x", POS), POS)
        assert not verdict.holds
        w = verdict.witness
        assert w is not None and (w["x"] - w["y"]) * w["value"] < 0

    def test_cosh_kernel_is_semideviation_on_positives(self):
        assert check_semideviation(difference_kernel(cosh_generator()), POS).holds

    def test_arithmetic_kernel_is_quasideviation(self):
        assert check_quasideviation(arithmetic_kernel(), open_interval(-5, 5)).holds

    def test_sign_kernel_is_not_quasideviation(self):
        verdict = check_quasideviation(sign_kernel(), open_interval(-5, 5))
        assert not verdict.holds

    def test_shifted_ratio_kernel_is_quasideviation(self):
        # K(x, y) = x / y - 1: continuous, strictly increasing ratios.
        kernel = ratio_kernel(shifted_power_generator(1.0, -1.0))
        assert check_quasideviation(kernel, open_interval(0.2, 8.0)).holds


class TestDeviationMean:
    def test_weighted_average(self):
        s = make_weighted_sample([1, 5], [1, 3], REALS)
        assert deviation_mean(arithmetic_kernel(), s) == pytest.approx(4.0, abs=1e-10)

    def test_log_difference_kernel_is_geometric(self):
        s = make_weighted_sample([1, 4], [1, 1], POS)
        assert deviation_mean(difference_kernel(log_generator()), s) == pytest.approx(
            2.0, abs=1e-10
        )

    def test_matches_quasiarithmetic_for_cosh(self):
        s = make_weighted_sample([1, 7], [1, 1], POS)
        dev = deviation_mean(difference_kernel(cosh_generator()), s)
        qa = quasiarithmetic_mean(s, cosh_generator())
        assert abs(dev - qa) <= 1e-10 * (1 + abs(qa))

    def test_matches_all_four_kinds_for_quasideviations(self):
        rng = random.Random(6)
        kernel = difference_kernel(power_generator(2))
        for _ in range(20):
            n = rng.randint(1, 5)
            s = make_weighted_sample(
                [rng.uniform(0.3, 6) for _ in range(n)],
                [rng.uniform(0.1, 3) for _ in range(n)],
                POS,
            )
            dev = deviation_mean(kernel, s)
            for kind in KINDS:
                assert abs(semideviation_mean(kernel, s, kind) - dev) <= 1e-10 * (1 + abs(dev))

    def test_no_sign_change_detected(self):
        shifted = kernel_from_expression("x - y + 3", REALS)
        s = make_weighted_sample([1, 2], [1, 1], REALS)
        with pytest.raises(NoSignChange):
            deviation_mean(shifted, s)


class TestSignChangeStructure:
    def test_nonincreasing_sum_pairs_kinds(self):
        # For a kernel nonincreasing in its weighted sum, lower-weak equals
        # upper-strict and lower-strict equals upper-weak.
        s = make_weighted_sample([1, 3], [1, 1], REALS)
        S = sign_kernel()
        lw = semideviation_mean(S, s, MeanKind.LOWER_WEAK)
        us = semideviation_mean(S, s, MeanKind.UPPER_STRICT)
        ls = semideviation_mean(S, s, MeanKind.LOWER_STRICT)
        uw = semideviation_mean(S, s, MeanKind.UPPER_WEAK)
        assert abs(lw - us) <= 1e-10 and abs(ls - uw) <= 1e-10

    def test_strictly_decreasing_sum_collapses_all_kinds(self):
        s = make_weighted_sample([0.5, 2.5, 4.0], [1, 2, 1], REALS)
        values = [semideviation_mean(arithmetic_kernel(), s, kind) for kind in KINDS]
        assert max(values) - min(values) <= 1e-10

    def test_continuous_sum_vanishes_at_every_kind(self):
        kernel = difference_kernel(cosh_generator())
        s = make_weighted_sample([0.5, 2.0, 4.5], [1, 1, 2], POS)
        d = deviation_sum(kernel, s)
        cfg = SemidevMeanConfig()
        for kind in KINDS:
            v = semideviation_mean(kernel, s, kind, cfg)
            slope = abs((d(v + 1e-6) - d(v - 1e-6)) / 2e-6)
            assert abs(d(v)) <= 10 * slope * cfg.refine_tol * max(map(abs, s.hull())) + 1e-12

    def test_mean_value_bounds_on_random_samples(self):
        rng = random.Random(8)
        kernels = [
            (sign_kernel(), REALS, (-4.0, 4.0)),
            (arithmetic_kernel(), REALS, (-4.0, 4.0)),
            (difference_kernel(cosh_generator()), POS, (0.2, 5.0)),
        ]
        cfg = SemidevMeanConfig(grid_size=128)
        for kernel, dom, (lo, hi) in kernels:
            for _ in range(40):
                n = rng.randint(1, 6)
                s = make_weighted_sample(
                    [rng.uniform(lo, hi) for _ in range(n)],
                    [rng.uniform(0.1, 3) for _ in range(n)],
                    dom,
                )
                mn, mx = s.hull()
                lw = semideviation_mean(kernel, s, MeanKind.LOWER_WEAK, cfg)
                uw = semideviation_mean(kernel, s, MeanKind.UPPER_WEAK, cfg)
                ls = semideviation_mean(kernel, s, MeanKind.LOWER_STRICT, cfg)
                us = semideviation_mean(kernel, s, MeanKind.UPPER_STRICT, cfg)
                tol = 1e-9 * (1 + abs(mx))
                assert mn - tol <= lw <= uw + tol <= mx + 2 * tol
                assert lw - tol <= ls <= uw + tol
                assert lw - tol <= us <= uw + tol


def test_ambiguous_classification_on_unresolvable_oscillation():
    # Semideviation with a fast multiplicative wobble: the sign of the
    # deviation sum flips at sub-grid scale for a coarse grid.
    wobbly = Kernel2(
        "wobbly",
        lambda x, y: (x - y) * (1.05 + math.sin(73.0 * (x + y))),
        REALS,
        REALS,
    )
    assert check_semideviation(wobbly, open_interval(0, 6)).holds
    s = make_weighted_sample([1.0, 5.0], [1.0, 1.0], REALS)
    with pytest.raises(AmbiguousClassification):
        semideviation_mean(wobbly, s, MeanKind.LOWER_WEAK, SemidevMeanConfig(grid_size=16))


def test_resolved_oscillation_uses_first_and_last_crossing():
    # The same kernel at a fine grid resolves; the four means stay inside the
    # hull and keep their ordering.
    wobbly = Kernel2(
        "wobbly",
        lambda x, y: (x - y) * (1.05 + math.sin(20.0 * (x + y))),
        REALS,
        REALS,
    )
    s = make_weighted_sample([1.0, 5.0], [1.0, 1.0], REALS)
    cfg = SemidevMeanConfig(grid_size=4096)
    lw = semideviation_mean(wobbly, s, MeanKind.LOWER_WEAK, cfg)
    uw = semideviation_mean(wobbly, s, MeanKind.UPPER_WEAK, cfg)
    assert 1.0 <= lw <= uw <= 5.0


def test_zero_band_collapses_noise_level_distinctions():
    s = make_weighted_sample([1, 3], [1, 1], REALS)
    wide = SemidevMeanConfig(zero_band=2.5)
    # With the band wider than any attainable sum, the weak kinds clamp to
    # the hull ends.
    assert semideviation_mean(sign_kernel(), s, MeanKind.LOWER_WEAK, wide) == 1.0
    assert semideviation_mean(sign_kernel(), s, MeanKind.UPPER_WEAK, wide) == 3.0
