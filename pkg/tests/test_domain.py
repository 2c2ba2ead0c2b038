import math

import pytest

from meankit import (
    IntervalDomain,
    MeanKind,
    all_reals,
    eliminate_zero_weights,
    make_weighted_sample,
    open_interval,
    positive_reals,
    shuffle_merge,
)
from meankit.domain import probe_points
from meankit.errors import (
    AllWeightsZero,
    EntryOutOfDomain,
    LengthMismatch,
    MismatchedEntries,
    NegativeWeight,
)


def test_minimal_valid_sample():
    s = make_weighted_sample([1, 2], [1, 1], positive_reals())
    assert s.entries == (1.0, 2.0)
    assert s.weights == (1.0, 1.0)
    assert s.hull() == (1.0, 2.0)


def test_all_weights_zero_rejected():
    with pytest.raises(AllWeightsZero):
        make_weighted_sample([1, 2], [0, 0], positive_reals())


def test_negative_weight_rejected():
    with pytest.raises(NegativeWeight):
        make_weighted_sample([1, 2], [1, -1], positive_reals())


def test_length_mismatch_rejected():
    with pytest.raises(LengthMismatch):
        make_weighted_sample([1, 2, 3], [1, 1], positive_reals())
    with pytest.raises(LengthMismatch):
        make_weighted_sample([], [], positive_reals())


def test_entry_outside_domain_rejected():
    with pytest.raises(EntryOutOfDomain):
        make_weighted_sample([-1, 2], [1, 1], positive_reals())
    with pytest.raises(EntryOutOfDomain):
        make_weighted_sample([0.0, 2], [1, 1], positive_reals())  # open at 0


def test_interval_membership_respects_openness():
    closed = IntervalDomain(0, 1, lo_open=False, hi_open=False)
    assert closed.contains(0.0) and closed.contains(1.0)
    half = IntervalDomain(0, 1, lo_open=True, hi_open=False)
    assert not half.contains(0.0) and half.contains(1.0)
    assert positive_reals().starts_at_zero
    assert not open_interval(0.5, 2).starts_at_zero


def test_interval_rejects_empty_or_nan():
    with pytest.raises(ValueError):
        IntervalDomain(2, 1)
    with pytest.raises(ValueError):
        IntervalDomain(math.nan, 1)


def test_shuffle_merge_interleaves():
    dom = positive_reals()
    s1 = make_weighted_sample([1, 2], [1, 0], dom)
    s2 = make_weighted_sample([1, 2], [0, 1], dom)
    merged = shuffle_merge(s1, s2)
    assert merged.entries == (1.0, 1.0, 2.0, 2.0)
    assert merged.weights == (1.0, 0.0, 0.0, 1.0)


def test_shuffle_merge_single_entry():
    dom = positive_reals()
    merged = shuffle_merge(
        make_weighted_sample([5], [2], dom), make_weighted_sample([5], [3], dom)
    )
    assert merged.entries == (5.0, 5.0)
    assert merged.weights == (2.0, 3.0)


def test_shuffle_merge_rejects_mismatched_entries():
    dom = positive_reals()
    with pytest.raises(MismatchedEntries):
        shuffle_merge(
            make_weighted_sample([1, 2], [1, 1], dom),
            make_weighted_sample([1, 3], [1, 1], dom),
        )


def test_eliminate_zero_weights():
    dom = positive_reals()
    s = make_weighted_sample([1, 2, 3], [1, 0, 2], dom)
    reduced = eliminate_zero_weights(s)
    assert reduced.entries == (1.0, 3.0)
    assert reduced.weights == (1.0, 2.0)
    untouched = eliminate_zero_weights(make_weighted_sample([4], [1], dom))
    assert untouched.entries == (4.0,)
    dropped = eliminate_zero_weights(make_weighted_sample([1, 2], [0, 5], dom))
    assert dropped.entries == (2.0,)
    assert dropped.weights == (5.0,)


def test_mean_kind_labels_round_trip():
    for kind in MeanKind:
        assert MeanKind.from_label(kind.value) is kind
    with pytest.raises(ValueError):
        MeanKind.from_label("sideways")


def test_probe_points_stay_interior():
    for dom in (positive_reals(), all_reals(), open_interval(0, 2), open_interval(-3, -1)):
        pts = probe_points(dom, 17)
        assert len(pts) == 17
        assert all(dom.contains(p) for p in pts)
        assert all(a < b for a, b in zip(pts, pts[1:]))


def test_scaled_sample_revalidates():
    dom = open_interval(0, 2)
    s = make_weighted_sample([0.5, 1.0], [1, 1], dom)
    assert s.scaled(0.5).entries == (0.25, 0.5)
    with pytest.raises(EntryOutOfDomain):
        s.scaled(3.0)
