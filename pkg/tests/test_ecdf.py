import math

import numpy as np
import pytest

from raypath.core.ecdf import (
    EmpiricalCdf,
    cdf_from_csv,
    cdf_stats,
    cdf_to_csv,
    eval_cdf,
    eval_cdf_left,
    ks_distance,
    ks_statistic,
    pooled_spatial_cdf,
    reflectance_stats,
    spatial_cdf,
    spatial_cdfs,
    step,
    temporal_cdf,
)
from raypath.core.frames import NO_RETURN, NeighborhoodSpec, RangeImage, RaypathId
from raypath.shared.errors import FormatError, InvalidArgumentError, NoDataError


def test_step():
    assert step(-0.001) == 0
    assert step(0.0) == 1
    assert step(4.2) == 1
    with pytest.raises(InvalidArgumentError):
        step(math.nan)


def test_temporal_cdf_two_surfaces(make_sequence):
    values = [11.2] * 3 + [14.0] * 27
    seq = make_sequence(np.array(values).reshape(30, 1, 1))
    cdf = temporal_cdf(seq, RaypathId(0, 0))
    assert cdf.total_count == 30
    assert eval_cdf(cdf, 11.3) == 0.1
    assert eval_cdf(cdf, 13.99) == 0.1
    assert eval_cdf(cdf, 14.0) == 1.0


def test_temporal_cdf_constant(make_sequence):
    seq = make_sequence(np.full((5, 1, 1), 7.5))
    cdf = temporal_cdf(seq, RaypathId(0, 0))
    assert eval_cdf(cdf, 7.5 - 1e-9) == 0.0
    assert eval_cdf(cdf, 7.5) == 1.0


def test_temporal_cdf_saturates_at_return_fraction(make_sequence):
    values = np.full(50, 9.0)
    values[:10] = NO_RETURN
    cdf = temporal_cdf(make_sequence(values.reshape(50, 1, 1)), RaypathId(0, 0))
    assert cdf.count == 40
    assert eval_cdf(cdf, math.inf) == 0.8
    assert cdf.return_fraction == 0.8


def test_temporal_cdf_all_non_returns(make_sequence):
    cdf = temporal_cdf(make_sequence(np.full((4, 1, 1), NO_RETURN)), RaypathId(0, 0))
    assert cdf.count == 0
    assert eval_cdf(cdf, 1e9) == 0.0
    with pytest.raises(NoDataError):
        cdf_stats(cdf)


def test_temporal_cdf_ray_out_of_bounds(make_sequence):
    with pytest.raises(InvalidArgumentError):
        temporal_cdf(make_sequence(np.ones((2, 3, 3))), RaypathId(3, 0))


def test_spatial_cdf_flat_patch(calibration):
    img = RangeImage(np.full((5, 5), 10.0), calibration)
    cdf = spatial_cdf(img, RaypathId(2, 2), NeighborhoodSpec(2, 2))
    assert cdf.total_count == 25
    assert eval_cdf(cdf, 10.0) == 1.0
    assert eval_cdf(cdf, 9.99) == 0.0


def test_spatial_cdf_two_surfaces(calibration):
    ranges = np.full((5, 5), 14.0)
    ranges.flat[[0, 6, 12, 18, 24]] = 11.0
    cdf = spatial_cdf(RangeImage(ranges, calibration), RaypathId(2, 2), NeighborhoodSpec(2, 2))
    assert eval_cdf(cdf, 12.0) == 0.2


def test_spatial_cdf_counts_non_returns(calibration):
    ranges = np.full((3, 3), 4.0)
    ranges[0, 0] = ranges[2, 1] = NO_RETURN
    cdf = spatial_cdf(RangeImage(ranges, calibration), RaypathId(1, 1), NeighborhoodSpec(1, 1))
    assert cdf.total_count == 9
    assert eval_cdf(cdf, math.inf) == 7 / 9


def test_spatial_cdf_normalizes_by_truncated_size(calibration):
    img = RangeImage(np.full((4, 6), 3.0), calibration)
    cdf = spatial_cdf(img, RaypathId(0, 0), NeighborhoodSpec(1, 1))
    assert cdf.total_count == 6
    assert eval_cdf(cdf, 3.0) == 1.0


def test_single_pixel_neighborhood_matches_temporal_cdf(make_sequence, rng):
    seq = make_sequence(rng.uniform(1, 20, size=(1, 3, 4)))
    ray = RaypathId(1, 2)
    assert spatial_cdf(seq[0], ray, NeighborhoodSpec(0, 0)) == temporal_cdf(seq, ray)


def test_temporal_cdf_ignores_frame_order(make_sequence, rng):
    ranges = rng.uniform(1, 20, size=(12, 3, 4))
    ranges[rng.random(ranges.shape) < 0.25] = NO_RETURN
    ray = RaypathId(2, 1)
    expected = temporal_cdf(make_sequence(ranges), ray)
    for _ in range(5):
        shuffled = temporal_cdf(make_sequence(ranges[rng.permutation(12)]), ray)
        assert shuffled == expected
        assert shuffled.return_fraction == expected.return_fraction


def test_spatial_cdfs_per_frame_and_pooled(make_sequence, rng):
    seq = make_sequence(rng.uniform(1, 20, size=(6, 7, 9)))
    ray, spec = RaypathId(3, 4), NeighborhoodSpec(2, 2)
    cdfs = spatial_cdfs(seq, ray, spec)
    assert len(cdfs) == 6
    assert [c.source.frame for c in cdfs] == list(range(6))
    pooled = pooled_spatial_cdf(seq, ray, spec)
    assert pooled.total_count == 6 * 25
    assert np.array_equal(pooled.samples, np.sort(np.concatenate([c.samples for c in cdfs])))


def test_eval_matches_definition(rng):
    for _ in range(200):
        n = int(rng.integers(1, 2000))
        values = np.round(rng.uniform(0, 50, size=n), int(rng.integers(0, 3)))
        values[rng.random(n) < rng.uniform(0, 0.5)] = NO_RETURN
        cdf = EmpiricalCdf.from_observations(values)
        finite = values[values != NO_RETURN]
        points = np.concatenate([rng.uniform(-5, 55, size=60), rng.choice(values, size=40)])
        for x in points:
            expected = np.count_nonzero(x - finite >= 0) / n
            assert eval_cdf(cdf, float(x)) == expected


def test_return_fraction_is_exact(make_sequence):
    for missing in range(0, 31, 3):
        values = np.full(30, 5.0)
        values[:missing] = NO_RETURN
        cdf = temporal_cdf(make_sequence(values.reshape(30, 1, 1)), RaypathId(0, 0))
        assert eval_cdf(cdf, math.inf) == (30 - missing) / 30


def test_left_limit():
    cdf = EmpiricalCdf(np.array([1.0, 1.0, 2.0]), 4)
    assert eval_cdf_left(cdf, 1.0) == 0.0
    assert eval_cdf(cdf, 1.0) == 0.5
    assert eval_cdf_left(cdf, 2.0) == 0.5


def test_ks_distance():
    a = EmpiricalCdf(np.array([1.0, 2.0, 3.0]), 3)
    assert ks_distance(a, a) == 0.0
    assert ks_statistic(EmpiricalCdf(np.array([1.0]), 1), EmpiricalCdf(np.array([2.0]), 1)) == (1.0, 1.0)
    assert ks_statistic(EmpiricalCdf(np.empty(0), 3), EmpiricalCdf(np.empty(0), 5)) == (0.0, None)


def test_ks_distance_includes_missing_returns():
    full = EmpiricalCdf(np.full(10, 5.0), 10)
    partial = EmpiricalCdf(np.full(7, 5.0), 10)
    assert ks_distance(full, partial) == pytest.approx(0.3)


def test_ks_distance_is_symmetric(rng):
    for _ in range(20):
        a = EmpiricalCdf.from_observations(rng.uniform(0, 10, size=int(rng.integers(1, 50))))
        b = EmpiricalCdf.from_observations(rng.uniform(0, 10, size=int(rng.integers(1, 50))))
        assert ks_distance(a, b) == ks_distance(b, a)
        assert 0.0 <= ks_distance(a, b) <= 1.0


def test_cdf_stats():
    stats = cdf_stats(EmpiricalCdf(np.array([1.0, 3.0]), 4))
    assert stats.count == 2
    assert stats.return_fraction == 0.5
    assert stats.mean == 2.0
    assert stats.std == 1.0
    assert stats.span == 2.0


def test_reflectance_stats(make_sequence):
    ranges = np.full((5, 1, 1), 15.0)
    ranges[4] = NO_RETURN
    reflectance = np.array([179.0, 183.0, 181.0, 180.0, -1.0]).reshape(5, 1, 1)
    stats = reflectance_stats(make_sequence(ranges, reflectance), RaypathId(0, 0))
    assert stats == {"count": 4, "min": 179.0, "max": 183.0, "mean": 180.75}


def test_reflectance_stats_without_sidecar(make_sequence):
    with pytest.raises(NoDataError):
        reflectance_stats(make_sequence(np.ones((2, 1, 1))), RaypathId(0, 0))


def test_csv_text():
    cdf = EmpiricalCdf(np.array([1.0, 1.0, 2.0]), 4)
    assert cdf_to_csv(cdf) == "# total_count=4\nx,F\n1.0,0.0\n1.0,0.5\n2.0,0.5\n2.0,0.75\n"
    assert cdf_from_csv(cdf_to_csv(cdf)) == cdf


def test_csv_writes_plain_floats():
    cdf = EmpiricalCdf.from_observations(np.array([10.0] * 40 + [NO_RETURN] * 10))
    text = cdf_to_csv(cdf)
    assert "np." not in text
    assert text.splitlines()[2:] == ["10.0,0.0", "10.0,0.8"]


def test_csv_keeps_total_count():
    cdf = EmpiricalCdf.from_observations(np.array([10.0] * 40 + [NO_RETURN] * 10))
    parsed = cdf_from_csv(cdf_to_csv(cdf))
    assert parsed.total_count == 50
    assert parsed.count == 40
    assert cdf_stats(parsed) == cdf_stats(cdf)


def test_csv_without_total_count_uses_smallest_denominator():
    parsed = cdf_from_csv("x,F\n10.0,0.0\n10.0,0.8\n")
    assert (parsed.count, parsed.total_count) == (4, 5)


def test_csv_reproduces_step_function(rng):
    values = rng.uniform(0, 30, size=37)
    values[:5] = NO_RETURN
    cdf = EmpiricalCdf.from_observations(values)
    parsed = cdf_from_csv(cdf_to_csv(cdf))
    assert ks_distance(cdf, parsed) == 0.0
    assert parsed.total_count == 37
    assert np.array_equal(parsed.samples, cdf.samples)


def test_csv_of_empty_cdf():
    assert cdf_to_csv(EmpiricalCdf(np.empty(0), 3)) == "# total_count=3\nx,F\n"
    assert cdf_from_csv("x,F\n").count == 0
    assert cdf_from_csv(cdf_to_csv(EmpiricalCdf(np.empty(0), 3))).total_count == 3


@pytest.mark.parametrize(
    "text",
    [
        "",
        "x,G\n1.0,0.0\n1.0,1.0\n",
        "x,F\n1.0,0.0\n",
        "x,F\n1.0,0.0\n1.0,abc\n",
        "x,F\n1.0,0.0\n1.0,1.5\n",
        "x,F\n2.0,0.0\n2.0,0.5\n1.0,0.5\n1.0,1.0\n",
        "# total_count=abc\nx,F\n1.0,0.0\n1.0,1.0\n",
        "# total_count=0\nx,F\n1.0,0.0\n1.0,1.0\n",
        "# total_count=4\nx,F\n1.0,0.0\n1.0,0.3\n",
    ],
)
def test_csv_rejects_malformed(text):
    with pytest.raises(FormatError):
        cdf_from_csv(text)
