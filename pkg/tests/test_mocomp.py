import numpy as np
import pytest

from raypath.core.ecdf import temporal_cdf
from raypath.core.frames import NO_RETURN, NeighborhoodSpec, RaypathId
from raypath.core.mocomp import (
    best_match,
    compensated_temporal_cdf,
    match_trace,
    patch_cost,
    trace_cdf,
    trace_to_csv,
)
from raypath.shared.errors import IncomparablePatchError, InvalidArgumentError, NoMatchError

ROWS, COLS = 16, 32
ANCHOR = RaypathId(8, 10)
SPEC = NeighborhoodSpec(2, 2)


def jittered_sequence(make_sequence, rng, frames=10, radius=2):
    """Shifted views of one random scene plus the same frames without the shift.

    Frame k holds the scene moved by (dp_k, dq_k) with a small per-frame range
    offset, so the anchor's content sits at (i + dp_k, j + dq_k) in frame k.
    """
    base = rng.uniform(5.0, 30.0, size=(ROWS + 2 * radius, COLS))
    shifts = rng.integers(-radius, radius + 1, size=(frames, 2))
    shifts[0] = 0
    offsets = rng.uniform(-0.01, 0.01, size=frames)
    shifted, steady = [], []
    rows = np.arange(ROWS)
    for (dp, dq), offset in zip(shifts, offsets):
        moved = base[rows + radius - dp][:, (np.arange(COLS) - dq) % COLS]
        shifted.append(moved + offset)
        steady.append(base[rows + radius] + offset)
    return make_sequence(np.array(shifted)), make_sequence(np.array(steady)), shifts


def test_recovers_known_shifts(make_sequence):
    for seed in range(100):
        rng = np.random.default_rng(seed)
        seq, steady, shifts = jittered_sequence(make_sequence, rng)
        trace = match_trace(seq, ANCHOR, 2, SPEC)
        assert [(m.dp, m.dq) for m in trace] == [tuple(s) for s in shifts]
        assert compensated_temporal_cdf(seq, ANCHOR, 2, SPEC) == temporal_cdf(steady, ANCHOR)


def test_frame_zero_is_its_own_anchor(make_sequence, rng):
    seq, _, _ = jittered_sequence(make_sequence, rng)
    match = best_match(seq, ANCHOR, 0, 2, SPEC)
    assert (match.k, match.dp, match.dq, match.cost) == (0, 0, 0, 0.0)
    assert match.valid_pairs == 25


def test_ties_prefer_smallest_offset(make_sequence):
    seq = make_sequence(np.full((3, 9, 9), 4.0))
    for k in range(3):
        match = best_match(seq, RaypathId(4, 4), k, 2, NeighborhoodSpec(1, 1))
        assert (match.dp, match.dq, match.cost) == (0, 0, 0.0)


def test_ties_break_row_major_within_ring(make_sequence):
    frame0 = np.full((9, 9), 4.0)
    frame0[4, 4] = 6.0
    frame1 = np.full((9, 9), 4.0)
    frame1[3, 3] = frame1[3, 5] = frame1[5, 5] = 6.0
    seq = make_sequence(np.array([frame0, frame1]))
    match = best_match(seq, RaypathId(4, 4), 1, 1, NeighborhoodSpec(1, 1))
    assert (match.dp, match.dq) == (-1, -1)
    assert match.chebyshev == 1


def test_patch_cost_counts_only_comparable_pairs(make_sequence):
    frame0 = np.full((5, 5), 2.0)
    frame1 = np.full((5, 5), 3.0)
    frame1[1, 1] = NO_RETURN
    seq = make_sequence(np.array([frame0, frame1]))
    cost, pairs = patch_cost(seq, RaypathId(2, 2), RaypathId(2, 2), 1, NeighborhoodSpec(1, 1))
    assert (cost, pairs) == (1.0, 8)
    cost, pairs = patch_cost(seq, RaypathId(0, 2), RaypathId(0, 2), 1, NeighborhoodSpec(1, 1), min_pairs=1)
    assert pairs == 5
    with pytest.raises(IncomparablePatchError):
        patch_cost(seq, RaypathId(0, 2), RaypathId(0, 2), 1, NeighborhoodSpec(1, 1), min_pairs=6)


def test_patch_cost_is_symmetric(make_sequence, rng):
    a, b = rng.uniform(1, 20, size=(2, 9, 12))
    b[rng.random(b.shape) < 0.2] = NO_RETURN
    forward, backward = make_sequence(np.array([a, b])), make_sequence(np.array([b, a]))
    spec = NeighborhoodSpec(1, 2)
    for _ in range(20):
        p = RaypathId(int(rng.integers(0, 9)), int(rng.integers(0, 12)))
        q = RaypathId(int(rng.integers(0, 9)), int(rng.integers(0, 12)))
        cost, pairs = patch_cost(forward, p, q, 1, spec, min_pairs=1)
        assert patch_cost(backward, q, p, 1, spec, min_pairs=1) == (pytest.approx(cost), pairs)


def test_best_match_never_costs_more_than_staying(make_sequence, rng):
    seq = make_sequence(rng.uniform(1, 20, size=(6, ROWS, COLS)))
    for k in range(6):
        match = best_match(seq, ANCHOR, k, 2, SPEC)
        stay, _ = patch_cost(seq, ANCHOR, ANCHOR, k, SPEC)
        assert match.cost <= stay


@pytest.mark.parametrize("shift", [-2, -1, 1, 2])
@pytest.mark.parametrize("anchor", [ANCHOR, RaypathId(8, 0), RaypathId(8, COLS - 1)])
def test_column_rotation_is_recovered(make_sequence, rng, shift, anchor):
    frame = rng.uniform(1, 20, size=(ROWS, COLS))
    seq = make_sequence(np.array([frame, np.roll(frame, shift, axis=1)]))
    match = best_match(seq, anchor, 1, 2, SPEC)
    assert (match.dp, match.dq, match.cost) == (0, shift, 0.0)


def test_patch_cost_bad_frame(make_sequence):
    seq = make_sequence(np.ones((2, 5, 5)))
    with pytest.raises(InvalidArgumentError):
        patch_cost(seq, RaypathId(2, 2), RaypathId(2, 2), 2, NeighborhoodSpec(1, 1))


def test_unmatched_frame_becomes_non_return(make_sequence):
    frames = np.full((4, 7, 7), 5.0)
    frames[2] = NO_RETURN
    seq = make_sequence(frames)
    with pytest.raises(NoMatchError):
        best_match(seq, RaypathId(3, 3), 2, 1, NeighborhoodSpec(1, 1))
    trace = match_trace(seq, RaypathId(3, 3), 1, NeighborhoodSpec(1, 1))
    assert [m.k for m in trace] == [0, 1, 3]
    cdf = trace_cdf(seq, RaypathId(3, 3), trace)
    assert (cdf.count, cdf.total_count) == (3, 4)
    assert str(cdf.source) == "compensated(3,3)"


def test_candidates_stay_on_image_rows(make_sequence, rng):
    seq = make_sequence(rng.uniform(1, 9, size=(3, 6, 8)))
    for k in range(3):
        match = best_match(seq, RaypathId(0, 7), k, 2, NeighborhoodSpec(1, 1), min_pairs=1)
        assert 0 <= match.dp <= 2


def test_negative_radius(make_sequence):
    with pytest.raises(InvalidArgumentError):
        best_match(make_sequence(np.ones((2, 5, 5))), RaypathId(2, 2), 1, -1, NeighborhoodSpec(1, 1))


def test_trace_csv(make_sequence):
    seq = make_sequence(np.full((2, 5, 5), 1.0))
    text = trace_to_csv(match_trace(seq, RaypathId(2, 2), 1, NeighborhoodSpec(1, 1)))
    assert text == "k,dp,dq,J,valid_pairs\n0,0,0,0.0,9\n1,0,0,0.0,9\n"
