import math

import numpy as np
import pytest

from raypath.services.regimpact import (
    IcpParams,
    NdtParams,
    RegistrationConfig,
    Transform2D,
    best_fit_transform,
    bias_report,
    designated_rays,
    make_experiment,
    report_to_csv,
    run_icp,
    run_ndt_lite,
    run_trial,
    scene_points,
)
from raypath.shared.errors import DegenerateRegistrationError, InvalidArgumentError
from raypath.utils.rng import trial_rng

TRIALS = 100


def test_transform_algebra():
    a = Transform2D(0.3, 1.0, -2.0)
    b = Transform2D(-1.1, 0.5, 0.25)
    points = np.array([[1.0, 2.0], [-3.0, 0.5], [0.0, 0.0]])
    assert np.allclose(a.compose(b).apply(points), a.apply(b.apply(points)))
    assert np.allclose(a.inverse().apply(a.apply(points)), points)
    assert a.apply([1.0, 0.0]) == pytest.approx([1.0 + math.cos(0.3), -2.0 + math.sin(0.3)])


def test_best_fit_recovers_transform(rng):
    truth = Transform2D(0.7, -3.0, 4.5)
    source = rng.uniform(-10, 10, size=(30, 2))
    fit = best_fit_transform(source, truth.apply(source))
    assert (fit.theta, fit.tx, fit.ty) == pytest.approx((0.7, -3.0, 4.5), abs=1e-12)


def test_best_fit_never_reflects():
    source = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0]])
    mirrored = source * np.array([1.0, -1.0])
    fit = best_fit_transform(source, mirrored)
    assert np.linalg.det(fit.rotation) == pytest.approx(1.0)


def test_best_fit_weights():
    source = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]])
    target = source.copy()
    target[3] += 10.0
    fit = best_fit_transform(source, target, np.array([1.0, 1.0, 1.0, 0.0]))
    assert (fit.theta, fit.tx, fit.ty) == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)
    with pytest.raises(DegenerateRegistrationError):
        best_fit_transform(source, target, np.zeros(4))
    with pytest.raises(DegenerateRegistrationError):
        best_fit_transform(source, target[:2])


def test_scene_layout():
    corner, wall = scene_points("corner"), scene_points("wall")
    assert corner.shape == (100, 2) and wall.shape == (60, 2)
    assert np.sum((corner[:, 0] == 4.5) & (corner[:, 1] > 0)) == 30
    block = designated_rays(corner, 0.1)
    assert block.size == 10
    assert np.all(np.diff(corner[block, 1]) == 0.25)
    assert corner[block[0], 1] == 0.125
    with pytest.raises(InvalidArgumentError):
        designated_rays(corner, 0.5)


def test_experiment_draws_do_not_depend_on_gap():
    a = make_experiment(RegistrationConfig(gap=0.05, fraction=0.2), trial_rng(9, 4))
    b = make_experiment(RegistrationConfig(gap=3.0, fraction=0.2, reference="map"), trial_rng(9, 4))
    assert a.truth == b.truth
    assert a.designated == b.designated == 20
    assert len(b.reference) == 120


@pytest.mark.parametrize("algorithm", ["icp", "ndt"])
def test_clean_data_registers_exactly(algorithm):
    cfg = RegistrationConfig(fraction=0.0, gap=0.0, noise=0.0, seed=21)
    for trial in range(50):
        assert run_trial(cfg, algorithm, trial).error < 1e-6


@pytest.mark.parametrize("algorithm", ["icp", "ndt"])
@pytest.mark.parametrize("fraction", [0.05, 0.1, 0.2])
def test_small_gap_bias_is_half_fraction_times_gap(algorithm, fraction):
    for delta in (0.05, 0.1, 0.2):
        cfg = RegistrationConfig(fraction=fraction, gap=delta, seed=3)
        errors = np.array([run_trial(cfg, algorithm, t).error for t in range(TRIALS)])
        assert np.all((errors < 1e-9) | (np.abs(errors - fraction * delta) < 1e-9))
        standard_error = errors.std(ddof=1) / math.sqrt(TRIALS)
        assert abs(errors.mean() - fraction * delta / 2) <= 3 * standard_error


@pytest.mark.parametrize("fraction", [0.05, 0.1, 0.2])
def test_large_gap_bias_is_bounded(fraction):
    for seed in range(3):
        cfg = RegistrationConfig(fraction=fraction, gap=3.0, seed=seed)
        icp_errors = [run_trial(cfg, "icp", t).error for t in range(TRIALS)]
        assert max(icp_errors) <= fraction * cfg.r_max
        ndt_errors = [run_trial(cfg, "ndt", t).error for t in range(TRIALS)]
        assert max(ndt_errors) <= fraction * cfg.voxel_size * math.sqrt(2) / 2


@pytest.mark.parametrize("algorithm", ["icp", "ndt"])
def test_gap_is_irrelevant_without_injection(algorithm):
    def errors(gap):
        cfg = RegistrationConfig(fraction=0.0, gap=gap, noise=0.01, seed=5)
        return [run_trial(cfg, algorithm, t).error for t in range(20)]

    clean = errors(0.0)
    assert errors(0.1) == clean
    assert errors(3.0) == clean


def test_icp_trace_does_not_increase():
    cfg = RegistrationConfig(fraction=0.2, gap=0.1, noise=0.01, seed=8)
    for trial in range(10):
        trace = run_trial(cfg, "icp", trial).trace
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))


def test_registrars_report_degenerate_input():
    current = np.array([[0.0, 0.0], [1.0, 0.0]])
    far_away = current + 100.0
    with pytest.raises(DegenerateRegistrationError):
        run_icp(current, far_away, IcpParams(r_max=0.5))
    with pytest.raises(DegenerateRegistrationError):
        run_ndt_lite(current, far_away, NdtParams(voxel_size=1.0))
    with pytest.raises(DegenerateRegistrationError):
        run_icp(np.empty((0, 2)), current)


def test_params_validation():
    with pytest.raises(InvalidArgumentError):
        IcpParams(r_max=0.0)
    with pytest.raises(InvalidArgumentError):
        NdtParams(iterations=0)
    with pytest.raises(InvalidArgumentError):
        RegistrationConfig(scene="room")
    with pytest.raises(InvalidArgumentError):
        RegistrationConfig(fraction=1.5)


def test_bias_report_rows_and_workers():
    cfg = RegistrationConfig(seed=1)
    rows = bias_report(cfg, [0.1, 0.2], 3)
    assert [(r.delta, r.algorithm, r.reference) for r in rows[:4]] == [
        (0.1, "icp", "scan"),
        (0.1, "icp", "map"),
        (0.1, "ndt", "scan"),
        (0.1, "ndt", "map"),
    ]
    assert len(rows) == 8
    assert bias_report(cfg, [0.1, 0.2], 3, workers=2) == rows
    lines = report_to_csv(rows).splitlines()
    assert lines[0] == "delta,algorithm,reference,mean_bias,std_bias,max_bias,trials"
    assert lines[1].startswith("0.1,icp,scan,") and lines[1].endswith(",3")
    with pytest.raises(InvalidArgumentError):
        bias_report(cfg, [0.1], 0)
