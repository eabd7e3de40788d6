"""Smoke tests for the compiled extension: a quick pass over each subsystem."""

import math

import pytest

import microswim as ms


def test_version():
    assert ms.__version__


def test_ephe_hand_case():
    d = ms.ephe_update([[1.0], [3.0]], [1.0, 3.0], 2)
    assert abs(d.mu[0] - 2.5) < 1e-12
    assert abs(d.sigma[0] - math.sqrt(0.75)) < 1e-12


def test_ephe_rejects_bad_rewards():
    with pytest.raises(ValueError):
        ms.ephe_update([[1.0], [2.0]], [1.0, -1.0], 2)


def test_standard_designs():
    d = ms.standard_design(4, True)
    assert abs(d.total_length - 0.170) < 1e-12
    assert abs(d.total_mass - 0.059) < 1e-12
    assert ms.validate_design(d) == []
    with pytest.raises(ValueError):
        ms.standard_design(5, True)


def test_cpg_calibration_and_metrics():
    p = ms.CpgParams.defaults(2)
    tau = ms.calibrate_tau(p, 4.0)
    p.tau = tau
    m = ms.measure_cpg(p)
    assert abs(m.frequency - 4.0) / 4.0 < 5e-3
    assert len(m.intensities) == 2
    assert len(m.phases) == 1


def test_simulation_is_deterministic_and_swims():
    d = ms.design_by_name("ubot4")
    p = ms.CpgParams.defaults(4)
    t1 = ms.simulate(d, p, 6.0, 1e-3, 1)
    t2 = ms.simulate(d, p, 6.0, 1e-3, 1)
    assert t1.marker_x[0] == t2.marker_x[0]
    # forward displacement of the head over the run
    assert t1.marker_x[0][-1] > t1.marker_x[0][0]

    audit = ms.energy_audit(t1, d)
    assert audit.residual_ratio < 0.05  # coarse dt smoke bound


def test_gait_metrics_pipeline():
    d = ms.design_by_name("ubot2")
    p = ms.CpgParams.defaults(2)
    p.tau = ms.calibrate_tau(p, 4.0)
    traj = ms.simulate(d, p, 10.0, 1e-3, 1)
    s = ms.compute_gait_metrics(traj, d, 2.0)
    assert s.metrics.speed > 0.0
    assert abs(s.metrics.frequency - 4.0) < 0.4
    assert 0.0 <= s.metrics.wave_index <= 1.0
    assert len(s.metrics.joint_amplitudes) == 2
    assert len(s.metrics.intersegmental_phases) == 1


def test_strouhal_tools():
    assert ms.strouhal_bcf(0.2, 0.5) == pytest.approx(0.2)
    pts = [ms.SwimPoint(f"p{i}", 0.1 * (i + 1), 0.364 * 0.1 * (i + 1)) for i in range(6)]
    fit = ms.fit_proportional(pts)
    assert fit.slope == pytest.approx(0.364)
    assert fit.r_squared == pytest.approx(1.0)

    two = pts + [ms.SwimPoint(f"q{i}", 0.1 * (i + 1), 0.132 * 0.1 * (i + 1)) for i in range(6)]
    res = ms.regression_cluster(two, 2, 10, 1)
    assert res.slopes[0] == pytest.approx(0.364, rel=1e-6)
    assert res.slopes[1] == pytest.approx(0.132, rel=1e-6)
    sil = ms.silhouette_score(two, res)
    assert sil.mean > 0.5


def test_work_loop_closed_form():
    d = ms.design_by_name("ubot4")
    p = ms.CpgParams.defaults(4)
    traj = ms.simulate(d, p, 10.0, 1e-3, 1)
    w = ms.steady_window(traj, 2.0)
    loop = ms.work_loop(traj, 3, w)
    assert loop.cycles >= 3
    assert loop.classification in (
        ms.ActuatorClass.Motor,
        ms.ActuatorClass.Brake,
        ms.ActuatorClass.VirtualSpring,
        ms.ActuatorClass.VirtualMass,
    )
    power = ms.mean_total_power(traj, w)
    cot = ms.cost_of_transport(abs(power) + 1e-9, 0.05, d.total_mass)
    assert cot.cot_w_net == pytest.approx(cot.cot_net / d.total_mass)


def test_sensitivity_index_and_clamp():
    s = ms.sensitivity_index(0.5, 0.6, 0.2)
    assert s.value == pytest.approx(1.0)
    assert not s.absolute_variant


def test_learning_on_bowl():
    target = [0.8, 1.2]

    def reward(v):
        return math.exp(-sum((a - b) ** 2 for a, b in zip(v, target))) + 1e-6

    init = ms.PolicyDistribution()
    init.mu = [0.4, 1.6]
    init.sigma = [0.3, 0.3]
    cfg = ms.LearnConfig()
    cfg.samples = 10
    cfg.elites = 5
    cfg.max_episodes = 30
    cfg.convergence_threshold = 1e-300
    cfg.seed = 3
    trace = ms.run_learning(reward, cfg, init)
    assert len(trace.episodes) == 30
    for mu, t in zip(trace.final_distribution.mu, target):
        assert abs(mu - t) < 0.05
