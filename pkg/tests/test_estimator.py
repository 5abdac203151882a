import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import chain3, random_spd, tridiag_det
from sice_edat.estimator import (EstimatorConfig, Status, init_theta,
                                 objective_value, run_sice_edat, sice_edat_step)
from sice_edat.linalg import DimensionMismatch, NotPositiveDefinite, spd_inverse
from sice_edat.metrics import support_metrics
from sice_edat.synthetic import make_problem

seeds = st.integers(0, 2**32 - 1)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(lam=0), dict(thr0=0.0), dict(decay=1.0),
                                    dict(decay=0.0), dict(max_iters=0),
                                    dict(rho0=-1.0), dict(rel_tol=-1.0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            EstimatorConfig(**kw)

    def test_default_schedule_ties_rho_to_threshold(self):
        thr0, rho0, growth = EstimatorConfig(lam=0.3, decay=0.8).schedule()
        assert thr0 == 0.3 and rho0 == thr0 and growth == 0.8

    def test_explicit_schedule(self):
        cfg = EstimatorConfig(lam=0.3, thr0=0.1, rho0=0.01, rho_growth=1.0)
        assert cfg.schedule() == (0.1, 0.01, 1.0)


class TestInitTheta:
    def test_identity(self):
        np.testing.assert_allclose(init_theta(np.eye(3), 0.0), np.eye(3), atol=1e-15)

    def test_zero_cov(self):
        np.testing.assert_allclose(init_theta(np.zeros((2, 2)), 0.5),
                                   2 * np.eye(2), atol=1e-15)

    def test_rank_one(self):
        v = np.ones(2)
        expected = np.array([[2.0, -1.0], [-1.0, 2.0]]) / 3
        np.testing.assert_allclose(init_theta(np.outer(v, v), 1.0), expected,
                                   atol=1e-15)

    def test_singular_without_ridge(self):
        with pytest.raises(NotPositiveDefinite):
            init_theta(np.ones((2, 2)), 0.0)


class TestStep:
    def test_zero_residual_is_fixed(self, rng):
        theta = random_spd(rng, 4)
        s_hat = spd_inverse(theta)
        thr = 0.5 * np.abs(theta).min()
        cfg = EstimatorConfig(lam=1.0)
        out = sice_edat_step(theta, s_hat, thr, cfg, 0.0)
        np.testing.assert_allclose(out, theta, rtol=1e-10, atol=1e-12)

    def test_scalar(self):
        out = sice_edat_step([[2.0]], [[1.0]], 0.1, EstimatorConfig(lam=1.0), 0.0)
        # M = 0.5 + 0.1 * (1 - 0.5)
        assert out[0, 0] == pytest.approx(1 / 0.55, rel=1e-14)

    def test_scalar_tikhonov_shrinks(self):
        out = sice_edat_step([[2.0]], [[1.0]], 0.1, EstimatorConfig(lam=1.0), 0.1)
        assert out[0, 0] == pytest.approx(1 / 0.65, rel=1e-14)
        assert out[0, 0] < 1 / 0.55

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            sice_edat_step(np.eye(2), np.eye(3), 0.1, EstimatorConfig(), 0.0)

    def test_failure_names_stage(self):
        # an indefinite S_hat with a full step cannot be rescued by small rho
        cfg = EstimatorConfig(lam=1.0, jitter_base=1e-12)
        with pytest.raises(NotPositiveDefinite) as err:
            sice_edat_step(np.eye(2), -10 * np.eye(2), 1.0, cfg, 1e-6)
        assert err.value.stage == "tikhonov inverse"


class TestObjective:
    def test_identity(self):
        p, lam = 4, 0.3
        assert objective_value(np.eye(p), np.eye(p), lam) == \
            pytest.approx(-p - lam * p, abs=1e-14)

    def test_scalar(self):
        assert objective_value([[2.0]], [[1.0]], 1.0) == \
            pytest.approx(math.log(2) - 4, abs=1e-14)

    def test_chain_determinant(self):
        theta = chain3()
        assert objective_value(theta, spd_inverse(theta), 0.0) == \
            pytest.approx(math.log(tridiag_det(3)) - 3, abs=1e-13)

    def test_outside_cone(self):
        with pytest.raises(NotPositiveDefinite):
            objective_value(-np.eye(2), np.eye(2), 0.1)


class TestRun:
    def test_diagonal_input_stays_diagonal(self):
        offdiag = []
        cfg = EstimatorConfig(lam=0.1, thr0=0.05, decay=0.5, max_iters=20, rho0=0.0)
        res = run_sice_edat(np.eye(5), cfg, callback=lambda rec, th:
                            offdiag.append(np.abs(th - np.diag(np.diag(th))).max()))
        assert res.status is Status.MAX_ITERS and res.iters_run == 20
        assert max(offdiag) == 0.0

    def test_chain_recovery(self):
        prob = make_problem("chain", 50, n=1000, rng=0)
        res = run_sice_edat(prob.s_hat)
        m = support_metrics(res.theta_hat, prob.support)
        assert res.ok and m.tpr == 1.0 and m.fpr == 0.0

    def test_trace_schedule(self):
        cfg = EstimatorConfig(lam=0.2, thr0=0.15, decay=0.7, max_iters=12)
        res = run_sice_edat(make_problem("chain", 20, n=200, rng=3).s_hat, cfg)
        thr = 0.15
        for rec in res.trace:
            assert rec.thr_k == thr
            assert rec.mu_k == rec.thr_k / 0.2
            thr *= 0.7

    def test_result_support_respects_threshold(self):
        cfg = EstimatorConfig(max_iters=30)
        res = run_sice_edat(make_problem("chain", 30, n=300, rng=1).s_hat, cfg)
        off = res.theta_hat[~np.eye(30, dtype=bool)]
        assert np.array_equal(res.theta_hat, res.theta_hat.T)
        assert np.all((off == 0) | (np.abs(off) >= res.trace[-1].thr_k))

    def test_early_stop(self):
        cfg = EstimatorConfig(max_iters=500, rel_tol=1e-6)
        res = run_sice_edat(make_problem("chain", 20, n=400, rng=2).s_hat, cfg)
        assert res.status is Status.CONVERGED
        assert res.iters_run < 500 and res.trace[-1].delta_rel < 1e-6

    def test_failure_keeps_trace(self):
        # diagonal thresholding with a huge threshold zeroes the diagonal
        cfg = EstimatorConfig(lam=0.1, thr0=5.0, decay=0.9, skip_diagonal=False,
                              max_iters=5)
        res = run_sice_edat(np.eye(3), cfg)
        assert res.status is Status.FAILED and "iteration 0" in res.reason
        assert res.trace == []

    def test_singular_start_fails_cleanly(self):
        res = run_sice_edat(np.ones((3, 3)), EstimatorConfig(rho0=0.0))
        assert res.status is Status.FAILED and "initialization" in res.reason

    def test_objective_matches_recomputation(self):
        prob = make_problem("chain", 15, n=100, rng=4)
        cfg = EstimatorConfig(max_iters=10)
        seen = []
        run_sice_edat(prob.s_hat, cfg, callback=lambda r, th: seen.append((r, th)))
        for rec, th in seen:
            assert rec.objective == pytest.approx(
                objective_value(th, prob.s_hat, cfg.lam), rel=1e-10)

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_deterministic(self, seed):
        prob = make_problem("chain", 12, n=30, rng=seed)
        cfg = EstimatorConfig(max_iters=15)
        a, b = run_sice_edat(prob.s_hat, cfg), run_sice_edat(prob.s_hat, cfg)
        assert np.array_equal(a.theta_hat, b.theta_hat)
        assert a.trace == b.trace


def _late_stage_min_diff(prob):
    res = run_sice_edat(prob.s_hat)
    obj = np.array([r.objective for r in res.trace])
    return np.diff(obj[len(obj) // 2 - 1:]).min()


@pytest.mark.slow
def test_late_stage_monotonicity_chain_well_sampled():
    prob = make_problem("chain", 50, n=1000, rng=0)
    assert _late_stage_min_diff(prob) >= -1e-6


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="with n < p the fixed-support iteration "
                   "drifts toward the PD boundary and the rho restoration "
                   "periodically lowers the objective")
def test_late_stage_monotonicity_chain_undersampled():
    prob = make_problem("chain", 100, n=50, rng=0)
    assert _late_stage_min_diff(prob) >= -1e-6
