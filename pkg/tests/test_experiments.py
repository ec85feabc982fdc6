import math

import numpy as np
import pytest

from liftguard import PrivacyBudget, RandomDrawConfig, lift_profile, sample_joint, sanitize
from liftguard.errors import ConfigError, EmptyInput, ValidationError
from liftguard.experiments import (
    BudgetPoint,
    SweepConfig,
    empirical_cdf,
    evaluate_draw,
    map_draws,
    run_eps_l_sweep,
    run_histogram,
    run_lambda_sweep,
    run_sweep,
)
from liftguard.measures import release_report, watchdog_utility


def eps_l_cfg(n_draws=40, seed=3, **kw):
    return SweepConfig(RandomDrawConfig(6, 9, n_draws, seed), "eps_l_sweep",
                       eps_u_list=(0.3, 0.6), eps_l_grid=(0.2, 0.4, 0.8, 1.6, 3.2), **kw)


def lambda_cfg(n_draws=30, seed=4, **kw):
    return SweepConfig(RandomDrawConfig(6, 9, n_draws, seed), "lambda_sweep",
                       total_eps_list=(0.5, 1.0), lambda_list=(0.0, 0.5, 1.0), alphas=(1, 2, "inf"), **kw)


class TestConfig:
    def test_range_grid_inclusive(self):
        cfg = SweepConfig.from_dict({
            "mode": "eps_l_sweep", "eps_u_list": [0.6],
            "eps_l_grid": {"start": 0.4, "stop": 6.0, "step": 0.1},
        })
        assert len(cfg.eps_l_grid) == 57
        assert cfg.eps_l_grid[0] == 0.4 and cfg.eps_l_grid[-1] == 6.0

    @pytest.mark.parametrize("data", [
        {"mode": "bogus"},
        {"mode": "eps_l_sweep", "eps_u_list": [0.6]},
        {"mode": "eps_l_sweep", "eps_u_list": [0.6], "eps_l_grid": [2, 1]},
        {"mode": "lambda_sweep", "total_eps_list": [1.0], "lambda_list": [1.5]},
        {"mode": "lambda_sweep", "total_eps_list": [1.0], "lambda_list": [0.5], "alphas": [0.5]},
        {"mode": "histogram", "typo": 1},
        {"mode": "histogram", "draw": {"n_secrets": 1}},
        {"mode": "histogram", "draw": {"n_secret": 4}},
        {"mode": "histogram", "n_bins": 1},
        {"mode": "histogram", "scheme": "other"},
        {},
    ])
    def test_rejects(self, data):
        with pytest.raises(ConfigError):
            SweepConfig.from_dict(data)

    def test_round_trip(self):
        cfg = lambda_cfg()
        again = SweepConfig.from_dict(cfg.to_dict())
        assert again == cfg
        assert again.alphas[-1] == math.inf

    def test_points_order_and_split(self):
        pts = lambda_cfg().points()
        assert [(p.total_eps, p.lam) for p in pts][:3] == [(0.5, 0.0), (0.5, 0.5), (0.5, 1.0)]
        assert pts[4].eps_l == pytest.approx(0.5) and pts[4].eps_u == pytest.approx(0.5)
        pts = eps_l_cfg().points()
        assert pts[0] == BudgetPoint(0.2, 0.3) and pts[5] == BudgetPoint(0.2, 0.6)

    def test_full_measures_default(self):
        assert lambda_cfg().full_measures and not eps_l_cfg().full_measures


class TestEmpiricalCdf:
    def test_examples(self):
        np.testing.assert_array_equal(empirical_cdf([3, 1, 2, 2]), [[1, 0.25], [2, 0.75], [3, 1.0]])
        np.testing.assert_array_equal(empirical_cdf([5.0]), [[5.0, 1.0]])
        cdf = empirical_cdf([0.0, math.inf, 1.0])
        assert cdf[-1, 0] == math.inf and cdf[-1, 1] == 1.0

    def test_errors(self):
        with pytest.raises(EmptyInput):
            empirical_cdf([])
        with pytest.raises(ValidationError):
            empirical_cdf([1.0, float("nan")])

    def test_monotone(self, rng):
        cdf = empirical_cdf(rng.normal(size=500))
        assert np.all(np.diff(cdf[:, 0]) > 0) and np.all(np.diff(cdf[:, 1]) > 0)
        assert cdf[-1, 1] == 1.0


class TestDrawEvaluation:
    def test_fast_path_matches_full_sanitize(self):
        cfg = eps_l_cfg(n_draws=5)
        for k in range(cfg.draw.n_draws):
            res = evaluate_draw(cfg, k)
            j = sample_joint(cfg.draw, k)
            for rec in res.records:
                rel = sanitize(j, rec.point.budget)
                assert rec.nmi == pytest.approx(watchdog_utility(j, rel.partition)[1], abs=1e-12)
                assert rec.eps_u_star == pytest.approx(rel.achieved_eps_u_star, abs=1e-12)
                assert rec.eps_l_star == pytest.approx(rel.achieved_eps_l_star, abs=1e-12)
                assert rec.lower_attained == rel.lower_attained
                assert rec.upper_attained == rel.upper_attained

    def test_full_record_measures(self):
        cfg = lambda_cfg(n_draws=3)
        res = evaluate_draw(cfg, 1)
        j = sample_joint(cfg.draw, 1)
        for rec in res.records:
            rel = sanitize(j, rec.point.budget)
            rep = release_report(rel, j, cfg.alphas)
            assert rec.mi_sy == pytest.approx(rep.mi_sy, abs=1e-12)
            assert rec.sibson[math.inf] == pytest.approx(rep.sibson_mi[math.inf], abs=1e-12)
            assert rec.max_xi == pytest.approx(rel.max_xi, abs=1e-12)
            assert rec.max_abs_nu == pytest.approx(rel.max_abs_nu, abs=1e-12)

    def test_extremes_recorded(self):
        cfg = eps_l_cfg(n_draws=2)
        res = evaluate_draw(cfg, 0)
        prof = lift_profile(sample_joint(cfg.draw, 0))
        np.testing.assert_array_equal(res.nu, prof.nu)
        np.testing.assert_array_equal(res.xi, prof.xi)


class TestSweeps:
    def test_nmi_monotone_in_eps_l(self):
        res = run_eps_l_sweep(eps_l_cfg())
        for eu in (0.3, 0.6):
            curve = [res.mean_nmi[BudgetPoint(el, eu)] for el in (0.2, 0.4, 0.8, 1.6, 3.2)]
            assert all(a <= b + 1e-15 for a, b in zip(curve, curve[1:]))
        # per draw too, by common random numbers
        for eu in (0.3, 0.6):
            cols = [res.metric(BudgetPoint(el, eu), "nmi") for el in (0.2, 0.4, 0.8, 1.6, 3.2)]
            assert all(np.all(a <= b + 1e-15) for a, b in zip(cols, cols[1:]))

    def test_nmi_monotone_in_eps_u(self):
        res = run_eps_l_sweep(eps_l_cfg())
        a = res.metric(BudgetPoint(0.8, 0.3), "nmi")
        b = res.metric(BudgetPoint(0.8, 0.6), "nmi")
        assert np.all(a <= b + 1e-15)

    def test_product_draws_keep_everything(self, monkeypatch):
        from liftguard import distributions, experiments, product

        monkeypatch.setattr(experiments, "sample_joint",
                            lambda cfg, k: product(np.ones(cfg.n_secrets), np.arange(1, cfg.n_symbols + 1)))
        res = run_eps_l_sweep(eps_l_cfg(n_draws=3))
        assert distributions.sample_joint is not experiments.sample_joint
        for p in res.points:
            assert res.mean_nmi[p] == pytest.approx(1.0)
            assert res.attainment[p] == {"lower_rate": 1.0, "upper_rate": 1.0}

    def test_lambda_boundaries(self):
        res = run_lambda_sweep(lambda_cfg())
        for total in (0.5, 1.0):
            up = BudgetPoint(0.0, total, total, 0.0)
            low = BudgetPoint(total, 0.0, total, 1.0)
            assert up in res.mean_nmi and low in res.mean_nmi
            assert res.attainment[low]["upper_rate"] <= 1.0
            assert set(res.cdf_curves) == {"nmi", "max_xi", "max_abs_nu"}
            for m in res.cdf_curves:
                assert res.cdf_curves[m][up][-1, 1] == 1.0

    def test_worker_count_irrelevant(self):
        cfg = lambda_cfg(n_draws=13)
        one = map_draws(cfg, 1)
        two = map_draws(cfg, 2)
        assert [r.draw_id for r in two] == list(range(13))
        for a, b in zip(one, two):
            assert a.records == b.records
            np.testing.assert_array_equal(a.nu, b.nu)

    def test_histogram_mode(self):
        cfg = SweepConfig(RandomDrawConfig(5, 7, 20, 1), "histogram", n_bins=30)
        h = run_histogram(cfg)
        assert h.n_profiles == 20
        assert h.nu_density.sum() == pytest.approx(1.0) and h.xi_density.sum() == pytest.approx(1.0)
        assert run_sweep(cfg).points == []

    def test_mode_mismatch(self):
        with pytest.raises(ConfigError):
            run_lambda_sweep(eps_l_cfg())

    def test_budget_point_budget(self):
        assert BudgetPoint(0.3, 0.2).budget == PrivacyBudget(0.3, 0.2)
