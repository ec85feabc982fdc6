import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import J1, random_joint
from liftguard import (
    PrivacyBudget,
    RandomDrawConfig,
    RiskPartition,
    alpha_lift,
    arimoto_mi,
    complete_merge_channel,
    ldp_factor,
    leakage_report,
    maximal_leakage,
    mutual_information,
    sample_joint,
    sanitize,
    sibson_mi,
    validate,
    verify_bounds,
    watchdog_utility,
)
from liftguard.errors import InvalidAlpha
from liftguard.measures import alpha_tag, parse_alpha, release_report

ALPHAS = (1.0, 1.5, 2.0, 5.0, 10.0, math.inf)


class TestJ1Values:
    def test_mutual_information(self, j1):
        assert mutual_information(j1) == pytest.approx(oracles.mutual_information(J1), abs=1e-14)

    def test_maximal_leakage(self, j1):
        assert maximal_leakage(j1) == pytest.approx(math.log(0.625 + 1 / 3 + 5 / 12), abs=1e-14)
        assert maximal_leakage(j1) == pytest.approx(0.3185, abs=5e-5)

    def test_sibson_inf(self, j1):
        assert sibson_mi(j1, math.inf) == pytest.approx(math.log(1.375), abs=1e-14)
        assert sibson_mi(j1, math.inf) == pytest.approx(maximal_leakage(j1), abs=1e-14)

    def test_arimoto_inf(self, j1):
        assert arimoto_mi(j1, math.inf) == pytest.approx(math.log(0.7 / 0.6), abs=1e-14)

    def test_alpha_lift_inf(self, j1):
        np.testing.assert_allclose(alpha_lift(j1, math.inf), [1.5625, 10 / 9, 25 / 18], atol=1e-14)

    def test_ldp_after_merge(self, j1):
        rel = sanitize(j1, PrivacyBudget(0.5, 0.2))
        assert ldp_factor(rel.joint_sy) == pytest.approx(math.log(4 / 3), abs=1e-14)
        assert ldp_factor(rel.joint_sy) == pytest.approx(0.2877, abs=5e-5)

    def test_watchdog_utility(self, j1):
        part = RiskPartition((1,), (0, 2))
        mi, nmi = watchdog_utility(j1, part)
        ch = complete_merge_channel(part, 3).probs.tolist()
        assert mi == pytest.approx(oracles.coupling_mi(j1.p_x.tolist(), ch), abs=1e-14)
        assert mi == pytest.approx(0.61086, abs=5e-6)
        assert nmi == pytest.approx(0.5610, abs=5e-5)

    def test_utility_bounds(self, j1):
        assert watchdog_utility(j1, RiskPartition((0, 1, 2), ())) == pytest.approx((j1.p_x @ -np.log(j1.p_x), 1.0))
        assert watchdog_utility(j1, RiskPartition((), (0, 1, 2))) == (0.0, 0.0)


class TestEdgeCases:
    def test_perfect_correlation(self):
        j = validate([[0.5, 0.0], [0.0, 0.5]])
        assert mutual_information(j) == pytest.approx(math.log(2), abs=1e-14)
        assert maximal_leakage(j) == pytest.approx(math.log(2), abs=1e-14)
        assert ldp_factor(j) == math.inf
        for a in (1.5, 2.0, math.inf):
            assert sibson_mi(j, a) == pytest.approx(math.log(2), abs=1e-12)
            assert arimoto_mi(j, a) == pytest.approx(math.log(2), abs=1e-12)

    def test_product_leaks_nothing(self, prod):
        rep = leakage_report(prod, ALPHAS)
        assert rep.mi_sy == pytest.approx(0, abs=1e-14)
        assert rep.maximal_leakage == pytest.approx(0, abs=1e-14)
        assert rep.ldp_factor == pytest.approx(0, abs=1e-14)
        for a in ALPHAS:
            assert rep.sibson_mi[a] == pytest.approx(0, abs=1e-12)
            assert rep.arimoto_mi[a] == pytest.approx(0, abs=1e-12)

    def test_alpha_near_one_approaches_mi(self, j1):
        mi = mutual_information(j1)
        assert sibson_mi(j1, 1.0001) == pytest.approx(mi, abs=1e-3)
        assert arimoto_mi(j1, 1.0001) == pytest.approx(mi, abs=1e-3)

    def test_large_alpha_stable(self, rng):
        j = random_joint(rng, 20, 30)
        for a in (200.0, 1e4):
            assert math.isfinite(sibson_mi(j, a)) and math.isfinite(arimoto_mi(j, a))
        assert sibson_mi(j, 1e6) == pytest.approx(sibson_mi(j, math.inf), abs=1e-4)
        assert arimoto_mi(j, 1e6) == pytest.approx(arimoto_mi(j, math.inf), abs=1e-4)

    def test_invalid_alpha(self, j1):
        with pytest.raises(InvalidAlpha):
            alpha_lift(j1, 1.0)
        with pytest.raises(InvalidAlpha):
            sibson_mi(j1, 0.5)
        with pytest.raises(InvalidAlpha):
            arimoto_mi(j1, float("nan"))

    def test_alpha_parsing(self):
        assert parse_alpha("inf") == math.inf
        assert parse_alpha("2.5") == 2.5
        assert alpha_tag(math.inf) == "inf"
        assert alpha_tag(2.0) == "2"
        assert alpha_tag(1.5) == "1.5"


class TestAgainstOracles:
    def test_random_joints(self, rng):
        for _ in range(40):
            j = random_joint(rng, int(rng.integers(2, 6)), int(rng.integers(2, 6)), zero_frac=0.15)
            p = j.probs.tolist()
            assert mutual_information(j) == pytest.approx(oracles.mutual_information(p), abs=1e-12)
            assert maximal_leakage(j) == pytest.approx(oracles.maximal_leakage(p), abs=1e-12)
            assert ldp_factor(j) == pytest.approx(oracles.ldp_factor(p), abs=1e-12)
            for a in ALPHAS:
                assert sibson_mi(j, a) == pytest.approx(oracles.sibson_mi(p, a), abs=1e-12)
                assert arimoto_mi(j, a) == pytest.approx(oracles.arimoto_mi(p, a), abs=1e-12)
                if a > 1:
                    np.testing.assert_allclose(alpha_lift(j, a), oracles.alpha_lift(p, a), atol=1e-12)

    def test_sibson_is_divergence_infimum(self, rng):
        for _ in range(20):
            j = random_joint(rng, 3, 4)
            p = j.probs.tolist()
            for a in (1.5, 2.0, 5.0):
                q_star = oracles.sibson_optimal_q(p, a)
                assert sibson_mi(j, a) == pytest.approx(oracles.sibson_divergence(p, q_star, a), abs=1e-12)
                for _ in range(10):
                    q = rng.random(4)
                    q /= q.sum()
                    assert sibson_mi(j, a) <= oracles.sibson_divergence(p, q.tolist(), a) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32))
def test_order_monotonicity(n_s, n_x, seed):
    j = sample_joint(RandomDrawConfig(n_s, n_x, 1, seed), 0)
    sib = [sibson_mi(j, a) for a in ALPHAS]
    # Arimoto MI carries no such guarantee, only nonnegativity
    ari = [arimoto_mi(j, a) for a in ALPHAS]
    assert all(lo <= hi + 1e-10 for lo, hi in zip(sib, sib[1:]))
    assert min(ari) >= 0
    assert mutual_information(j) >= 0 and maximal_leakage(j) >= 0
    assert sib[0] <= sib[-1] + 1e-10


class TestVerifyBounds:
    def test_watchdog_releases_satisfy_bounds(self, rng):
        for _ in range(30):
            j = random_joint(rng, 6, 10)
            for scheme in ("merge", "uniform"):
                rel = sanitize(j, PrivacyBudget(0.6, 0.3), scheme)
                checks = verify_bounds(release_report(rel, j), (rel.alip_eps_l, rel.alip_eps_u))
                assert all(c.satisfied for c in checks), [c for c in checks if not c.satisfied]

    def test_release_level_exceeds_merged_level(self, j1):
        # low-risk x2 has a log-lift above the merged symbol's
        rel = sanitize(j1, PrivacyBudget(0.5, 0.2))
        assert rel.alip_eps_u > rel.achieved_eps_u_star
        assert rel.alip_eps_u == pytest.approx(math.log(10 / 9), abs=1e-14)

    def test_violation_reported(self, j1):
        checks = verify_bounds(leakage_report(j1), (0.01, 0.01))
        bad = {c.name for c in checks if not c.satisfied}
        assert "mi <= eps_u" in bad and "ldp <= eps_l + eps_u" in bad

    def test_check_names(self, prod):
        names = [c.name for c in verify_bounds(leakage_report(prod, (1, 2, math.inf)), (0.0, 0.0))]
        assert "sibson[2] <= a/(a-1) eps_u" in names
        assert "log alpha_lift[inf] <= eps_u" in names


def test_non_monotone_warning_absent_for_valid_input(j1, caplog):
    with caplog.at_level(logging.WARNING, logger="liftguard.measures"):
        leakage_report(j1, ALPHAS)
    assert not caplog.records
