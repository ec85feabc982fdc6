"""Leakage and utility measures on a joint of secret S and release Y.

Measures take a :class:`JointDistribution` whose columns are release
symbols. ``alpha`` is a float greater than 1, with ``1.0`` and ``math.inf``
accepted as sentinels where a limit exists.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .distributions import JointDistribution, entropy_symbols
from .errors import InvalidAlpha
from .lift import log_lift_matrix
from .watchdog import RiskPartition, SanitizedRelease

log = logging.getLogger(__name__)

DEFAULT_ALPHAS = (1.0, 1.5, 2.0, 5.0, 10.0, math.inf)
BOUND_SLACK = 1e-9


def parse_alpha(value) -> float:
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "oo"):
            return math.inf
        value = float(text)
    value = float(value)
    if math.isnan(value):
        raise InvalidAlpha("alpha must be a number, got nan")
    return value


def alpha_tag(alpha: float) -> str:
    """Column-name suffix for an order: ``1.5`` -> ``"1.5"``, ``inf`` -> ``"inf"``."""
    return "inf" if math.isinf(alpha) else f"{alpha:g}"


def _log_lifts(joint: JointDistribution) -> np.ndarray:
    return log_lift_matrix(joint.probs)


def _weighted_power_log_mean(log_values: np.ndarray, log_weights: np.ndarray, alpha: float) -> np.ndarray:
    """Column-wise ``log (sum_s w_s v_s^alpha)^(1/alpha)`` with the max factored out."""
    top = log_values.max(axis=0)
    with np.errstate(invalid="ignore"):
        shifted = np.exp(alpha * (log_values - top) + log_weights[:, None])
    return top + np.log(shifted.sum(axis=0)) / alpha


def mutual_information(joint: JointDistribution) -> float:
    p = joint.probs
    mask = p > 0
    ll = _log_lifts(joint)
    return float(max(np.sum(p[mask] * ll[mask]), 0.0))


def watchdog_utility(j: JointDistribution, part: RiskPartition) -> tuple[float, float]:
    """``(I(X;Y), I(X;Y)/H(X))`` for the merged watchdog release, in closed form."""
    h_x = entropy_symbols(j)
    if not part.high_risk:
        return h_x, 1.0
    p_h = j.p_x[list(part.high_risk)]
    mi = h_x + float(np.sum(p_h * np.log(p_h / p_h.sum())))
    mi = min(max(mi, 0.0), h_x)
    return mi, mi / h_x


def alpha_lift(joint: JointDistribution, alpha: float) -> np.ndarray:
    """Per-symbol alpha-lift; ``alpha = inf`` gives the column maximum of the lift."""
    alpha = parse_alpha(alpha)
    if not alpha > 1:
        raise InvalidAlpha(f"alpha-lift needs alpha > 1, got {alpha!r}")
    ll = _log_lifts(joint)
    if math.isinf(alpha):
        return np.exp(ll.max(axis=0))
    return np.exp(_weighted_power_log_mean(ll, np.log(joint.p_s), alpha))


def _log_alpha_lift(joint: JointDistribution, alpha: float) -> np.ndarray:
    ll = _log_lifts(joint)
    if math.isinf(alpha):
        return ll.max(axis=0)
    return _weighted_power_log_mean(ll, np.log(joint.p_s), alpha)


def _log_expectation(log_values: np.ndarray, weights: np.ndarray) -> float:
    top = log_values.max()
    return float(top + np.log(np.sum(weights * np.exp(log_values - top))))


def sibson_mi(joint: JointDistribution, alpha: float) -> float:
    alpha = parse_alpha(alpha)
    if alpha < 1:
        raise InvalidAlpha(f"Sibson MI needs alpha >= 1, got {alpha!r}")
    if alpha == 1:
        return mutual_information(joint)
    val = _log_expectation(_log_alpha_lift(joint, alpha), joint.p_x)
    if not math.isinf(alpha):
        val *= alpha / (alpha - 1)
    return max(val, 0.0)


def arimoto_mi(joint: JointDistribution, alpha: float) -> float:
    alpha = parse_alpha(alpha)
    if alpha < 1:
        raise InvalidAlpha(f"Arimoto MI needs alpha >= 1, got {alpha!r}")
    if alpha == 1:
        return mutual_information(joint)
    p = joint.probs
    if math.isinf(alpha):
        return max(float(np.log(p.max(axis=0).sum() / joint.p_s.max())), 0.0)
    with np.errstate(divide="ignore"):
        log_post = np.log(p / joint.p_x)
    zeros = np.zeros(p.shape[0])
    log_norm_post = _weighted_power_log_mean(log_post, zeros, alpha)
    log_norm_prior = _weighted_power_log_mean(np.log(joint.p_s)[:, None], zeros, alpha)[0]
    val = alpha / (alpha - 1) * (_log_expectation(log_norm_post, joint.p_x) - log_norm_prior)
    return max(val, 0.0)


def maximal_leakage(joint: JointDistribution) -> float:
    """``log sum_y max_s P(y|s)``."""
    cond = joint.probs / joint.p_s[:, None]
    return max(float(np.log(cond.max(axis=0).sum())), 0.0)


def ldp_factor(joint: JointDistribution) -> float:
    """Worst log ratio of output likelihoods over secret pairs; ``inf`` on zero/positive pairs."""
    cond = joint.probs / joint.p_s[:, None]
    hi = cond.max(axis=0)
    lo = cond.min(axis=0)
    worst = 0.0
    for h, l in zip(hi, lo):
        if h == 0:
            continue
        if l == 0:
            return math.inf
        worst = max(worst, math.log(h / l))
    return worst


@dataclass
class LeakageReport:
    mi_sy: float
    maximal_leakage: float
    alpha_lift: dict[float, np.ndarray]
    sibson_mi: dict[float, float]
    arimoto_mi: dict[float, float]
    ldp_factor: float
    nmi_utility: float = 1.0
    alphas: tuple[float, ...] = field(default=DEFAULT_ALPHAS)


def leakage_report(joint_sy: JointDistribution, alphas: Iterable = DEFAULT_ALPHAS,
                   nmi: float = 1.0) -> LeakageReport:
    alphas = tuple(sorted({parse_alpha(a) for a in alphas}))
    sib = {a: sibson_mi(joint_sy, a) for a in alphas}
    ari = {a: arimoto_mi(joint_sy, a) for a in alphas}
    lifts = {a: alpha_lift(joint_sy, a) for a in alphas if a > 1}
    for lo, hi in zip(alphas, alphas[1:]):
        if sib[lo] > sib[hi] + BOUND_SLACK:
            log.warning("Sibson MI not monotone in alpha: I_%s=%.12g > I_%s=%.12g", lo, sib[lo], hi, sib[hi])
    return LeakageReport(
        mi_sy=mutual_information(joint_sy),
        maximal_leakage=maximal_leakage(joint_sy),
        alpha_lift=lifts,
        sibson_mi=sib,
        arimoto_mi=ari,
        ldp_factor=ldp_factor(joint_sy),
        nmi_utility=nmi,
        alphas=alphas,
    )


def release_report(release: SanitizedRelease, j: JointDistribution,
                   alphas: Iterable = DEFAULT_ALPHAS) -> LeakageReport:
    _, nmi = watchdog_utility(j, release.partition)
    return leakage_report(release.joint_sy, alphas, nmi)


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    satisfied: bool


def _order_factor(alpha: float) -> float:
    if math.isinf(alpha):
        return 1.0
    if alpha == 1:
        return 1.0
    return alpha / (alpha - 1)


def verify_bounds(report: LeakageReport, achieved: tuple[float, float],
                  alphas: Sequence | None = None) -> list[BoundCheck]:
    """Check the leakage bounds implied by an ALIP level.

    ``achieved`` is ``(eps_l, eps_u)``: the release's log-lifts lie in
    ``[-eps_l, eps_u]``. Violations are returned, not raised.
    """
    eps_l, eps_u = achieved
    alphas = report.alphas if alphas is None else tuple(parse_alpha(a) for a in alphas)
    checks = [
        ("mi <= eps_u", report.mi_sy, eps_u),
        ("max_leakage <= eps_u", report.maximal_leakage, eps_u),
    ]
    for a in alphas:
        tag = alpha_tag(a)
        if a > 1:
            lift_a = report.alpha_lift.get(a)
            if lift_a is not None:
                checks.append((f"log alpha_lift[{tag}] <= eps_u", float(np.log(lift_a.max())), eps_u))
        rhs = _order_factor(a) * eps_u
        checks.append((f"sibson[{tag}] <= a/(a-1) eps_u", report.sibson_mi[a], rhs))
        checks.append((f"arimoto[{tag}] <= a/(a-1) eps_u", report.arimoto_mi[a], rhs))
    checks.append(("ldp <= eps_l + eps_u", report.ldp_factor, eps_l + eps_u))
    return [BoundCheck(name, lhs, rhs, bool(lhs <= rhs + BOUND_SLACK)) for name, lhs, rhs in checks]
