"""Asymmetric watchdog sanitization.

Symbols whose log-lifts stay inside ``[-eps_l, eps_u]`` for every secret are
published as is; the rest are randomized by an X-invariant channel (complete
merging into one super-symbol, or uniform spreading over the high-risk set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import JointDistribution
from .errors import DimensionMismatch, EmptyHighRiskSet, InvalidBudget, ValidationError
from .lift import LiftProfile, lift_profile

ATTAIN_TOL = 1e-9
SCHEMES = ("merge", "uniform")
_SCHEME_ALIASES = {"merge": "merge", "complete_merge": "merge", "uniform": "uniform"}


def normalize_scheme(scheme: str) -> str:
    try:
        return _SCHEME_ALIASES[scheme]
    except KeyError:
        raise ValidationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}") from None


@dataclass(frozen=True)
class PrivacyBudget:
    eps_l: float
    eps_u: float

    def __post_init__(self):
        for name in ("eps_l", "eps_u"):
            value = getattr(self, name)
            if math.isnan(value) or value < 0:
                raise InvalidBudget(f"budget must be nonnegative ({name}={value!r})")
        object.__setattr__(self, "eps_l", float(self.eps_l))
        object.__setattr__(self, "eps_u", float(self.eps_u))

    @property
    def total(self) -> float:
        return self.eps_l + self.eps_u

    @classmethod
    def from_lambda(cls, total: float, lam: float) -> "PrivacyBudget":
        """Split ``total`` as ``eps_l = lam * total`` and ``eps_u = (1 - lam) * total``."""
        if not 0.0 <= lam <= 1.0:
            raise InvalidBudget(f"lambda must lie in [0, 1], got {lam!r}")
        if total < 0:
            raise InvalidBudget(f"budget must be nonnegative (total={total!r})")
        return cls(lam * total, (1.0 - lam) * total)


@dataclass(frozen=True)
class RiskPartition:
    low_risk: tuple[int, ...]
    high_risk: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.low_risk) + len(self.high_risk)

    def high_mask(self) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        mask[list(self.high_risk)] = True
        return mask


def partition(profile: LiftProfile, budget: PrivacyBudget) -> RiskPartition:
    low = (profile.nu >= -budget.eps_l) & (profile.xi <= budget.eps_u)
    idx = np.arange(low.size)
    return RiskPartition(tuple(int(k) for k in idx[low]), tuple(int(k) for k in idx[~low]))


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic ``probs[x, y]``; outputs share the index space of the inputs."""

    probs: np.ndarray

    @property
    def rows(self) -> range:
        return range(self.probs.shape[0])

    @property
    def cols(self) -> range:
        return range(self.probs.shape[1])

    def support(self) -> np.ndarray:
        """Output indices that receive mass from at least one input."""
        return np.flatnonzero(self.probs.sum(axis=0) > 0)

    def triplets(self) -> list[tuple[int, int, float]]:
        xs, ys = np.nonzero(self.probs)
        return [(int(x), int(y), float(self.probs[x, y])) for x, y in zip(xs, ys)]


def _check_cover(part: RiskPartition, alphabet_size: int):
    if sorted(part.low_risk + part.high_risk) != list(range(alphabet_size)):
        raise DimensionMismatch("partition does not cover the alphabet")


def complete_merge_channel(part: RiskPartition, alphabet_size: int) -> Channel:
    """Identity on the low-risk set; every high-risk symbol goes to the smallest high-risk index."""
    _check_cover(part, alphabet_size)
    probs = np.eye(alphabet_size)
    if part.high_risk:
        star = min(part.high_risk)
        for x in part.high_risk:
            probs[x] = 0.0
            probs[x, star] = 1.0
    return Channel(probs)


def uniform_channel(part: RiskPartition, alphabet_size: int) -> Channel:
    _check_cover(part, alphabet_size)
    if not part.high_risk:
        raise EmptyHighRiskSet("uniform randomization needs a non-empty high-risk set")
    probs = np.eye(alphabet_size)
    high = list(part.high_risk)
    for x in high:
        probs[x] = 0.0
        probs[x, high] = 1.0 / len(high)
    return Channel(probs)


def x_invariant_channel(part: RiskPartition, alphabet_size: int, r_y) -> Channel:
    """Channel whose high-risk rows all equal the distribution ``r_y`` over the high-risk set."""
    _check_cover(part, alphabet_size)
    r_y = np.asarray(r_y, dtype=float)
    if r_y.shape != (len(part.high_risk),) or np.any(r_y < 0) or abs(r_y.sum() - 1) > 1e-12:
        raise ValidationError("r_y must be a distribution over the high-risk set")
    probs = np.eye(alphabet_size)
    high = list(part.high_risk)
    for x in high:
        probs[x] = 0.0
        probs[x, high] = r_y
    return Channel(probs)


def apply_channel(j: JointDistribution, ch: Channel) -> tuple[JointDistribution, np.ndarray]:
    """Push ``P_{S,X}`` through the channel; outputs without mass are dropped."""
    if ch.probs.shape[0] != j.n_symbols:
        raise DimensionMismatch(f"channel has {ch.probs.shape[0]} rows, joint has {j.n_symbols} symbols")
    keep = ch.support()
    joint = j.probs @ ch.probs[:, keep]
    labels = tuple(j.symbol_labels[y] for y in keep) if ch.probs.shape[1] == j.n_symbols else ()
    j_sy = JointDistribution(joint / joint.sum(), j.secret_labels, labels)
    return j_sy, j_sy.p_x


def high_risk_log_ratios(j: JointDistribution, part: RiskPartition) -> np.ndarray:
    """``log(P(X_H | s) / P(X_H))`` for every secret."""
    if not part.high_risk:
        raise EmptyHighRiskSet("achieved bounds are undefined for an empty high-risk set")
    high = list(part.high_risk)
    p_h = j.p_x[high].sum()
    p_h_given_s = j.probs[:, high].sum(axis=1) / j.p_s
    with np.errstate(divide="ignore"):
        return np.log(p_h_given_s / p_h)


def achieved_bounds(j: JointDistribution, part: RiskPartition) -> tuple[float, float]:
    """``(eps_u_star, eps_l_star)``: extreme log-lifts of the merged high-risk set."""
    r = high_risk_log_ratios(j, part)
    return float(max(r.max(), 0.0)), float(abs(min(r.min(), 0.0)))


@dataclass(frozen=True, eq=False)
class SanitizedRelease:
    """Output of :func:`sanitize`.

    ``output_symbols`` maps each released column of ``joint_sy`` back to its
    index in the input alphabet. ``alip_eps_l``/``alip_eps_u`` are the
    extreme log-lifts over the whole released alphabet, i.e. the level at
    which the release actually satisfies asymmetric LIP.
    """

    partition: RiskPartition
    channel: Channel
    joint_sy: JointDistribution
    p_y: np.ndarray
    achieved_eps_u_star: float
    achieved_eps_l_star: float
    budget: PrivacyBudget
    scheme: str
    output_symbols: tuple[int, ...]
    profile: LiftProfile
    release_profile: LiftProfile

    @property
    def lower_attained(self) -> bool:
        return self.achieved_eps_l_star <= self.budget.eps_l + ATTAIN_TOL

    @property
    def upper_attained(self) -> bool:
        return self.achieved_eps_u_star <= self.budget.eps_u + ATTAIN_TOL

    @property
    def alip_eps_u(self) -> float:
        return float(max(self.release_profile.xi.max(), 0.0))

    @property
    def alip_eps_l(self) -> float:
        return float(abs(min(self.release_profile.nu.min(), 0.0)))

    @property
    def max_xi(self) -> float:
        return float(self.release_profile.xi.max())

    @property
    def max_abs_nu(self) -> float:
        return float(np.abs(self.release_profile.nu).max())


def merged_label(j: JointDistribution, part: RiskPartition) -> str:
    return "MERGED(" + ",".join(j.symbol_labels[x] for x in part.high_risk) + ")"


def sanitize(j: JointDistribution, budget: PrivacyBudget, scheme: str = "merge",
             profile: LiftProfile | None = None) -> SanitizedRelease:
    scheme = normalize_scheme(scheme)
    if profile is None:
        profile = lift_profile(j)
    part = partition(profile, budget)
    n = j.n_symbols
    if scheme == "merge" or not part.high_risk:
        ch = complete_merge_channel(part, n)
    else:
        ch = uniform_channel(part, n)
    keep = tuple(int(y) for y in ch.support())
    j_sy, p_y = apply_channel(j, ch)
    if scheme == "merge" and len(part.high_risk) > 1:
        labels = list(j_sy.symbol_labels)
        labels[keep.index(min(part.high_risk))] = merged_label(j, part)
        j_sy = JointDistribution(j_sy.probs, j_sy.secret_labels, tuple(labels))
    release_profile = lift_profile(j_sy)
    if part.high_risk:
        eps_u_star, eps_l_star = achieved_bounds(j, part)
    else:
        eps_u_star = float(max(profile.xi.max(), 0.0))
        eps_l_star = float(abs(min(profile.nu.min(), 0.0)))
    return SanitizedRelease(part, ch, j_sy, p_y, eps_u_star, eps_l_star, budget, scheme, keep,
                            profile, release_profile)
