"""Finite joint distributions of a secret S and a useful symbol X.

Rows index secrets, columns index symbols. All logarithms are natural.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ConfigError,
    DegenerateDraw,
    DimensionMismatch,
    IndexOutOfRange,
    NegativeEntry,
    SumNotOne,
    ZeroMarginal,
)

SUM_TOL = 1e-12
RENORMALIZE_TOL = 1e-9
MIN_DRAW_MARGINAL = 1e-9
MAX_DRAW_RETRIES = 100

SAMPLING_LAWS = ("uniform", "dirichlet")


def _default_labels(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{k + 1}" for k in range(n))


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Validated pmf ``probs[s, x]`` with strictly positive marginals.

    Build instances through :func:`validate`; direct construction re-checks
    the invariants but never renormalizes.
    """

    probs: np.ndarray
    secret_labels: tuple[str, ...] = ()
    symbol_labels: tuple[str, ...] = ()
    p_s: np.ndarray = field(init=False, repr=False)
    p_x: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 2 or probs.size == 0:
            raise DimensionMismatch("probs must be a non-empty 2-D matrix")
        n_s, n_x = probs.shape
        s_lab = tuple(self.secret_labels) or _default_labels("s", n_s)
        x_lab = tuple(self.symbol_labels) or _default_labels("x", n_x)
        if len(s_lab) != n_s or len(x_lab) != n_x:
            raise DimensionMismatch(
                f"labels ({len(s_lab)}, {len(x_lab)}) do not match matrix shape {probs.shape}"
            )
        if len(set(s_lab)) != n_s or len(set(x_lab)) != n_x:
            raise DimensionMismatch("labels must be duplicate-free")
        if not np.all(np.isfinite(probs)):
            raise NegativeEntry("entries must be finite")
        if np.any(probs < 0):
            raise NegativeEntry(f"negative entry {probs.min()!r}")
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise SumNotOne(f"entries sum to {total!r}")
        p_s = probs.sum(axis=1)
        p_x = probs.sum(axis=0)
        if np.any(p_s <= 0):
            raise ZeroMarginal(f"secret {s_lab[int(np.argmin(p_s))]} has zero mass")
        if np.any(p_x <= 0):
            raise ZeroMarginal(f"symbol {x_lab[int(np.argmin(p_x))]} has zero mass")
        for arr in (probs, p_s, p_x):
            arr.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "secret_labels", s_lab)
        object.__setattr__(self, "symbol_labels", x_lab)
        object.__setattr__(self, "p_s", p_s)
        object.__setattr__(self, "p_x", p_x)

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape

    @property
    def n_secrets(self) -> int:
        return self.probs.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.probs.shape[1]

    def to_dict(self) -> dict:
        return {
            "secrets": list(self.secret_labels),
            "symbols": list(self.symbol_labels),
            "probs": self.probs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "JointDistribution":
        try:
            raw = data["probs"]
        except (KeyError, TypeError):
            raise DimensionMismatch("joint JSON needs a 'probs' matrix") from None
        return validate(raw, data.get("secrets"), data.get("symbols"))


def validate(
    raw_matrix,
    secret_labels: Sequence[str] | None = None,
    symbol_labels: Sequence[str] | None = None,
) -> JointDistribution:
    """Check a raw matrix and return a :class:`JointDistribution`.

    A total within ``1e-9`` of one is renormalized exactly; anything further
    off raises :class:`SumNotOne`.
    """
    try:
        probs = np.array(raw_matrix, dtype=float)
    except (TypeError, ValueError):
        raise DimensionMismatch("matrix must be rectangular and numeric") from None
    if probs.ndim != 2 or probs.size == 0:
        raise DimensionMismatch("matrix must be non-empty and rectangular")
    if not np.all(np.isfinite(probs)):
        raise NegativeEntry("entries must be finite")
    if np.any(probs < 0):
        raise NegativeEntry(f"negative entry {probs.min()!r}")
    total = probs.sum()
    if abs(total - 1.0) > RENORMALIZE_TOL:
        raise SumNotOne(f"entries sum to {total!r}")
    probs = probs / total
    return JointDistribution(probs, tuple(secret_labels or ()), tuple(symbol_labels or ()))


def product(p_s, p_x) -> JointDistribution:
    """Independent joint ``P_S x P_X``."""
    p_s = np.asarray(p_s, dtype=float)
    p_x = np.asarray(p_x, dtype=float)
    return validate(np.outer(p_s / p_s.sum(), p_x / p_x.sum()))


def marginal_secrets(j: JointDistribution) -> np.ndarray:
    return j.p_s


def marginal_symbols(j: JointDistribution) -> np.ndarray:
    return j.p_x


def posterior_secrets_given_symbol(j: JointDistribution, x: int) -> np.ndarray:
    """``P_{S|X}(. | x)`` for a symbol index ``x``."""
    if not 0 <= x < j.n_symbols:
        raise IndexOutOfRange(f"symbol index {x} outside [0, {j.n_symbols})")
    return j.probs[:, x] / j.p_x[x]


def likelihoods(j: JointDistribution) -> np.ndarray:
    """``P_{X|S}`` as a row-stochastic matrix indexed ``[s, x]``."""
    return j.probs / j.p_s[:, None]


def entropy_symbols(j: JointDistribution) -> float:
    """Shannon entropy ``H(X)`` in nats."""
    p = j.p_x
    return float(-np.sum(p * np.log(p)))


@dataclass(frozen=True)
class RandomDrawConfig:
    """Size and seed of a corpus of random joints.

    ``law`` selects how each joint is drawn: ``"uniform"`` normalizes i.i.d.
    Uniform(0, 1) cells, ``"dirichlet"`` samples the flat Dirichlet on the
    full joint simplex.
    """

    n_secrets: int = 20
    n_symbols: int = 30
    n_draws: int = 10_000
    seed: int = 0
    law: str = "uniform"

    def __post_init__(self):
        if self.n_secrets < 2 or self.n_symbols < 2:
            raise ConfigError("need at least 2 secrets and 2 symbols")
        if self.n_draws < 1:
            raise ConfigError("n_draws must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.law not in SAMPLING_LAWS:
            raise ConfigError(f"unknown sampling law {self.law!r}; expected one of {SAMPLING_LAWS}")


def draw_rng(seed: int, draw_index: int) -> np.random.Generator:
    """Independent generator for one draw, keyed on ``(seed, draw_index)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(draw_index,)))


def sample_joint(cfg: RandomDrawConfig, draw_index: int) -> JointDistribution:
    """Draw joint number ``draw_index`` of the corpus described by ``cfg``.

    The result depends only on ``(cfg, draw_index)``, so draws can be
    generated lazily and in any order.
    """
    if not 0 <= draw_index < cfg.n_draws:
        raise IndexOutOfRange(f"draw_index {draw_index} outside [0, {cfg.n_draws})")
    rng = draw_rng(cfg.seed, draw_index)
    shape = (cfg.n_secrets, cfg.n_symbols)
    for _ in range(MAX_DRAW_RETRIES):
        if cfg.law == "uniform":
            cells = rng.random(shape)
        else:
            cells = rng.standard_exponential(shape)
        probs = cells / cells.sum()
        if probs.sum(axis=1).min() >= MIN_DRAW_MARGINAL and probs.sum(axis=0).min() >= MIN_DRAW_MARGINAL:
            return validate(probs)
    raise DegenerateDraw(f"draw {draw_index}: retry budget of {MAX_DRAW_RETRIES} exhausted")
