"""Log-lift profiles and pooled histograms of their per-symbol extremes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .distributions import JointDistribution
from .errors import EmptyInput, ValidationError

DEFAULT_N_BINS = 150


@dataclass(frozen=True, eq=False)
class LiftProfile:
    """Log-lift matrix ``log_lift[s, x]`` with column minima ``nu`` and maxima ``xi``.

    Zero cells of the joint give ``-inf`` log-lifts; they are kept as is.
    """

    log_lift: np.ndarray
    nu: np.ndarray
    xi: np.ndarray

    @property
    def lift(self) -> np.ndarray:
        return np.exp(self.log_lift)


def log_lift_matrix(probs: np.ndarray) -> np.ndarray:
    """``log(P(s, x) / (P(s) P(x)))`` for a raw nonnegative matrix."""
    probs = np.asarray(probs, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(probs / np.outer(probs.sum(axis=1), probs.sum(axis=0)))


def lift_profile(j: JointDistribution) -> LiftProfile:
    with np.errstate(divide="ignore"):
        ll = np.log(j.probs / np.outer(j.p_s, j.p_x))
    ll.setflags(write=False)
    nu = ll.min(axis=0)
    xi = ll.max(axis=0)
    return LiftProfile(ll, nu, xi)


@dataclass(frozen=True, eq=False)
class HistogramSummary:
    """Pooled pmf of nu and xi values over shared bins.

    ``bin_edges`` has ``n_bins + 1`` entries. Both density vectors have
    ``n_bins + 1`` entries: index 0 is an underflow bin for ``-inf`` values,
    index ``k >= 1`` covers ``[bin_edges[k-1], bin_edges[k])`` (the last bin
    is closed).
    """

    bin_edges: np.ndarray
    nu_density: np.ndarray
    xi_density: np.ndarray
    support_nu: tuple[float, float]
    support_xi: tuple[float, float]
    n_profiles: int

    def rows(self):
        """Yield ``(bin_left, bin_right, nu_density, xi_density)`` including the underflow row."""
        yield (-np.inf, self.bin_edges[0], self.nu_density[0], self.xi_density[0])
        for k in range(len(self.bin_edges) - 1):
            yield (self.bin_edges[k], self.bin_edges[k + 1], self.nu_density[k + 1], self.xi_density[k + 1])


def _pmf(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    finite = values[np.isfinite(values)]
    counts, _ = np.histogram(finite, bins=edges)
    out = np.concatenate([[values.size - finite.size], counts]).astype(float)
    return out / values.size


def _support(values: np.ndarray) -> tuple[float, float]:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return (-np.inf, -np.inf)
    return (float(finite.min()), float(finite.max()))


def histogram_from_extremes(nu: np.ndarray, xi: np.ndarray, n_bins: int = DEFAULT_N_BINS,
                            n_profiles: int = 1) -> HistogramSummary:
    """Histogram pooled ``nu``/``xi`` arrays directly (used by the sweep harness)."""
    if n_bins < 2:
        raise ValidationError("n_bins must be >= 2")
    nu = np.asarray(nu, dtype=float).ravel()
    xi = np.asarray(xi, dtype=float).ravel()
    if nu.size == 0 or xi.size == 0:
        raise EmptyInput("no lift values to histogram")
    pooled = np.concatenate([nu, xi])
    pooled = pooled[np.isfinite(pooled)]
    lo, hi = float(pooled.min()), float(pooled.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, n_bins + 1)
    return HistogramSummary(edges, _pmf(nu, edges), _pmf(xi, edges), _support(nu), _support(xi), n_profiles)


def lift_histograms(profiles: Iterable[LiftProfile], n_bins: int = DEFAULT_N_BINS) -> HistogramSummary:
    profiles = list(profiles)
    if not profiles:
        raise EmptyInput("at least one profile is required")
    nu = np.concatenate([p.nu for p in profiles])
    xi = np.concatenate([p.xi for p in profiles])
    return histogram_from_extremes(nu, xi, n_bins, len(profiles))
