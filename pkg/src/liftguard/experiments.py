"""Monte-Carlo privacy-utility sweeps over corpora of random joints.

Every sweep walks draw indices ``0 .. n_draws-1`` and evaluates all budget
points on the same joint before moving on, so comparisons between points
are paired draw by draw. Work is split into contiguous index chunks and
results are reassembled in index order, which keeps every output
independent of the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .distributions import RandomDrawConfig, entropy_symbols, sample_joint
from .errors import ConfigError, EmptyInput, ValidationError
from .lift import DEFAULT_N_BINS, HistogramSummary, histogram_from_extremes, lift_profile
from .measures import DEFAULT_ALPHAS, alpha_tag, parse_alpha, release_report
from .watchdog import ATTAIN_TOL, PrivacyBudget, normalize_scheme, sanitize

MODES = ("eps_l_sweep", "lambda_sweep", "histogram")
CDF_METRICS = ("nmi", "max_xi", "max_abs_nu")


def _grid(value, name: str) -> tuple[float, ...]:
    """Accept a list of numbers or ``{"start", "stop", "step"}`` (stop inclusive)."""
    if value is None:
        return ()
    if isinstance(value, dict):
        try:
            start, stop, step = float(value["start"]), float(value["stop"]), float(value["step"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"{name}: range needs numeric start, stop, step") from None
        if step <= 0:
            raise ConfigError(f"{name}: step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + k * step, 10) for k in range(n))
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a list of numbers") from None


@dataclass(frozen=True)
class BudgetPoint:
    eps_l: float
    eps_u: float
    total_eps: float | None = None
    lam: float | None = None

    @property
    def budget(self) -> PrivacyBudget:
        return PrivacyBudget(self.eps_l, self.eps_u)


@dataclass(frozen=True)
class SweepConfig:
    draw: RandomDrawConfig
    mode: str
    name: str = "sweep"
    eps_u_list: tuple[float, ...] = ()
    eps_l_grid: tuple[float, ...] = ()
    total_eps_list: tuple[float, ...] = ()
    lambda_list: tuple[float, ...] = ()
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    scheme: str = "merge"
    n_bins: int = DEFAULT_N_BINS
    full_measures: bool | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        try:
            object.__setattr__(self, "scheme", normalize_scheme(self.scheme))
        except ValidationError as exc:
            raise ConfigError(str(exc)) from None
        if self.n_bins < 2:
            raise ConfigError("n_bins must be >= 2")
        grids = {"eps_u_list": self.eps_u_list, "eps_l_grid": self.eps_l_grid,
                 "total_eps_list": self.total_eps_list, "lambda_list": self.lambda_list}
        for name, grid in grids.items():
            if list(grid) != sorted(grid):
                raise ConfigError(f"{name} must be sorted ascending")
            if any(v < 0 or math.isnan(v) for v in grid):
                raise ConfigError(f"{name} must hold nonnegative values")
        if any(v > 1 for v in self.lambda_list):
            raise ConfigError("lambda values must lie in [0, 1]")
        if self.mode == "eps_l_sweep" and not (self.eps_u_list and self.eps_l_grid):
            raise ConfigError("eps_l_sweep needs non-empty eps_u_list and eps_l_grid")
        if self.mode == "lambda_sweep" and not (self.total_eps_list and self.lambda_list):
            raise ConfigError("lambda_sweep needs non-empty total_eps_list and lambda_list")
        alphas = tuple(sorted({parse_alpha(a) for a in self.alphas}))
        if not alphas or alphas[0] < 1:
            raise ConfigError("alphas must be >= 1")
        object.__setattr__(self, "alphas", alphas)
        if self.full_measures is None:
            object.__setattr__(self, "full_measures", self.mode == "lambda_sweep")

    def points(self) -> list[BudgetPoint]:
        if self.mode == "eps_l_sweep":
            return [BudgetPoint(el, eu) for eu in self.eps_u_list for el in self.eps_l_grid]
        if self.mode == "lambda_sweep":
            out = []
            for total in self.total_eps_list:
                for lam in self.lambda_list:
                    b = PrivacyBudget.from_lambda(total, lam)
                    out.append(BudgetPoint(b.eps_l, b.eps_u, total, lam))
            return out
        return []

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alphas"] = [alpha_tag(a) if math.isinf(a) else a for a in self.alphas]
        for key in ("eps_u_list", "eps_l_grid", "total_eps_list", "lambda_list"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, data: dict, name: str | None = None) -> "SweepConfig":
        if not isinstance(data, dict):
            raise ConfigError("sweep config must be a JSON object")
        known = {"draw", "mode", "name", "eps_u_list", "eps_l_grid", "total_eps_list", "lambda_list",
                 "alphas", "scheme", "n_bins", "full_measures"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        draw = data.get("draw", {})
        if not isinstance(draw, dict):
            raise ConfigError("'draw' must be an object")
        try:
            draw_cfg = RandomDrawConfig(**draw)
        except TypeError as exc:
            raise ConfigError(f"bad draw config: {exc}") from None
        if "mode" not in data:
            raise ConfigError("config needs a 'mode'")
        try:
            alphas = tuple(parse_alpha(a) for a in data.get("alphas", DEFAULT_ALPHAS))
        except (TypeError, ValueError):
            raise ConfigError("alphas must be numbers or 'inf'") from None
        return cls(
            draw=draw_cfg,
            mode=data["mode"],
            name=data.get("name") or name or "sweep",
            eps_u_list=_grid(data.get("eps_u_list"), "eps_u_list"),
            eps_l_grid=_grid(data.get("eps_l_grid"), "eps_l_grid"),
            total_eps_list=_grid(data.get("total_eps_list"), "total_eps_list"),
            lambda_list=_grid(data.get("lambda_list"), "lambda_list"),
            alphas=alphas,
            scheme=data.get("scheme", "merge"),
            n_bins=int(data.get("n_bins", DEFAULT_N_BINS)),
            full_measures=data.get("full_measures"),
        )


@dataclass
class ExperimentRecord:
    draw_id: int
    point: BudgetPoint
    nmi: float
    eps_u_star: float
    eps_l_star: float
    lower_attained: bool
    upper_attained: bool
    max_xi: float
    max_abs_nu: float
    mi_sy: float | None = None
    max_leakage: float | None = None
    sibson: dict[float, float] = field(default_factory=dict)
    arimoto: dict[float, float] = field(default_factory=dict)
    ldp_factor: float | None = None


@dataclass
class DrawResult:
    draw_id: int
    nu: np.ndarray
    xi: np.ndarray
    records: list[ExperimentRecord]


def _fast_record(draw_id, point, j, profile, h_x) -> ExperimentRecord:
    """NMI, achieved bounds and release extremes without building the channel."""
    low = (profile.nu >= -point.eps_l) & (profile.xi <= point.eps_u)
    high = ~low
    if not high.any():
        xi_max, nu_max = float(profile.xi.max()), float(np.abs(profile.nu).max())
        return ExperimentRecord(draw_id, point, 1.0, max(xi_max, 0.0), nu_max, True, True, xi_max, nu_max)
    p_h = j.p_x[high]
    mi = min(max(h_x + float(np.sum(p_h * np.log(p_h / p_h.sum()))), 0.0), h_x)
    ratio = j.probs[:, high].sum(axis=1) / j.p_s / p_h.sum()
    with np.errstate(divide="ignore"):
        r = np.log(ratio)
    eps_u_star = float(max(r.max(), 0.0))
    eps_l_star = float(abs(min(r.min(), 0.0)))
    max_xi, max_abs_nu = eps_u_star, eps_l_star
    if low.any():
        max_xi = max(max_xi, float(profile.xi[low].max()))
        max_abs_nu = max(max_abs_nu, float(np.abs(profile.nu[low]).max()))
    return ExperimentRecord(
        draw_id, point, mi / h_x, eps_u_star, eps_l_star,
        eps_l_star <= point.eps_l + ATTAIN_TOL, eps_u_star <= point.eps_u + ATTAIN_TOL,
        max_xi, max_abs_nu,
    )


def _full_record(draw_id, point, j, profile, cfg: SweepConfig) -> ExperimentRecord:
    rel = sanitize(j, point.budget, cfg.scheme, profile=profile)
    rep = release_report(rel, j, cfg.alphas)
    return ExperimentRecord(
        draw_id, point, rep.nmi_utility, rel.achieved_eps_u_star, rel.achieved_eps_l_star,
        rel.lower_attained, rel.upper_attained, rel.max_xi, rel.max_abs_nu,
        mi_sy=rep.mi_sy, max_leakage=rep.maximal_leakage,
        sibson=dict(rep.sibson_mi), arimoto=dict(rep.arimoto_mi), ldp_factor=rep.ldp_factor,
    )


def evaluate_draw(cfg: SweepConfig, draw_index: int) -> DrawResult:
    j = sample_joint(cfg.draw, draw_index)
    profile = lift_profile(j)
    records = []
    if cfg.mode != "histogram":
        h_x = entropy_symbols(j)
        for point in cfg.points():
            if cfg.full_measures:
                records.append(_full_record(draw_index, point, j, profile, cfg))
            else:
                records.append(_fast_record(draw_index, point, j, profile, h_x))
    return DrawResult(draw_index, profile.nu.copy(), profile.xi.copy(), records)


def _eval_chunk(args) -> list[DrawResult]:
    cfg, start, stop = args
    return [evaluate_draw(cfg, k) for k in range(start, stop)]


def default_workers() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)


def map_draws(cfg: SweepConfig, workers: int = 1) -> list[DrawResult]:
    """Evaluate every draw, returned in draw-index order whatever ``workers`` is."""
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    n = cfg.draw.n_draws
    if workers == 1 or n < 2:
        return _eval_chunk((cfg, 0, n))
    n_chunks = min(n, workers * 4)
    bounds = np.linspace(0, n, n_chunks + 1).astype(int)
    tasks = [(cfg, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(_eval_chunk, tasks))
    return [res for chunk in chunks for res in chunk]


def empirical_cdf(values: Iterable[float]) -> np.ndarray:
    """Right-continuous step CDF as ``(value, fraction)`` rows.

    ``+inf`` values are kept as a terminal point; the last fraction is 1.
    """
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float).ravel()
    if arr.size == 0:
        raise EmptyInput("empirical_cdf needs at least one value")
    if np.isnan(arr).any():
        raise ValidationError("empirical_cdf got NaN")
    uniq, counts = np.unique(arr, return_counts=True)
    frac = np.cumsum(counts) / arr.size
    frac[-1] = 1.0
    return np.column_stack([uniq, frac])


@dataclass
class AggregateResult:
    mode: str
    points: list[BudgetPoint]
    mean_nmi: dict[BudgetPoint, float]
    attainment: dict[BudgetPoint, dict[str, float]]
    cdf_curves: dict[str, dict[BudgetPoint, np.ndarray]]
    histogram: HistogramSummary
    per_draw: list[ExperimentRecord]
    n_draws: int

    def metric(self, point: BudgetPoint, name: str) -> np.ndarray:
        """Per-draw values of one record field at one budget point, in draw order."""
        return np.array([getattr(r, name) for r in self.per_draw if r.point == point], dtype=float)


def aggregate(cfg: SweepConfig, results: Sequence[DrawResult]) -> AggregateResult:
    points = cfg.points()
    per_draw = [rec for res in results for rec in res.records]
    by_point: dict[BudgetPoint, list[ExperimentRecord]] = {p: [] for p in points}
    for rec in per_draw:
        by_point[rec.point].append(rec)
    mean_nmi, attainment = {}, {}
    cdfs: dict[str, dict[BudgetPoint, np.ndarray]] = {m: {} for m in CDF_METRICS} if cfg.mode == "lambda_sweep" else {}
    for p, recs in by_point.items():
        nmi = np.array([r.nmi for r in recs])
        mean_nmi[p] = float(np.mean(nmi))
        attainment[p] = {
            "lower_rate": float(np.mean([r.lower_attained for r in recs])),
            "upper_rate": float(np.mean([r.upper_attained for r in recs])),
        }
        for m in cdfs:
            cdfs[m][p] = empirical_cdf([getattr(r, m) for r in recs])
    hist = histogram_from_extremes(
        np.concatenate([r.nu for r in results]), np.concatenate([r.xi for r in results]),
        cfg.n_bins, len(results),
    )
    return AggregateResult(cfg.mode, points, mean_nmi, attainment, cdfs, hist, per_draw, len(results))


def _run(cfg: SweepConfig, mode: str, workers: int) -> AggregateResult:
    if cfg.mode != mode:
        raise ConfigError(f"config mode is {cfg.mode!r}, expected {mode!r}")
    return aggregate(cfg, map_draws(cfg, workers))


def run_eps_l_sweep(cfg: SweepConfig, workers: int = 1) -> AggregateResult:
    return _run(cfg, "eps_l_sweep", workers)


def run_lambda_sweep(cfg: SweepConfig, workers: int = 1) -> AggregateResult:
    return _run(cfg, "lambda_sweep", workers)


def run_histogram(cfg: SweepConfig, workers: int = 1) -> HistogramSummary:
    return _run(cfg, "histogram", workers).histogram


RUNNERS: dict[str, Callable[[SweepConfig, int], AggregateResult]] = {
    "eps_l_sweep": run_eps_l_sweep,
    "lambda_sweep": run_lambda_sweep,
    "histogram": lambda cfg, workers=1: _run(cfg, "histogram", workers),
}


def run_sweep(cfg: SweepConfig, workers: int = 1) -> AggregateResult:
    return RUNNERS[cfg.mode](cfg, workers)
