"""Figures rendered from a sweep's CSV outputs.

Every function reads only files in a results directory, so figures can be
regenerated later from the written ``plot_figures.py`` without re-running a
sweep.
"""

from __future__ import annotations

import json
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .export import read_csv  # noqa: E402

FIGURE_RC = {
    "figure.figsize": (7.0, 4.3),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.4,
    "axes.labelsize": 12,
    "legend.fontsize": 10,
    "lines.linewidth": 2.0,
}

AXIS_LABELS = {
    "nmi": "Utility (NMI)",
    "max_xi": r"$\max_y \xi(y)$",
    "max_abs_nu": r"$\max_y |\nu(y)|$",
}


def _f(text: str) -> float:
    return float(text) if text != "" else float("nan")


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_histogram(results_dir: Path, out_path: Path | None = None) -> Path:
    """Pooled pmf of nu(x) and xi(x) per bin; the -inf underflow bin is left out."""
    results_dir = Path(results_dir)
    rows = [r for r in read_csv(results_dir / "histogram.csv") if r["bin_left"] != "-inf"]
    centers = [(_f(r["bin_left"]) + _f(r["bin_right"])) / 2 for r in rows]
    with plt.rc_context(FIGURE_RC):
        fig, ax = plt.subplots()
        ax.plot(centers, [_f(r["nu_density"]) for r in rows], label=r"$\nu(x)=\min_s i(s,x)$")
        ax.plot(centers, [_f(r["xi_density"]) for r in rows], label=r"$\xi(x)=\max_s i(s,x)$")
        ax.set_xlabel("log-lift (nats)")
        ax.set_ylabel("fraction of symbols per bin")
        ax.legend()
    return _save(fig, out_path or results_dir / "fig_histogram.png")


def plot_eps_l_sweep(results_dir: Path, out_path: Path | None = None) -> Path:
    """Mean NMI against eps_l, one curve per eps_u."""
    results_dir = Path(results_dir)
    curves = defaultdict(list)
    for r in read_csv(results_dir / "aggregate.csv"):
        curves[_f(r["eps_u"])].append((_f(r["eps_l"]), _f(r["mean_nmi"])))
    with plt.rc_context(FIGURE_RC):
        fig, ax = plt.subplots()
        for eps_u, pts in sorted(curves.items()):
            pts.sort()
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", markersize=3,
                    label=rf"$\varepsilon_u={eps_u:g}$")
        ax.set_xlabel(r"$\varepsilon_l$")
        ax.set_ylabel("mean NMI")
        ax.set_ylim(0, 1)
        ax.legend()
    return _save(fig, out_path or results_dir / "fig_nmi_staircase.png")


def plot_lambda_sweep(results_dir: Path, out_path: Path | None = None) -> Path:
    """CDF panels of utility and post-randomization leakage, one row per total budget.

    As in the classic presentation the CDF runs along x and the metric along y.
    """
    results_dir = Path(results_dir)
    panels = {}
    for metric in AXIS_LABELS:
        series = defaultdict(list)
        for r in read_csv(results_dir / f"cdf_{metric}.csv"):
            key = (_f(r["total_eps"]), _f(r["lambda"]), _f(r["eps_l"]), _f(r["eps_u"]))
            series[key].append((_f(r["cdf"]), _f(r["value"])))
        panels[metric] = series
    totals = sorted({k[0] for k in panels["nmi"]})
    with plt.rc_context(FIGURE_RC):
        fig, axes = plt.subplots(len(totals), 3, figsize=(15, 4 * len(totals)), squeeze=False)
        for row, total in enumerate(totals):
            for col, metric in enumerate(AXIS_LABELS):
                ax = axes[row][col]
                for key, pts in sorted(panels[metric].items()):
                    if key[0] != total:
                        continue
                    _, lam, eps_l, eps_u = key
                    label = rf"$\lambda={lam:g}$"
                    if metric == "max_abs_nu":
                        label += rf", $\varepsilon_l={eps_l:g}$"
                        ax.axhline(eps_l, linestyle=":", linewidth=1)
                    elif metric == "max_xi":
                        label += rf", $\varepsilon_u={eps_u:g}$"
                        ax.axhline(eps_u, linestyle=":", linewidth=1)
                    ax.step([p[0] for p in pts], [p[1] for p in pts], where="post", label=label)
                ax.set_xlabel("CDF")
                ax.set_ylabel(AXIS_LABELS[metric])
                ax.set_title(rf"$\varepsilon={total:g}$")
                ax.legend(loc="upper left")
    return _save(fig, out_path or results_dir / "fig_lambda_cdfs.png")


PLOTTERS = {
    "histogram": (plot_histogram,),
    "eps_l_sweep": (plot_histogram, plot_eps_l_sweep),
    "lambda_sweep": (plot_histogram, plot_lambda_sweep),
}


def render_figures(results_dir: Path) -> list[Path]:
    """Render every figure that applies to the sweep recorded in ``manifest.json``."""
    results_dir = Path(results_dir)
    mode = json.loads((results_dir / "manifest.json").read_text())["mode"]
    return [fn(results_dir) for fn in PLOTTERS[mode]]


SCRIPT_TEMPLATE = '''\
"""Regenerate the figures of this results directory from its CSV files.

Run from anywhere: python {script_name}
"""
from pathlib import Path

from liftguard.plotting import {functions}

here = Path(__file__).resolve().parent
{calls}
'''


def write_plot_script(results_dir: Path, mode: str) -> Path:
    results_dir = Path(results_dir)
    names = [fn.__name__ for fn in PLOTTERS[mode]]
    path = results_dir / "plot_figures.py"
    path.write_text(SCRIPT_TEMPLATE.format(
        script_name=path.name,
        functions=", ".join(names),
        calls="\n".join(f"{n}(here)" for n in names),
    ))
    return path
