"""File formats: joint JSON input, release JSON, report and sweep CSVs.

CSV floats are written with 12 significant digits; infinities as ``inf`` and
``-inf``; booleans as ``true``/``false``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .distributions import JointDistribution
from .errors import DimensionMismatch, ValidationError
from .experiments import AggregateResult, BudgetPoint, ExperimentRecord, SweepConfig
from .lift import HistogramSummary
from .measures import LeakageReport, alpha_tag
from .watchdog import SanitizedRelease


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.12g}"


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_csv(path: Path) -> list[dict[str, str]]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def _json_number(x: float):
    # plain JSON has no infinity
    return fmt(x) if isinstance(x, float) and not math.isfinite(x) else x


def load_joint(path: Path) -> JointDistribution:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DimensionMismatch(f"{path}: not valid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise DimensionMismatch(f"{path}: expected a JSON object with 'probs'")
    return JointDistribution.from_dict(data)


def save_joint(j: JointDistribution, path: Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(j.to_dict(), indent=2) + "\n")
    return path


# -- release ---------------------------------------------------------------

def release_to_dict(rel: SanitizedRelease, j: JointDistribution) -> dict:
    x_lab = j.symbol_labels
    y_lab = rel.joint_sy.symbol_labels
    out_label = {y: y_lab[k] for k, y in enumerate(rel.output_symbols)}
    return {
        "secrets": list(j.secret_labels),
        "symbols": list(x_lab),
        "scheme": rel.scheme,
        "budget": {"eps_l": rel.budget.eps_l, "eps_u": rel.budget.eps_u},
        "partition": {
            "low_risk": [x_lab[x] for x in rel.partition.low_risk],
            "high_risk": [x_lab[x] for x in rel.partition.high_risk],
        },
        "channel": {
            "inputs": list(x_lab),
            "outputs": list(y_lab),
            "triplets": [[x_lab[x], out_label[y], p] for x, y, p in rel.channel.triplets()],
        },
        "released_symbols": list(y_lab),
        "joint_sy": rel.joint_sy.probs.tolist(),
        "p_y": rel.p_y.tolist(),
        "achieved": {
            "eps_u_star": _json_number(rel.achieved_eps_u_star),
            "eps_l_star": _json_number(rel.achieved_eps_l_star),
        },
        "alip_level": {"eps_l": _json_number(rel.alip_eps_l), "eps_u": _json_number(rel.alip_eps_u)},
        "attainment": {"lower_attained": rel.lower_attained, "upper_attained": rel.upper_attained},
    }


def save_release(rel: SanitizedRelease, j: JointDistribution, path: Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(release_to_dict(rel, j), indent=2) + "\n")
    return path


def load_release(path: Path) -> tuple[JointDistribution, tuple[float, float]]:
    """Released joint ``P_{S,Y}`` and its recorded ALIP level ``(eps_l, eps_u)``."""
    try:
        data = json.loads(Path(path).read_text())
        joint = JointDistribution(
            np.array(data["joint_sy"], dtype=float), tuple(data["secrets"]), tuple(data["released_symbols"])
        )
        level = data.get("alip_level") or {
            "eps_l": data["achieved"]["eps_l_star"], "eps_u": data["achieved"]["eps_u_star"]}
        return joint, (float(level["eps_l"]), float(level["eps_u"]))
    except json.JSONDecodeError as exc:
        raise DimensionMismatch(f"{path}: not valid JSON ({exc.msg})") from None
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: malformed release file ({exc})") from None


# -- leakage report rows ------------------------------------------------------

def report_header(alphas: Sequence[float]) -> list[str]:
    return (["draw_id", "eps_l", "eps_u", "lambda", "nmi", "mi_sy", "max_leakage"]
            + [f"sibson_a{alpha_tag(a)}" for a in alphas]
            + [f"arimoto_a{alpha_tag(a)}" for a in alphas]
            + ["ldp_factor", "eps_u_star", "eps_l_star", "lower_attained", "upper_attained"])


def report_row(draw_id, rel: SanitizedRelease, rep: LeakageReport, lam=None) -> list:
    return ([draw_id, rel.budget.eps_l, rel.budget.eps_u, lam, rep.nmi_utility, rep.mi_sy, rep.maximal_leakage]
            + [rep.sibson_mi[a] for a in rep.alphas]
            + [rep.arimoto_mi[a] for a in rep.alphas]
            + [rep.ldp_factor, rel.achieved_eps_u_star, rel.achieved_eps_l_star,
               rel.lower_attained, rel.upper_attained])


def _record_row(rec: ExperimentRecord, alphas, full: bool) -> list:
    p = rec.point
    row = [rec.draw_id, p.eps_l, p.eps_u, p.lam, rec.nmi]
    if full:
        row += [rec.mi_sy, rec.max_leakage]
        row += [rec.sibson[a] for a in alphas] + [rec.arimoto[a] for a in alphas]
        row += [rec.ldp_factor]
    row += [rec.eps_u_star, rec.eps_l_star, rec.lower_attained, rec.upper_attained,
            rec.max_xi, rec.max_abs_nu]
    return row


def per_draw_header(cfg: SweepConfig) -> list[str]:
    if cfg.full_measures:
        return report_header(cfg.alphas) + ["max_xi", "max_abs_nu"]
    return ["draw_id", "eps_l", "eps_u", "lambda", "nmi", "eps_u_star", "eps_l_star",
            "lower_attained", "upper_attained", "max_xi", "max_abs_nu"]


def _point_cols(p: BudgetPoint) -> list:
    return [p.eps_l, p.eps_u, p.total_eps, p.lam]


POINT_HEADER = ["eps_l", "eps_u", "total_eps", "lambda"]


def write_histogram(hist: HistogramSummary, path: Path) -> Path:
    return write_csv(path, ["bin_left", "bin_right", "nu_density", "xi_density"], hist.rows())


# -- sweep output directory -------------------------------------------------------

def write_results(result: AggregateResult, cfg: SweepConfig, out_dir: Path) -> list[Path]:
    """Write the sweep's CSVs and manifest into ``out_dir``; return the files written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = [write_histogram(result.histogram, out_dir / "histogram.csv")]
    if result.mode != "histogram":
        files.append(write_csv(
            out_dir / "per_draw.csv", per_draw_header(cfg),
            (_record_row(r, cfg.alphas, cfg.full_measures) for r in result.per_draw),
        ))
        files.append(write_csv(
            out_dir / "aggregate.csv", POINT_HEADER + ["n_draws", "mean_nmi", "lower_rate", "upper_rate"],
            ([*_point_cols(p), result.n_draws, result.mean_nmi[p],
              result.attainment[p]["lower_rate"], result.attainment[p]["upper_rate"]]
             for p in result.points),
        ))
        for metric, curves in result.cdf_curves.items():
            files.append(write_csv(
                out_dir / f"cdf_{metric}.csv", POINT_HEADER + ["value", "cdf"],
                ([*_point_cols(p), v, f] for p in result.points for v, f in curves[p]),
            ))
    manifest = {
        "name": cfg.name,
        "mode": cfg.mode,
        "seed": cfg.draw.seed,
        "code_version": __version__,
        "config": cfg.to_dict(),
        "files": sorted(p.name for p in files),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    files.append(path)
    return files
