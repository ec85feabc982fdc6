"""``liftguard`` command line.

Exit codes: 0 success, 1 a privacy bound was violated, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .distributions import RandomDrawConfig, sample_joint
from .errors import ConfigError, ValidationError
from .experiments import SweepConfig, default_workers, run_sweep
from .export import report_header, report_row, save_release, write_csv, write_results, load_joint, load_release
from .measures import DEFAULT_ALPHAS, leakage_report, parse_alpha, release_report, verify_bounds
from .watchdog import PrivacyBudget, sanitize

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
OUT_ENV = "LIFTGUARD_OUT"


@dataclass
class CliConfig:
    command: str
    input_path: Path | None = None
    config_path: Path | None = None
    output_dir: Path = Path("results")
    seed: int | None = None
    workers: int = 1
    overrides: dict = field(default_factory=dict)


def _parse_alphas(text: str | None):
    if text is None:
        return DEFAULT_ALPHAS
    try:
        return tuple(parse_alpha(a) for a in text.split(",") if a.strip())
    except ValueError:
        raise ConfigError(f"--alphas: cannot parse {text!r}") from None


def _parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs or ():
        key, sep, raw = pair.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {pair!r} must look like key=value")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _apply_overrides(data: dict, overrides: dict) -> dict:
    for dotted, value in overrides.items():
        node = data
        *parents, leaf = dotted.split(".")
        for key in parents:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {dotted!r} descends into a non-object")
        node[leaf] = value
    return data


def _budget(args) -> PrivacyBudget:
    if args.total_eps is not None or args.lam is not None:
        if args.total_eps is None or args.lam is None:
            raise ConfigError("--total-eps and --lambda go together")
        return PrivacyBudget.from_lambda(args.total_eps, args.lam)
    if args.eps_l is None or args.eps_u is None:
        raise ConfigError("give --eps-l and --eps-u (or --total-eps with --lambda)")
    return PrivacyBudget(args.eps_l, args.eps_u)


def _output_dir(args) -> Path:
    return Path(os.environ.get(OUT_ENV) or args.out)


def cli_config(args) -> CliConfig:
    return CliConfig(
        command=args.command,
        input_path=Path(args.input) if getattr(args, "input", None) else None,
        config_path=Path(args.config) if getattr(args, "config", None) else None,
        output_dir=_output_dir(args),
        seed=getattr(args, "seed", None),
        workers=getattr(args, "workers", None) or default_workers(),
        overrides=_parse_overrides(getattr(args, "set", None)),
    )


# -- commands -------------------------------------------------------------

def cmd_sanitize(cfg: CliConfig, args) -> int:
    if cfg.input_path is None:
        raise ConfigError("sanitize needs an input joint JSON file")
    j = load_joint(cfg.input_path)
    budget = _budget(args)
    alphas = _parse_alphas(args.alphas)
    rel = sanitize(j, budget, args.scheme)
    rep = release_report(rel, j, alphas)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    stem = cfg.input_path.stem
    release_path = save_release(rel, j, cfg.output_dir / f"{stem}.release.json")
    report_path = write_csv(cfg.output_dir / f"{stem}.report.csv", report_header(rep.alphas),
                            [report_row(0, rel, rep)])
    flag = lambda b: "true" if b else "false"  # noqa: E731
    print(f"high_risk={','.join(j.symbol_labels[x] for x in rel.partition.high_risk) or '-'}")
    print(f"eps_u_star={rel.achieved_eps_u_star:.6g} eps_l_star={rel.achieved_eps_l_star:.6g}")
    print(f"upper_attained={flag(rel.upper_attained)} lower_attained={flag(rel.lower_attained)}")
    print(f"wrote {release_path} and {report_path}")
    return EXIT_OK


def _load_sweep_config(cfg: CliConfig, args, mode: str | None = None) -> SweepConfig:
    if cfg.config_path is None:
        raise ConfigError(f"{cfg.command} needs --config")
    try:
        data = json.loads(cfg.config_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{cfg.config_path}: not valid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError("sweep config must be a JSON object")
    data = _apply_overrides(data, cfg.overrides)
    if mode is not None:
        data["mode"] = mode
    if cfg.seed is not None:
        data.setdefault("draw", {})["seed"] = cfg.seed
    if getattr(args, "n_draws", None) is not None:
        data.setdefault("draw", {})["n_draws"] = args.n_draws
    if getattr(args, "scheme_override", None):
        data["scheme"] = args.scheme_override
    if getattr(args, "alphas", None):
        data["alphas"] = [a for a in args.alphas.split(",") if a.strip()]
    return SweepConfig.from_dict(data, name=cfg.config_path.stem)


def _run_into_dir(sweep: SweepConfig, cfg: CliConfig, figures: bool) -> Path:
    """Run a sweep into a scratch directory and move it into place only on success."""
    final = cfg.output_dir / sweep.name
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=f".{sweep.name}.", dir=cfg.output_dir))
    try:
        result = run_sweep(sweep, cfg.workers)
        write_results(result, sweep, scratch)
        from .plotting import render_figures, write_plot_script

        write_plot_script(scratch, sweep.mode)
        if figures:
            render_figures(scratch)
        if final.exists():
            shutil.rmtree(final)
        scratch.rename(final)
    except BaseException:
        shutil.rmtree(scratch, ignore_errors=True)
        raise
    return final


def _summarize(final: Path):
    print(f"results in {final}")
    agg = final / "aggregate.csv"
    if agg.exists():
        lines = agg.read_text().splitlines()
        for line in lines[:12]:
            print("  " + line)
        if len(lines) > 12:
            print(f"  ... ({len(lines) - 1} rows)")


def cmd_sweep(cfg: CliConfig, args) -> int:
    sweep = _load_sweep_config(cfg, args)
    _summarize(_run_into_dir(sweep, cfg, not args.no_figures))
    return EXIT_OK


def cmd_histogram(cfg: CliConfig, args) -> int:
    sweep = _load_sweep_config(cfg, args, mode="histogram")
    final = _run_into_dir(sweep, cfg, not args.no_figures)
    print(f"results in {final}")
    return EXIT_OK


def _print_violations(rows):
    print(f"{'source':<24} {'bound':<34} {'lhs':>14} {'rhs':>14}")
    for source, check in rows:
        print(f"{source:<24} {check.name:<34} {check.lhs:>14.9g} {check.rhs:>14.9g}")


def cmd_verify(cfg: CliConfig, args) -> int:
    alphas = _parse_alphas(args.alphas)
    violations = []
    n_checks = 0
    if args.release:
        joint, level = load_release(Path(args.release))
        checks = verify_bounds(leakage_report(joint, alphas), level, alphas)
        n_checks += len(checks)
        violations += [(Path(args.release).name, c) for c in checks if not c.satisfied]
    else:
        budget = _budget(args)
        if cfg.input_path is not None:
            joints = [(cfg.input_path.name, load_joint(cfg.input_path))]
        else:
            draw = RandomDrawConfig(args.n_secrets, args.n_symbols, args.n_draws,
                                    cfg.seed if cfg.seed is not None else 0, args.law)
            joints = ((f"draw {k}", sample_joint(draw, k)) for k in range(draw.n_draws))
        for source, j in joints:
            rel = sanitize(j, budget, args.scheme)
            rep = release_report(rel, j, alphas)
            checks = verify_bounds(rep, (rel.alip_eps_l, rel.alip_eps_u), alphas)
            n_checks += len(checks)
            violations += [(source, c) for c in checks if not c.satisfied]
    if violations:
        print(f"{len(violations)} of {n_checks} bound checks violated")
        _print_violations(violations)
        return EXIT_VIOLATION
    print(f"all {n_checks} bound checks satisfied")
    return EXIT_OK


COMMANDS = {"sanitize": cmd_sanitize, "sweep": cmd_sweep, "histogram": cmd_histogram, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="liftguard", description="Asymmetric watchdog privacy toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, workers=False):
        sp.add_argument("--out", default="results", help=f"output directory (env {OUT_ENV} overrides)")
        sp.add_argument("--seed", type=int, default=None)
        if workers:
            sp.add_argument("--workers", type=int, default=None, help="worker processes (default: all CPUs)")

    def budget_flags(sp):
        sp.add_argument("--eps-l", type=float, dest="eps_l")
        sp.add_argument("--eps-u", type=float, dest="eps_u")
        sp.add_argument("--total-eps", type=float, dest="total_eps")
        sp.add_argument("--lambda", type=float, dest="lam")
        sp.add_argument("--scheme", choices=["merge", "uniform"], default="merge")
        sp.add_argument("--alphas", help="comma-separated orders, e.g. 1,1.5,2,inf")

    s = sub.add_parser("sanitize", help="sanitize one joint distribution")
    s.add_argument("input", help="joint JSON file")
    budget_flags(s)
    common(s)

    for name, helptext in (("sweep", "run a Monte-Carlo sweep"), ("histogram", "pooled nu/xi histogram")):
        w = sub.add_parser(name, help=helptext)
        w.add_argument("--config", required=True)
        w.add_argument("--n-draws", type=int, dest="n_draws")
        w.add_argument("--scheme", choices=["merge", "uniform"], dest="scheme_override")
        w.add_argument("--alphas")
        w.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        w.add_argument("--no-figures", action="store_true", help="skip rendering PNG figures")
        common(w, workers=True)

    v = sub.add_parser("verify", help="check leakage bounds on releases")
    v.add_argument("input", nargs="?", help="joint JSON file (default: random draws)")
    v.add_argument("--release", help="verify a release JSON as recorded")
    v.add_argument("--n-draws", type=int, default=500, dest="n_draws")
    v.add_argument("--n-secrets", type=int, default=20, dest="n_secrets")
    v.add_argument("--n-symbols", type=int, default=30, dest="n_symbols")
    v.add_argument("--law", choices=["uniform", "dirichlet"], default="uniform")
    budget_flags(v)
    common(v, workers=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = cli_config(args)
        if cfg.workers < 1:
            raise ConfigError("--workers must be >= 1")
        return COMMANDS[cfg.command](cfg, args)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
