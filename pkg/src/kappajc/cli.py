"""Command-line front end.

Exit codes: 0 success, 1 bad input or usage, 2 a scientific check failed,
3 numeric or I/O failure. Every command writes CSV (``%.16e``) and/or JSON
(sorted keys, no timestamps) into ``--out``, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .audit import run_audit
from .config import RunConfig
from .dynamics import (
    InitialState,
    collapse_revival_metrics,
    default_time_grid,
    delta_series,
    plateau_metrics,
    simulate,
)
from .errors import KappaJCError, NumericFailure, ValidationError
from .models import build_kappa
from .spectra import FIG1_COLUMNS, fig1_data, numeric_vs_closed
from .symmetry import audit_symmetries

EXIT_OK, EXIT_USAGE, EXIT_SCIENCE, EXIT_NUMERIC = 0, 1, 2, 3
FLOAT_FMT = "%.16e"
SPECTRUM_N_MAX = 60
FIG2_COLUMNS = ("t", "Sz_eps", "Lz_eps", "Jz_eps", "Sz_0", "Lz_0", "Jz_0", "dSz", "dLz", "dJz")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="INI file; flags override its values")
    common.add_argument("--epsilon", type=float)
    scale = common.add_mutually_exclusive_group()
    scale.add_argument("--xi", type=float, help="relativistic parameter hbar*omega/mc^2")
    scale.add_argument("--omega", type=float)
    common.add_argument("--nmax", dest="n_max", type=int)
    common.add_argument("--margin", type=int)
    common.add_argument("--branch", choices=("jc", "ajc"))
    common.add_argument("--s", type=int, choices=(1, -1))
    common.add_argument("--convention", choices=("consistent", "printed"))
    common.add_argument("--method", choices=("numeric", "closed", "series"))
    common.add_argument("--out", type=str)
    common.add_argument("--seed", type=int)

    parser = _Parser(prog="kappajc", description="kappa-deformed JC/AJC models")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="numeric vs closed-form spectrum")
    ev = sub.add_parser("evolve", parents=[common], help="expectation values along a time grid")
    ev.add_argument("--fock", type=int, dest="initial_n", help="start in |n, up> instead of a coherent state")
    ev.add_argument("--mean", type=float, help="mean photon number of the coherent start")
    ev.add_argument("--tmax", type=float, dest="t_max")
    ev.add_argument("--points", type=int, dest="n_points")
    sub.add_parser("fig1", parents=[common], help="level curves against xi")
    f2 = sub.add_parser("fig2", parents=[common], help="coherent-start dynamics, deformed vs undeformed")
    f2.add_argument("--mean", type=float)
    f2.add_argument("--tmax", type=float, dest="t_max")
    f2.add_argument("--points", type=int, dest="n_points")
    sub.add_parser("symmetry", parents=[common], help="P/T rewrite verdicts")
    au = sub.add_parser("audit", parents=[common], help="closed-form vs numeric consistency report")
    au.add_argument("--mean", type=float)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_ini(args.config) if args.config else RunConfig()
    overrides = {
        k: getattr(args, k, None)
        for k in ("epsilon", "xi", "omega", "n_max", "margin", "branch", "s", "convention", "method", "out", "seed", "mean", "t_max", "n_points")
    }
    if getattr(args, "initial_n", None) is not None:
        overrides.update(initial_kind="fock", initial_n=args.initial_n)
    data = cfg.to_dict()
    if overrides["xi"] is not None:
        data["omega"] = None
    elif overrides["omega"] is not None:
        data["xi"] = None
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(data)


def _json_default(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _clean(obj):
    """Replace non-finite floats so the output is strict JSON."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path: Path, data: dict) -> None:
    text = json.dumps(_clean(json.loads(json.dumps(data, default=_json_default))), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")


def write_csv(path: Path, columns, table: np.ndarray) -> None:
    np.savetxt(path, np.asarray(table, dtype=float), fmt=FLOAT_FMT, delimiter=",", header=",".join(columns), comments="")


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _time_grid(cfg: RunConfig, params, initial: InitialState) -> np.ndarray:
    grid = default_time_grid(params, initial)
    t_max = cfg.t_max if cfg.t_max is not None else float(grid[-1])
    n_points = cfg.n_points if cfg.n_points is not None else grid.size
    return np.linspace(0.0, t_max, n_points)


def cmd_spectrum(cfg: RunConfig) -> int:
    params = cfg.params()
    n_max = cfg.n_max or SPECTRUM_N_MAX
    report = numeric_vs_closed(build_kappa(params, n_max), params, cfg.margin)
    out = _out_dir(cfg)
    table = [
        (r.n, r.sign, r.E_closed, r.E_numeric.real, r.E_numeric.imag, r.abs_err, float(r.flagged)) for r in report.rows
    ]
    write_csv(out / "spectrum.csv", ("n", "sign", "E_closed", "E_numeric_re", "E_numeric_im", "abs_err", "flagged"), table)
    write_json(out / "spectrum.json", {"config": cfg.to_dict(), "n_max": n_max, "summary": report.summary()})
    s = report.summary()
    print(f"spectrum: max interior error {s['max_interior_error']:.3e} (tol {s['tol']:.3e}), {s['n_flagged']} flagged")
    return EXIT_OK if report.passed else EXIT_SCIENCE


def cmd_evolve(cfg: RunConfig) -> int:
    params, initial = cfg.params(), cfg.initial()
    t = _time_grid(cfg, params, initial)
    ts = simulate(params, initial, t, cfg.method, cfg.n_max)
    out = _out_dir(cfg)
    write_csv(out / "evolve.csv", ("t", "Sz", "Lz", "Jz"), np.column_stack([ts.t, ts.Sz, ts.Lz, ts.Jz]))
    write_json(out / "evolve.json", {"config": cfg.to_dict(), "meta": ts.meta})
    print(f"evolve: {ts.t.size} points, method {cfg.method}")
    return EXIT_OK


def cmd_fig1(cfg: RunConfig) -> int:
    params = cfg.params()
    data = fig1_data(params)
    out = _out_dir(cfg)
    write_csv(out / "fig1.csv", FIG1_COLUMNS, data)
    write_json(out / "fig1.json", {"config": cfg.to_dict(), "columns": list(FIG1_COLUMNS), "rows": int(data.shape[0])})
    print(f"fig1: {data.shape[0]} rows")
    return EXIT_OK


def cmd_fig2(cfg: RunConfig) -> int:
    params = cfg.params()
    initial = InitialState.coherent(cfg.mean)
    t = _time_grid(cfg, params, initial)
    run = simulate(params, initial, t, cfg.method, cfg.n_max)
    ref = simulate(params.with_(epsilon=0.0), initial, t, cfg.method, cfg.n_max)
    d = delta_series(run, ref)
    out = _out_dir(cfg)
    write_csv(
        out / "fig2.csv",
        FIG2_COLUMNS,
        np.column_stack([t, run.Sz, run.Lz, run.Jz, ref.Sz, ref.Lz, ref.Jz, d.Sz, d.Lz, d.Jz]),
    )
    meta = {
        "config": cfg.to_dict(),
        "columns": list(FIG2_COLUMNS),
        "deformed": run.meta,
        "reference": ref.meta,
        "dJz": plateau_metrics(d.Jz, t),
    }
    if params.branch == "jc":
        meta["collapse_revival_reference"] = collapse_revival_metrics(ref, params.with_(epsilon=0.0), cfg.mean)
    write_json(out / "fig2.json", meta)
    print(f"fig2: dJz late mean {meta['dJz']['late_mean']:.6e}")
    return EXIT_OK


def cmd_symmetry(cfg: RunConfig, rules=None) -> int:
    report = audit_symmetries(cfg.params(), rules=rules)
    out = _out_dir(cfg)
    write_json(out / "symmetry.json", {"config": cfg.to_dict(), **report.to_dict()})
    print("symmetry: " + ", ".join(f"{k}={v}" for k, v in report.verdicts.items()))
    return EXIT_OK if report.as_expected else EXIT_SCIENCE


def cmd_audit(cfg: RunConfig, rules=None) -> int:
    n_max = cfg.n_max or 40
    report = run_audit(cfg.params(), n_max=n_max, margin=cfg.margin, mean=cfg.mean, rules=rules, seed=cfg.seed)
    out = _out_dir(cfg)
    write_json(out / "audit.json", {"config": cfg.to_dict(), **report})
    ident = report["identity_coefficient"]
    print(
        f"audit: identity coefficient fit {ident['least_squares_in_units']} mc^2 eps xi, "
        f"[h,Jz] overlap {report['commutator_h_Jz']['pattern_overlap']:.6f}"
    )
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "symmetry": cmd_symmetry,
    "audit": cmd_audit,
}


def main(argv=None, *, rules=None) -> int:
    """Entry point. ``rules`` replaces the P/T rule table (test hook)."""
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, OSError) as exc:
        print(f"kappajc: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    command = COMMANDS[args.command]
    try:
        if args.command in ("symmetry", "audit"):
            return command(cfg, rules=rules)
        return command(cfg)
    except (NumericFailure, np.linalg.LinAlgError, OSError, ArithmeticError) as exc:
        print(f"kappajc: numeric or I/O failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (KappaJCError, ValueError) as exc:
        print(f"kappajc: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
