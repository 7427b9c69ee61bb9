"""Command line entry point: ``esav run|converge|compare|selftest|presets``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import output
from .config import PRESETS, ConfigError, load_config, parse_scheme_label, validate_steps
from .selftest import run_selftest
from .study import compare_schemes, convergence_study, run_single, spatial_study

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

EPILOG = """\
CONFIG is a TOML file or preset:<name> (see `esav presets`).

Outputs (under --output, default [run] output):
  energy.csv   t,H_modified,H_true,drift
  errors.csv   tau,N,l2_error,linf_error,order_l2,order_linf
  iters.csv    step,iterations,phase   (phase: bootstrap|step)
  compare.csv  scheme,status,l2_error,linf_error,max_drift,max_iterations
  snapshots/   stepNNNNNNNN_cK.txt, or stepNNNNNNNN.f8 + .json header (raw <f8)
  summary.json metadata, diagnostics and CPU seconds
  plot.gp      gnuplot script for the CSV files

Exit status: 0 success, 1 runtime failure, 2 configuration error.
"""

log = logging.getLogger("esav")


def _outdir(cfg, override):
    path = Path(override or cfg.output)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_run(out: Path, res, title):
    cfg = res.config
    traj = res.trajectory
    status = "ok" if res.failure is None else "error"
    if traj is not None:
        output.write_energy(out / "energy.csv", traj)
    output.write_iterations(out / "iters.csv", traj)
    output.write_errors(out / "errors.csv", [res.error] if res.error else [])
    output.write_summary(out / "summary.json", {
        "status": status,
        "diagnostic": res.failure,
        "metadata": cfg.metadata(),
        "cpu_seconds": res.cpu,
        "trajectory": output.trajectory_summary(traj),
        "errors": [output.error_dict(res.error)] if res.error else [],
        "warnings": traj.warnings if traj is not None else [],
    })
    output.write_plot_script(out / "plot.gp", title, energy=traj is not None,
                             errors=res.error is not None, iters=bool(traj and traj.iterations))
    return status


def run_experiment(config_path, output_dir=None) -> int:
    """Run one configuration and write all artifacts; returns the exit status."""
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    out = _outdir(cfg, output_dir)
    sink = output.SnapshotWriter(out / "snapshots", cfg.snapshot_format)
    res = run_single(cfg, snapshot_sink=sink)
    status = _write_run(out, res, f"{cfg.model} {cfg.scheme.label}")
    if status != "ok":
        log.error("run failed: %s", res.failure)
        return EXIT_RUNTIME
    tr = res.trajectory
    msg = f"{cfg.scheme.label}: {tr.steps} steps, max drift {tr.max_drift:.3e}"
    if res.error:
        msg += f", L2 error {res.error.l2:.4e}"
    print(msg)
    return EXIT_OK


def _cmd_run(args):
    return run_experiment(args.config, args.output)


def _cmd_converge(args):
    try:
        cfg = load_config(args.config)
        taus = tuple(args.tau_list or cfg.taus)
        counts = tuple(args.n_list or cfg.study_counts)
        if not taus and not counts:
            raise ConfigError("give --tau-list or --n-list (or [study] taus/counts)")
        validate_steps(cfg, taus)
        study = spatial_study if counts and not args.tau_list else convergence_study
        grid_arg = counts if study is spatial_study else taus
        report = study(cfg, grid_arg)
    except (ConfigError, ValueError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    out = _outdir(cfg, args.output)
    output.write_errors(out / "errors.csv", report.rows)
    output.write_summary(out / "summary.json", {
        "status": "error" if report.failed else "ok",
        "diagnostic": [r.failure for r in report.failed] or None,
        "metadata": report.metadata,
        "study": report.kind,
        "errors": [output.error_dict(r) for r in report.rows],
        "runs": [output.trajectory_summary(r.trajectory) for r in report.runs],
    })
    output.write_plot_script(out / "plot.gp", f"{cfg.model} {cfg.scheme.label} convergence",
                             energy=False, errors=True, error_axis=report.kind)
    print(f"{'tau' if report.kind == 'tau' else 'N':>10} {'L2 error':>12} {'order':>7} "
          f"{'Linf error':>12} {'order':>7}")
    for r in report.rows:
        key = f"{r.tau:10.3e}" if report.kind == "tau" else f"{r.n:10d}"
        o2 = "" if r.order_l2 is None else f"{r.order_l2:.4f}"
        oi = "" if r.order_linf is None else f"{r.order_linf:.4f}"
        print(f"{key} {r.l2:12.4e} {o2:>7} {r.linf:12.4e} {oi:>7}")
    return EXIT_RUNTIME if report.failed else EXIT_OK


def _cmd_compare(args):
    try:
        cfg = load_config(args.config)
        labels = tuple(args.schemes or cfg.schemes)
        if not labels:
            raise ConfigError("give --schemes (or [study] schemes)")
        for label in labels:
            parse_scheme_label(label)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    out = _outdir(cfg, args.output)
    results = compare_schemes(cfg, labels)
    for label, res in results.items():
        sub = out / label
        sub.mkdir(exist_ok=True)
        _write_run(sub, res, f"{cfg.model} {label}")
    output.write_compare(out / "compare.csv", results)
    failed = {k: r.failure for k, r in results.items() if r.failure}
    output.write_summary(out / "summary.json", {
        "status": "error" if failed else "ok",
        "diagnostic": failed or None,
        "metadata": cfg.metadata(),
        "schemes": {k: {"cpu_seconds": r.cpu, "trajectory": output.trajectory_summary(r.trajectory),
                        "errors": [output.error_dict(r.error)] if r.error else []}
                    for k, r in results.items()},
    })
    output.write_plot_script(out / "plot.gp", f"{cfg.model} scheme comparison", energy=False, compare=True)
    for label, res in results.items():
        tr = res.trajectory
        line = f"{label:<18} " + ("FAILED " + res.failure if tr is None else f"max drift {tr.max_drift:.3e}")
        if res.error:
            line += f"  L2 {res.error.l2:.4e}"
        print(line)
    return EXIT_RUNTIME if failed else EXIT_OK


def _cmd_selftest(args):
    return EXIT_OK if run_selftest() else EXIT_RUNTIME


def _cmd_presets(args):
    if args.name is None:
        for name in sorted(PRESETS):
            print(name)
        return EXIT_OK
    if args.name not in PRESETS:
        log.error("unknown preset %r", args.name)
        return EXIT_CONFIG
    sys.stdout.write(PRESETS[args.name].lstrip())
    return EXIT_OK


def _floats(text):
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esav",
        description="Energy-preserving SAV/ESAV integrators for Hamiltonian PDEs.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress and warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one configuration", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output directory")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("converge", help="temporal (or spatial) convergence study", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config")
    p.add_argument("--tau-list", nargs="+", type=_floats, metavar="TAU")
    p.add_argument("--n-list", nargs="+", type=int, metavar="N", help="grid sizes at fixed tau")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("compare", help="run several schemes on the same problem", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config")
    p.add_argument("--schemes", nargs="+", metavar="LABEL",
                   help="e.g. SAV-CN ESAV-CN ESAV-GAUSS2 ESAV-GAUSS-PC3 GAUSS-IMPLICIT2")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("selftest", help="quick invariant checks")
    p.set_defaults(func=_cmd_selftest)

    p = sub.add_parser("presets", help="list presets or print one as TOML")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
