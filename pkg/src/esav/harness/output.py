"""On-disk artifacts of a run.

CSV schemas (header row first, comma separated, floats with 17 significant digits):

    energy.csv   t, H_modified, H_true, drift        drift = H_modified(t) - H_modified(0)
    errors.csv   tau, N, l2_error, linf_error, order_l2, order_linf
                 orders are blank in the first row or when undefined
    iters.csv    step, iterations, phase               phase = bootstrap | step
    compare.csv  scheme, status, l2_error, linf_error, max_drift, max_iterations

CPU times go to ``summary.json`` only, so the CSV files are reproducible
byte for byte.
"""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np

from .. import __version__


def _f(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_energy(path: Path, traj):
    rows = [[_f(0.0), _f(traj.H_mod0), _f(traj.H0), _f(0.0)]]
    for t, hm, h in zip(traj.times, traj.H_mod, traj.H):
        rows.append([_f(t), _f(hm), _f(h), _f(hm - traj.H_mod0)])
    _write_csv(path, ["t", "H_modified", "H_true", "drift"], rows)


def write_errors(path: Path, rows):
    out = [[_f(r.tau), r.n, _f(r.l2), _f(r.linf), _f(r.order_l2), _f(r.order_linf)] for r in rows]
    _write_csv(path, ["tau", "N", "l2_error", "linf_error", "order_l2", "order_linf"], out)


def write_iterations(path: Path, traj):
    rows = []
    if traj is not None and traj.bootstrap_iterations:
        rows.append([1, traj.bootstrap_iterations, "bootstrap"])
    if traj is not None:
        rows.extend([s, k, "step"] for s, k in zip(traj.iteration_steps, traj.iterations))
    _write_csv(path, ["step", "iterations", "phase"], rows)


def write_compare(path: Path, results):
    rows = []
    for label, res in results.items():
        tr = res.trajectory
        err = res.error
        rows.append([
            label,
            "ok" if res.failure is None else "failed",
            _f(err.l2 if err else None),
            _f(err.linf if err else None),
            _f(tr.max_drift if tr else None),
            tr.max_iterations if tr else "",
        ])
    _write_csv(path, ["scheme", "status", "l2_error", "linf_error", "max_drift", "max_iterations"], rows)


class SnapshotWriter:
    """Field dumps as plain text (one file per component) or raw ``<f8`` plus a JSON header."""

    def __init__(self, directory: Path, fmt: str = "text"):
        self.dir = Path(directory)
        self.fmt = fmt
        self.dir.mkdir(parents=True, exist_ok=True)
        self.written = []

    def __call__(self, step, t, z):
        z = np.asarray(z, dtype=float)
        stem = f"step{step:08d}"
        if self.fmt == "raw":
            data = self.dir / f"{stem}.f8"
            data.write_bytes(np.ascontiguousarray(z, dtype="<f8").tobytes())
            header = {"t": float(t), "step": int(step), "shape": list(z.shape), "dtype": "<f8",
                      "order": "C", "file": data.name}
            (self.dir / f"{stem}.json").write_text(json.dumps(header, indent=2) + "\n", encoding="utf-8")
            self.written.append(data.name)
            return
        for k, comp in enumerate(z):
            path = self.dir / f"{stem}_c{k}.txt"
            np.savetxt(path, np.atleast_2d(comp), fmt="%.17g", header=f"t={t!r} step={step} component={k}")
            self.written.append(path.name)


def read_raw_snapshot(header_path):
    """Load a raw snapshot from its JSON header."""
    header_path = Path(header_path)
    meta = json.loads(header_path.read_text(encoding="utf-8"))
    data = np.fromfile(header_path.with_name(meta["file"]), dtype=meta["dtype"])
    return meta, data.reshape(meta["shape"])


def trajectory_summary(traj):
    if traj is None:
        return None
    drift = traj.max_drift
    return {
        "steps": traj.steps,
        "C0": traj.C0,
        "H0": traj.H0,
        "H_modified0": traj.H_mod0,
        "H_modified_final": traj.H_mod[-1] if traj.H_mod else traj.H_mod0,
        "max_drift": drift,
        "max_relative_drift": drift / max(1.0, abs(traj.H_mod0)),
        "max_iterations": traj.max_iterations,
        "bootstrap_iterations": traj.bootstrap_iterations,
        "warnings": len(traj.warnings),
    }


def write_summary(path: Path, payload: dict):
    payload = {"version": __version__, "python": platform.python_version(), **payload}
    path.write_text(json.dumps(payload, indent=2, default=_json_default) + "\n", encoding="utf-8")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def error_dict(row):
    return {"tau": row.tau, "N": row.n, "l2_error": row.l2, "linf_error": row.linf,
            "order_l2": row.order_l2, "order_linf": row.order_linf, "cpu_seconds": row.cpu}


PLOT_TEMPLATE = """\
# gnuplot script generated for {title}
# usage: gnuplot -persist plot.gp
set datafile separator ","
set key autotitle columnhead
set grid
{blocks}"""


def write_plot_script(path: Path, title: str, *, energy=True, errors=False, iters=False, compare=False,
                      error_axis="tau"):
    blocks = []
    if energy:
        blocks.append(
            'set title "modified energy drift"\nset xlabel "t"\nset ylabel "|drift|"\n'
            'set logscale y\nset format y "%.0e"\n'
            "plot 'energy.csv' using 1:(abs($4)+1e-18) with lines title 'drift'\n"
            "unset logscale\nunset format\npause -1\n"
        )
    if errors:
        xcol, xlabel = ("1", "tau") if error_axis == "tau" else ("2", "N")
        blocks.append(
            f'set title "errors"\nset xlabel "{xlabel}"\nset ylabel "error"\nset logscale xy\n'
            f"plot 'errors.csv' using {xcol}:3 with linespoints title 'L2', "
            f"'errors.csv' using {xcol}:4 with linespoints title 'Linf'\nunset logscale\npause -1\n"
        )
    if iters:
        blocks.append(
            'set title "iterations per step"\nset xlabel "step"\nset ylabel "iterations"\n'
            "plot 'iters.csv' using 1:2 with steps title 'iterations'\npause -1\n"
        )
    if compare:
        blocks.append(
            'set title "max drift by scheme"\nset style data histograms\nset logscale y\n'
            "plot 'compare.csv' using (abs($5)+1e-18):xtic(1) title 'max drift'\npause -1\n"
        )
    path.write_text(PLOT_TEMPLATE.format(title=title, blocks="\n".join(blocks)), encoding="utf-8")
