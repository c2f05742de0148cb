"""Command-line experiment runner writing CSV tables.

Usage::

    fracspec run CONFIG [--out DIR] [--override key=value ...]
    fracspec validate CONFIG

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
from pathlib import Path

import numpy as np

from .banded import SingularSystemError
from .caputo import AuxState, psi_fulldomain_oracle, psi_step, recursive_caputo
from .config import ConfigError, ExperimentConfig, load_config
from .disk import DiskCoeffs, disk_synth, WeightedZernike
from .quadrature import build_rule
from .reference import get_test_function
from .solvers import (
    DiskWaveParams,
    ToyProblemParams,
    disk_initial_displacement,
    sensor_positions,
    solve_disk_wave,
    toy_error_grid,
)
from .specialfns import MittagLefflerError

__all__ = [
    "EXIT_CONFIG",
    "EXIT_NUMERIC",
    "EXIT_OK",
    "main",
    "run_caputo_direct",
    "run_disk_wave",
    "run_experiment",
    "run_psi_stability",
    "run_toy_pde",
    "write_csv",
]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return "%.17g" % float(v)


def write_csv(path: Path, header: list[str], rows, cfg: ExperimentConfig) -> Path:
    """Write a '#' config stamp, a header row and full-precision values (NaN -> empty)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(f"# config: {cfg.to_json()}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _rel(numeric, reference):
    err = abs(numeric - reference)
    if reference == 0.0:
        return 0.0 if err == 0.0 else math.inf
    return err / abs(reference)


# -- experiments ------------------------------------------------------------------


def run_caputo_direct(cfg: ExperimentConfig, out_dir: Path) -> list[Path]:
    """Recursive Caputo derivative of a test function against its closed form."""
    block = cfg.caputo
    fn = get_test_function(block.function, block.mittag_a)
    rows = []
    for L, dt in itertools.product(block.L_values or [cfg.L], block.dt_values or [cfg.dt]):
        rule = build_rule(cfg.method, cfg.alpha, L)
        N = max(1, int(round(cfg.T / dt)))
        record = np.unique(np.rint(np.linspace(0, N, block.samples + 1)[1:]).astype(int))
        steps, vals = recursive_caputo(fn.f, rule, dt, N, record)
        for n, v in zip(steps, vals):
            t = n * dt
            ref = fn.caputo(cfg.alpha, t)
            rows.append((L, dt, t, v, ref, abs(v - ref), _rel(v, ref)))
    header = ["L", "dt", "t", "numeric", "reference", "abs_err", "rel_err"]
    return [write_csv(out_dir / "caputo_direct.csv", header, rows, cfg)]


def run_psi_stability(cfg: ExperimentConfig, out_dir: Path) -> list[Path]:
    """Recurrence ``psi_j`` against full-domain quadrature over a long run."""
    block = cfg.psi
    fn = get_test_function(block.function)
    rule = build_rule(cfg.method, cfg.alpha, cfg.L)
    rows = []
    for dt in block.dt_values or [cfg.dt]:
        N = block.n_steps or max(1, int(round(cfg.T / dt)))
        samples = set(np.unique(np.rint(np.geomspace(1, N, block.samples)).astype(int)).tolist())
        state = AuxState(rule, dt, 1, [fn.f(0.0)])
        for n in range(1, N + 1):
            psi_step(state, np.array([fn.f(n * dt)]))
            if n in samples:
                t = n * dt
                oracle = psi_fulldomain_oracle(rule, fn.deriv, t, block.panels)
                rows.append((dt, n, t, float(np.abs(state.psi[:, 0] - oracle).max())))
    header = ["dt", "n", "t", "max_discrepancy"]
    return [write_csv(out_dir / "psi_stability.csv", header, rows, cfg)]


def _toy_params(cfg: ExperimentConfig) -> ToyProblemParams:
    return ToyProblemParams(
        k=cfg.toy.k, c=cfg.toy.c, alpha=cfg.alpha, K=cfg.K, L=cfg.L, dt=cfg.dt, T=cfg.T, method=cfg.method
    )


def run_toy_pde(cfg: ExperimentConfig, out_dir: Path) -> list[Path]:
    """Interval toy problem on an ``n_t x n_x`` space-time grid."""
    t, x, num, ref = toy_error_grid(_toy_params(cfg), cfg.toy.n_t, cfg.toy.n_x)
    rows = []
    for i, ti in enumerate(t):
        for j, xj in enumerate(x):
            v, r = num[i, j], ref[i, j]
            rows.append((ti, xj, v, r, abs(v - r), _rel(v, r)))
    header = ["t", "x", "numeric", "reference", "abs_err", "rel_err"]
    return [write_csv(out_dir / "toy_pde.csv", header, rows, cfg)]


def _disk_params(cfg: ExperimentConfig) -> DiskWaveParams:
    d = cfg.disk
    return DiskWaveParams(
        c0=d.c0,
        tau=d.tau,
        alpha=cfg.alpha,
        K=cfg.K,
        L=cfg.L,
        dt=cfg.dt,
        T=cfg.T,
        method=cfg.method,
        f0=disk_initial_displacement if d.initial == "dipole" else None,
        v0=None,
        snapshot_every=d.snapshot_every,
        paper_literal_scheme=d.paper_literal_scheme,
    )


def run_disk_wave(cfg: ExperimentConfig, out_dir: Path) -> list[Path]:
    """Disk wave run: grid snapshots, sensor traces, coefficient decay, diagnostics."""
    d = cfg.disk
    sensors = sensor_positions(d.sensors, d.sensor_radius) if d.sensors else None
    out = solve_disk_wave(_disk_params(cfg), sensors=sensors, sensor_every=d.sensor_every)
    K = cfg.K
    basis = WeightedZernike(1.0)
    paths = []

    g = np.linspace(-1.0, 1.0, d.grid)
    X, Y = np.meshgrid(g, g, indexing="ij")
    inside = X * X + Y * Y <= 1.0
    picks = np.unique(np.rint(np.linspace(0, len(out.times) - 1, d.grid_snapshots)).astype(int)) if d.grid_snapshots else []
    rows = []
    for i in picks:
        field = np.full(X.shape, np.nan)
        c = DiskCoeffs.from_flat(1.0, K, out.snapshots[i])
        field[inside] = disk_synth(c, basis, X[inside], Y[inside])
        t = out.times[i]
        rows.extend((t, xv, yv, fv) for xv, yv, fv in zip(X.ravel(), Y.ravel(), field.ravel()))
    paths.append(write_csv(out_dir / "disk_snapshots.csv", ["t", "x", "y", "value"], rows, cfg))

    if out.sensors is not None:
        header = ["t"] + [f"s{i + 1}" for i in range(d.sensors)]
        paths.append(write_csv(out_dir / "disk_sensors.csv", header, out.sensors, cfg))

    decay = DiskCoeffs.from_flat(1.0, K, out.snapshots[-1]).degree_max()
    paths.append(write_csv(out_dir / "disk_decay.csv", ["degree", "max_abs_coeff"], enumerate(decay), cfg))

    diag = zip(out.times, out.max_coeff, out.boundary_residual)
    paths.append(write_csv(out_dir / "disk_diagnostics.csv", ["t", "max_abs_coeff", "boundary_max"], diag, cfg))
    return paths


_RUNNERS = {
    "caputo-direct": run_caputo_direct,
    "psi-stability": run_psi_stability,
    "toy-pde": run_toy_pde,
    "disk-wave": run_disk_wave,
}


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> list[Path]:
    return _RUNNERS[cfg.experiment](cfg, Path(out_dir or cfg.out))


# -- entry point ------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracspec", description="History-free fractional PDE experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides the config)")
    run.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    val = sub.add_parser("validate", help="parse and validate a config")
    val.add_argument("config")
    val.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.override)
        # downstream constructors re-check their own ranges
        if cfg.experiment == "toy-pde":
            _toy_params(cfg)
        elif cfg.experiment == "disk-wave":
            _disk_params(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        print(cfg.to_json())
        return EXIT_OK
    try:
        paths = run_experiment(cfg, args.out)
    except (SingularSystemError, MittagLefflerError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
