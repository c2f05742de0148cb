"""Time-stepping schemes: the interval toy problem and the disk wave equation.

Both schemes keep only the current auxiliary coefficients ``psi_j`` and the
last few solution vectors, so memory does not grow with the step count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .banded import BandedOp, BorderedBandedLU, SingularSystemError, bordered_banded_solve
from .caputo import AuxState, caputo_scalar_coeff, psi_step
from .disk import (
    DiskCoeffs,
    WeightedZernike,
    disk_analyze,
    disk_conversion_op,
    disk_eval_matrix,
    disk_laplacian_op,
    modes,
)
from .orthopoly import LEGENDRE, JacobiBasis, analyze, conversion_op, diff_op, eval_row, vandermonde
from .quadrature import Method, build_rule
from .specialfns import MLParams, mittag_leffler

__all__ = [
    "DiskWaveParams",
    "SimulationOutput",
    "ToyProblemParams",
    "bordered_banded_solve",
    "disk_coeffs",
    "disk_initial_displacement",
    "memory_report",
    "sensor_positions",
    "sensor_readout",
    "solve_disk_wave",
    "solve_toy_interval",
    "toy_error_grid",
    "toy_reference",
]

SNAPSHOT_EVERY = 100


def _n_steps(T: float, dt: float) -> int:
    n = int(round(T / dt))
    if n < 1 or abs(n * dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError(f"T = {T} is not a positive multiple of dt = {dt}")
    return n


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


@dataclass(frozen=True)
class SimulationOutput:
    """Recorded solution data.

    Attributes
    ----------
    times : ndarray
        Times of the recorded states.
    steps : ndarray
        Step indices of the recorded states.
    snapshots : ndarray or None
        Coefficient vectors, one row per recorded time.
    max_coeff : ndarray
        ``max |coeff|`` at each recorded time.
    boundary_residual : ndarray
        Largest boundary value of the synthesized field at each recorded time.
    sensors : ndarray or None
        Rows ``(t, s_1, ..., s_P)``.
    meta : dict
        Scheme constants and counters.
    """

    times: np.ndarray
    steps: np.ndarray
    snapshots: np.ndarray | None
    max_coeff: np.ndarray
    boundary_residual: np.ndarray
    sensors: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


# -- interval toy problem ------------------------------------------------------


@dataclass(frozen=True)
class ToyProblemParams:
    """``k f_x + c D_t^alpha f = e^x`` on ``[0, T] x [-1, 1]`` with ``f(0, x) = 0``."""

    k: float = 10.0
    c: float = 100.0
    alpha: float = 0.5
    K: int = 40
    L: int = 50
    dt: float = 2.0**-14
    T: float = 1.0
    method: str = "birk-song"

    def __post_init__(self):
        if not (self.k > 0 and self.c > 0 and self.dt > 0 and self.T > 0):
            raise ValueError("k, c, dt and T must be positive")
        _check_alpha(self.alpha)
        if self.K < 3 or self.L < 1:
            raise ValueError("need K >= 3 and L >= 1")
        Method.parse(self.method)
        _n_steps(self.T, self.dt)

    @property
    def n_steps(self) -> int:
        return _n_steps(self.T, self.dt)


def toy_reference(params: ToyProblemParams, t, x) -> np.ndarray:
    """``(e^x / k) (1 - E_alpha(-k t^alpha / c))`` on the grid ``t x x``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ml = MLParams(params.alpha, 1.0)
    ft = np.array([(1.0 - mittag_leffler(ml, -params.k * ti**params.alpha / params.c)) / params.k for ti in t])
    return ft[:, None] * np.exp(x)[None, :]


def solve_toy_interval(params: ToyProblemParams, record_steps=None) -> SimulationOutput:
    """Advance the Legendre-coefficient scheme and record the requested steps.

    The equation is imposed in the ``P^(1,1)`` basis, with its highest row
    replaced by the inflow condition at ``x = -1``.
    """
    p = params
    K, N = p.K, p.n_steps
    record_steps = np.arange(0, N + 1, SNAPSHOT_EVERY) if record_steps is None else np.asarray(record_steps, int)
    if record_steps.size and (record_steps.min() < 0 or record_steps.max() > N):
        raise ValueError("record steps out of range")
    want = set(int(s) for s in record_steps)

    rule = build_rule(p.method, p.alpha, p.L)
    sigma = caputo_scalar_coeff(rule, p.dt)
    D = diff_op(0.0, 0.0, K)
    C = conversion_op(LEGENDRE, JacobiBasis(1.0, 1.0), K)
    op = (p.k * D + (p.c * sigma) * C).take_rows(K - 1).with_border(eval_row(LEGENDRE, -1.0, K))
    try:
        lu = BorderedBandedLU(op)
    except SingularSystemError as exc:
        raise SingularSystemError(f"toy operator: {exc}", pivot=exc.pivot, step=0) from exc

    g = analyze(np.exp, LEGENDRE, K).coeffs
    ml = MLParams(p.alpha, 1.0)
    left = math.exp(-1.0) / p.k
    state = AuxState(rule, p.dt, K)
    f = np.zeros(K)
    at_left = eval_row(LEGENDRE, -1.0, K)

    rec_t, rec_n, snaps, bres = [], [], [], []

    def record(n):
        rec_t.append(n * p.dt)
        rec_n.append(n)
        snaps.append(f.copy())
        ref = left * (1.0 - mittag_leffler(ml, -p.k * (n * p.dt) ** p.alpha / p.c)) if n else 0.0
        bres.append(abs(at_left @ f - ref))

    if 0 in want:
        record(0)
    rhs = np.empty(K)
    for n in range(1, N + 1):
        u = g + (p.c * sigma) * f - p.c * state.history()
        rhs[1:] = C.band_matvec(u)[: K - 1]
        rhs[0] = left * (1.0 - mittag_leffler(ml, -p.k * (n * p.dt) ** p.alpha / p.c))
        f = lu.solve(rhs)
        if not np.all(np.isfinite(f)):
            raise SingularSystemError("non-finite solution", step=n)
        psi_step(state, f)
        if n in want:
            record(n)

    snaps_arr = np.array(snaps) if snaps else np.zeros((0, K))
    return SimulationOutput(
        times=np.array(rec_t),
        steps=np.array(rec_n, dtype=int),
        snapshots=snaps_arr,
        max_coeff=np.abs(snaps_arr).max(axis=1) if snaps else np.zeros(0),
        boundary_residual=np.array(bres),
        meta={"sigma": sigma, "n_steps": N, "state_floats": state.n_floats + K},
    )


def toy_error_grid(params: ToyProblemParams, n_t: int = 64, n_x: int = 64):
    """Numeric and reference solutions on an ``n_t x n_x`` space-time grid.

    Sample times are ``linspace(0, T, n_t)`` rounded to the nearest step.
    Returns ``(t, x, numeric, reference)`` with 2-D fields indexed ``[t, x]``.
    """
    N = params.n_steps
    steps = np.unique(np.rint(np.linspace(0, N, n_t)).astype(int))
    out = solve_toy_interval(params, steps)
    x = np.linspace(-1.0, 1.0, n_x)
    numeric = out.snapshots @ vandermonde(LEGENDRE, x, params.K).T
    reference = toy_reference(params, out.times, x)
    return out.times, x, numeric, reference


# -- disk wave equation ---------------------------------------------------------


def disk_initial_displacement(x, y):
    """``4 y (1 - x^2 - y^2)^2``."""
    return 4.0 * y * (1.0 - x * x - y * y) ** 2


@dataclass(frozen=True)
class DiskWaveParams:
    """``f_tt / c0^2 - Lap f + tau D_t^alpha f = 0`` on the unit disk, zero Dirichlet."""

    c0: float = 100.0
    tau: float = 1.0
    alpha: float = 0.5
    K: int = 60
    L: int = 50
    dt: float = 2.0**-14
    T: float = 10_000 * 2.0**-14
    method: str = "birk-song"
    f0: Callable | None = disk_initial_displacement
    v0: Callable | None = None
    snapshot_every: int = SNAPSHOT_EVERY
    paper_literal_scheme: bool = False

    def __post_init__(self):
        if not (self.c0 > 0 and self.dt > 0 and self.T > 0):
            raise ValueError("c0, dt and T must be positive")
        if not self.tau >= 0:
            raise ValueError("tau must be non-negative")
        _check_alpha(self.alpha)
        if self.K < 0 or self.L < 1 or self.snapshot_every < 1:
            raise ValueError("need K >= 0, L >= 1 and snapshot_every >= 1")
        Method.parse(self.method)
        _n_steps(self.T, self.dt)

    @property
    def n_steps(self) -> int:
        return _n_steps(self.T, self.dt)


def _block_diag_band(blocks: list[BandedOp]) -> BandedOp:
    lower = max(b.lower for b in blocks)
    upper = max(b.upper for b in blocks)
    n = sum(b.cols for b in blocks)
    out = BandedOp.zeros(n, n, lower, upper)
    start = 0
    for blk in blocks:
        B = blk.to_dense()
        i, j = np.nonzero(B)
        out.data[upper + i - j, start + j] = B[i, j]
        start += blk.cols
    return out


def _boundary_points(n: int = 50):
    theta = 2.0 * math.pi * np.arange(n) / n
    return np.cos(theta), np.sin(theta)


def _initial_coeffs(fn, K: int, name: str) -> np.ndarray:
    size = (K + 1) * (K + 2) // 2
    if fn is None:
        return np.zeros(size)
    bx, by = _boundary_points(64)
    trace = np.abs(np.asarray(fn(bx, by), dtype=float)).max()
    if trace > 1e-10:
        raise ValueError(f"{name} has boundary trace {trace:.3e}; zero Dirichlet data required")
    return disk_analyze(fn, WeightedZernike(1.0), K).flat()


def sensor_positions(count: int = 70, radius: float = 0.5):
    """``count`` equispaced points on the circle of the given radius."""
    theta = 2.0 * math.pi * np.arange(count) / count
    return np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])


def sensor_readout(states, K: int, sensors, every: int = 1, dt: float = 1.0) -> np.ndarray:
    """Sample weighted-basis fields at sensor positions.

    ``states`` yields ``(n, coeffs)`` pairs (step index and flat coefficients);
    every ``every``-th step contributes a row ``(t, s_1, ..., s_P)``.
    """
    sensors = np.atleast_2d(np.asarray(sensors, dtype=float))
    if np.any(np.hypot(sensors[:, 0], sensors[:, 1]) > 1.0):
        raise ValueError("sensor outside the unit disk")
    E = disk_eval_matrix(WeightedZernike(1.0), K, sensors[:, 0], sensors[:, 1])
    rows = [np.concatenate([[n * dt], E @ c]) for n, c in states if n % every == 0]
    return np.array(rows) if rows else np.zeros((0, 1 + len(sensors)))


def solve_disk_wave(params: DiskWaveParams, sensors=None, sensor_every: int = 1) -> SimulationOutput:
    """Advance the two-step disk scheme in the weighted Zernike basis ``W^(1)``.

    All azimuthal modes are stacked into one block-diagonal tridiagonal
    system that is factored once.
    """
    p = params
    K, N, dt = p.K, p.n_steps, p.dt
    mode_list = modes(K)
    Cm = disk_conversion_op(K)
    Dm = disk_laplacian_op(K)
    C = _block_diag_band([Cm[m] for m in mode_list])
    D = BandedOp.from_diagonals({0: np.concatenate([Dm[m] for m in mode_list])}, C.rows, C.cols)

    inv = 1.0 / (p.c0 * p.c0 * dt)
    damped = p.tau > 0.0
    if damped:
        rule = build_rule(p.method, p.alpha, p.L)
        sigma = caputo_scalar_coeff(rule, dt)
        lhs_a = inv + p.tau * dt * sigma
        rhs_a = 2.0 * inv + p.tau * dt * sigma
        hist = p.tau * (1.0 if p.paper_literal_scheme else dt)
    else:
        rule, sigma = None, 0.0
        lhs_a, rhs_a, hist = inv, 2.0 * inv, 0.0
    lhs = lhs_a * C - dt * D
    try:
        lu = BorderedBandedLU(lhs)
    except SingularSystemError as exc:
        raise SingularSystemError(f"disk operator: {exc}", pivot=exc.pivot, step=0) from exc

    f1 = _initial_coeffs(p.f0, K, "initial displacement")
    v = _initial_coeffs(p.v0, K, "initial velocity")
    f2 = f1 - dt * v
    state = None
    if damped:
        # f^{n-1} lives in the Caputo state only
        state = AuxState(rule, dt, len(f1), f1)
        f1 = state.f_prev

    bx, by = _boundary_points(50)
    E_bd = disk_eval_matrix(WeightedZernike(1.0), K, bx, by)
    E_s = None
    if sensors is not None:
        sensors = np.atleast_2d(np.asarray(sensors, dtype=float))
        if np.any(np.hypot(sensors[:, 0], sensors[:, 1]) > 1.0):
            raise ValueError("sensor outside the unit disk")
        E_s = disk_eval_matrix(WeightedZernike(1.0), K, sensors[:, 0], sensors[:, 1])

    rec_t, rec_n, snaps, mx, bres, sens = [], [], [], [], [], []

    def record(n, f):
        rec_t.append(n * dt)
        rec_n.append(n)
        snaps.append(f.copy())
        mx.append(np.abs(f).max() if f.size else 0.0)
        bres.append(np.abs(E_bd @ f).max())

    record(0, f1)
    if E_s is not None:
        sens.append(np.concatenate([[0.0], E_s @ f1]))
    for n in range(1, N + 1):
        u = rhs_a * f1 - inv * f2
        if damped:
            u -= hist * state.history()
        f = lu.solve(C.band_matvec(u))
        if not np.all(np.isfinite(f)):
            raise SingularSystemError("non-finite solution", step=n)
        f2[...] = f1
        if damped:
            psi_step(state, f)
        else:
            f1[...] = f
        if n % p.snapshot_every == 0 or n == N:
            record(n, f)
        if E_s is not None and n % sensor_every == 0:
            sens.append(np.concatenate([[n * dt], E_s @ f]))

    size = len(f1)
    live = f1.size + f2.size + f.size
    if damped:
        live += state.psi.size + state.rule.n_floats
    return SimulationOutput(
        times=np.array(rec_t),
        steps=np.array(rec_n, dtype=int),
        snapshots=np.array(snaps),
        max_coeff=np.array(mx),
        boundary_residual=np.array(bres),
        sensors=np.array(sens) if E_s is not None else None,
        meta={
            "sigma": sigma,
            "lhs_scalar": lhs_a,
            "rhs_scalar": rhs_a,
            "n_steps": N,
            "n_coeffs": size,
            "state_floats": live,
        },
    )


def disk_coeffs(vec, K: int) -> DiskCoeffs:
    """Wrap a flat weighted-basis coefficient vector."""
    return DiskCoeffs.from_flat(1.0, K, vec)


# -- memory accounting ----------------------------------------------------------


def memory_report(K: int, L: int, scheme: str = "caputo_only") -> int:
    """Reals held by the time loop, independent of the number of steps.

    ``caputo_only``: ``psi`` (``L K``), ``A`` and ``s`` (``2 L``), ``f^n`` and
    ``f^{n-1}``. ``wave`` adds ``f^{n-2}``; ``f^{n-1}`` serves both the
    second difference and the Caputo increment.
    """
    if K < 1 or L < 1:
        raise ValueError("K and L must be at least 1")
    if scheme == "caputo_only":
        return L * (2 + K) + 2 * K
    if scheme == "wave":
        return L * (2 + K) + 3 * K
    raise ValueError(f"unknown scheme {scheme!r}")
