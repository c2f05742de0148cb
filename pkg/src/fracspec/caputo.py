"""History-free Caputo derivative: auxiliary-state recurrence and oracles.

For ``0 < alpha < 1`` the Caputo derivative is approximated by
``sum_j A_j psi_j(t)`` with

    psi_j(t) = int_0^t exp(-s_j**2 (t - tau)) f'(tau) dtau,

and each ``psi_j`` is advanced one step at a time from its previous value
using a linear interpolant of ``f`` over the step. Only the current
``psi_j`` coefficient vectors and the previous ``f`` are kept.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import QuadratureRule, gauss_jacobi

__all__ = [
    "AuxState",
    "caputo_apply",
    "caputo_direct_oracle",
    "caputo_scalar_coeff",
    "psi_fulldomain_oracle",
    "psi_step",
    "recursive_caputo",
]


def _step_gain(rule: QuadratureRule, dt: float) -> np.ndarray:
    """``(1 - exp(-z)) / z`` with ``z = s_j**2 dt``, free of cancellation."""
    z = rule.s**2 * dt
    return -np.expm1(-z) / z


def caputo_scalar_coeff(rule: QuadratureRule, dt: float) -> float:
    """Weight of ``f^n - f^{n-1}`` in the one-step Caputo approximation."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    return float(np.dot(rule.A, _step_gain(rule, dt)))


class AuxState:
    """Auxiliary coefficients ``psi`` (``L x K``) and the previous ``f``.

    Parameters
    ----------
    rule : QuadratureRule
        Sum-of-exponentials parameters.
    dt : float
        Time step.
    K : int
        Length of the coefficient vectors being differentiated.
    f0 : array_like, optional
        Value of ``f`` at ``t = 0`` (zeros by default).

    Notes
    -----
    ``decay``, ``gain`` and ``history_weights`` are per-node constants
    derived from ``(rule, dt)``; they are cached for speed and are not part
    of the method's state count (``n_floats``).
    """

    def __init__(self, rule: QuadratureRule, dt: float, K: int = 1, f0=None):
        if not dt > 0.0:
            raise ValueError("dt must be positive")
        self.rule = rule
        self.dt = float(dt)
        self.K = int(K)
        self.psi = np.zeros((rule.L, self.K))
        self.f_prev = np.zeros(self.K) if f0 is None else np.array(f0, dtype=float).reshape(self.K)
        self.n = 0

        self.decay = np.exp(-(rule.s**2) * self.dt)
        self.gain = _step_gain(rule, self.dt)
        self.history_weights = rule.A * self.decay
        self.sigma = float(np.dot(rule.A, self.gain))

    @property
    def n_floats(self) -> int:
        """Reals held by the method: ``psi``, ``f_prev`` and the rule's ``A, s``."""
        return self.psi.size + self.f_prev.size + self.rule.n_floats

    @property
    def nbytes(self) -> int:
        return self.psi.nbytes + self.f_prev.nbytes + self.rule.A.nbytes + self.rule.s.nbytes

    def _check(self, f_new) -> np.ndarray:
        f_new = np.asarray(f_new, dtype=float)
        if f_new.shape != (self.K,):
            raise ValueError(f"expected coefficient vector of length {self.K}, got shape {f_new.shape}")
        return f_new

    def history(self) -> np.ndarray:
        """``sum_j A_j exp(-s_j**2 dt) psi_j`` from the stored state."""
        return self.history_weights @ self.psi

    def reset(self, f0=None):
        self.psi[...] = 0.0
        self.f_prev[...] = 0.0 if f0 is None else f0
        self.n = 0


def psi_step(state: AuxState, f_new) -> None:
    """Advance ``state`` by one step to the new coefficients ``f_new`` (in place)."""
    f_new = state._check(f_new)
    df = f_new - state.f_prev
    psi = state.psi
    psi *= state.decay[:, None]
    psi += state.gain[:, None] * df[None, :]
    state.f_prev[...] = f_new
    state.n += 1


def caputo_apply(state: AuxState, f_new) -> np.ndarray:
    """Caputo derivative at the new time level, without touching ``state``."""
    f_new = state._check(f_new)
    return state.history() + state.sigma * (f_new - state.f_prev)


def recursive_caputo(f, rule: QuadratureRule, dt: float, n_steps: int, record=None):
    """Scalar Caputo derivative of ``f(t)`` at ``t = n dt`` by the recurrence.

    Returns ``(steps, values)`` for the requested step indices (all steps
    ``1..n_steps`` by default).
    """
    record = np.arange(1, n_steps + 1) if record is None else np.asarray(sorted(record), dtype=int)
    state = AuxState(rule, dt, 1, [f(0.0)])
    out = np.empty(len(record))
    want = iter(enumerate(record))
    idx, target = next(want, (None, None))
    for n in range(1, n_steps + 1):
        fn = np.array([f(n * dt)])
        if n == target:
            out[idx] = caputo_apply(state, fn)[0]
            idx, target = next(want, (None, None))
        psi_step(state, fn)
    return record, out


def _legendre_panel_rule(order: int):
    g = gauss_jacobi(order, 0.0, 0.0)
    return g.nodes, g.weights


def psi_fulldomain_oracle(rule: QuadratureRule, f_deriv, t: float, panels: int = 64, order: int = 24) -> np.ndarray:
    """``psi_j(t)`` by composite Gauss-Legendre quadrature over ``[0, t]``.

    ``panels`` uniform panels cover ``[0, t/2]``; ``[t/2, t]`` is split
    geometrically towards ``t`` until the finest panel resolves the fastest
    kernel ``exp(-s_max**2 (t - tau))``.
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    s2 = rule.s**2
    half = 0.5 * t
    finest = min(half, 1e-3 / float(s2.max()))
    levels = max(0, math.ceil(math.log2(half / finest)))
    geo = t - half * 0.5 ** np.arange(levels + 1)
    edges = np.concatenate([np.linspace(0.0, half, panels + 1), geo[1:], [t]])
    x, w = _legendre_panel_rule(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    tau = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    wt = (0.5 * (hi - lo) * w).ravel()
    fd = np.asarray(f_deriv(tau), dtype=float) * np.ones_like(tau)
    kernel = np.exp(-s2[:, None] * (t - tau)[None, :])
    return kernel @ (wt * fd)


def caputo_direct_oracle(f_deriv, alpha: float, t: float, points: int = 64) -> float:
    """Caputo derivative straight from its weakly singular integral.

    The kernel ``(t - s)**(-alpha)`` is absorbed into a Gauss-Jacobi weight
    after substituting ``s = t - u``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if t == 0.0:
        return 0.0
    g = gauss_jacobi(points, 0.0, -alpha)
    u = 0.5 * t * (1.0 + g.nodes)
    vals = np.asarray(f_deriv(t - u), dtype=float) * np.ones_like(u)
    return float((0.5 * t) ** (1.0 - alpha) / math.gamma(1.0 - alpha) * np.dot(g.weights, vals))
