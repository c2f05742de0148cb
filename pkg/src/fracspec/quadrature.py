"""Gauss rules and sum-of-exponentials Caputo quadrature parameters.

Nodes are found by a simultaneous Newton (Aberth-Ehrlich) iteration on the
orthonormal three-term recurrence; weights come from the Christoffel
function, accumulated in log space so that Laguerre weights of large rules
do not underflow before they are combined with ``exp(p_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "GaussRule",
    "Method",
    "QuadratureRule",
    "alpha_bar",
    "build_rule",
    "gauss_jacobi",
    "gauss_laguerre",
    "recurrence_coefficients",
]

_RESCALE = 1e150


class Method(str, Enum):
    """Quadrature families for the half-line Caputo integral."""

    YUAN_AGRAWAL = "yuan-agrawal"
    DIETHELM = "diethelm"
    BIRK_SONG = "birk-song"

    @classmethod
    def parse(cls, value: "Method | str") -> "Method":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-").replace(" ", "-")
        aliases = {
            "yuanagrawal": cls.YUAN_AGRAWAL,
            "ya": cls.YUAN_AGRAWAL,
            "birksong": cls.BIRK_SONG,
            "bs": cls.BIRK_SONG,
        }
        try:
            return cls(key)
        except ValueError:
            pass
        try:
            return aliases[key.replace("-", "")]
        except KeyError:
            raise ValueError(f"unknown quadrature method {value!r}") from None


@dataclass(frozen=True)
class GaussRule:
    """Nodes and (unnormalized) weights of a Gauss rule.

    ``family`` is ``"laguerre"`` (weight ``exp(-x)`` on the half line) or
    ``"jacobi"`` (weight ``(1-x)**a * (1+x)**b`` on ``[-1, 1]``).
    """

    nodes: np.ndarray
    weights: np.ndarray
    family: str
    a: float = 0.0
    b: float = 0.0
    log_weights: np.ndarray = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, f) -> float:
        """Apply the rule to ``f`` (the weight function is implicit)."""
        return float(np.dot(self.weights, f(self.nodes)))


@dataclass(frozen=True)
class QuadratureRule:
    """Sum-of-exponentials parameters ``(A_j, s_j)`` for a Caputo derivative.

    The Caputo derivative of order ``alpha`` is approximated by
    ``sum_j A_j psi_j(t)`` where ``psi_j`` convolves ``f'`` with
    ``exp(-s_j**2 t)``.
    """

    method: Method
    alpha: float
    alpha_bar: float
    L: int
    A: np.ndarray
    s: np.ndarray

    @property
    def n_floats(self) -> int:
        return self.A.size + self.s.size


def alpha_bar(alpha: float) -> float:
    """Shifted exponent ``2 alpha - 2 ceil(alpha) + 1``, in (-1, 1)."""
    return 2.0 * alpha - 2.0 * math.ceil(alpha) + 1.0


def recurrence_coefficients(family: str, n: int, a: float = 0.0, b: float = 0.0):
    """Monic recurrence coefficients ``(alpha_k, beta_k)``, ``k < n``.

    ``beta[0]`` holds the total mass of the weight function, so the Jacobi
    matrix is ``diag(alpha) + offdiag(sqrt(beta[1:]))``.
    """
    k = np.arange(n, dtype=float)
    if family == "laguerre":
        return 2.0 * k + 1.0, np.concatenate(([1.0], k[1:] ** 2))
    if family != "jacobi":
        raise ValueError(f"unknown weight family {family!r}")
    ab = a + b
    alpha = np.empty(n)
    beta = np.empty(n)
    alpha[0] = (b - a) / (ab + 2.0)
    beta[0] = math.exp(
        (ab + 1.0) * math.log(2.0)
        + math.lgamma(a + 1.0)
        + math.lgamma(b + 1.0)
        - math.lgamma(ab + 2.0)
    )
    if n > 1:
        kk = k[1:]
        s = 2.0 * kk + ab
        alpha[1:] = (b * b - a * a) / (s * (s + 2.0))
        beta[1] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) ** 2 * (3.0 + ab))
        if n > 2:
            kk = k[2:]
            s = 2.0 * kk + ab
            beta[2:] = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0))
    return alpha, beta


def _orthonormal_eval(x, alpha, beta):
    """Scaled ``p_n(x)`` and ``p_n'(x)`` of the orthonormal polynomial.

    Both outputs carry the same unknown positive scale, which cancels in
    the Newton correction ``p / p'``.
    """
    n = len(alpha)
    sb = np.sqrt(beta)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    d_prev = np.zeros_like(x)
    d = np.zeros_like(x)
    for k in range(n):
        b_next = sb[k + 1] if k + 1 < n else 1.0
        b_here = sb[k] if k > 0 else 0.0
        p_new = ((x - alpha[k]) * p - b_here * p_prev) / b_next
        d_new = (p + (x - alpha[k]) * d - b_here * d_prev) / b_next
        p_prev, p, d_prev, d = p, p_new, d, d_new
        big = np.abs(p) > _RESCALE
        if np.any(big):
            scale = np.where(big, np.abs(p), 1.0)
            p_prev /= scale
            p /= scale
            d_prev /= scale
            d /= scale
    return p, d


def _log_christoffel_weights(x, alpha, beta):
    """``log lambda_i = log mu_0 - log sum_k p_k(x_i)**2`` (orthonormal p)."""
    n = len(alpha)
    sb = np.sqrt(beta)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    total = np.ones_like(x)
    log_scale = np.zeros_like(x)
    for k in range(n - 1):
        b_here = sb[k] if k > 0 else 0.0
        p_new = ((x - alpha[k]) * p - b_here * p_prev) / sb[k + 1]
        p_prev, p = p, p_new
        total += p * p
        big = np.abs(p) > _RESCALE
        if np.any(big):
            scale = np.where(big, np.abs(p), 1.0)
            p_prev /= scale
            p /= scale
            total /= scale * scale
            log_scale += 2.0 * np.log(scale)
    return math.log(beta[0]) - (np.log(total) + log_scale)


def _aberth(x0, alpha, beta, maxiter=200):
    x = np.array(x0, dtype=float)
    n = len(x)
    if n == 1:
        return np.array([alpha[0]])
    off = ~np.eye(n, dtype=bool)
    for _ in range(maxiter):
        p, d = _orthonormal_eval(x, alpha, beta)
        ratio = p / d
        diff = x[:, None] - x[None, :]
        inv = np.zeros_like(diff)
        inv[off] = 1.0 / diff[off]
        step = ratio / (1.0 - ratio * inv.sum(axis=1))
        x = x - step
        if np.all(np.abs(step) <= 4.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(x))):
            break
    # one plain Newton polish from the converged iterate
    p, d = _orthonormal_eval(x, alpha, beta)
    return np.sort(x - p / d)


def _jacobi_guess(n, a, b):
    k = np.arange(1, n + 1)
    theta = (k + 0.5 * a - 0.25) * np.pi / (n + 0.5 * (a + b + 1.0))
    return np.sort(np.cos(theta))


def _laguerre_guess(n):
    # Bessel-zero asymptotics, spread towards the soft edge 4n
    k = np.arange(1, n + 1)
    j0 = np.pi * (k - 0.25)
    nu = 4.0 * n + 2.0
    x = j0 * j0 / nu
    edge = nu * np.cos(0.5 * np.pi * (n - k + 0.75) / (n + 0.5)) ** 2
    return np.where(x < edge, x, 0.5 * (x + edge))


def _check_rule(x, lo, hi):
    if not (np.all(np.isfinite(x)) and np.all(np.diff(x) > 0) and x[0] > lo and x[-1] < hi):
        raise ArithmeticError("Gauss node iteration failed to isolate distinct roots")


def gauss_laguerre(L: int) -> GaussRule:
    """``L``-point Gauss-Laguerre rule for ``int_0^inf exp(-x) q(x) dx``."""
    L = int(L)
    if L < 1:
        raise ValueError("a Gauss rule needs at least one node")
    alpha, beta = recurrence_coefficients("laguerre", L)
    x = _aberth(_laguerre_guess(L), alpha, beta)
    _check_rule(x, 0.0, np.inf)
    logw = _log_christoffel_weights(x, alpha, beta)
    return GaussRule(x, np.exp(logw), "laguerre", log_weights=logw)


def gauss_jacobi(L: int, a: float, b: float) -> GaussRule:
    """``L``-point Gauss-Jacobi rule for the weight ``(1-x)**a (1+x)**b``."""
    L = int(L)
    if L < 1:
        raise ValueError("a Gauss rule needs at least one node")
    if not (a > -1.0 and b > -1.0):
        raise ValueError(f"Jacobi exponents must exceed -1, got a={a}, b={b}")
    alpha, beta = recurrence_coefficients("jacobi", L, a, b)
    x = _aberth(_jacobi_guess(L, a, b), alpha, beta)
    _check_rule(x, -1.0, 1.0)
    logw = _log_christoffel_weights(x, alpha, beta)
    return GaussRule(x, np.exp(logw), "jacobi", float(a), float(b), log_weights=logw)


def build_rule(method: Method | str, alpha: float, L: int) -> QuadratureRule:
    """Caputo sum-of-exponentials parameters for order ``alpha`` in (0, 1)."""
    method = Method.parse(method)
    alpha = float(alpha)
    if alpha != alpha or alpha <= 0.0 or alpha >= 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    abar = alpha_bar(alpha)
    sign = -1.0 if math.floor(alpha) % 2 else 1.0
    c = sign * math.sin(math.pi * alpha) / math.pi

    if method is Method.YUAN_AGRAWAL:
        g = gauss_laguerre(L)
        p = g.nodes
        A = 2.0 * c * np.exp(p + g.log_weights) * p**abar
        s = p.copy()
    elif method is Method.DIETHELM:
        g = gauss_jacobi(L, abar, -abar)
        p = g.nodes
        A = c * 4.0 * g.weights / (1.0 + p) ** 2
        s = (1.0 - p) / (1.0 + p)
    else:
        g = gauss_jacobi(L, 2.0 * abar + 1.0, 1.0 - 2.0 * abar)
        p = g.nodes
        A = c * 8.0 * g.weights / (1.0 + p) ** 4
        s = ((1.0 - p) / (1.0 + p)) ** 2
    A.setflags(write=False)
    s.setflags(write=False)
    return QuadratureRule(method, alpha, abar, int(L), A, s)
