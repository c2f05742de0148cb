"""Test functions with known Caputo derivatives of order ``alpha`` in (0, 1)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .specialfns import MLParams, erf, lgamma, mittag_leffler

__all__ = ["TestFunction", "TEST_FUNCTIONS", "get_test_function"]

_SERIES_TOL = 1e-17
_SERIES_MAX = 400


@dataclass(frozen=True)
class TestFunction:
    """``f``, its first derivative and its Caputo derivative ``caputo(alpha, t)``."""

    name: str
    f: Callable[[float], float]
    deriv: Callable
    caputo: Callable[[float, float], float]


def _power_series_caputo(alpha: float, t: float, log_coeff) -> float:
    """``sum_{k>=1} c_k k! t^(k - alpha) / Gamma(k + 1 - alpha)`` for ``f = sum_k c_k t^k``."""
    if t == 0.0:
        return 0.0
    log_t = math.log(t)
    total = 0.0
    for k in range(1, _SERIES_MAX):
        term = math.exp(log_coeff(k) + lgamma(k + 1.0) + (k - alpha) * log_t - lgamma(k + 1.0 - alpha))
        total += term
        if term < _SERIES_TOL * total and k > t:
            return total
    raise ArithmeticError(f"power series did not converge at t={t}")


def _tsquared() -> TestFunction:
    return TestFunction(
        "tsquared",
        lambda t: t * t,
        lambda t: 2.0 * np.asarray(t, dtype=float),
        lambda alpha, t: 2.0 * t ** (2.0 - alpha) / math.gamma(3.0 - alpha),
    )


def _exp() -> TestFunction:
    def caputo(alpha, t):
        if alpha == 0.5:
            return math.exp(t) * erf(math.sqrt(t))
        return _power_series_caputo(alpha, t, lambda k: -lgamma(k + 1.0))

    return TestFunction("exp", math.exp, np.exp, caputo)


def _mittag(a: float) -> TestFunction:
    params = MLParams(a, 1.0)

    def deriv(t):
        # term-wise derivative of sum_k t^k / Gamma(a k + 1)
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        power = np.ones_like(t)
        t_max = float(np.max(np.abs(t), initial=0.0))
        for k in range(1, _SERIES_MAX):
            term = k * power * math.exp(-lgamma(a * k + 1.0))
            out = out + term
            if k > t_max + 2 and np.all(np.abs(term) <= _SERIES_TOL * np.abs(out)):
                return out
            power = power * t
        raise ArithmeticError("Mittag-Leffler derivative series did not converge")

    return TestFunction(
        "mittag",
        lambda t: mittag_leffler(params, t),
        deriv,
        lambda alpha, t: _power_series_caputo(alpha, t, lambda k: -lgamma(a * k + 1.0)),
    )


def _constant() -> TestFunction:
    return TestFunction("constant", lambda t: 1.0, lambda t: np.zeros_like(np.asarray(t, dtype=float)), lambda alpha, t: 0.0)


def _zero() -> TestFunction:
    return TestFunction("zero", lambda t: 0.0, lambda t: np.zeros_like(np.asarray(t, dtype=float)), lambda alpha, t: 0.0)


TEST_FUNCTIONS = ("tsquared", "exp", "mittag", "constant", "zero")


def get_test_function(name: str, mittag_a: float = 2.0) -> TestFunction:
    if name == "tsquared":
        return _tsquared()
    if name == "exp":
        return _exp()
    if name == "mittag":
        return _mittag(mittag_a)
    if name == "constant":
        return _constant()
    if name == "zero":
        return _zero()
    raise ValueError(f"unknown test function {name!r}; choose from {', '.join(TEST_FUNCTIONS)}")
