"""Special functions used by the analytic reference solutions."""

from __future__ import annotations

import math

__all__ = ["MLParams", "MittagLefflerError", "erf", "lgamma", "mittag_leffler"]

ML_MAX_ABS_Z = 50.0
ML_MAX_TERMS = 10_000


class MittagLefflerError(ArithmeticError):
    """The Mittag-Leffler series did not converge within the term cap."""


class MLParams:
    """Parameters ``(alpha, beta)`` of the two-parameter Mittag-Leffler function."""

    __slots__ = ("alpha", "beta")

    def __init__(self, alpha: float, beta: float = 1.0):
        if not (alpha > 0.0 and beta > 0.0):
            raise ValueError(f"Mittag-Leffler parameters must be positive, got ({alpha}, {beta})")
        self.alpha = float(alpha)
        self.beta = float(beta)

    def __repr__(self) -> str:
        return f"MLParams(alpha={self.alpha!r}, beta={self.beta!r})"


def mittag_leffler(params: MLParams, z: float) -> float:
    """``E_{alpha,beta}(z) = sum_k z**k / Gamma(alpha k + beta)`` by direct summation.

    Only meant for moderate arguments (``|z| <= 50``); the reference
    solutions in this package never leave ``|z| <= 0.1``.
    """
    z = float(z)
    if abs(z) > ML_MAX_ABS_Z:
        raise ValueError(f"|z| = {abs(z)} is outside the series envelope |z| <= {ML_MAX_ABS_Z}")
    a, b = params.alpha, params.beta
    if z == 0.0:
        return 1.0 / math.gamma(b)
    log_abs_z = math.log(abs(z))
    negative = z < 0.0
    total = 0.0
    for k in range(ML_MAX_TERMS):
        log_term = k * log_abs_z - math.lgamma(a * k + b)
        if log_term > 700.0:
            raise MittagLefflerError(f"series term overflow at k={k} for z={z}")
        term = math.exp(log_term)
        if negative and k % 2:
            term = -term
        total += term
        # terms decay monotonically once alpha k + beta is past the Gamma minimum
        if abs(term) < 1e-16 * (1.0 + abs(total)) and a * k + b > 2.0:
            return total
    raise MittagLefflerError(f"no convergence within {ML_MAX_TERMS} terms for z={z}")


def erf(x: float) -> float:
    """Error function."""
    return math.erf(x)


def lgamma(x: float) -> float:
    """``log Gamma(x)`` for ``x > 0``."""
    if not x > 0.0:
        raise ValueError(f"lgamma is restricted to x > 0, got {x}")
    return math.lgamma(x)
