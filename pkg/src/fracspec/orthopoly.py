"""Classical Jacobi polynomials on [-1, 1] in coefficient space.

Polynomials are unnormalized, ``P_n^{(a,b)}(1) = binom(n + a, n)``, so the
derivative and raising operators have closed-form two-band entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .banded import BandedOp
from .quadrature import gauss_jacobi, recurrence_coefficients

__all__ = [
    "LEGENDRE",
    "CoeffVec",
    "JacobiBasis",
    "analyze",
    "conversion_op",
    "diff_op",
    "eval_row",
    "jacobi_eval",
    "jacobi_norms",
    "orthonormal_vandermonde",
    "synth",
    "vandermonde",
]


@dataclass(frozen=True)
class JacobiBasis:
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if not (self.a > -1.0 and self.b > -1.0):
            raise ValueError(f"Jacobi parameters must exceed -1, got ({self.a}, {self.b})")


LEGENDRE = JacobiBasis(0.0, 0.0)


@dataclass
class CoeffVec:
    """Truncated expansion ``f(x) ~ sum_n coeffs[n] P_n(x)``."""

    basis: JacobiBasis
    coeffs: np.ndarray

    @property
    def K(self) -> int:
        return len(self.coeffs)

    def __call__(self, x):
        return synth(self, x)


def _recurrence(basis: JacobiBasis, n: int):
    """``(A_n, B_n, C_n)`` with ``P_n = (A_n x + B_n) P_{n-1} - C_n P_{n-2}``."""
    a, b = basis.a, basis.b
    if n == 1:
        return 0.5 * (a + b + 2.0), 0.5 * (a - b), 0.0
    s = 2.0 * n + a + b
    den = 2.0 * n * (n + a + b) * (s - 2.0)
    return (
        (s - 1.0) * s * (s - 2.0) / den,
        (s - 1.0) * (a * a - b * b) / den,
        2.0 * (n + a - 1.0) * (n + b - 1.0) * s / den,
    )


def vandermonde(basis: JacobiBasis, x, K: int) -> np.ndarray:
    """Matrix ``V[i, n] = P_n(x_i)`` for ``n < K``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    V = np.empty((x.size, K))
    if K == 0:
        return V
    V[:, 0] = 1.0
    for n in range(1, K):
        A, B, C = _recurrence(basis, n)
        V[:, n] = (A * x + B) * V[:, n - 1]
        if n > 1:
            V[:, n] -= C * V[:, n - 2]
    return V


def jacobi_eval(basis: JacobiBasis, n: int, x):
    """``P_n^{(a,b)}(x)`` by forward recurrence."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    out = vandermonde(basis, x, n + 1)[:, n]
    return float(out[0]) if np.ndim(x) == 0 else out


def eval_row(basis: JacobiBasis, x: float, K: int) -> np.ndarray:
    """Point-evaluation functional at ``x`` acting on ``K`` coefficients."""
    return vandermonde(basis, x, K)[0]


def synth(c: CoeffVec, x):
    """Clenshaw evaluation of a truncated Jacobi expansion."""
    x = np.asarray(x, dtype=float)
    coeffs = c.coeffs
    K = len(coeffs)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for k in range(K - 1, -1, -1):
        if k + 1 < K:
            A, B, _ = _recurrence(c.basis, k + 1)
            bk = coeffs[k] + (A * x + B) * b1
        else:
            bk = coeffs[k] + 0.0 * x
        if k + 2 < K:
            bk = bk - _recurrence(c.basis, k + 2)[2] * b2
        b1, b2 = bk, b1
    return float(b1) if b1.ndim == 0 else b1


def jacobi_norms(basis: JacobiBasis, K: int) -> np.ndarray:
    """Squared norms ``h_n = <P_n, P_n>`` under ``(1-x)**a (1+x)**b``."""
    a, b = basis.a, basis.b
    h = np.empty(K)
    for n in range(K):
        if n == 0:
            log_h = (a + b + 1.0) * math.log(2.0) + math.lgamma(a + 1.0) + math.lgamma(b + 1.0) - math.lgamma(a + b + 2.0)
        else:
            log_h = (
                (a + b + 1.0) * math.log(2.0)
                + math.lgamma(n + a + 1.0)
                + math.lgamma(n + b + 1.0)
                - math.log(2.0 * n + a + b + 1.0)
                - math.lgamma(n + a + b + 1.0)
                - math.lgamma(n + 1.0)
            )
        h[n] = math.exp(log_h)
    return h


def orthonormal_vandermonde(basis: JacobiBasis, x, K: int) -> np.ndarray:
    """``V[i, n] = P_n(x_i) / sqrt(h_n)``, evaluated by the orthonormal recurrence.

    Agrees with ``vandermonde(...) / sqrt(jacobi_norms(...))`` up to
    rounding but carries less of it at high degree.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    al, be = recurrence_coefficients("jacobi", max(K, 1), basis.a, basis.b)
    sb = np.sqrt(be)
    V = np.empty((x.size, K))
    if K == 0:
        return V
    V[:, 0] = 1.0 / sb[0]
    if K > 1:
        V[:, 1] = (x - al[0]) * V[:, 0] / sb[1]
    for k in range(1, K - 1):
        V[:, k + 1] = ((x - al[k]) * V[:, k] - sb[k] * V[:, k - 1]) / sb[k + 1]
    return V


def analyze(f, basis: JacobiBasis, K: int) -> CoeffVec:
    """Project ``f`` onto ``P_0 .. P_{K-1}`` with a ``(K + 8)``-point Gauss rule.

    ``f`` must accept a numpy array of abscissae.
    """
    rule = gauss_jacobi(K + 8, basis.a, basis.b)
    V = orthonormal_vandermonde(basis, rule.nodes, K)
    fx = np.asarray(f(rule.nodes), dtype=float)
    return CoeffVec(basis, (rule.weights * fx) @ V / np.sqrt(jacobi_norms(basis, K)))


def diff_op(a: float, b: float, K: int) -> BandedOp:
    """Derivative from ``P^{(a,b)}`` to ``P^{(a+1,b+1)}`` coefficients (K x K)."""
    n = np.arange(1, K, dtype=float)
    return BandedOp.from_diagonals({0: np.zeros(K), 1: 0.5 * (n + a + b + 1.0)}, K, K)


def _raise_a(a: float, b: float, K: int) -> BandedOp:
    # (2n+a+b+1) P_n^{(a,b)} = (n+a+b+1) P_n^{(a+1,b)} - (n+b) P_{n-1}^{(a+1,b)}
    n = np.arange(K, dtype=float)
    s = 2.0 * n + a + b + 1.0
    diag = np.where(n == 0, 1.0, (n + a + b + 1.0) / np.where(n == 0, 1.0, s))
    sup = -(n[1:] + b) / s[1:]
    return BandedOp.from_diagonals({0: diag, 1: sup}, K, K)


def _raise_b(a: float, b: float, K: int) -> BandedOp:
    # (2n+a+b+1) P_n^{(a,b)} = (n+a+b+1) P_n^{(a,b+1)} + (n+a) P_{n-1}^{(a,b+1)}
    n = np.arange(K, dtype=float)
    s = 2.0 * n + a + b + 1.0
    diag = np.where(n == 0, 1.0, (n + a + b + 1.0) / np.where(n == 0, 1.0, s))
    sup = (n[1:] + a) / s[1:]
    return BandedOp.from_diagonals({0: diag, 1: sup}, K, K)


def _compose_upper(P: BandedOp, Q: BandedOp) -> BandedOp:
    """Product of two upper-banded square operators, kept banded."""
    K = P.cols
    dense = P.to_dense() @ Q.to_dense()
    return BandedOp.from_dense(dense, 0, P.upper + Q.upper, tol=0.0) if K else P


def conversion_op(src: JacobiBasis, dst: JacobiBasis, K: int) -> BandedOp:
    """Change of basis ``P^{src} -> P^{dst}`` for unit (or zero) parameter steps."""
    da, db = dst.a - src.a, dst.b - src.b
    if da not in (0.0, 1.0) or db not in (0.0, 1.0):
        raise ValueError(f"unsupported conversion {src} -> {dst}: steps must be 0 or 1")
    op = BandedOp.from_diagonals({0: np.ones(K)}, K, K)
    a, b = src.a, src.b
    if da:
        op = _raise_a(a, b, K)
        a += 1.0
    if db:
        step = _raise_b(a, b, K)
        op = step if not da else _compose_upper(step, op)
    return op
