"""Independent reference computations used by the tests."""

import math
from functools import lru_cache

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal

from fracspec.quadrature import recurrence_coefficients


def golub_welsch(family, n, a=0.0, b=0.0):
    """Nodes and weights from the symmetric Jacobi matrix eigenproblem."""
    alpha, beta = recurrence_coefficients(family, n, a, b)
    if n == 1:
        return np.array([alpha[0]]), np.array([beta[0]])
    x, V = eigh_tridiagonal(alpha, np.sqrt(beta[1:]))
    return x, beta[0] * V[0] ** 2


@lru_cache(maxsize=None)
def jacobi_moments(a, b, kmax):
    """``int_{-1}^1 (1-x)^a (1+x)^b x^k dx`` for ``k <= kmax`` at 160 digits."""
    with mpmath.workdps(160):
        a_, b_ = mpmath.mpf(a), mpmath.mpf(b)
        pre = mpmath.power(2, a_ + b_ + 1)
        out = []
        for k in range(kmax + 1):
            s = mpmath.mpf(0)
            for i in range(k + 1):
                s += mpmath.binomial(k, i) * mpmath.power(2, i) * (-1) ** (k - i) * mpmath.beta(a_ + 1, b_ + 1 + i)
            out.append(float(pre * s))
    return tuple(out)


def laguerre_moments(kmax):
    return tuple(float(math.factorial(k)) for k in range(kmax + 1))


def moment_errors(nodes, weights, exact):
    """Error of ``sum_j w_j x_j^k`` relative to ``max(|exact|, sum_j w_j |x_j|^k)``."""
    errs = []
    for k, ex in enumerate(exact):
        approx = float(np.dot(weights, nodes**k))
        scale = max(abs(ex), float(np.dot(weights, np.abs(nodes) ** k)))
        errs.append(abs(approx - ex) / scale if scale > 0 else abs(approx - ex))
    return np.array(errs)


def mittag_leffler_mp(alpha, beta, z, terms=200):
    with mpmath.workdps(50):
        s = mpmath.mpf(0)
        for k in range(terms):
            s += mpmath.power(z, k) / mpmath.gamma(alpha * k + beta)
        return float(s)


def chebyshev_points(n):
    return np.cos((2 * np.arange(n) + 1) * np.pi / (2 * n))


def disk_tensor_rule(n_r, n_theta, b=0.0):
    """Tensor Gauss-Jacobi (in ``t = 2 r^2 - 1``) x trapezoid rule for ``(1-r^2)^b dA``."""
    from fracspec.quadrature import gauss_jacobi

    g = gauss_jacobi(n_r, b, 0.0)
    r = np.sqrt(0.5 * (1.0 + g.nodes))
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    x = (r[:, None] * np.cos(th)).ravel()
    y = (r[:, None] * np.sin(th)).ravel()
    w = np.repeat(g.weights / 2.0 ** (b + 2.0), n_theta) * (2.0 * np.pi / n_theta)
    return x, y, w
