"""Generalized Zernike polynomials on the unit disk.

Basis functions are

    Z_{q,m}(r, theta) = N_{q,m} r^|m| P_q^{(b,|m|)}(2 r^2 - 1) Theta_m(theta),

with ``Theta_m = sqrt((2 - delta_m0) / 2 pi) cos(m theta)`` for ``m >= 0`` and
``sin(|m| theta)`` for ``m < 0``. ``N_{q,m}`` makes them orthonormal under the
weight ``(1 - r^2)^b``. The total degree is ``l = 2q + |m|``; truncation keeps
``l <= K``. The weighted basis is ``W = (1 - r^2)^b Z``.

Radial integrals are done in ``t = 2 r^2 - 1``, where ``r dr = dt / 4``,
``1 - r^2 = (1 - t) / 2`` and ``r^2 = (1 + t) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .banded import BandedOp
from .orthopoly import JacobiBasis, jacobi_norms, orthonormal_vandermonde, vandermonde
from .quadrature import gauss_jacobi

__all__ = [
    "DiskBasisTag",
    "DiskCoeffs",
    "Zernike",
    "WeightedZernike",
    "angular_eval",
    "block_size",
    "conversion_projection",
    "disk_analyze",
    "disk_conversion_op",
    "disk_eval_matrix",
    "disk_laplacian_op",
    "disk_synth",
    "laplacian_projection",
    "modes",
    "weighted_laplacian_eval",
    "zernike_radial_eval",
]

_OUTSIDE_TOL = 1e-12


@dataclass(frozen=True)
class DiskBasisTag:
    """``kind`` is ``"zernike"`` or ``"weighted"`` (``(1 - r^2)^b`` times Zernike)."""

    kind: str
    b: float

    def __post_init__(self):
        if self.kind not in ("zernike", "weighted"):
            raise ValueError(f"unknown disk basis kind {self.kind!r}")
        if self.b < 0:
            raise ValueError("basis parameter b must be non-negative")

    @property
    def weighted(self) -> bool:
        return self.kind == "weighted"


def Zernike(b: float = 0.0) -> DiskBasisTag:
    return DiskBasisTag("zernike", float(b))


def WeightedZernike(b: float = 1.0) -> DiskBasisTag:
    return DiskBasisTag("weighted", float(b))


def modes(K: int) -> list[int]:
    """Azimuthal modes in storage order ``0, 1, -1, 2, -2, ..., K, -K``."""
    out = [0]
    for k in range(1, K + 1):
        out += [k, -k]
    return out


def block_size(K: int, m: int) -> int:
    """Number of radial indices ``q`` with ``2q + |m| <= K``."""
    return (K - abs(m)) // 2 + 1 if abs(m) <= K else 0


@dataclass
class DiskCoeffs:
    """Per-mode radial coefficient blocks of a real disk field."""

    b: float
    K: int
    blocks: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for m in modes(self.K):
            blk = self.blocks.get(m)
            if blk is None:
                self.blocks[m] = np.zeros(block_size(self.K, m))
            elif len(blk) != block_size(self.K, m):
                raise ValueError(f"block for m={m} has length {len(blk)}, expected {block_size(self.K, m)}")

    @property
    def m_max(self) -> int:
        return self.K

    @property
    def size(self) -> int:
        return (self.K + 1) * (self.K + 2) // 2

    def flat(self) -> np.ndarray:
        return np.concatenate([self.blocks[m] for m in modes(self.K)])

    @classmethod
    def from_flat(cls, b: float, K: int, vec) -> "DiskCoeffs":
        vec = np.asarray(vec, dtype=float)
        if len(vec) != (K + 1) * (K + 2) // 2:
            raise ValueError("flat coefficient vector has the wrong length")
        blocks, start = {}, 0
        for m in modes(K):
            n = block_size(K, m)
            blocks[m] = vec[start : start + n].copy()
            start += n
        return cls(float(b), K, blocks)

    def degree_max(self) -> np.ndarray:
        """``max |c|`` over all coefficients of each total degree ``0..K``."""
        out = np.zeros(self.K + 1)
        for m, blk in self.blocks.items():
            if len(blk):
                deg = 2 * np.arange(len(blk)) + abs(m)
                np.maximum.at(out, deg, np.abs(blk))
        return out


def _radial_reduced(b: float, m: int, nq: int, t) -> np.ndarray:
    """``N_{q,m} P_q^{(b,|m|)}(t)`` for ``q < nq``, i.e. the radial part without ``r^|m|``."""
    mu = abs(m)
    return 2.0 ** (0.5 * (b + mu + 2.0)) * orthonormal_vandermonde(JacobiBasis(b, mu), t, nq)


def _radial_matrix(b: float, m: int, nq: int, r) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return r[:, None] ** abs(m) * _radial_reduced(b, m, nq, 2.0 * r * r - 1.0)


def zernike_radial_eval(b: float, m: int, q: int, r):
    """Orthonormalized radial function ``N r^|m| P_q^{(b,|m|)}(2 r^2 - 1)``."""
    if q < 0:
        raise ValueError("q must be non-negative")
    out = _radial_matrix(b, m, q + 1, r)[:, q]
    return float(out[0]) if np.ndim(r) == 0 else out


def angular_eval(m: int, theta):
    theta = np.asarray(theta, dtype=float)
    if m == 0:
        return np.full_like(theta, 1.0 / math.sqrt(2.0 * math.pi))
    scale = 1.0 / math.sqrt(math.pi)
    return scale * (np.cos(m * theta) if m > 0 else np.sin(-m * theta))


def _polar(x, y):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    r = np.hypot(x, y)
    if np.any(r > 1.0 + _OUTSIDE_TOL):
        raise ValueError("point outside the unit disk")
    return np.minimum(r, 1.0), np.arctan2(y, x)


def disk_eval_matrix(basis: DiskBasisTag, K: int, x, y) -> np.ndarray:
    """Rows of basis values at points ``(x, y)``, columns in ``DiskCoeffs.flat`` order."""
    r, theta = _polar(x, y)
    cols = []
    for m in modes(K):
        cols.append(_radial_matrix(basis.b, m, block_size(K, m), r) * angular_eval(m, theta)[:, None])
    E = np.hstack(cols)
    if basis.weighted:
        E *= (((1.0 - r) * (1.0 + r)) ** basis.b)[:, None]
    return E


def disk_synth(c: DiskCoeffs, basis: DiskBasisTag, x, y):
    """Evaluate the expansion ``c`` at points ``(x, y)`` of the closed disk."""
    if basis.b != c.b:
        raise ValueError("coefficient and basis parameters differ")
    shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
    r, theta = _polar(np.ravel(x), np.ravel(y))
    out = np.zeros_like(r)
    for m in modes(c.K):
        blk = c.blocks[m]
        if np.any(blk):
            out += (_radial_matrix(c.b, m, len(blk), r) @ blk) * angular_eval(m, theta)
    if basis.weighted:
        out *= ((1.0 - r) * (1.0 + r)) ** basis.b
    return float(out[0]) if not shape else out.reshape(shape)


def disk_analyze(f, basis: DiskBasisTag, K: int, n_r: int | None = None, n_theta: int | None = None) -> DiskCoeffs:
    """Project ``f(x, y)`` onto the basis up to total degree ``K``.

    For the weighted basis the projection ``<f, Z>`` is taken without weight,
    which yields the ``W`` coefficients since ``W = (1 - r^2)^b Z``.
    """
    n_r = K + 8 if n_r is None else n_r
    n_theta = 2 * K + 8 if n_theta is None else n_theta
    b_rule = 0.0 if basis.weighted else basis.b
    g = gauss_jacobi(n_r, b_rule, 0.0)
    r = np.sqrt(0.5 * (1.0 + g.nodes))
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    F = np.asarray(f(r[:, None] * np.cos(theta), r[:, None] * np.sin(theta)), dtype=float)
    F = np.broadcast_to(F, (n_r, n_theta))
    w_r = g.weights / 2.0 ** (b_rule + 2.0)
    w_th = 2.0 * math.pi / n_theta
    blocks = {}
    for m in modes(K):
        fm = F @ angular_eval(m, theta) * w_th
        blocks[m] = (w_r * fm) @ _radial_matrix(basis.b, m, block_size(K, m), r)
    return DiskCoeffs(basis.b, K, blocks)


# -- operators for b = 1 -------------------------------------------------------


def _weighted_laplacian_reduced(m: int, nq: int, t) -> np.ndarray:
    """Radial part of ``Laplacian(W_{q,m})`` divided by ``r^|m| Theta_m``, b = 1.

    Uses ``Lap(r^mu e^{i m theta} h(r^2)) = 4 r^mu e^{i m theta} (s h'' + (mu+1) h')``
    with ``h(s) = N (1 - s) P(2s - 1)``.
    """
    mu = abs(m)
    a, b = 1.0, float(mu)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s = 0.5 * (1.0 + t)
    q = np.arange(nq, dtype=float)
    P = vandermonde(JacobiBasis(a, b), t, nq)
    P1 = np.zeros_like(P)
    P2 = np.zeros_like(P)
    if nq > 1:
        P1[:, 1:] = vandermonde(JacobiBasis(a + 1.0, b + 1.0), t, nq - 1) * (0.5 * (q[1:] + a + b + 1.0))
    if nq > 2:
        P2[:, 2:] = vandermonde(JacobiBasis(a + 2.0, b + 2.0), t, nq - 2) * (
            0.25 * (q[2:] + a + b + 1.0) * (q[2:] + a + b + 2.0)
        )
    N = 2.0 ** (0.5 * (a + mu + 2.0)) / np.sqrt(jacobi_norms(JacobiBasis(a, b), nq))
    one_s = (1.0 - s)[:, None]
    h1 = -P + 2.0 * one_s * P1
    h2 = -4.0 * P1 + 4.0 * one_s * P2
    return 4.0 * N * (s[:, None] * h2 + (mu + 1.0) * h1)


def weighted_laplacian_eval(m: int, q: int, x, y):
    """Pointwise ``Laplacian(W_{q,m})`` for the ``b = 1`` weighted basis."""
    r, theta = _polar(x, y)
    vals = _weighted_laplacian_reduced(m, q + 1, 2.0 * r * r - 1.0)[:, q]
    out = r ** abs(m) * vals * angular_eval(m, theta)
    return float(out[0]) if np.ndim(x) == 0 else out


def laplacian_projection(m: int, K: int) -> np.ndarray:
    """Dense ``G[q', q] = <Lap W_{q,m}, Z_{q',m}>`` under weight ``1 - r^2`` (b = 1)."""
    mu = abs(m)
    nq = block_size(K, m)
    g = gauss_jacobi(nq + 4, 1.0, float(mu))
    lap = _weighted_laplacian_reduced(m, nq, g.nodes)
    Z = _radial_reduced(1.0, m, nq, g.nodes)
    return (Z * g.weights[:, None]).T @ lap / 2.0 ** (mu + 3.0)


def conversion_projection(m: int, K: int) -> np.ndarray:
    """Dense ``C[q', q] = <W_{q,m}, Z_{q',m}>`` under weight ``1 - r^2`` (b = 1)."""
    mu = abs(m)
    nq = block_size(K, m)
    g = gauss_jacobi(nq + 4, 2.0, float(mu))
    Z = _radial_reduced(1.0, m, nq, g.nodes)
    return (Z * g.weights[:, None]).T @ Z / 2.0 ** (mu + 4.0)


def _require_b1(b):
    if b != 1:
        raise ValueError("disk operators are implemented for b = 1 only")


def disk_laplacian_op(K: int, b: float = 1.0) -> dict[int, np.ndarray]:
    """Diagonal of the Laplacian from ``W^(1)`` to ``Z^(1)`` coefficients, per mode."""
    _require_b1(b)
    return {m: np.diag(laplacian_projection(m, K)).copy() for m in modes(K)}


def disk_conversion_op(K: int, b: float = 1.0) -> dict[int, BandedOp]:
    """Banded conversion from ``W^(1)`` to ``Z^(1)`` coefficients, per mode."""
    _require_b1(b)
    out = {}
    for m in modes(K):
        C = conversion_projection(m, K)
        tol = 1e-12 * max(np.abs(C).max(), 1.0)
        C[np.abs(C) <= tol] = 0.0
        i, j = np.nonzero(C)
        width = int(np.abs(i - j).max()) if i.size else 0
        if width > 2:
            raise ArithmeticError(f"conversion block m={m} has bandwidth {width}")
        out[m] = BandedOp.from_dense(C, width, width)
    return out
