"""Banded operators with optional dense border rows, and their direct solver."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

__all__ = ["BandedOp", "BorderedBandedLU", "SingularSystemError", "bordered_banded_solve"]


class SingularSystemError(ArithmeticError):
    """A pivot of a banded factorization vanished (numerically)."""

    def __init__(self, message: str, pivot: int | None = None, step: int | None = None):
        super().__init__(message)
        self.pivot = pivot
        self.step = step


@dataclass(frozen=True)
class BandedOp:
    """A ``rows x cols`` band matrix, optionally topped by dense border rows.

    Band entries are stored by diagonal: ``data[upper + i - j, j] == A[i, j]``
    for ``-lower <= j - i <= upper``. The full operator is
    ``vstack([border, band])``, so border rows come first.
    """

    data: np.ndarray
    rows: int
    lower: int
    upper: int
    border: np.ndarray | None = None

    def __post_init__(self):
        if self.data.shape[0] != self.lower + self.upper + 1:
            raise ValueError("band storage height must be lower + upper + 1")
        if self.border is not None and self.border.shape[1] != self.cols:
            raise ValueError("border rows must have one entry per column")

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def n_border(self) -> int:
        return 0 if self.border is None else self.border.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_border + self.rows, self.cols)

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int, lower: int, upper: int) -> "BandedOp":
        return cls(np.zeros((lower + upper + 1, cols)), rows, lower, upper)

    @classmethod
    def from_diagonals(cls, diagonals: dict[int, np.ndarray], rows: int, cols: int) -> "BandedOp":
        """Build from ``{offset: values}`` with ``offset = j - i``."""
        lower = max(0, -min(diagonals))
        upper = max(0, max(diagonals))
        op = cls.zeros(rows, cols, lower, upper)
        for d, vals in diagonals.items():
            i = np.arange(max(0, -d), min(rows, cols - d))
            op.data[upper - d, i + d] = np.asarray(vals, dtype=float)[: len(i)]
        return op

    @classmethod
    def from_dense(cls, A, lower: int, upper: int, tol: float = 0.0) -> "BandedOp":
        A = np.asarray(A, dtype=float)
        rows, cols = A.shape
        i, j = np.indices(A.shape)
        outside = (j - i > upper) | (i - j > lower)
        if np.any(np.abs(A[outside]) > tol):
            raise ValueError("matrix has entries outside the declared band")
        op = cls.zeros(rows, cols, lower, upper)
        inside = ~outside
        op.data[upper + i[inside] - j[inside], j[inside]] = A[inside]
        return op

    def with_border(self, border) -> "BandedOp":
        border = np.atleast_2d(np.asarray(border, dtype=float))
        return BandedOp(self.data, self.rows, self.lower, self.upper, border)

    def take_rows(self, m: int) -> "BandedOp":
        """Keep the first ``m`` band rows."""
        data = self.data.copy()
        i, j = self._band_index()
        data[(i >= m) & self._valid()] = 0.0
        return BandedOp(data, m, self.lower, self.upper, self.border)

    # -- algebra --------------------------------------------------------------

    def _band_index(self):
        d = np.arange(self.lower + self.upper + 1)[:, None]
        j = np.arange(self.cols)[None, :]
        i = d - self.upper + j
        return np.broadcast_to(i, self.data.shape), np.broadcast_to(j, self.data.shape)

    def _valid(self):
        i, _ = self._band_index()
        return (i >= 0) & (i < self.rows)

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.rows, self.cols))
        i, j = self._band_index()
        ok = self._valid()
        A[i[ok], j[ok]] = self.data[ok]
        if self.border is not None:
            A = np.vstack([self.border, A])
        return A

    def band_matvec(self, x) -> np.ndarray:
        """Product of the band part (without border rows) with ``x``."""
        x = np.asarray(x, dtype=float)
        y = np.zeros(self.rows)
        for d in range(-self.lower, self.upper + 1):
            i0, i1 = max(0, -d), min(self.rows, self.cols - d)
            if i1 > i0:
                y[i0:i1] += self.data[self.upper - d, i0 + d : i1 + d] * x[i0 + d : i1 + d]
        return y

    def __matmul__(self, x):
        y = self.band_matvec(x)
        if self.border is not None:
            y = np.concatenate([self.border @ x, y])
        return y

    def _aligned(self, other: "BandedOp") -> tuple[np.ndarray, np.ndarray, int, int]:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("band shapes differ")
        lower = max(self.lower, other.lower)
        upper = max(self.upper, other.upper)

        def pad(op):
            out = np.zeros((lower + upper + 1, op.cols))
            out[upper - op.upper : upper - op.upper + op.data.shape[0]] = op.data
            return out

        return pad(self), pad(other), lower, upper

    def __add__(self, other: "BandedOp") -> "BandedOp":
        a, b, lower, upper = self._aligned(other)
        return BandedOp(a + b, self.rows, lower, upper)

    def __sub__(self, other: "BandedOp") -> "BandedOp":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "BandedOp":
        border = None if self.border is None else scalar * self.border
        return BandedOp(scalar * self.data, self.rows, self.lower, self.upper, border)


class BorderedBandedLU:
    """Factorization of a square bordered-banded operator.

    With ``p`` border rows and ``n`` unknowns, the first ``n - p`` columns of
    the band rows form a square band block that is factored by LU with
    partial pivoting (LAPACK ``gbtrf``); the border rows are then eliminated
    through the ``p x p`` Schur complement on the trailing columns.
    """

    def __init__(self, op: BandedOp, rtol: float = 1e-14):
        n_rows, n = op.shape
        if n_rows != n:
            raise ValueError(f"bordered system must be square, got {op.shape}")
        p = op.n_border
        m = n - p
        self.n, self.p, self.m = n, p, m
        kl, ku = op.lower, op.upper
        self.kl, self.ku = kl, ku

        ab = np.zeros((2 * kl + ku + 1, m))
        ab[kl:, :] = op.data[:, :m]
        # clear storage slots that belong to rows past the band block
        i, j = op._band_index()
        ab[kl:, :][(i[:, :m] >= m) | (i[:, :m] < 0)] = 0.0
        lu, piv, info = lapack.dgbtrf(ab, kl, ku)
        if info > 0:
            raise SingularSystemError(f"zero pivot at index {info - 1}", pivot=info - 1)
        diag = np.abs(lu[kl + ku])
        scale = max(np.abs(op.data).max(), np.finfo(float).tiny)
        tiny = np.flatnonzero(diag <= rtol * scale)
        if tiny.size:
            raise SingularSystemError(f"numerically singular pivot at index {tiny[0]}", pivot=int(tiny[0]))
        self._lu, self._piv = lu, piv

        if p:
            body = op.to_dense()[p:]
            A2 = body[:, m:]
            B = op.border
            self._Z = self._band_solve(A2)
            S = B[:, m:] - B[:, :m] @ self._Z
            self._B1 = B[:, :m]
            with warnings.catch_warnings():
                # singularity is checked explicitly below
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                s_lu, s_piv = scipy.linalg.lu_factor(S, check_finite=False)
            s_diag = np.abs(np.diag(s_lu))
            s_scale = max(np.abs(B).max(), np.abs(S).max())
            bad = np.flatnonzero(s_diag <= rtol * s_scale)
            if bad.size:
                raise SingularSystemError(
                    f"numerically singular border pivot at index {m + bad[0]}", pivot=int(m + bad[0])
                )
            self._S = (s_lu, s_piv)

    def _band_solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        flat = rhs.ndim == 1
        x, info = lapack.dgbtrs(self._lu, self.kl, self.ku, rhs.reshape(self.m, -1), self._piv)
        if info != 0:
            raise ValueError(f"dgbtrs argument error {info}")
        return x[:, 0] if flat else x

    def solve(self, rhs) -> np.ndarray:
        """Solve ``op @ x = rhs`` where ``rhs`` stacks border then band entries."""
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.n:
            raise ValueError(f"rhs has length {rhs.shape[0]}, expected {self.n}")
        if not self.p:
            return self._band_solve(rhs)
        y = self._band_solve(rhs[self.p :])
        x2 = scipy.linalg.lu_solve(self._S, rhs[: self.p] - self._B1 @ y, check_finite=False)
        return np.concatenate([y - self._Z @ x2, x2])


def bordered_banded_solve(op: BandedOp, rhs) -> np.ndarray:
    """One-shot solve of a square bordered-banded system."""
    return BorderedBandedLU(op).solve(rhs)
