import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracspec.banded import BandedOp, BorderedBandedLU, SingularSystemError, bordered_banded_solve


def _random_band(rng, n, lower, upper, boost=4.0):
    A = np.zeros((n, n))
    for d in range(-lower, upper + 1):
        A += np.diag(rng.uniform(-1, 1, n - abs(d)), d)
    A += boost * np.eye(n)
    return A


class TestBandedOp:
    def test_from_diagonals_round_trip(self):
        op = BandedOp.from_diagonals({-1: [1, 2, 3], 0: [4, 5, 6, 7], 2: [8, 9]}, 4, 4)
        expected = np.array([[4, 0, 8, 0], [1, 5, 0, 9], [0, 2, 6, 0], [0, 0, 3, 7]], dtype=float)
        assert_allclose(op.to_dense(), expected)
        assert (op.lower, op.upper) == (1, 2)

    def test_from_dense_rejects_out_of_band(self):
        A = np.eye(4)
        A[0, 3] = 1.0
        with pytest.raises(ValueError):
            BandedOp.from_dense(A, 0, 1)

    def test_matvec_matches_dense(self):
        rng = np.random.default_rng(0)
        A = _random_band(rng, 12, 2, 3)
        op = BandedOp.from_dense(A, 2, 3).take_rows(10).with_border(rng.standard_normal((2, 12)))
        x = rng.standard_normal(12)
        assert_allclose(op @ x, op.to_dense() @ x, rtol=1e-14, atol=1e-14)

    def test_rectangular_matvec(self):
        op = BandedOp.from_diagonals({0: np.ones(3), 1: np.ones(3)}, 3, 5)
        assert_allclose(op @ np.arange(5.0), [1, 3, 5])

    def test_algebra(self):
        a = BandedOp.from_diagonals({0: np.ones(5)}, 5, 5)
        b = BandedOp.from_diagonals({1: np.ones(4), -2: np.ones(3)}, 5, 5)
        assert_allclose((2.0 * a - b).to_dense(), 2 * np.eye(5) - b.to_dense())

    def test_border_width_checked(self):
        op = BandedOp.zeros(3, 4, 0, 1)
        with pytest.raises(ValueError):
            op.with_border(np.ones(5))


class TestBorderedBandedSolve:
    def test_identity_no_border(self):
        op = BandedOp.from_diagonals({0: np.ones(6)}, 6, 6)
        rhs = np.arange(6.0)
        assert_allclose(bordered_banded_solve(op, rhs), rhs, rtol=0, atol=0)

    def test_random_bandwidth3_K100(self):
        rng = np.random.default_rng(42)
        A = _random_band(rng, 100, 3, 3)
        rhs = rng.standard_normal(100)
        x = bordered_banded_solve(BandedOp.from_dense(A, 3, 3), rhs)
        assert np.abs(A @ x - rhs).max() <= 1e-11
        assert_allclose(x, np.linalg.solve(A, rhs), rtol=1e-10, atol=1e-12)

    def test_all_ones_border_constraint(self):
        rng = np.random.default_rng(5)
        n = 30
        A = _random_band(rng, n, 1, 2)
        op = BandedOp.from_dense(A, 1, 2).take_rows(n - 1).with_border(np.ones(n))
        rhs = np.concatenate([[3.25], rng.standard_normal(n - 1)])
        x = bordered_banded_solve(op, rhs)
        assert abs(x.sum() - 3.25) <= 1e-13
        assert np.abs(op @ x - rhs).max() <= 1e-10 * np.abs(rhs).max()

    def test_multiple_border_rows(self):
        rng = np.random.default_rng(9)
        n, p = 40, 3
        A = _random_band(rng, n, 2, 2)
        op = BandedOp.from_dense(A, 2, 2).take_rows(n - p).with_border(rng.standard_normal((p, n)))
        rhs = rng.standard_normal(n)
        x = bordered_banded_solve(op, rhs)
        assert_allclose(x, np.linalg.solve(op.to_dense(), rhs), rtol=1e-9, atol=1e-11)

    def test_factor_reuse(self):
        rng = np.random.default_rng(1)
        A = _random_band(rng, 20, 1, 1)
        lu = BorderedBandedLU(BandedOp.from_dense(A, 1, 1))
        for _ in range(3):
            b = rng.standard_normal(20)
            assert_allclose(A @ lu.solve(b), b, atol=1e-12)

    def test_singular_band_reports_pivot(self):
        A = np.diag([1.0, 2.0, 0.0, 4.0])
        with pytest.raises(SingularSystemError) as info:
            bordered_banded_solve(BandedOp.from_dense(A, 0, 0), np.ones(4))
        assert info.value.pivot == 2

    def test_singular_border(self):
        op = BandedOp.from_diagonals({0: np.ones(3)}, 2, 3).with_border([1.0, 1.0, 0.0])
        with pytest.raises(SingularSystemError):
            BorderedBandedLU(op)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            BorderedBandedLU(BandedOp.zeros(3, 4, 0, 1))

    def test_rhs_length_checked(self):
        lu = BorderedBandedLU(BandedOp.from_diagonals({0: np.ones(4)}, 4, 4))
        with pytest.raises(ValueError):
            lu.solve(np.ones(5))
