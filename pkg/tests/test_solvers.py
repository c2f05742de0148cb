import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracspec.banded import SingularSystemError
from fracspec.caputo import AuxState
from fracspec.disk import DiskCoeffs, WeightedZernike, block_size, disk_analyze, modes
from fracspec.quadrature import build_rule
from fracspec.solvers import (
    DiskWaveParams,
    ToyProblemParams,
    disk_initial_displacement,
    memory_report,
    sensor_positions,
    sensor_readout,
    solve_disk_wave,
    solve_toy_interval,
    toy_error_grid,
    toy_reference,
)
from fracspec.specialfns import MLParams, mittag_leffler

from oracles import mittag_leffler_mp


def _small_disk(**kw):
    base = dict(K=10, L=20, dt=2.0**-10, T=50 * 2.0**-10, snapshot_every=5)
    base.update(kw)
    return DiskWaveParams(**base)


class TestToyProblem:
    def test_initial_state_zero(self):
        out = solve_toy_interval(ToyProblemParams(dt=2.0**-6, T=2.0**-4), [0, 4])
        assert np.all(out.snapshots[0] == 0.0)
        assert out.times[0] == 0.0

    def test_reference_oracle(self):
        p = ToyProblemParams()
        got = toy_reference(p, [0.25, 1.0], [0.0])[:, 0]
        want = [(1 - mittag_leffler_mp(0.5, 1.0, -10 * t**0.5 / 100)) / 10 for t in (0.25, 1.0)]
        assert_allclose(got, want, rtol=1e-13)

    def test_desk_example(self):
        p = ToyProblemParams(k=10, c=100, alpha=0.5, K=40, L=50, dt=2.0**-14, T=1.0)
        out = solve_toy_interval(p, [p.n_steps])
        x = np.linspace(-1, 1, 41)
        from fracspec.orthopoly import LEGENDRE, vandermonde

        num = vandermonde(LEGENDRE, x, p.K) @ out.snapshots[-1]
        ref = toy_reference(p, [1.0], x)[0]
        assert np.max(np.abs(num - ref) / np.abs(ref)) <= 1e-3

        at0 = vandermonde(LEGENDRE, 0.0, p.K)[0] @ out.snapshots[-1]
        ode = (1 - mittag_leffler(MLParams(0.5), -10 * 1.0**0.5 / 100)) / 10
        assert abs(at0 - ode) / ode <= 1e-3

    def test_boundary_row_enforced(self):
        out = solve_toy_interval(ToyProblemParams(dt=2.0**-8, T=2.0**-3), [8, 16, 32])
        assert out.boundary_residual.max() <= 1e-13

    def test_error_grid_shapes(self):
        p = ToyProblemParams(dt=2.0**-8, T=0.5)
        t, x, num, ref = toy_error_grid(p, n_t=5, n_x=7)
        assert num.shape == ref.shape == (len(t), 7)
        assert t[0] == 0.0 and t[-1] == 0.5

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            ToyProblemParams(k=0.0)
        with pytest.raises(ValueError):
            ToyProblemParams(alpha=1.0)
        with pytest.raises(ValueError):
            ToyProblemParams(dt=0.3, T=1.0)
        with pytest.raises(ValueError):
            solve_toy_interval(ToyProblemParams(dt=2.0**-4, T=1.0), [17])

    def test_state_floats_match_report(self):
        out = solve_toy_interval(ToyProblemParams(K=40, L=50, dt=2.0**-6, T=2.0**-4), [])
        assert out.meta["state_floats"] == memory_report(40, 50, "caputo_only")


class TestDiskWave:
    def test_mode_decoupling(self):
        f0 = lambda x, y: (1 - x * x - y * y) * (x * x - y * y)
        out = solve_disk_wave(_small_disk(tau=0.0, f0=f0))
        for snap in out.snapshots:
            c = DiskCoeffs.from_flat(1.0, 10, snap)
            for m in modes(10):
                if m != 2:
                    assert np.abs(c.blocks[m]).max(initial=0.0) <= 1e-14
        assert np.abs(DiskCoeffs.from_flat(1.0, 10, out.snapshots[-1]).blocks[2]).max() > 1e-5

    def test_damped_decoupling(self):
        f0 = lambda x, y: (1 - x * x - y * y) * y
        out = solve_disk_wave(_small_disk(tau=1.0, f0=f0))
        c = DiskCoeffs.from_flat(1.0, 10, out.snapshots[-1])
        assert all(np.abs(c.blocks[m]).max(initial=0.0) <= 1e-14 for m in modes(10) if m != -1)

    def test_tau_zero_has_no_quadrature_terms(self):
        p = _small_disk(tau=0.0)
        out = solve_disk_wave(p)
        inv = 1.0 / (p.c0 * p.c0 * p.dt)
        assert out.meta["sigma"] == 0.0
        assert out.meta["lhs_scalar"] == inv
        assert out.meta["rhs_scalar"] == 2.0 * inv
        n = out.meta["n_coeffs"]
        assert out.meta["state_floats"] == 3 * n

    def test_damped_scalars(self):
        from fracspec.caputo import caputo_scalar_coeff

        p = _small_disk()
        out = solve_disk_wave(p)
        sigma = caputo_scalar_coeff(build_rule(p.method, p.alpha, p.L), p.dt)
        assert out.meta["sigma"] == sigma
        assert_allclose(out.meta["lhs_scalar"], 1 / (p.c0**2 * p.dt) + p.tau * p.dt * sigma, rtol=1e-15)

    def test_paper_literal_flag_changes_history_only(self):
        a = solve_disk_wave(_small_disk())
        b = solve_disk_wave(_small_disk(paper_literal_scheme=True))
        assert a.meta["lhs_scalar"] == b.meta["lhs_scalar"]
        assert not np.array_equal(a.snapshots[-1], b.snapshots[-1])

    def test_boundary_zero(self):
        out = solve_disk_wave(_small_disk(K=16))
        assert out.boundary_residual.max() < 1e-12

    def test_rejects_nonzero_boundary_trace(self):
        with pytest.raises(ValueError):
            solve_disk_wave(_small_disk(f0=lambda x, y: 1.0 + 0 * x))

    def test_initial_velocity(self):
        v0 = lambda x, y: (1 - x * x - y * y)
        out = solve_disk_wave(_small_disk(c0=1.0, f0=None, v0=v0, tau=0.0, T=2.0**-10, snapshot_every=1))
        v = disk_analyze(v0, WeightedZernike(1), 10).flat()
        assert np.all(out.snapshots[0] == 0.0)
        # the first implicit step moves by dt * v up to O(c0^2 dt^2) Laplacian smoothing
        assert np.abs(out.snapshots[1] - 2.0**-10 * v).max() <= 1e-4 * np.abs(2.0**-10 * v).max()

    def test_times_and_decimation(self):
        out = solve_disk_wave(_small_disk())
        assert list(out.steps) == list(range(0, 51, 5))
        assert np.all(np.diff(out.times) > 0)
        assert_allclose(np.diff(out.times), 5 * 2.0**-10)

    def test_determinism(self):
        a = solve_disk_wave(_small_disk(), sensors=sensor_positions(8))
        b = solve_disk_wave(_small_disk(), sensors=sensor_positions(8))
        assert np.array_equal(a.snapshots, b.snapshots)
        assert np.array_equal(a.sensors, b.sensors)

    def test_state_floats_match_report(self):
        K, L = 10, 20
        out = solve_disk_wave(_small_disk(K=K, L=L))
        n = (K + 1) * (K + 2) // 2
        assert out.meta["state_floats"] == memory_report(n, L, "wave")

    def test_step_count_independence(self):
        short = solve_disk_wave(_small_disk(T=10 * 2.0**-10))
        long = solve_disk_wave(_small_disk(T=1000 * 2.0**-10))
        assert short.meta["state_floats"] == long.meta["state_floats"]

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            DiskWaveParams(c0=0.0)
        with pytest.raises(ValueError):
            DiskWaveParams(tau=-1.0)

    def test_sensor_outside(self):
        with pytest.raises(ValueError):
            solve_disk_wave(_small_disk(), sensors=[[1.2, 0.0]])


class TestSensors:
    def test_positions(self):
        s = sensor_positions()
        assert s.shape == (70, 2)
        assert_allclose(np.hypot(s[:, 0], s[:, 1]), 0.5, rtol=1e-15)
        assert_allclose(np.diff(np.arctan2(s[:35, 1], s[:35, 0])), 2 * np.pi / 70, rtol=1e-12)

    def test_zero_field(self):
        states = [(n, np.zeros(21)) for n in range(6)]
        tr = sensor_readout(states, 5, sensor_positions(70), every=2, dt=0.5)
        assert tr.shape == (3, 71)
        assert_allclose(tr[:, 0], [0.0, 1.0, 2.0])
        assert np.all(tr[:, 1:] == 0.0)

    def test_rim_reads_zero(self):
        rng = np.random.default_rng(3)
        tr = sensor_readout([(0, rng.standard_normal(21))], 5, [[1.0, 0.0], [0.0, -1.0]])
        assert np.all(tr[0, 1:] == 0.0)

    def test_outside_rejected(self):
        with pytest.raises(ValueError):
            sensor_readout([(0, np.zeros(6))], 2, [[0.8, 0.8]])

    def test_matches_solver_trace(self):
        s = sensor_positions(6, 0.3)
        out = solve_disk_wave(_small_disk(snapshot_every=1, T=4 * 2.0**-10), sensors=s)
        tr = sensor_readout(zip(out.steps, out.snapshots), 10, s, dt=2.0**-10)
        assert_allclose(tr, out.sensors, rtol=1e-13, atol=1e-15)


class TestMemoryReport:
    def test_examples(self):
        assert memory_report(40, 50, "caputo_only") == 2180
        assert memory_report(1, 1, "caputo_only") == 5
        assert memory_report(40, 50, "wave") == 2220

    def test_live_audit(self):
        st = AuxState(build_rule("birk-song", 0.5, 50), 0.01, 40)
        assert st.psi.size + st.f_prev.size == 2040
        assert st.rule.n_floats == 100
        assert st.n_floats + 40 == memory_report(40, 50)

    def test_rejects(self):
        with pytest.raises(ValueError):
            memory_report(0, 5)
        with pytest.raises(ValueError):
            memory_report(5, 5, "heat")
