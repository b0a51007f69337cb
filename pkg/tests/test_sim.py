import io

import numpy as np
import numpy.testing as npt
import pytest

from nlbt import models
from nlbt.pipeline import balance
from nlbt.sim import (
    Trajectory,
    integrate,
    l2_error,
    signal,
    simulate_system,
    sinusoid,
    white_noise,
    zero_signal,
)


class TestIntegrate:
    def test_exponential_decay(self):
        traj = integrate(lambda x, u: -x, np.array([1.0]), zero_signal(), (0, 1))
        npt.assert_allclose(traj.x[-1, 0], np.exp(-1), atol=1e-6)
        assert not traj.diverged

    def test_constant(self):
        traj = integrate(lambda x, u: 0 * x, np.array([2.0, -1.0]), zero_signal(), (0, 5))
        npt.assert_allclose(traj.x, np.tile([2.0, -1.0], (traj.t.size, 1)), atol=1e-12)

    def test_tolerance_scaling(self):
        errs = []
        for rtol in (1e-5, 1e-8):
            traj = integrate(
                lambda x, u: -x, np.array([1.0]), zero_signal(), (0, 1),
                rel_tol=rtol, abs_tol=1e-14,
            )
            errs.append(abs(traj.x[-1, 0] - np.exp(-1)))
        assert errs[1] < errs[0]

    def test_divergence_flagged(self):
        traj = integrate(
            lambda x, u: x ** 2, np.array([1.0]), zero_signal(), (0, 5), n_samples=200
        )
        assert traj.diverged
        assert traj.t[-1] <= 5.0

    def test_balanced_coordinates_reproduce_full_model(self):
        # simulate the full balanced realization and map back through the
        # transformation: outputs match the original model
        sys = models.two_dim_illustrative()
        pl = balance(sys, 3)
        bal = pl.realize()
        x0 = np.array([0.07, -0.05])
        u = sinusoid(0.1, 1.0)
        ref = simulate_system(sys, x0, u, (0, 1), n_samples=500)
        z0 = pl.P(x0)
        zt = simulate_system(bal.sys, z0, u, (0, 1), n_samples=500)
        assert not ref.diverged and not zt.diverged
        assert np.max(np.abs(ref.y - zt.y)) <= 1e-4
        xs_back = np.array([pl.Tbar(z) for z in zt.x])
        assert np.max(np.abs(ref.x - xs_back)) <= 1e-3


class TestSignals:
    def test_zero(self):
        npt.assert_allclose(signal("zero")(3.7), [0.0])

    def test_sinusoid_value(self):
        u = signal("sinusoid", amp=0.5, freq=1 / np.pi)
        npt.assert_allclose(u(np.pi ** 2 / 2), [0.5 * np.sin(np.pi / 2)], rtol=1e-14)

    def test_white_noise_deterministic(self):
        u1 = white_noise(2.0, seed=42, hold_dt=0.01)
        u2 = white_noise(2.0, seed=42, hold_dt=0.01)
        ts = np.linspace(0, 1, 57)
        a = np.array([u1(t) for t in ts])
        b = np.array([u2(t) for t in reversed(ts)])[::-1]
        npt.assert_array_equal(a, b)

    def test_white_noise_holds(self):
        u = white_noise(1.0, seed=3, hold_dt=0.5)
        assert u(0.0) == u(0.49)
        assert u(0.0) != u(0.51)


class TestL2Error:
    def test_identical_is_zero(self):
        t = np.linspace(0, 1, 50)
        y = np.sin(t)[:, None]
        a = Trajectory(t, y, y=y)
        assert l2_error(a, a) == 0.0

    def test_constant_offset(self):
        t = np.linspace(0, 4, 400)
        a = Trajectory(t, np.zeros((400, 1)), y=np.zeros((400, 1)))
        b = Trajectory(t, np.zeros((400, 1)), y=0.3 * np.ones((400, 1)))
        npt.assert_allclose(l2_error(a, b), 0.3 * 2.0, rtol=1e-12)

    def test_grid_mismatch(self):
        a = Trajectory(np.linspace(0, 1, 10), np.zeros((10, 1)))
        b = Trajectory(np.linspace(0, 2, 10), np.zeros((10, 1)))
        with pytest.raises(ValueError):
            l2_error(a, b)


class TestTrajectoryCsv:
    def test_round_trip(self):
        t = np.linspace(0, 1, 7)
        x = np.random.default_rng(0).standard_normal((7, 2))
        y = x[:, :1] * 0.5
        u = np.ones((7, 1))
        traj = Trajectory(t, x, y=y, u=u)
        buf = io.StringIO()
        traj.to_csv(buf)
        buf.seek(0)
        back = Trajectory.from_csv(buf)
        npt.assert_array_equal(back.t, traj.t)
        npt.assert_array_equal(back.x, traj.x)
        npt.assert_array_equal(back.y, traj.y)
        npt.assert_array_equal(back.u, traj.u)

    def test_header_names(self):
        traj = Trajectory(np.array([0.0, 1.0]), np.zeros((2, 2)), y=np.zeros((2, 1)),
                          u=np.zeros((2, 1)))
        buf = io.StringIO()
        traj.to_csv(buf)
        assert buf.getvalue().splitlines()[0] == "t,x1,x2,y1,u1"
