import numpy as np
import pytest

from hkprop import (HarmonicPotential, Trajectory, hamiltonian,
                    harmonic_action, propagate, step)


class TestStep:
    def test_harmonic_period_return(self):
        # the Verlet phase error after one period is exactly
        # 2 pi (w dt)^2 / 24 = 1.034e-5 at this step size
        pot = HarmonicPotential()
        T = 2 * np.pi
        traj = propagate([1.0, 0.0], pot, T / 1000, 1000)
        assert abs(traj.q[0, 0] - 1.0) < 1.1e-5
        assert abs(traj.p[0, 0]) < 1.1e-5
        m = traj.stability_matrix()[0]
        assert np.max(np.abs(m - np.eye(2))) < 1.1e-5

    def test_action_closed_form_zero_cross_term(self):
        # q0 p0 = 0 so the closed form has no ambiguous cross term
        pot = HarmonicPotential()
        T = 2 * np.pi
        n = 10000
        traj = propagate([1.0, 0.0], pot, T / n, n)
        assert traj.S[0] == pytest.approx(harmonic_action([[1.0, 0.0]], 1.0, 1.0, T)[0],
                                          abs=1e-6)
        half = propagate([1.0, 0.0], pot, T / n, n // 4)
        assert half.S[0] == pytest.approx(
            harmonic_action([[1.0, 0.0]], 1.0, 1.0, T / 4)[0], abs=1e-6)

    def test_action_with_cross_term_against_quadrature(self):
        # direct integration of T - V along the trajectory is the oracle;
        # the closed form carries 2 q0 p0, not q0 p0
        pot = HarmonicPotential()
        n = 20000
        t_end = 0.9
        traj = propagate([1.0, 1.0], pot, t_end / n, n)
        assert traj.S[0] == pytest.approx(-np.sin(0.9) ** 2, abs=1e-7)
        assert traj.S[0] == pytest.approx(
            harmonic_action([[1.0, 1.0]], 1.0, 1.0, t_end)[0], abs=1e-7)

    def test_morse_energy_conservation(self, morse_spec_001):
        pot = morse_spec_001.potential()
        z0 = np.array([[0.0, 0.0]])
        e0 = hamiltonian(pot, z0[:, :1], z0[:, 1:])[0]
        traj = propagate(z0, pot, 8.0, 2020)
        e1 = hamiltonian(pot, traj.q, traj.p)[0]
        assert abs(e1 - e0) / abs(e0) < 1e-4

    def test_invalid_dt(self):
        traj = Trajectory.from_phase_points([[0.0, 0.0]])
        with pytest.raises(ValueError):
            step(traj, HarmonicPotential(), 0.0)


class TestPropagate:
    def test_zero_steps_is_identity(self):
        pot = HarmonicPotential()
        traj = propagate([0.3, -0.4], pot, 0.1, 0)
        assert traj.q[0, 0] == 0.3 and traj.p[0, 0] == -0.4
        assert traj.S[0] == 0.0
        assert np.array_equal(traj.stability_matrix()[0], np.eye(2))

    def test_stability_matrix_rotation(self):
        # M(t) = ((cos, sin/b), (-b sin, cos)) for the harmonic well
        pot = HarmonicPotential()
        t = np.pi / 2
        traj = propagate([0.2, 0.1], pot, t / 2000, 2000)
        m = traj.stability_matrix()[0]
        expect = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert np.max(np.abs(m - expect)) < 1e-5

    def test_morse_oscillation_period(self, morse_spec_0005):
        # roughly one oscillation after 196 steps of dt = 8
        pot = morse_spec_0005.potential()
        _, history = propagate([[0.0, 0.0]], pot, 8.0, 230, record_every=1)
        q = np.array([h.q[0, 0] for h in history])
        # period = first return to a position minimum
        minima = [k for k in range(1, len(q) - 1) if q[k] < q[k - 1] and q[k] <= q[k + 1]]
        assert minima[0] in range(193, 200)

    def test_history_recording(self):
        pot = HarmonicPotential()
        final, history = propagate([1.0, 0.0], pot, 0.01, 100, record_every=10)
        assert len(history) == 11
        assert history[0].t == 0.0
        assert history[-1].t == pytest.approx(final.t)


class TestInvariants:
    def test_symplecticity_long_run(self):
        pot = HarmonicPotential()
        T = 2 * np.pi
        traj = propagate([1.0, 0.5], pot, T / 1000, 10000)  # 10 periods
        m = traj.stability_matrix()[0]
        j = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert np.max(np.abs(m.T @ j @ m - j)) < 1e-8
        assert abs(np.linalg.det(m) - 1.0) < 1e-8

    def test_energy_bounded_no_drift(self, morse_spec_001):
        pot = morse_spec_001.potential()
        _, history = propagate([[0.0, 0.0]], pot, 8.0, 10000, record_every=500)
        e = np.array([hamiltonian(pot, h.q, h.p)[0] for h in history])
        fluct = np.abs(e - e[0])
        # bounded oscillation, not linear growth: late error comparable to early
        assert fluct.max() < 1e-4 * abs(e[0])
        assert fluct[-4:].max() < 2.0 * max(fluct[1:5].max(), 1e-18)

    def test_second_order_in_dt(self):
        pot = HarmonicPotential()
        T = 2 * np.pi
        errs = []
        for n in (400, 800):
            traj = propagate([1.0, 0.3], pot, T / n, n)
            errs.append(np.hypot(traj.q[0, 0] - 1.0, traj.p[0, 0] - 0.3))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)

    def test_action_derivative_matches_lagrangian(self, morse_spec_001):
        pot = morse_spec_001.potential()
        dt = 8.0
        _, history = propagate([[0.0, 0.0]], pot, dt, 40, record_every=1)
        s = np.array([h.S[0] for h in history])
        # centered finite difference of S at interior nodes
        ds = (s[2:] - s[:-2]) / (2 * dt)
        lag = np.array([
            hamiltonian(pot, h.q, h.p)[0] - 2.0 * pot.value(h.q)[0]
            for h in history[1:-1]])
        assert np.max(np.abs(ds - lag)) < 5e-3 * max(1e-12, np.max(np.abs(lag)))
