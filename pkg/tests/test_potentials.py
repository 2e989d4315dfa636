import numpy as np
import pytest

from hkprop import (HarmonicPotential, MorsePotential, MorseSpec, hamiltonian,
                    morse_levels)


class TestHarmonic:
    def test_value_and_hessian(self):
        pot = HarmonicPotential(m=2.0, omega=3.0)
        q = np.array([[1.5]])
        assert pot.value(q)[0] == pytest.approx(0.5 * 2.0 * 9.0 * 2.25)
        assert pot.hessian(q)[0, 0, 0] == pytest.approx(18.0)

    def test_energy(self):
        pot = HarmonicPotential()
        h = hamiltonian(pot, np.array([[1.0]]), np.array([[2.0]]))
        assert h[0] == pytest.approx(0.5 + 2.0)


class TestMorse:
    def test_minimum(self, morse_spec_001):
        pot = morse_spec_001.potential()
        q = np.array([[20.95]])
        assert pot.value(q)[0] == pytest.approx(0.1, abs=1e-15)
        assert pot.gradient(q)[0, 0] == pytest.approx(0.0, abs=1e-15)
        # V''(q_eq) = 2 D_e a^2 = m omega_eq^2
        assert pot.hessian(q)[0, 0, 0] == pytest.approx(0.0041 ** 2, rel=1e-12)

    def test_finite_difference_consistency(self, morse_spec_001):
        pot = morse_spec_001.potential()
        q = np.array([[5.0], [30.0], [100.0]])
        eps = 1e-5
        num_grad = (pot.value(q + eps) - pot.value(q - eps)) / (2 * eps)
        assert np.allclose(pot.gradient(q)[:, 0], num_grad, rtol=1e-7, atol=1e-14)
        num_hess = (pot.gradient(q + eps)[:, 0] - pot.gradient(q - eps)[:, 0]) / (2 * eps)
        assert np.allclose(pot.hessian(q)[:, 0, 0], num_hess, rtol=1e-6, atol=1e-14)

    def test_evaluate_bundles_consistently(self, morse_spec_001):
        pot = morse_spec_001.potential()
        q = np.array([[0.0], [50.0]])
        v, g, h = pot.evaluate(q)
        assert np.allclose(v, pot.value(q))
        assert np.allclose(g, pot.gradient(q))
        assert np.allclose(h, pot.hessian(q))


class TestMorseSpec:
    def test_roundtrip_identities(self, morse_spec_001):
        s = morse_spec_001
        assert s.d_e == pytest.approx(1.0 * 0.0041 / (4 * 0.01), rel=1e-12)
        assert s.a == pytest.approx(np.sqrt(2 * 0.0041 * 0.01), rel=1e-12)
        # omega_eq = sqrt(2 D_e a^2 / m)
        assert np.sqrt(2 * s.d_e * s.a ** 2 / s.m) == pytest.approx(s.omega_eq, rel=1e-12)

    def test_chi_range(self):
        with pytest.raises(ValueError):
            MorseSpec(0.0, 1.0)
        with pytest.raises(ValueError):
            MorseSpec(0.6, 1.0)


class TestMorseLevels:
    def test_ground_state_chi_001(self, morse_spec_001):
        e = morse_levels(morse_spec_001, 1)
        assert e[0] == pytest.approx(2.03975e-3, rel=1e-10)

    def test_harmonic_limit(self):
        spec = MorseSpec(1e-6, 0.0041)
        e = morse_levels(spec, 2)
        assert e[1] - e[0] == pytest.approx(0.0041, rel=1e-4)

    def test_anharmonic_compression(self, morse_spec_0005):
        e = morse_levels(morse_spec_0005, 10)
        gaps = np.diff(e)
        assert np.all(np.diff(gaps) < 0)

    def test_bound_state_limit(self, morse_spec_001):
        # floor(1/(2 chi) - 1/2) = 49 for chi = 0.01
        assert morse_spec_001.n_bound() == 50
        morse_levels(morse_spec_001, 50)
        with pytest.raises(ValueError):
            morse_levels(morse_spec_001, 51)
