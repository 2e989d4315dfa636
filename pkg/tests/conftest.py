import numpy as np
import pytest

from hkprop import GaussianWavepacket, MorseSpec


@pytest.fixture
def packet_d1():
    """The 1D Gaussian used throughout the initial-error studies."""
    return GaussianWavepacket([-1.0], [0.0], 2.0)


@pytest.fixture
def packet_morse():
    """Initial state of the Morse experiments (gamma = 0.00456 a.u.)."""
    return GaussianWavepacket([0.0], [0.0], 0.00456)


@pytest.fixture
def morse_spec_001():
    return MorseSpec(0.01, 0.0041, v_eq=0.1, q_eq=20.95)


@pytest.fixture
def morse_spec_0005():
    return MorseSpec(0.005, 0.0041, v_eq=0.1, q_eq=20.95)


def quad_overlap(bra_z, ket_z, gamma, hbar=1.0, half_width=30.0, n=400001):
    """Brute-force <g_bra|g_ket> by trapezoid quadrature on a fine grid."""
    x = np.linspace(-half_width, half_width, n)
    dx = x[1] - x[0]

    def g(x, q, p):
        return (gamma / (np.pi * hbar)) ** 0.25 * np.exp(
            -gamma * (x - q) ** 2 / (2 * hbar) + 1j * p * (x - q) / hbar)

    vals = np.conj(g(x, bra_z[0], bra_z[1])) * g(x, ket_z[0], ket_z[1])
    return complex(np.trapz(vals, dx=dx))
