"""Potential energy surfaces: harmonic, Morse, and user-supplied callables."""

import math

import numpy as np


class HarmonicPotential:
    """Isotropic harmonic well V(q) = (m omega^2 / 2) |q|^2 in D dimensions."""

    def __init__(self, m=1.0, omega=1.0, dim=1):
        if m <= 0 or omega <= 0:
            raise ValueError("mass and frequency must be positive")
        self.m = float(m)
        self.omega = float(omega)
        self.dim = int(dim)
        self._k = self.m * self.omega ** 2

    def value(self, q):
        q = np.asarray(q, dtype=float)
        return 0.5 * self._k * np.sum(q * q, axis=-1)

    def gradient(self, q):
        return self._k * np.asarray(q, dtype=float)

    def hessian(self, q):
        q = np.asarray(q, dtype=float)
        n = q.shape[0] if q.ndim == 2 else 1
        h = np.zeros((n, self.dim, self.dim))
        h[:, np.arange(self.dim), np.arange(self.dim)] = self._k
        return h

    def evaluate(self, q):
        return self.value(q), self.gradient(q), self.hessian(q)


class MorsePotential:
    """1D Morse well V(x) = V_eq + D_e (1 - exp(-a (x - q_eq)))^2."""

    dim = 1

    def __init__(self, d_e, a, q_eq=0.0, v_eq=0.0, m=1.0):
        if d_e <= 0 or a <= 0 or m <= 0:
            raise ValueError("D_e, a and m must be positive")
        self.d_e = float(d_e)
        self.a = float(a)
        self.q_eq = float(q_eq)
        self.v_eq = float(v_eq)
        self.m = float(m)

    @classmethod
    def from_spec(cls, spec):
        return cls(spec.d_e, spec.a, q_eq=spec.q_eq, v_eq=spec.v_eq, m=spec.m)

    def _exp(self, q):
        x = np.asarray(q, dtype=float)[..., 0]
        return np.exp(-self.a * (x - self.q_eq))

    def value(self, q):
        e = self._exp(q)
        return self.v_eq + self.d_e * (1.0 - e) ** 2

    def gradient(self, q):
        e = self._exp(q)
        return (2.0 * self.d_e * self.a * e * (1.0 - e))[..., None]

    def hessian(self, q):
        e = self._exp(q)
        return (2.0 * self.d_e * self.a ** 2 * e * (2.0 * e - 1.0))[..., None, None]

    def evaluate(self, q):
        # single exp shared by value, gradient and Hessian
        e = self._exp(q)
        v = self.v_eq + self.d_e * (1.0 - e) ** 2
        g = (2.0 * self.d_e * self.a * e * (1.0 - e))[..., None]
        h = (2.0 * self.d_e * self.a ** 2 * e * (2.0 * e - 1.0))[..., None, None]
        return v, g, h


class CustomPotential:
    """Wrap user callables V(q), grad V(q), Hess V(q) acting on (n, D) arrays."""

    def __init__(self, value, gradient, hessian, dim, m=1.0):
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self.dim = int(dim)
        self.m = float(m)

    def value(self, q):
        return self._value(np.asarray(q, dtype=float))

    def gradient(self, q):
        return self._gradient(np.asarray(q, dtype=float))

    def hessian(self, q):
        return self._hessian(np.asarray(q, dtype=float))

    def evaluate(self, q):
        return self.value(q), self.gradient(q), self.hessian(q)


def hamiltonian(potential, q, p):
    """Classical energy h(q, p) = |p|^2 / (2m) + V(q)."""
    p = np.asarray(p, dtype=float)
    return np.sum(p * p, axis=-1) / (2.0 * potential.m) + potential.value(q)


class MorseSpec:
    """Morse parametrization by dimensionless anharmonicity chi.

    chi = hbar omega_eq / (4 D_e), so D_e = hbar omega_eq / (4 chi) and
    a = sqrt(2 omega_eq chi / hbar); the harmonic frequency at the minimum
    satisfies omega_eq = sqrt(2 D_e a^2 / m).
    """

    def __init__(self, chi, omega_eq, v_eq=0.0, q_eq=0.0, m=1.0, hbar=1.0):
        if not (0.0 < chi < 0.5):
            raise ValueError("chi must lie in (0, 0.5) for a binding Morse well")
        if omega_eq <= 0:
            raise ValueError("omega_eq must be positive")
        self.chi = float(chi)
        self.omega_eq = float(omega_eq)
        self.v_eq = float(v_eq)
        self.q_eq = float(q_eq)
        self.m = float(m)
        self.hbar = float(hbar)
        self.d_e = self.hbar * self.omega_eq / (4.0 * self.chi)
        self.a = math.sqrt(2.0 * self.omega_eq * self.chi / self.hbar)

    def potential(self):
        return MorsePotential(self.d_e, self.a, q_eq=self.q_eq, v_eq=self.v_eq, m=self.m)

    def n_bound(self):
        """Number of bound levels, n = 0 .. floor(1/(2 chi) - 1/2)."""
        return int(math.floor(1.0 / (2.0 * self.chi) - 0.5)) + 1


def morse_levels(spec, n_max):
    """Bound-state energies E_n = hbar omega_eq [(n + 1/2) - chi (n + 1/2)^2].

    Energies are relative to the well bottom (add V_eq for absolute values).
    Raises ValueError when n_max exceeds the bound-state count.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if n_max > spec.n_bound():
        raise ValueError("only %d bound states exist for chi=%g, requested %d"
                         % (spec.n_bound(), spec.chi, n_max))
    n = np.arange(n_max) + 0.5
    return spec.hbar * spec.omega_eq * (n - spec.chi * n ** 2)
