"""Initial phase-space sampling densities and their importance prefactors.

All densities are expressed with respect to the scaled measure
dnu = dz / (2 pi hbar)^D.  The whole family is

    rho_a(z) = (2/a)^D exp[-(z-z0)^T Sigma0 (z-z0) / (a hbar)],   a >= 2,

so that a=2 is the Husimi density of a Gaussian initial state and a=4 its
normalized square root.  Samples are drawn from the normal law with mean z0
and covariance (a hbar / 2) Sigma0^-1.
"""

import math

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

HUSIMI = "husimi"
SQRT_HUSIMI = "sqrt-husimi"
GENERAL_A = "general-a"

# |overlap| below exp(-_MAX_LOG) would overflow the Husimi prefactor
_MAX_LOG = 690.0


class SamplingScheme:
    """A sampling density rho over phase space together with its prefactor r.

    The defining identity, valid pointwise for every scheme, is

        r(z) * rho(z) = <g_z|psi0>.
    """

    def __init__(self, kind, psi0, a=None):
        if kind not in (HUSIMI, SQRT_HUSIMI, GENERAL_A):
            raise ValueError("unknown sampling scheme kind %r" % (kind,))
        if kind == GENERAL_A:
            if a is None:
                raise ValueError("kind 'general-a' requires the parameter a")
            a = float(a)
            if a < 2.0:
                raise ValueError("a must be >= 2, got %g" % a)
        else:
            a = 2.0 if kind == HUSIMI else 4.0
        self.kind = kind
        self.a = a
        self.psi0 = psi0

    @classmethod
    def husimi(cls, psi0):
        return cls(HUSIMI, psi0)

    @classmethod
    def sqrt_husimi(cls, psi0):
        return cls(SQRT_HUSIMI, psi0)

    @classmethod
    def general_a(cls, a, psi0):
        return cls(GENERAL_A, psi0, a=a)

    # ------------------------------------------------------------- density
    def density(self, z):
        """rho(z) with respect to dnu; nonnegative, integrates to one."""
        u = self.psi0.sigma_quadform(z)
        d = self.psi0.dim
        return (2.0 / self.a) ** d * np.exp(-u / (self.a * self.psi0.hbar))

    def prefactor(self, z):
        """Complex weight r(z) with r(z) rho(z) = <g_z|psi0>.

        Unbounded for the Husimi scheme; raises OverflowError when the
        overlap magnitude falls below ~1e-300.
        """
        u = np.asarray(self.psi0.sigma_quadform(z), dtype=float)
        d = self.psi0.dim
        hbar = self.psi0.hbar
        log_mag = (4.0 - self.a) / (4.0 * self.a) * u / hbar
        if np.any(log_mag > _MAX_LOG):
            raise OverflowError(
                "sampling prefactor overflow: overlap magnitude below 1e-300")
        phase = self.psi0.overlap_phase(z)
        return (self.a / 2.0) ** d * np.exp(log_mag + 1j * phase)

    # ------------------------------------------------------------- sampling
    @property
    def covariance(self):
        """Covariance (a hbar / 2) Sigma0^-1 of the sampled normal law."""
        d = self.psi0.dim
        c = np.zeros((2 * d, 2 * d))
        c[:d, :d] = self.psi0.gamma_inv
        c[d:, d:] = self.psi0.gamma
        return 0.5 * self.a * self.psi0.hbar * c

    def _stride(self):
        # raw 64-bit words consumed per sample; Philox.advance skips whole
        # 4-word blocks, so keep the stride a multiple of 4
        need = 2 * self.psi0.dim
        return 4 * ((need + 3) // 4)

    def sample_block(self, seed, start, count):
        """Samples with indices [start, start+count); pure in (seed, index)."""
        d = self.psi0.dim
        stride = self._stride()
        bitgen = Philox(key=np.uint64(seed))
        if start:
            bitgen.advance(start * (stride // 4))
        raw = bitgen.random_raw(count * stride).reshape(count, stride)
        # midpoint mapping keeps u strictly inside (0, 1) so ndtri is finite
        u = ((raw[:, : 2 * d] >> np.uint64(11)) + 0.5) * 2.0 ** -53
        normals = ndtri(u)
        scale_q = np.linalg.cholesky(self.psi0.gamma_inv)
        scale_p = np.linalg.cholesky(self.psi0.gamma)
        fac = math.sqrt(0.5 * self.a * self.psi0.hbar)
        z = np.empty((count, 2 * d))
        z[:, :d] = self.psi0.q0 + fac * normals[:, :d] @ scale_q.T
        z[:, d:] = self.psi0.p0 + fac * normals[:, d:] @ scale_p.T
        return z

    def sample(self, n, seed):
        """Draw n i.i.d. phase-space points, shape (n, 2D).

        Sample i is a pure function of (seed, i): requesting more samples or
        partitioning the work across blocks never changes earlier draws.
        """
        if n < 1:
            raise ValueError("need n >= 1 samples")
        return self.sample_block(seed, 0, n)
