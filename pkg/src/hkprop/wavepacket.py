"""Frozen Gaussian wavepackets and their analytic overlaps.

A frozen Gaussian centred at the phase-space point z = (q, p) with real
symmetric positive-definite width matrix gamma is

    g_z(x) = (det gamma / (pi hbar)^D)^(1/4)
             * exp[ -(x-q)^T gamma (x-q) / (2 hbar) + i p^T (x-q) / hbar ].

With this sign convention the overlap of two equal-width Gaussians is

    <g_z|g_z0> = exp[-(z-z0)^T Sigma0 (z-z0) / (4 hbar)]
               * exp[ i (p+p0)^T (q-q0) / (2 hbar)],   Sigma0 = diag(gamma, gamma^-1).
"""

import numpy as np

from .grids import GridWavefunction


class GaussianWavepacket:
    """Frozen Gaussian |g_z> with centre z0 = (q0, p0) and width matrix gamma."""

    def __init__(self, q0, p0, gamma, hbar=1.0):
        q0 = np.atleast_1d(np.asarray(q0, dtype=float))
        p0 = np.atleast_1d(np.asarray(p0, dtype=float))
        if q0.shape != p0.shape or q0.ndim != 1:
            raise ValueError("q0 and p0 must be 1D arrays of equal length")
        d = q0.size
        gamma = np.asarray(gamma, dtype=float)
        if gamma.ndim == 0:
            gamma = gamma * np.eye(d)
        if gamma.shape != (d, d):
            raise ValueError("gamma must be scalar or a (%d, %d) matrix" % (d, d))
        sym_err = np.max(np.abs(gamma - gamma.T))
        if sym_err > 1e-12 * max(1.0, np.max(np.abs(gamma))):
            raise ValueError("gamma must be symmetric")
        evals = np.linalg.eigvalsh(gamma)
        if np.min(evals) <= 0:
            raise ValueError("gamma must be positive definite")
        if hbar <= 0:
            raise ValueError("hbar must be positive")

        self.dim = d
        self.q0 = q0
        self.p0 = p0
        self.gamma = gamma
        self.gamma_inv = np.linalg.inv(gamma)
        self.hbar = float(hbar)

    @property
    def z0(self):
        """Phase-space centre as a flat (2D,) vector (q0, p0)."""
        return np.concatenate([self.q0, self.p0])

    def sigma0(self):
        """Width matrix Sigma0 = diag(gamma, gamma^-1) of the overlap quadratic form."""
        d = self.dim
        s = np.zeros((2 * d, 2 * d))
        s[:d, :d] = self.gamma
        s[d:, d:] = self.gamma_inv
        return s

    def sigma_quadform(self, z):
        """(z - z0)^T Sigma0 (z - z0) for one point or a batch of points.

        z has shape (2D,) or (n, 2D); returns a scalar or an (n,) array.
        """
        z = np.asarray(z, dtype=float)
        dz = z - self.z0
        d = self.dim
        dq = dz[..., :d]
        dp = dz[..., d:]
        return (
            np.einsum("...i,ij,...j->...", dq, self.gamma, dq)
            + np.einsum("...i,ij,...j->...", dp, self.gamma_inv, dp)
        )

    def overlap_phase(self, z):
        """(p + p0)^T (q - q0) / (2 hbar), the phase of the equal-width overlap."""
        z = np.asarray(z, dtype=float)
        d = self.dim
        q = z[..., :d]
        p = z[..., d:]
        return np.einsum("...i,...i->...", p + self.p0, q - self.q0) / (2.0 * self.hbar)

    def is_compatible(self, other):
        return (
            self.dim == other.dim
            and self.hbar == other.hbar
            and np.allclose(self.gamma, other.gamma, rtol=1e-12, atol=0.0)
        )


def gaussian_overlap(bra, ket):
    """Analytic overlap <g_bra|g_ket> of two equal-width frozen Gaussians.

    Parameters
    ----------
    bra, ket : GaussianWavepacket
        Must share dimension, width matrix and hbar.

    Returns
    -------
    complex
    """
    if not isinstance(bra, GaussianWavepacket) or not isinstance(ket, GaussianWavepacket):
        raise ValueError("bra and ket must be GaussianWavepacket instances")
    if bra.dim != ket.dim:
        raise ValueError("mismatched dimensions: %d vs %d" % (bra.dim, ket.dim))
    if bra.hbar != ket.hbar:
        raise ValueError("mismatched hbar")
    if not np.allclose(bra.gamma, ket.gamma, rtol=1e-12, atol=0.0):
        raise ValueError("mismatched width matrices (equal-gamma overlap only)")
    u = ket.sigma_quadform(bra.z0)
    phase = ket.overlap_phase(bra.z0)
    return complex(np.exp(-u / (4.0 * bra.hbar)) * np.exp(1j * phase))


def batch_overlap_with(packet, q, p):
    """<g_(q_j, p_j)|packet> for arrays of centres sharing packet's gamma.

    q, p have shape (n, D) (or (n,) in 1D); returns an (n,) complex array.
    This is the workhorse behind autocorrelation functions, kept analytic
    so no spatial grid enters.
    """
    q = np.atleast_2d(np.asarray(q, dtype=float).reshape(len(q), -1))
    p = np.atleast_2d(np.asarray(p, dtype=float).reshape(len(p), -1))
    z = np.concatenate([q, p], axis=1)
    u = packet.sigma_quadform(z)
    phase = packet.overlap_phase(z)
    # <g_z|g_z0> = exp(-u/4hbar) exp(+i phase)
    return np.exp(-u / (4.0 * packet.hbar) + 1j * phase)


def evaluate_gaussian(packet, grid):
    """Evaluate a 1D frozen Gaussian on a spatial grid.

    Returns a GridWavefunction; meta["coverage_warning"] is set when the grid
    does not contain q0 +/- 6 position standard deviations.
    """
    if packet.dim != 1:
        raise ValueError("grid evaluation is only supported for D=1")
    gamma = float(packet.gamma[0, 0])
    hbar = packet.hbar
    q0 = float(packet.q0[0])
    p0 = float(packet.p0[0])
    x = grid.x
    norm = (gamma / (np.pi * hbar)) ** 0.25
    values = norm * np.exp(-gamma * (x - q0) ** 2 / (2.0 * hbar)
                           + 1j * p0 * (x - q0) / hbar)
    sigma_x = np.sqrt(hbar / (2.0 * gamma))
    covered = (grid.x_min <= q0 - 6 * sigma_x) and (grid.x_max >= q0 + 6 * sigma_x)
    return GridWavefunction(grid, values, meta={"coverage_warning": not covered})
