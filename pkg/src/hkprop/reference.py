"""Ground-truth propagators for validation.

Two references are provided: the closed-form evolution of a Gaussian in a
harmonic well (a thawed Gaussian with Moebius-rotating width), and a 1D
split-operator Fourier solver for arbitrary potentials.  The harmonic
closed forms for the classical inputs (trajectory, action, stability
matrix, HK prefactor) also live here, since exact-input Herman-Kluk runs
use them in place of the integrator.
"""

import numpy as np

from .grids import GridWavefunction


def _continuous_ellipse_angle(u, c_cos, c_sin):
    """Unwrapped angle of the curve (c_cos cos u, c_sin sin u), c_* > 0.

    The curve stays in the same quadrant as (cos u, sin u), hence its
    continuous angle never deviates from u by more than pi/2 and can be
    reconstructed from the principal value alone.
    """
    th = np.arctan2(c_sin * np.sin(u), c_cos * np.cos(u))
    return th + 2.0 * np.pi * np.round((u - th) / (2.0 * np.pi))


class HarmonicExactState:
    """Exact thawed-Gaussian parameters at time t for a harmonic well.

    psi(x, t) = exp{ (i/hbar) [ (alpha_t/2)(x - q_t)^2 + p_t (x - q_t) + beta_t ] }
    with alpha_0 = i gamma and beta_0 fixing psi(0) to the frozen Gaussian
    normalization.  The log branch in beta_t is unwrapped continuously in t.
    """

    def __init__(self, psi0, omega, m, t):
        if psi0.dim != 1:
            raise ValueError("harmonic closed form implemented for D=1")
        gamma = float(psi0.gamma[0, 0])
        hbar = psi0.hbar
        b = m * omega
        q0 = float(psi0.q0[0])
        p0 = float(psi0.p0[0])
        u = omega * t
        cos_u, sin_u = np.cos(u), np.sin(u)

        alpha0 = 1j * gamma
        zt = b * cos_u + alpha0 * sin_u
        self.alpha_t = b * (alpha0 * cos_u - b * sin_u) / zt
        self.q_t = q0 * cos_u + (p0 / b) * sin_u
        self.p_t = p0 * cos_u - b * q0 * sin_u
        # ln(z_t/b) with the branch continuous from t=0: z_t traces the
        # counterclockwise ellipse (b cos u, gamma sin u)
        theta = _continuous_ellipse_angle(u, b, gamma)
        log_zt = np.log(np.abs(zt) / b) + 1j * theta
        beta0 = -0.25j * hbar * np.log(gamma / (np.pi * hbar))
        self.beta_t = beta0 + 0.5 * (self.q_t * self.p_t - q0 * p0 + 1j * hbar * log_zt)
        self.omega = omega
        self.m = m
        self.t = t
        self.hbar = hbar

    def __call__(self, x):
        return np.exp(1j / self.hbar * (0.5 * self.alpha_t * (x - self.q_t) ** 2
                                        + self.p_t * (x - self.q_t) + self.beta_t))


def harmonic_exact(psi0, omega, m, t, grid):
    """Closed-form harmonic evolution of a Gaussian, evaluated on a grid."""
    state = HarmonicExactState(psi0, omega, m, t)
    return GridWavefunction(grid, state(grid.x), meta={"t": t})


def harmonic_width_step(alpha, omega, m, t):
    """One Moebius update of the complex width over a time t.

    alpha_t = b (alpha cos - b sin) / (b cos + alpha sin); composing two
    half-steps must agree with a direct step (consistency check target).
    """
    b = m * omega
    u = omega * t
    return b * (alpha * np.cos(u) - b * np.sin(u)) / (b * np.cos(u) + alpha * np.sin(u))


# -------------------- closed-form classical inputs (exact HK mode) ----------

def harmonic_classical(z0, omega, m, t):
    """q_t, p_t for initial points z0 of shape (n, 2) in a harmonic well."""
    z0 = np.atleast_2d(np.asarray(z0, dtype=float))
    b = m * omega
    u = omega * t
    q = z0[:, 0] * np.cos(u) + z0[:, 1] / b * np.sin(u)
    p = z0[:, 1] * np.cos(u) - b * z0[:, 0] * np.sin(u)
    return q, p


def harmonic_action(z0, omega, m, t):
    """Classical action along harmonic trajectories.

    S = (1/2) sin(u) [ (p0^2/b - b q0^2) cos(u) - 2 q0 p0 sin(u) ], u = omega t,
    which integrates dS/dt = T - V along Eqs. of motion (the cross term
    carries the factor 2; verified against direct quadrature).
    """
    z0 = np.atleast_2d(np.asarray(z0, dtype=float))
    b = m * omega
    u = omega * t
    q0, p0 = z0[:, 0], z0[:, 1]
    return 0.5 * np.sin(u) * ((p0 ** 2 / b - b * q0 ** 2) * np.cos(u)
                              - 2.0 * q0 * p0 * np.sin(u))


def harmonic_stability(omega, m, t):
    """Stability matrix ((cos, sin/b), (-b sin, cos)); z-independent."""
    b = m * omega
    u = omega * t
    return np.array([[np.cos(u), np.sin(u) / b], [-b * np.sin(u), np.cos(u)]])


def harmonic_prefactor(gamma, omega, m, t):
    """Branch-continuous HK prefactor R(t) of the harmonic oscillator.

    R^2 = A(t) = cos(u) - (i/2)(gamma/b + b/gamma) sin(u) traces a clockwise
    ellipse through A(0) = 1; the continuous argument is -angle of the
    ellipse (b-axis cos, k-axis sin), halved for R.
    """
    b = m * omega
    k = 0.5 * (gamma / b + b / gamma)
    u = omega * t
    mag = np.hypot(np.cos(u), k * np.sin(u))
    theta = _continuous_ellipse_angle(u, 1.0, k)
    return np.sqrt(mag) * np.exp(-0.5j * theta)


# ----------------------------- split-operator -------------------------------

def split_operator_propagate(psi, pot, dt, n_steps, hbar=1.0, edge_monitor=True):
    """Strang-split Fourier propagation of a 1D GridWavefunction.

    Each step applies exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2) with the
    kinetic factor in momentum space; unitary up to roundoff.  The result's
    meta notes when probability mass approaches the grid edge (no absorbing
    boundaries are used).
    """
    grid = psi.grid
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n_points, grid.dx)
    v = pot.value(grid.x[:, None])
    ekin = np.exp(-0.5j * hbar * k ** 2 * dt / pot.m)
    evhalf = np.exp(-0.5j * v * dt / hbar)
    values = psi.values.copy()
    for _ in range(n_steps):
        values = evhalf * np.fft.ifft(ekin * np.fft.fft(evhalf * values))
    meta = dict(psi.meta)
    if edge_monitor:
        dens = np.abs(values) ** 2 * grid.dx
        edge_mass = float(dens[:5].sum() + dens[-5:].sum())
        meta["edge_warning"] = edge_mass > 1e-10
        meta["edge_mass"] = edge_mass
    return GridWavefunction(grid, values, meta=meta)
