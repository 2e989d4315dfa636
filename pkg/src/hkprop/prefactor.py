"""Herman-Kluk prefactor with continuous branch tracking.

The prefactor is R(t, z) = sqrt(A) with

    A = 2^-D det(M_qq + gamma^-1 M_pp gamma - i M_qp gamma + i gamma^-1 M_pq).

Rather than choosing a square-root branch, we track the continuously
unwrapped argument of A itself along each trajectory and halve it; this
removes the sign ambiguity entirely as long as the per-step change of
arg(A) stays below pi (guaranteed by a sane time step).
"""

import numpy as np


class CausticError(RuntimeError):
    """Raised when the prefactor determinant collapses (|A| ~ 0)."""


CAUSTIC_THRESHOLD = 1e-30


class HKPrefactorState:
    """Branch-tracked prefactor values for a batch of trajectories."""

    def __init__(self, R, unwrapped_arg, t=0.0, caustic=None):
        self.R = np.asarray(R, dtype=np.complex128)
        self.unwrapped_arg = np.asarray(unwrapped_arg, dtype=float)
        self.t = float(t)
        n = self.R.shape[0]
        self.caustic = np.zeros(n, dtype=bool) if caustic is None else np.asarray(caustic, dtype=bool)

    @classmethod
    def initial(cls, n):
        """State at t = 0 where M = Id gives A = 1 and R = 1 exactly."""
        return cls(np.ones(n, dtype=np.complex128), np.zeros(n), t=0.0)


def _gamma_conjugated_blocks(Mqq, Mqp, Mpq, Mpp, gamma):
    gamma = np.asarray(gamma, dtype=float)
    gamma_inv = np.linalg.inv(gamma)
    if gamma.shape[0] == 1:
        g = gamma[0, 0]
        return Mqq + Mpp, -Mqp * g + Mpq / g
    real = Mqq + np.einsum("ij,njk,kl->nil", gamma_inv, Mpp, gamma)
    imag = -np.einsum("nij,jk->nik", Mqp, gamma) + np.einsum("ij,njk->nik", gamma_inv, Mpq)
    return real, imag


def prefactor_determinant(Mqq, Mqp, Mpq, Mpp, gamma):
    """A = 2^-D det(M_qq + gamma^-1 M_pp gamma - i M_qp gamma + i gamma^-1 M_pq)."""
    d = Mqq.shape[-1]
    real, imag = _gamma_conjugated_blocks(Mqq, Mqp, Mpq, Mpp, gamma)
    mat = real + 1j * imag
    if d == 1:
        det = mat[..., 0, 0]
    else:
        det = np.linalg.det(mat)
    return 2.0 ** (-d) * det


def hk_prefactor(Mqq, Mqp, Mpq, Mpp, gamma, prev, dt=None):
    """Advance the branch-tracked prefactor to the stability matrix given.

    Parameters
    ----------
    Mqq, Mqp, Mpq, Mpp : (n, D, D) arrays
        Stability blocks at the new time (one integrator step past prev).
    gamma : (D, D) array
        Width matrix of the frozen Gaussians.
    prev : HKPrefactorState
        State at the previous step; the per-step change of arg(A) must stay
        below pi for the unwrapping to be faithful.

    Returns
    -------
    HKPrefactorState
        With R = sqrt(|A|) exp(i arg_unwrapped / 2) and trajectories whose
        |A| fell below 1e-30 flagged as caustic.
    """
    A = prefactor_determinant(Mqq, Mqp, Mpq, Mpp, gamma)
    mag = np.abs(A)
    caustic = prev.caustic | (mag < CAUSTIC_THRESHOLD)
    # principal increment nearest zero
    delta = np.angle(A) - prev.unwrapped_arg
    delta -= 2.0 * np.pi * np.round(delta / (2.0 * np.pi))
    arg = prev.unwrapped_arg + delta
    with np.errstate(invalid="ignore"):
        R = np.sqrt(mag) * np.exp(0.5j * arg)
    t = prev.t if dt is None else prev.t + dt
    return HKPrefactorState(R, arg, t=t, caustic=caustic)


def prefactor_bound_check(Mqq, Mqp, Mpq, Mpp, gamma):
    """Two independent routes to |R|^2 that must agree for symplectic M.

    Returns (lhs, rhs) with lhs = |A| from the determinant definition and
    rhs = 2^-D sqrt(det(Id_2D + Mt^T Mt)) where Mt is the gamma-conjugated
    stability matrix diag(Id, gamma^-1) M diag(Id, gamma).
    """
    d = Mqq.shape[-1]
    lhs = np.abs(prefactor_determinant(Mqq, Mqp, Mpq, Mpp, gamma))

    gamma = np.asarray(gamma, dtype=float)
    gamma_inv = np.linalg.inv(gamma)
    top = np.concatenate([Mqq, np.einsum("nij,jk->nik", Mqp, gamma)], axis=2)
    bot = np.concatenate([np.einsum("ij,njk->nik", gamma_inv, Mpq),
                          np.einsum("ij,njk,kl->nil", gamma_inv, Mpp, gamma)], axis=2)
    mt = np.concatenate([top, bot], axis=1)
    gram = np.eye(2 * d) + np.einsum("nji,njk->nik", mt, mt)
    rhs = 2.0 ** (-d) * np.sqrt(np.linalg.det(gram))
    return lhs, rhs
