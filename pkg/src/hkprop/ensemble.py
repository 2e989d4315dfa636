"""Trajectory ensembles carrying the Herman-Kluk estimator.

An ensemble holds N sampled initial conditions z_j with fixed complex
weights r(z_j), the propagated classical states, and the branch-tracked
prefactor R(t, z_j).  The Monte Carlo estimate of the propagated
wavefunction is

    psi_N(x, t) = (1/N) sum_j r(z_j) R(t, z_j) exp(i S_j / hbar) g_{z_j(t)}(x),

assembled on a grid with a deterministic chunked reduction, or contracted
against analytic overlaps for autocorrelation functions.
"""

import numpy as np

from ._kernels import _propagate_1d, gaussian_sum
from .dynamics import Trajectory, _step_arrays
from .grids import GridWavefunction
from .potentials import HarmonicPotential, MorsePotential
from .prefactor import (HKPrefactorState, hk_prefactor, prefactor_determinant)
from .reduction import PairwiseAccumulator, chunked_map
from .wavepacket import batch_overlap_with


def synthesize_on_grid(grid, q_centers, p_centers, coeffs, gamma, hbar,
                       chunk=1024, workers=1, prefix_counts=None):
    """Sum of frozen Gaussians sum_j c_j g_(q_j,p_j)(x) on a 1D grid.

    When prefix_counts is given, returns the list of partial sums over the
    first k_i terms; chunk partials stream through a fixed pairwise
    reduction whose topology depends only on (chunk, prefix_counts), so
    nested ensembles reuse work and results never depend on the worker
    count.  The compiled kernel parallelizes internally over grid points
    (each grid value is a fixed sequential sum), which keeps it both fast
    and bitwise reproducible; `workers` is accepted for interface symmetry.
    """
    del workers  # kernel-internal parallelism is already deterministic
    q = np.asarray(q_centers, dtype=float).reshape(-1)
    p = np.asarray(p_centers, dtype=float).reshape(-1)
    c = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    x = grid.x
    norm = (float(gamma) / (np.pi * hbar)) ** 0.25

    boundaries = list(prefix_counts) if prefix_counts is not None else [len(q)]
    if boundaries != sorted(boundaries) or boundaries[-1] != len(q):
        raise ValueError("prefix_counts must increase and end at the sample count")
    acc = PairwiseAccumulator()
    prefixes = []
    done = 0
    for target in boundaries:
        while done < target:
            e = min(done + chunk, target)
            acc.add(gaussian_sum(x, q[done:e], p[done:e], c[done:e],
                                 float(gamma), hbar))
            done = e
        prefixes.append(acc.total() * norm)
    if prefix_counts is not None:
        return prefixes
    return prefixes[-1]


class HKEnsemble:
    """N guiding trajectories with fixed sampling weights and HK prefactors."""

    def __init__(self, psi0, scheme, z_samples, weights, potential=None,
                 dt=None, seed=None, chunk=1024):
        z_samples = np.atleast_2d(np.asarray(z_samples, dtype=float))
        weights = np.asarray(weights, dtype=np.complex128)
        if weights.shape[0] != z_samples.shape[0]:
            raise ValueError("one weight per sampled point required")
        if z_samples.shape[0] < 1:
            raise ValueError("need at least one trajectory")
        self.psi0 = psi0
        self.scheme = scheme
        self.z_samples = z_samples
        self.weights = weights
        self.potential = potential
        self.dt = dt
        self.seed = seed
        self.chunk = int(chunk)
        self.traj = Trajectory.from_phase_points(z_samples)
        self.pref = HKPrefactorState.initial(self.n)
        self.n_steps_done = 0

    @classmethod
    def build(cls, psi0, scheme, n, seed, potential=None, dt=None, chunk=1024):
        """Sample n initial conditions and initialize weights, M = Id, S = 0."""
        if n < 1:
            raise ValueError("need n >= 1 trajectories")
        z = scheme.sample(n, seed)
        w = scheme.prefactor(z)
        return cls(psi0, scheme, z, w, potential=potential, dt=dt, seed=seed, chunk=chunk)

    @property
    def n(self):
        return self.z_samples.shape[0]

    @property
    def dim(self):
        return self.psi0.dim

    @property
    def valid(self):
        return self.traj.valid & ~self.pref.caustic

    @property
    def n_invalid(self):
        return int(np.sum(~self.valid))

    def propagate(self, n_steps, workers=1):
        """Advance all trajectories by n_steps Verlet steps of size dt.

        The prefactor branch is updated every step.  For the 1D harmonic and
        Morse wells a compiled per-trajectory loop is used; otherwise work is
        cut into fixed trajectory chunks.  Either way results do not depend
        on the worker count.
        """
        if self.potential is None or self.dt is None:
            raise ValueError("ensemble was built without a potential/dt")
        if n_steps == 0:
            return self
        pot = self.potential
        if self.dim == 1 and isinstance(pot, (HarmonicPotential, MorsePotential)):
            self._propagate_fast(n_steps, pot)
            return self

        def run_block(s, e):
            tr = self.traj
            q, p, S = tr.q[s:e], tr.p[s:e], tr.S[s:e]
            Mqq, Mqp, Mpq, Mpp = tr.Mqq[s:e], tr.Mqp[s:e], tr.Mpq[s:e], tr.Mpp[s:e]
            valid = tr.valid[s:e]
            pref = HKPrefactorState(self.pref.R[s:e], self.pref.unwrapped_arg[s:e],
                                    t=self.pref.t, caustic=self.pref.caustic[s:e])
            cache = None
            for _ in range(n_steps):
                (q, p, S, Mqq, Mqp, Mpq, Mpp, valid, cache) = _step_arrays(
                    q, p, S, Mqq, Mqp, Mpq, Mpp, valid, self.potential, self.dt, cache)
                pref = hk_prefactor(Mqq, Mqp, Mpq, Mpp, self.psi0.gamma, pref, dt=self.dt)
            return q, p, S, Mqq, Mqp, Mpq, Mpp, valid, pref

        blocks = chunked_map(run_block, self.n, self.chunk, workers=workers)
        self.traj = Trajectory(
            np.concatenate([b[0] for b in blocks]),
            np.concatenate([b[1] for b in blocks]),
            np.concatenate([b[2] for b in blocks]),
            np.concatenate([b[3] for b in blocks]),
            np.concatenate([b[4] for b in blocks]),
            np.concatenate([b[5] for b in blocks]),
            np.concatenate([b[6] for b in blocks]),
            t=self.traj.t + n_steps * self.dt,
            valid=np.concatenate([b[7] for b in blocks]))
        self.pref = HKPrefactorState(
            np.concatenate([b[8].R for b in blocks]),
            np.concatenate([b[8].unwrapped_arg for b in blocks]),
            t=self.pref.t + n_steps * self.dt,
            caustic=np.concatenate([b[8].caustic for b in blocks]))
        self.n_steps_done += n_steps
        return self

    def _propagate_fast(self, n_steps, pot):
        tr = self.traj
        q = np.ascontiguousarray(tr.q[:, 0])
        p = np.ascontiguousarray(tr.p[:, 0])
        s = np.ascontiguousarray(tr.S)
        mqq = np.ascontiguousarray(tr.Mqq[:, 0, 0])
        mqp = np.ascontiguousarray(tr.Mqp[:, 0, 0])
        mpq = np.ascontiguousarray(tr.Mpq[:, 0, 0])
        mpp = np.ascontiguousarray(tr.Mpp[:, 0, 0])
        arg = np.ascontiguousarray(self.pref.unwrapped_arg)
        valid = np.ascontiguousarray(tr.valid)
        caustic = np.ascontiguousarray(self.pref.caustic)
        gamma = float(self.psi0.gamma[0, 0])
        if isinstance(pot, HarmonicPotential):
            kind, pp = 0, (pot.m * pot.omega ** 2, 0.0, 0.0, 0.0)
        else:
            kind, pp = 1, (pot.d_e, pot.a, pot.q_eq, pot.v_eq)
        _propagate_1d(q, p, s, mqq, mqp, mpq, mpp, arg, valid, caustic,
                      n_steps, self.dt, kind, pp[0], pp[1], pp[2], pp[3],
                      pot.m, gamma)
        t_new = self.traj.t + n_steps * self.dt
        self.traj = Trajectory(q[:, None], p[:, None], s,
                               mqq[:, None, None], mqp[:, None, None],
                               mpq[:, None, None], mpp[:, None, None],
                               t=t_new, valid=valid)
        a_det = prefactor_determinant(self.traj.Mqq, self.traj.Mqp,
                                      self.traj.Mpq, self.traj.Mpp,
                                      self.psi0.gamma)
        r = np.sqrt(np.abs(a_det)) * np.exp(0.5j * arg)
        self.pref = HKPrefactorState(r, arg, t=t_new, caustic=caustic)
        self.n_steps_done += n_steps

    def coefficients(self):
        """Per-trajectory complex amplitudes r(z_j) R_j exp(i S_j / hbar).

        Invalid trajectories contribute zero (their count is reported via
        n_invalid, the estimator still divides by the full N).
        """
        c = self.weights * self.pref.R * np.exp(1j * self.traj.S / self.psi0.hbar)
        mask = self.valid
        if not mask.all():
            c = np.where(mask, c, 0.0)
        return c

    def wavefunction(self, grid, workers=1):
        """psi_N(t) on a spatial grid (1D) with truncation diagnostics."""
        if self.dim != 1:
            raise ValueError("grid synthesis is only supported for D=1")
        c = self.coefficients() / self.n
        q = self.traj.q[:, 0]
        p = self.traj.p[:, 0]
        values = synthesize_on_grid(grid, q, p, c, self.psi0.gamma[0, 0],
                                    self.psi0.hbar, chunk=self.chunk, workers=workers)
        sigma_x = np.sqrt(self.psi0.hbar / (2.0 * self.psi0.gamma[0, 0]))
        outside = (q < grid.x_min + 6 * sigma_x) | (q > grid.x_max - 6 * sigma_x)
        mass_out = float(np.sum(np.abs(c[outside]))) if np.any(outside) else 0.0
        meta = {
            "truncation_warning": bool(np.any(outside)),
            "mass_loss_estimate": mass_out,
            "n_invalid": self.n_invalid,
        }
        return GridWavefunction(grid, values, meta=meta)

    def autocorrelation(self):
        """<psi0|psi_N(t)> via analytic Gaussian overlaps (no grid)."""
        olap = np.conj(batch_overlap_with(self.psi0, self.traj.q, self.traj.p))
        return complex(np.sum(self.coefficients() * olap) / self.n)

    def snapshot(self):
        """Deep copy of the propagated state, for checkpointed experiments."""
        other = HKEnsemble(self.psi0, self.scheme, self.z_samples.copy(),
                           self.weights.copy(), potential=self.potential,
                           dt=self.dt, seed=self.seed, chunk=self.chunk)
        other.traj = self.traj.copy()
        other.pref = HKPrefactorState(self.pref.R.copy(),
                                      self.pref.unwrapped_arg.copy(),
                                      t=self.pref.t, caustic=self.pref.caustic.copy())
        other.n_steps_done = self.n_steps_done
        return other
