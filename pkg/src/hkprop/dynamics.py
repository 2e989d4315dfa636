"""Classical trajectories with action and stability matrix, integrated by
a Stoermer-Verlet (velocity Verlet) scheme.

One kick-drift-kick step advances positions and momenta, the same scheme
linearized advances the stability blocks M_ab = d a(t) / d b(0), and the
action accumulates the trapezoid of the Lagrangian T(p) - V(q) at the step
endpoints (all second-order consistent).
"""

import numpy as np


class Trajectory:
    """Batch of classical states: z(t), action S(t), stability matrix M(t).

    Arrays carry a leading batch axis: q, p are (n, D); S is (n,); the four
    stability blocks are (n, D, D).  A single trajectory is simply n = 1.
    Instances are treated as values; integration returns new objects.
    """

    def __init__(self, q, p, S=None, Mqq=None, Mqp=None, Mpq=None, Mpp=None,
                 t=0.0, valid=None):
        q = np.atleast_2d(np.asarray(q, dtype=float))
        p = np.atleast_2d(np.asarray(p, dtype=float))
        if q.shape != p.shape:
            raise ValueError("q and p must have matching shapes")
        n, d = q.shape
        eye = np.broadcast_to(np.eye(d), (n, d, d)).copy()
        zero = np.zeros((n, d, d))
        self.q = q
        self.p = p
        self.S = np.zeros(n) if S is None else np.asarray(S, dtype=float).copy()
        self.Mqq = eye.copy() if Mqq is None else np.asarray(Mqq, dtype=float).copy()
        self.Mqp = zero.copy() if Mqp is None else np.asarray(Mqp, dtype=float).copy()
        self.Mpq = zero.copy() if Mpq is None else np.asarray(Mpq, dtype=float).copy()
        self.Mpp = eye.copy() if Mpp is None else np.asarray(Mpp, dtype=float).copy()
        self.t = float(t)
        self.valid = np.ones(n, dtype=bool) if valid is None else np.asarray(valid, dtype=bool).copy()

    @classmethod
    def from_phase_points(cls, z):
        """Initial conditions from (n, 2D) phase-space points: M = Id, S = 0."""
        z = np.atleast_2d(np.asarray(z, dtype=float))
        d = z.shape[1] // 2
        return cls(z[:, :d], z[:, d:])

    @property
    def n(self):
        return self.q.shape[0]

    @property
    def dim(self):
        return self.q.shape[1]

    def z(self):
        return np.concatenate([self.q, self.p], axis=1)

    def stability_matrix(self):
        """Full (n, 2D, 2D) stability matrix assembled from the blocks."""
        top = np.concatenate([self.Mqq, self.Mqp], axis=2)
        bot = np.concatenate([self.Mpq, self.Mpp], axis=2)
        return np.concatenate([top, bot], axis=1)

    def copy(self):
        out = Trajectory(self.q.copy(), self.p.copy(), self.S, self.Mqq,
                         self.Mqp, self.Mpq, self.Mpp, t=self.t, valid=self.valid)
        return out


def _hess_dot(h, m):
    # h: (n, D, D), m: (n, D, D); elementwise product suffices in 1D
    if h.shape[1] == 1:
        return h * m
    return np.einsum("nij,njk->nik", h, m)


def _step_arrays(q, p, S, Mqq, Mqp, Mpq, Mpp, valid, pot, dt, cache=None):
    """One velocity-Verlet step on raw arrays. Returns updated arrays + cache.

    cache holds (V, grad, hess) at the current q so consecutive steps evaluate
    the potential once per step.
    """
    m = pot.m
    if cache is None:
        v0, g0, h0 = pot.evaluate(q)
    else:
        v0, g0, h0 = cache
    lag0 = np.sum(p * p, axis=-1) / (2.0 * m) - v0

    p_half = p - 0.5 * dt * g0
    Mpq_h = Mpq - 0.5 * dt * _hess_dot(h0, Mqq)
    Mpp_h = Mpp - 0.5 * dt * _hess_dot(h0, Mqp)

    q_new = q + dt * p_half / m
    Mqq_new = Mqq + dt * Mpq_h / m
    Mqp_new = Mqp + dt * Mpp_h / m

    v1, g1, h1 = pot.evaluate(q_new)
    p_new = p_half - 0.5 * dt * g1
    Mpq_new = Mpq_h - 0.5 * dt * _hess_dot(h1, Mqq_new)
    Mpp_new = Mpp_h - 0.5 * dt * _hess_dot(h1, Mqp_new)

    lag1 = np.sum(p_new * p_new, axis=-1) / (2.0 * m) - v1
    S_new = S + 0.5 * dt * (lag0 + lag1)

    finite = np.isfinite(g1[..., 0]) & np.isfinite(q_new[..., 0]) & np.isfinite(p_new[..., 0])
    valid_new = valid & finite
    return (q_new, p_new, S_new, Mqq_new, Mqp_new, Mpq_new, Mpp_new, valid_new,
            (v1, g1, h1))


def step(traj, pot, dt):
    """Advance a Trajectory by one Verlet step; returns a new Trajectory.

    Trajectories that develop a non-finite force are flagged invalid and
    frozen (their state stops being meaningful; callers count them).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    out = _step_arrays(traj.q, traj.p, traj.S, traj.Mqq, traj.Mqp, traj.Mpq,
                       traj.Mpp, traj.valid, pot, dt)
    q, p, S, Mqq, Mqp, Mpq, Mpp, valid, _ = out
    new = Trajectory(q, p, S, Mqq, Mqp, Mpq, Mpp, t=traj.t + dt, valid=valid)
    return new


def propagate(z0, pot, dt, n_steps, record_every=None):
    """Integrate initial phase-space points for n_steps.

    Parameters
    ----------
    z0 : (n, 2D) or (2D,) array
        Initial phase-space points.
    record_every : int or None
        When set, also return snapshots every that many steps (including the
        initial state and the final one).

    Returns
    -------
    Trajectory or (Trajectory, list[Trajectory])
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    traj = Trajectory.from_phase_points(z0)
    history = [traj.copy()] if record_every else None
    cache = None
    q, p, S = traj.q, traj.p, traj.S
    Mqq, Mqp, Mpq, Mpp = traj.Mqq, traj.Mqp, traj.Mpq, traj.Mpp
    valid = traj.valid
    for k in range(1, n_steps + 1):
        (q, p, S, Mqq, Mqp, Mpq, Mpp, valid, cache) = _step_arrays(
            q, p, S, Mqq, Mqp, Mpq, Mpp, valid, pot, dt, cache)
        if record_every and (k % record_every == 0 or k == n_steps):
            history.append(Trajectory(q, p, S, Mqq, Mqp, Mpq, Mpp,
                                      t=k * dt, valid=valid))
    final = Trajectory(q, p, S, Mqq, Mqp, Mpq, Mpp, t=n_steps * dt, valid=valid)
    if record_every:
        return final, history
    return final
