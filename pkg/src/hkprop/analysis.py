"""Error metrics, variance laws, convergence fits and trajectory planning."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc, gammainc

from .reduction import chunk_ranges


# ------------------------------------------------------------------ metrics

def l2_error(a, b):
    """Discrete L2 distance sqrt(sum |a - b|^2 dx) between grid wavefunctions."""
    if a.grid != b.grid:
        raise ValueError("wavefunctions live on different grids")
    return float(np.sqrt(np.sum(np.abs(a.values - b.values) ** 2) * a.grid.dx))


def empirical_rmse(runs, reference):
    """Mean squared L2 error S_K = (1/K) sum_j ||psi^(j) - ref||^2.

    Returns (s_k, sqrt(s_k)); the literature calls S_K an RMSE although the
    formula is a mean of squares, so both are exposed.
    """
    if not runs:
        raise ValueError("need at least one run")
    total = 0.0
    for r in runs:
        total += l2_error(r, reference) ** 2
    s_k = total / len(runs)
    return s_k, math.sqrt(s_k)


# ----------------------------------------------------------- variance laws

def variance_initial_sqrt_husimi(dim):
    """Integrand variance of sqrt-Husimi sampling at t = 0: 4^D - 1."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return 4.0 ** dim - 1.0


def variance_rho_a_initial(a, dim):
    """Initial variance (a^2 / (2(a-2)))^D - 1 of the rho_a family; a > 2.

    Minimized at a = 4 where it coincides with the sqrt-Husimi value.
    """
    if a <= 2:
        raise ValueError("the variance is finite only for a > 2")
    return (a * a / (2.0 * (a - 2.0))) ** dim - 1.0


def variance_harmonic_sqrt_husimi(gamma, m, omega, t):
    """Time-dependent sqrt-Husimi variance in a 1D harmonic well.

    V(t) = 2 [4 cos^2(wt) + (gamma/b + b/gamma)^2 sin^2(wt)]^(1/2) - 1 with
    b = m omega; pi/omega-periodic, between 3 and 2(gamma/b + b/gamma) - 1.
    """
    b = m * omega
    k = gamma / b + b / gamma
    u = omega * np.asarray(t, dtype=float)
    val = 2.0 * np.sqrt(4.0 * np.cos(u) ** 2 + k ** 2 * np.sin(u) ** 2) - 1.0
    return float(val) if val.ndim == 0 else val


# ------------------------------------------------------------------- fits

@dataclass
class ConvergenceFit:
    """Least-squares power law F(N) = c N^-s fitted in log-log space."""
    c: float
    s: float
    residual: float
    n_values: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def __call__(self, n):
        return self.c * np.asarray(n, dtype=float) ** (-self.s)


def fit_power_law(n_values, errors):
    """Fit errors ~ c N^-s by linear least squares on the logarithms."""
    n_values = np.asarray(n_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if n_values.size < 3:
        raise ValueError("need at least 3 points for a power-law fit")
    if np.any(errors <= 0) or np.any(n_values <= 0):
        raise ValueError("power-law fit requires positive N and errors")
    ln_n = np.log(n_values)
    ln_e = np.log(errors)
    slope, intercept = np.polyfit(ln_n, ln_e, 1)
    resid = float(np.sqrt(np.mean((ln_e - (slope * ln_n + intercept)) ** 2)))
    return ConvergenceFit(c=float(np.exp(intercept)), s=float(-slope), residual=resid,
                          n_values=list(map(float, n_values)),
                          errors=list(map(float, errors)))


# ------------------------------------------------- trajectory-count planning

@dataclass
class TrajectoryCountQuery:
    sigma2: float
    epsilon: float
    p: float

    def __post_init__(self):
        if self.sigma2 <= 0 or self.epsilon <= 0 or not (0.0 < self.p < 1.0):
            raise ValueError("need sigma2 > 0, epsilon > 0 and 0 < p < 1")


def chebyshev_min_trajectories(query):
    """Chebyshev lower bound N >= sigma^2 / (p epsilon^2), rounded up."""
    return int(math.ceil(query.sigma2 / (query.p * query.epsilon ** 2)))


def erfc_inv(y, tol=1e-12, max_iter=100):
    """Inverse complementary error function on (0, 2) by bracketed Newton.

    Newton on erfc(x) - y with an asymptotic start; bisection fallback keeps
    the iterate inside a sign-changing bracket.  Accurate to ~1e-14.
    """
    if not (0.0 < y < 2.0):
        raise ValueError("erfc_inv argument must lie in (0, 2)")
    if y == 1.0:
        return 0.0
    if y > 1.0:
        return -erfc_inv(2.0 - y, tol=tol, max_iter=max_iter)
    # erfc(x) ~ exp(-x^2) / (x sqrt(pi)) for large x
    x = math.sqrt(max(-math.log(y), 1e-8))
    lo, hi = 0.0, max(2.0 * x, 2.0)
    while erfc(hi) > y:
        lo, hi = hi, 2.0 * hi
    for _ in range(max_iter):
        f = erfc(x) - y
        if f > 0:
            lo = max(lo, x)
        else:
            hi = min(hi, x)
        step = f / (2.0 / math.sqrt(math.pi) * math.exp(-x * x))
        x_new = x + step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < tol * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def clt_trajectory_estimate(query):
    """CLT estimate N ~ (sigma^2 / 2 eps^2) [erfc^-1(2p)]^2, rounded up.

    Only meaningful for p < 1/2 (otherwise erfc^-1(2p) <= 0); raises
    ValueError in that regime so callers can report not-applicable.
    """
    if query.p >= 0.5:
        raise ValueError("CLT estimate requires p < 1/2")
    z = erfc_inv(2.0 * query.p)
    return int(math.ceil(query.sigma2 / (2.0 * query.epsilon ** 2) * z * z))


# ------------------------------------------------------------------ spectra

def spectrum(autocorr, dt, hbar=1.0, damping_hwhm=None):
    """Energy spectrum from the Fourier transform of an autocorrelation series.

    Intensity(E_k) = |dt * sum_n C(t_n) exp(i E_k t_n / hbar)| on the FFT
    energy ladder E_k = 2 pi hbar k / (L dt), sorted ascending.  Optional
    Gaussian damping exp(-ln2 (t / hwhm)^2) broadens peaks without moving
    them.

    Returns (energies, intensities).
    """
    c = np.asarray(autocorr, dtype=np.complex128)
    if c.ndim != 1 or c.size < 2:
        raise ValueError("need a 1D autocorrelation series of length >= 2")
    t = dt * np.arange(c.size)
    if damping_hwhm is not None:
        c = c * np.exp(-math.log(2.0) * (t / damping_hwhm) ** 2)
    # exp(+iEt/hbar) convention puts peaks of exp(-iE_n t/hbar) terms at +E_n
    transform = c.size * np.fft.ifft(c) * dt
    energies = 2.0 * np.pi * hbar * np.fft.fftfreq(c.size, dt)
    order = np.argsort(energies)
    return energies[order], np.abs(transform)[order]


def spectral_peaks(energies, intensities, min_rel_height=0.05):
    """Energies of local maxima above a fraction of the global maximum."""
    e = np.asarray(energies)
    y = np.asarray(intensities)
    thresh = min_rel_height * float(y.max())
    idx = np.where((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]) & (y[1:-1] >= thresh))[0] + 1
    return e[idx]


# -------------------------------------------- exact initial-time L2 metrics

def _displaced_coefficients(psi0, z, weights):
    """Per-sample coefficients in the displaced coherent (number) basis.

    Writing g_z = e^{-ipq/2hbar} D(alpha)|0>, the basis |n~> = D(alpha0)|n>
    gives <n~|g_z> = phase * e^{-|delta|^2/2} prod_d delta_d^{n_d}/sqrt(n_d!)
    with delta = alpha - alpha0.  Returns (delta (n, D) complex, b (n,)
    complex prefactors including the weights, phase0 of psi0 itself).
    Diagonal width matrices only.
    """
    gamma_diag = np.diag(psi0.gamma).copy()
    if not np.allclose(psi0.gamma, np.diag(gamma_diag), rtol=0.0, atol=1e-14):
        raise ValueError("coherent-basis metric requires a diagonal width matrix")
    hbar = psi0.hbar
    d = psi0.dim
    z = np.atleast_2d(np.asarray(z, dtype=float))
    q = z[:, :d]
    p = z[:, d:]
    sq = np.sqrt(gamma_diag / (2.0 * hbar))
    sp = 1.0 / np.sqrt(2.0 * gamma_diag * hbar)
    alpha = q * sq + 1j * p * sp
    alpha0 = psi0.q0 * sq + 1j * psi0.p0 * sp
    delta = alpha - alpha0
    pq = np.einsum("ni,ni->n", p, q)
    bch = np.einsum("i,ni->n", np.conj(alpha0), delta).imag
    b = weights * np.exp(-1j * pq / (2.0 * hbar) + 1j * bch
                         - 0.5 * np.einsum("ni,ni->n", np.abs(delta), np.abs(delta)))
    phase0 = np.exp(-1j * float(np.dot(psi0.p0, psi0.q0)) / (2.0 * hbar))
    return delta, b, phase0


def _select_total_degree(lam, b_abs, tol, boundaries):
    """Smallest total degree M whose truncated amplitude stays below tol.

    The mass of sample j beyond total degree M is the Poisson(lam_j) tail,
    so the dropped amplitude of the k-sample estimator is bounded by
    (1/k) sum_{j<k} |b_j| sqrt(sf(M, lam_j)); |b_j| already carries the
    exp(-lam_j/2) suppression, which is what keeps M moderate even when a
    few samples sit far out in the sampling cloud.  The bound is enforced
    for every requested prefix length.
    """
    lam = np.maximum(lam, 1e-300)
    ends = np.asarray(boundaries, dtype=int)
    m = max(4, int(np.ceil(lam.mean())))
    while True:
        # sf(m, lam) = regularized lower incomplete gamma P(m+1, lam)
        contrib = np.cumsum(b_abs * np.sqrt(gammainc(m + 1, lam)))
        bound = float(np.max(contrib[ends - 1] / ends))
        if bound < tol:
            return m
        m += 4


def _half_indices(m_tot, n_dims):
    """Multi-indices over n_dims dimensions with total degree <= m_tot."""
    if n_dims == 1:
        return np.arange(m_tot + 1)[:, None]
    idx = []
    def rec(prefix, remaining, dims_left):
        if dims_left == 1:
            for k in range(remaining + 1):
                idx.append(prefix + [k])
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, dims_left - 1)
    rec([], m_tot, n_dims)
    return np.asarray(idx)


def _half_factor_matrix(delta_half, indices):
    """Matrix V[j, a] = prod_d delta_jd^{n_ad} / sqrt(n_ad!)."""
    n, d = delta_half.shape
    m_max = int(indices.max())
    # powers[j, d, k] = delta_jd^k / sqrt(k!)
    powers = np.empty((n, d, m_max + 1), dtype=np.complex128)
    powers[:, :, 0] = 1.0
    for k in range(1, m_max + 1):
        powers[:, :, k] = powers[:, :, k - 1] * delta_half / math.sqrt(k)
    v = powers[:, 0, indices[:, 0]]
    for dd in range(1, d):
        v = v * powers[:, dd, indices[:, dd]]
    return v


def coherent_initial_error(psi0, z, weights, prefix_counts=None, chunk=4096,
                           tail_tol=1e-6):
    """Exact initial-time L2 errors ||psi_N(0) - psi0|| in a coherent basis.

    Expands every term of the estimator in the displaced number basis
    D(alpha0)|n> in which psi0 is exactly the (0,...,0) element, splits the
    dimensions into two halves so the coefficient tensor is a matrix filled
    by blocked GEMMs, and truncates each half at a total degree whose
    dropped estimator amplitude is provably below tail_tol.  Works for any
    D (cost grows steeply beyond D=4).

    prefix_counts, when given, must be increasing sample counts; the error
    is returned for each prefix (the estimator over the first k samples),
    enabling nested-ladder studies in one pass.

    Returns a float, or an array of floats matching prefix_counts.
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    weights = np.asarray(weights, dtype=np.complex128)
    n, d2 = z.shape
    d = d2 // 2
    delta, b, phase0 = _displaced_coefficients(psi0, z, weights)
    b_abs = np.abs(b)

    boundaries = list(prefix_counts) if prefix_counts is not None else [n]
    if boundaries != sorted(boundaries) or boundaries[-1] != n:
        raise ValueError("prefix_counts must increase and end at the sample count")

    d_a = (d + 1) // 2
    lam_a = np.einsum("ni,ni->n", np.abs(delta[:, :d_a]), np.abs(delta[:, :d_a]))
    m_a = _select_total_degree(lam_a, b_abs, 0.5 * tail_tol, boundaries)
    idx_a = _half_indices(m_a, d_a)
    if d_a < d:
        lam_b = np.einsum("ni,ni->n", np.abs(delta[:, d_a:]), np.abs(delta[:, d_a:]))
        m_b = _select_total_degree(lam_b, b_abs, 0.5 * tail_tol, boundaries)
        idx_b = _half_indices(m_b, d - d_a)
    else:
        idx_b = np.zeros((1, 0), dtype=int)

    coeff = np.zeros((idx_a.shape[0], idx_b.shape[0]), dtype=np.complex128)

    results = []
    done = 0
    for target in boundaries:
        while done < target:
            s, e = done, min(done + chunk, target)
            va = _half_factor_matrix(delta[s:e, :d_a], idx_a)
            if d_a < d:
                vb = _half_factor_matrix(delta[s:e, d_a:], idx_b)
            else:
                vb = np.ones((e - s, 1), dtype=np.complex128)
            coeff += (va * b[s:e, None]).T @ vb
            done = e
        c_n = coeff / target
        c_n[0, 0] -= phase0
        results.append(float(np.sqrt(np.sum(np.abs(c_n) ** 2))))
    if prefix_counts is None:
        return results[0]
    return np.asarray(results)


def gram_initial_error(psi0, z, weights, block=2048):
    """Initial-time L2 error via the pairwise Gram matrix; O(N^2) but exact.

    ||psi_N - psi0||^2 = (1/N^2) sum_jk conj(w_j c_jk) w_k - 2 Re <psi0|psi_N> + 1
    with c_jk the analytic overlaps of equal-width Gaussians.  Serves as the
    independent oracle for the coherent-basis metric at small N.
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    weights = np.asarray(weights, dtype=np.complex128)
    n = z.shape[0]
    d = z.shape[1] // 2
    gamma_diag = np.diag(psi0.gamma)
    hbar = psi0.hbar
    q = z[:, :d]
    p = z[:, d:]

    def overlap_block(i0, i1, j0, j1):
        dq = q[i0:i1, None, :] - q[None, j0:j1, :]
        dp = p[i0:i1, None, :] - p[None, j0:j1, :]
        sp = p[i0:i1, None, :] + p[None, j0:j1, :]
        u = np.einsum("ijk,k->ij", dq * dq, gamma_diag) \
            + np.einsum("ijk,k->ij", dp * dp, 1.0 / gamma_diag)
        # <g_i|g_j> = exp(-u/4hbar) exp(i (p_i+p_j).(q_i-q_j)/2hbar)
        phase = np.einsum("ijk,ijk->ij", sp, dq) / (2.0 * hbar)
        return np.exp(-u / (4.0 * hbar) + 1j * phase)

    norm2 = 0.0
    for i0, i1 in chunk_ranges(n, block):
        for j0, j1 in chunk_ranges(n, block):
            if j0 < i0:
                continue
            o = overlap_block(i0, i1, j0, j1)
            contrib = np.einsum("i,ij,j->", np.conj(weights[i0:i1]), o, weights[j0:j1])
            if j0 == i0:
                norm2 += contrib.real
            else:
                norm2 += 2.0 * contrib.real
    norm2 /= n ** 2

    # <psi0|psi_N> = (1/N) sum_j w_j <g_z0|g_zj>, bra at z0
    dq = psi0.q0[None, :] - q
    dp = psi0.p0[None, :] - p
    sp = psi0.p0[None, :] + p
    u = np.einsum("jk,k->j", dq * dq, gamma_diag) + np.einsum("jk,k->j", dp * dp, 1.0 / gamma_diag)
    phase = np.einsum("jk,jk->j", sp, dq) / (2.0 * hbar)
    cross = np.sum(weights * np.exp(-u / (4.0 * hbar) + 1j * phase)) / n
    err2 = norm2 - 2.0 * cross.real + 1.0
    return float(np.sqrt(max(err2, 0.0)))
