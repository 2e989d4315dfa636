"""Compiled hot loops.

The Gaussian-synthesis kernel parallelizes over grid points and the 1D
propagation kernels over trajectories; in both cases every output element
is produced by a fixed sequential arithmetic stream, so results are bitwise
independent of the thread count.
"""

import math

import numpy as np
from numba import njit, prange

# exp(-46) ~ 1e-20: grid points beyond this Gaussian radius cannot move the
# synthesized values at double precision
_TAIL_EXPONENT = 46.0


@njit(parallel=True, nogil=True, cache=True)
def _synth(x, q, p, c_re, c_im, half_gamma_over_hbar, inv_hbar, cut2, out):
    for i in prange(x.size):
        xi = x[i]
        acc_re = 0.0
        acc_im = 0.0
        for j in range(q.size):
            dx = xi - q[j]
            if dx * dx > cut2:
                continue
            mag = math.exp(-half_gamma_over_hbar * dx * dx)
            ph = inv_hbar * p[j] * dx
            e_re = mag * math.cos(ph)
            e_im = mag * math.sin(ph)
            acc_re += c_re[j] * e_re - c_im[j] * e_im
            acc_im += c_re[j] * e_im + c_im[j] * e_re
        out[i] = complex(acc_re, acc_im)


def gaussian_sum(x, q, p, coeffs, gamma, hbar):
    """sum_j c_j exp(-gamma (x-q_j)^2 / 2hbar + i p_j (x-q_j)/hbar), unnormalized."""
    out = np.empty(x.size, dtype=np.complex128)
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cut2 = 2.0 * _TAIL_EXPONENT * hbar / gamma
    _synth(np.ascontiguousarray(x, dtype=np.float64),
           np.ascontiguousarray(q, dtype=np.float64),
           np.ascontiguousarray(p, dtype=np.float64),
           np.ascontiguousarray(c.real), np.ascontiguousarray(c.imag),
           0.5 * gamma / hbar, 1.0 / hbar, cut2, out)
    return out


@njit(parallel=True, nogil=True, cache=True)
def _propagate_1d(q, p, s, mqq, mqp, mpq, mpp, arg_a, valid, caustic,
                  n_steps, dt, pot_kind, pp0, pp1, pp2, pp3, m, gamma):
    """Velocity-Verlet + trapezoid action + branch-tracked prefactor, fused.

    pot_kind 0: harmonic with pp0 = m omega^2.
    pot_kind 1: Morse with (pp0, pp1, pp2, pp3) = (d_e, a, q_eq, v_eq).
    Trajectories whose force turns non-finite are frozen and flagged.
    """
    two_pi = 2.0 * math.pi
    for j in prange(q.size):
        if not valid[j]:
            continue
        qj = q[j]
        pj = p[j]
        sj = s[j]
        aqq = mqq[j]
        aqp = mqp[j]
        apq = mpq[j]
        app = mpp[j]
        argj = arg_a[j]
        caus = caustic[j]
        ok = True

        if pot_kind == 0:
            v = 0.5 * pp0 * qj * qj
            g = pp0 * qj
            h = pp0
        else:
            e = math.exp(-pp1 * (qj - pp2))
            v = pp3 + pp0 * (1.0 - e) * (1.0 - e)
            g = 2.0 * pp0 * pp1 * e * (1.0 - e)
            h = 2.0 * pp0 * pp1 * pp1 * e * (2.0 * e - 1.0)
        lag0 = pj * pj / (2.0 * m) - v

        for _ in range(n_steps):
            ph_mom = pj - 0.5 * dt * g
            apq_h = apq - 0.5 * dt * h * aqq
            app_h = app - 0.5 * dt * h * aqp
            qj = qj + dt * ph_mom / m
            aqq = aqq + dt * apq_h / m
            aqp = aqp + dt * app_h / m
            if pot_kind == 0:
                v = 0.5 * pp0 * qj * qj
                g = pp0 * qj
                h = pp0
            else:
                e = math.exp(-pp1 * (qj - pp2))
                v = pp3 + pp0 * (1.0 - e) * (1.0 - e)
                g = 2.0 * pp0 * pp1 * e * (1.0 - e)
                h = 2.0 * pp0 * pp1 * pp1 * e * (2.0 * e - 1.0)
            if not (math.isfinite(g) and math.isfinite(qj)):
                ok = False
                break
            pj = ph_mom - 0.5 * dt * g
            apq = apq_h - 0.5 * dt * h * aqq
            app = app_h - 0.5 * dt * h * aqp
            lag1 = pj * pj / (2.0 * m) - v
            sj += 0.5 * dt * (lag0 + lag1)
            lag0 = lag1
            # prefactor determinant A = [(aqq + app) + i(-aqp*gamma + apq/gamma)]/2
            a_re = 0.5 * (aqq + app)
            a_im = 0.5 * (-aqp * gamma + apq / gamma)
            mag = math.hypot(a_re, a_im)
            if mag < 1e-30:
                caus = True
            delta = math.atan2(a_im, a_re) - argj
            delta -= two_pi * np.round(delta / two_pi)
            argj += delta

        q[j] = qj
        p[j] = pj
        s[j] = sj
        mqq[j] = aqq
        mqp[j] = aqp
        mpq[j] = apq
        mpp[j] = app
        arg_a[j] = argj
        valid[j] = ok
        caustic[j] = caus
