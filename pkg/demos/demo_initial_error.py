#!/usr/bin/env python3
"""Initial sampling error of the two schemes as a function of N.

Draws phase-space samples from the Husimi density of a 1D Gaussian and from
its normalized square root, measures the exact L2 distance of the N-term
estimator from the initial state over an N-doubling ladder, and compares
against the analytic sqrt((4^D - 1)/N) law for the square-root scheme.
"""

import numpy as np

from hkprop import (GaussianWavepacket, SamplingScheme, coherent_initial_error,
                    fit_power_law)

psi0 = GaussianWavepacket([-1.0], [0.0], 2.0)
rungs = [100 * 2 ** k for k in range(11)]
analytic = np.sqrt(3.0 / np.asarray(rungs, dtype=float))

print("%8s  %12s  %12s  %12s" % ("N", "husimi", "sqrt-husimi", "sqrt(3/N)"))
results = {}
for kind in ("husimi", "sqrt-husimi"):
    scheme = SamplingScheme(kind, psi0)
    z = scheme.sample(rungs[-1], seed=1)
    w = scheme.prefactor(z)
    results[kind] = coherent_initial_error(psi0, z, w, prefix_counts=rungs)

for i, n in enumerate(rungs):
    print("%8d  %12.6f  %12.6f  %12.6f"
          % (n, results["husimi"][i], results["sqrt-husimi"][i], analytic[i]))

for kind in ("husimi", "sqrt-husimi"):
    fit = fit_power_law(rungs, results[kind])
    print("%-12s fit: %.3f * N^-%.3f" % (kind, fit.c, fit.s))
print("sqrt-husimi analytic law:  %.3f * N^-0.5" % np.sqrt(3.0))
