#!/usr/bin/env python3
"""Time dependence of the sampling error in a harmonic well.

With exact classical inputs, the only error of the estimator is the Monte
Carlo one, whose mean square is the analytic variance curve
V(t)/N = (2 [4 cos^2 + (gamma/b + b/gamma)^2 sin^2]^(1/2) - 1)/N.
The empirical mean squared error S_K over K independent runs is printed
against that curve: maxima where the packet crosses the well bottom,
minima at the turning points, period pi/omega.
"""

import numpy as np

from hkprop.cli import PRESETS
from hkprop.experiments import ExperimentConfig, run_harmonic_error

cfg = ExperimentConfig.from_dict(PRESETS["harmonic-error"]("desk"))
print("N = %d trajectories, K = %d runs" % (cfg.run.n_trajectories, cfg.run.k_runs))
res = run_harmonic_error(cfg)

times = res.extras["times"]
s_k = res.extras["s_k"]["sqrt-husimi"]
s_k_h = res.extras["s_k"]["husimi"]
analytic = res.extras["analytic"]["sqrt-husimi"]

print("%8s  %14s  %14s  %14s" % ("t", "S_K sqrt-hus", "V(t)/N", "S_K husimi"))
for i in range(0, len(times), 2):
    print("%8.3f  %14.3e  %14.3e  %14.3e"
          % (times[i], s_k[i], analytic[i], s_k_h[i]))
print("max |S_K/analytic - 1| = %.3f"
      % np.max(np.abs(s_k / analytic - 1.0)))
