#!/usr/bin/env python3
"""Position densities in a Morse well after ten oscillations.

Compares the Herman-Kluk densities of both sampling schemes at N = 800
against the split-operator grid reference and prints the aggregate
absolute errors (the square-root scheme converges visibly faster at small
N; at N = 100*2^14 both schemes agree and the residual is the
semiclassical error itself).
"""

import numpy as np

from hkprop.cli import PRESETS
from hkprop.experiments import ExperimentConfig, run_position_density

cfg = ExperimentConfig.from_dict(PRESETS["density"]("desk"))
res = run_position_density(cfg)
rows = np.asarray(res.rows, dtype=float)
x, ref = rows[:, 0], rows[:, 1]
err_h, err_s = rows[:, 4], rows[:, 5]
dx = x[1] - x[0]
print("N = %d trajectories, t = %.0f a.u." % (res.meta["N"], res.meta["t"]))
print("L1 density error, husimi:      %.4f" % (err_h.sum() * dx))
print("L1 density error, sqrt-husimi: %.4f" % (err_s.sum() * dx))
peak = np.argmax(ref)
print("reference density peak at x = %.1f (height %.3e)" % (x[peak], ref[peak]))
