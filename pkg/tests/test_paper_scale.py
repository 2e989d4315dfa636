"""Paper-scale reproductions (long). Deselected by default; run with

    pytest -m paper_scale tests/test_paper_scale.py
"""

import time

import numpy as np
import pytest

from hkprop.cli import PRESETS
from hkprop.experiments import ExperimentConfig, run_morse_converge

# Fitted exponents from the study being reproduced ("Table 1")
TABLE1_S = {
    (0.005, 196, "sqrt-husimi"): 0.49,
    (0.005, 196, "husimi"): 0.41,
    (0.005, 1960, "sqrt-husimi"): 0.51,
    (0.005, 1960, "husimi"): 0.36,
    (0.01, 202, "sqrt-husimi"): 0.50,
    (0.01, 202, "husimi"): 0.42,
    (0.01, 2020, "sqrt-husimi"): 0.50,
    (0.01, 2020, "husimi"): 0.38,
}


@pytest.mark.paper_scale
class TestTable1:
    @pytest.mark.parametrize("chi,checkpoints", [(0.005, (196, 1960)),
                                                 (0.01, (202, 2020))])
    def test_fitted_exponents_within_tolerance(self, chi, checkpoints):
        t0 = time.time()
        cfg_d = PRESETS["morse-converge"]("paper")
        cfg_d["system"]["chi"] = chi
        if chi == 0.005:
            cfg_d["grid"] = {"x_min": -200.0, "x_max": 1500.0, "n_points": 4096}
            cfg_d["run"]["n_steps"] = 1960
        cfg = ExperimentConfig.from_dict(cfg_d)
        assert cfg.run.n_trajectories == 100 * 2 ** 13
        res = run_morse_converge(cfg, checkpoints=list(checkpoints), repeats=1)
        for c in checkpoints:
            for kind in ("husimi", "sqrt-husimi"):
                fit = res.extras["fits"][(c, kind)]
                target = TABLE1_S[(chi, c, kind)]
                print("chi=%g cp=%d %-12s s=%.3f (target %.2f)  c=%.2f"
                      % (chi, c, kind, fit.s, target, fit.c))
                assert abs(fit.s - target) <= 0.08, (chi, c, kind, fit.s)
        print("elapsed %.0f s" % (time.time() - t0))

    def test_ten_oscillations_error_exceeds_one(self):
        cfg_d = PRESETS["morse-converge"]("paper")
        cfg_d["run"]["n_trajectories"] = 100 * 2 ** 10  # lighter variant
        cfg = ExperimentConfig.from_dict(cfg_d)
        res = run_morse_converge(cfg, checkpoints=[202, 2020], repeats=1)
        for kind in ("husimi", "sqrt-husimi"):
            early = res.extras["errors"][(202, kind)]
            late = res.extras["errors"][(2020, kind)]
            assert np.all(late > early)
