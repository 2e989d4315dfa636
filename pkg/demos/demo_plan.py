#!/usr/bin/env python3
"""How many trajectories does a target accuracy need?

Composes the time-dependent harmonic variance with the Chebyshev lower
bound N >= sigma^2/(p eps^2) and the central-limit estimate
N ~ (sigma^2 / 2 eps^2) [erfc^-1(2p)]^2.
"""

from hkprop import (TrajectoryCountQuery, chebyshev_min_trajectories,
                    clt_trajectory_estimate, variance_harmonic_sqrt_husimi)

# worst-case variance over a period for gamma=2, b=1
sigma2 = max(variance_harmonic_sqrt_husimi(2.0, 1.0, 1.0, t / 100.0)
             for t in range(0, 315))
print("variance bound over one period: %.3f" % sigma2)

for eps in (0.1, 0.05, 0.02):
    for p in (0.05, 0.01):
        q = TrajectoryCountQuery(sigma2=sigma2, epsilon=eps, p=p)
        print("eps=%.2f p=%.2f: chebyshev >= %d, CLT ~ %d"
              % (eps, p, chebyshev_min_trajectories(q), clt_trajectory_estimate(q)))
