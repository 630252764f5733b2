"""
Universal mirror prox and restarts
==================================

The extragradient method doubles its trial constant until a one-line
inequality holds, so it never needs the Lipschitz constant. On a rotation
field (monotone, not strongly) the weighted average spirals into the centre.
With strong monotonicity, restarting on a shrinking prox-radius gives a
point close to the solution itself, not only a small gap.
"""
import numpy as np

from viprox import (RestartConfig, UMPConfig, affine_vi, euclidean, restart_count,
                    restarted_ump, skew_vi, ump_solve)

op = skew_vi(1.0)
rep = ump_solve(op, euclidean(2), op.feasible,
                UMPConfig(1e-2, L0=0.01, max_iter=500, x0=np.array([0.6, 0.8])))
M = np.array(rep.trace["M"])
print(f"skew field: |x_out| = {np.linalg.norm(rep.x):.2e}, "
      f"accepted M in [{M.min():.3g}, {M.max():.3g}], "
      f"{sum(rep.trace['trials']) - len(M)} doublings in total")

x_star = np.array([0.3, -0.4])
op = affine_vi(2, mu=1.0, skew=2.0, radius=1.0, x_star=x_star, seed=5)
eps = 1e-4
rep = restarted_ump(op, euclidean(2), op.feasible,
                    RestartConfig(eps, mu=1.0, R0_sq=4.0, x0=np.array([-0.6, 0.8]), L0=0.1))
print(f"restarts: {rep.info['restart_count']} (formula {restart_count(eps, 4.0)})")
for r in rep.restarts[:4] + rep.restarts[-2:]:
    print(f"  p = {r['p']:>2}  inner iterations {r['inner_iterations']:>3}  "
          f"|x_p - x*|^2 = {r['dist_sq']:.2e}  <=  R_p^2 = {r['R_sq']:.2e}")
