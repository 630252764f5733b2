"""
An accelerated method for strongly convex-concave saddle problems
=================================================================

The primal function g(x) = max_y f(x, y) is smooth when f is, with constants
given by a Hoelder calculus. Each outer step asks an inner solver for an
approximate maximizer; the tolerance plan ties that accuracy to the target
gap so the fast gradient method still lands within eps.
"""
import numpy as np

from viprox import fgm_solve, holder_profile, model_L, quadratic_saddle, saddle_gap

# The calculus first: constants of grad g for a few exponents.
for nu in (0.0, 0.5, 1.0):
    prof = holder_profile(L_xx=1.0, L_xy=1.0, mu_y=2.0, D=1.0, nu=nu)
    print(f"nu = {nu}: L~ = {prof.L_tilde:.3f}, nu~ = {prof.nu_tilde:.3f}, "
          f"model L at delta0 = 1e-3: {model_L(prof.L_tilde, prof.nu_tilde, 1e-3):.3g}")

prob = quadratic_saddle(n=3, m=2, spread=2.0, seed=1)
for eps in (1e-2, 1e-3, 1e-4):
    x, y, rep = fgm_solve(prob, eps, x0=np.array([2.0, -1.0, 1.0]))
    plan = rep.info["plan"]
    gap = saddle_gap(prob, x, y, tol=eps * 1e-3)
    print(f"eps = {eps:g}: {rep.iterations} outer steps, {rep.info['inner_iterations']} inner "
          f"steps, L = {plan['L']:.3g}, Delta~ = {plan['Delta_tilde']:.2e}, gap <= {gap.upper:.2e}")
