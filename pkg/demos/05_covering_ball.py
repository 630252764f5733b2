"""
Smallest covering ball with quadratic constraints
=================================================

Points A_k are drawn uniformly from the unit cube; the ball centre x must
also satisfy m quadratic constraints sum_i alpha_pi x_i^2 <= 5. The
regularized Lagrangian gives a strongly monotone operator on
ball x (nonnegative ball), solved with the restarted mirror prox for a grid
of accuracies. The command-line equivalent is

    viprox bench --case 1 --n 50 --m 5 --N 5 --reps 3 --out bench_case1
"""
from viprox import covering as cv

for case in (1, 4):
    rows = cv.run_bench(case, n=30, m=3, N=5, epsilons=cv.EPSILON_GRID[:4], repetitions=2)
    print(cv.bench_markdown(rows, f"Case {case} ({cv.CASES[case]})"))
    print(f"iterations grew by {rows[-1].iterations / rows[0].iterations:.1f}x "
          f"while 1/eps grew by {rows[-1].inv_epsilon / rows[0].inv_epsilon:g}x\n")
