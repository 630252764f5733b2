"""
Bregman geometry and the mirror step
====================================

Two distance-generating functions ship with the package. The Euclidean one
turns every mirror step into a projection; the entropy one turns a step on
the simplex into a multiplicative update.
"""
import numpy as np

from viprox import Ball, Simplex, bregman, entropy, euclidean, mirror_step, scaled_prox

# The Euclidean divergence is half the squared distance.
e = euclidean(2)
print("V_euclid((1,0), (0,0)) =", bregman(e, [1.0, 0.0], [0.0, 0.0]))

# On the simplex the entropy divergence is the Kullback-Leibler divergence.
h = entropy(2)
print("V_entropy((.5,.5), (.25,.75)) =", round(bregman(h, [0.5, 0.5], [0.25, 0.75]), 6))

# A mirror step from the origin of the unit disc with a large push to the
# right lands on the boundary.
print("Euclidean step:", mirror_step(e, Ball(2, 1.0), np.zeros(2), np.array([-2.0, 0.0])))

# The entropy step reweights coordinates by exp(-p).
x = np.full(3, 1 / 3)
p = np.array([0.0, 1.0, 2.0])
print("entropy step:  ", mirror_step(entropy(3), Simplex(3), x, p).round(4))

# Restart schemes rescale the geometry around the latest point:
# d_new(x) = R^2 d((x - c) / R). With R = 2 distances count four times as much.
s = scaled_prox(e, np.zeros(2), 2.0)
print("scaled divergence:", bregman(s, [2.0, 0.0], [0.0, 0.0]))
