"""
A three-point model that is all three things at once
=====================================================

M = {(lam, (1-lam)/2, (1-lam)/2)} is a mixture family, an exponential
family and a relabelled copy of the open 1-simplex.
"""

import numpy as np

from simplexcert import Alphabet, Dist, certify_simplex_equivalence, simplex_model
from simplexcert.alpha import ExponentialSpec

X = Alphabet(3)
lam = np.linspace(0.05, 0.95, 7)
points = np.column_stack([lam, (1 - lam) / 2, (1 - lam) / 2])

# mixture form: p = lam q0 + (1 - lam) q1
q0, q1 = np.array([1.0, 0, 0]), np.array([0, 0.5, 0.5])
print("mixture form exact:", np.array_equal(lam[:, None] * q0 + (1 - lam[:, None]) * q1, points))

# exponential form: log p = theta F - psi(theta) with F = 1_{0}
spec = ExponentialSpec(X, np.zeros(3), [[1.0, 0.0, 0.0]])
theta = np.log(2 * lam / (1 - lam))
print("psi(theta) vs log(2 + e^theta):", np.max(np.abs(spec.psi(theta[:, None]) - np.log(2 + np.exp(theta)))))

# simplex equivalence, recovered from samples alone
cert = certify_simplex_equivalence(simplex_model([Dist(X, q0), Dist(X, q1)]))
print("partition:", cert.partition.blocks)
print("V =\n", cert.embedding.kernel)
print("W =\n", cert.left_inverse.kernel)
print("W V =\n", cert.left_inverse.kernel @ cert.embedding.kernel)
