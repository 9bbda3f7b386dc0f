"""
Autoparallel submanifolds
=========================

The same verdicts, reached through the alpha-connection instead of linear
algebra: a model is an alpha-family exactly when covariant derivatives of
its coordinate fields stay tangent.
"""

import numpy as np

from simplexcert import Alphabet, Dist, christoffel, fisher_metric, is_alpha_autoparallel, simplex_model
from simplexcert.alpha import ExponentialSpec, SampledModel

p = np.array([0.2, 0.3, 0.5])
print("Fisher metric in mixture coordinates:\n", fisher_metric(p))
print("Gamma(-1), mixture chart, all zero:", not christoffel(-1, p).entries.any())
print("Gamma(+1), exponential chart, all zero:", not christoffel(1, p, "exponential").entries.any())

X = Alphabet(3)
curve = SampledModel.from_spec(ExponentialSpec(X, np.zeros(3), [[0.0, 1.0, 2.0]]))
blocks = simplex_model([Dist(X, [1, 0, 0]), Dist(X, [0, 0.5, 0.5])])
for name, M in (("curve", curve), ("blocks", blocks)):
    for a in (-1.0, 0.0, 1.0, 2.0):
        v = is_alpha_autoparallel(M, a)
        print(f"{name:6} alpha={a:+.0f}  autoparallel={v.verdict!s:5}  normal component {v.max_normal_component:.1e}")
