"""
Which alpha-families does a model belong to?
=============================================

Denormalize the samples, push them through L_alpha and ask whether the
images fill a (d+1)-dimensional subspace.
"""

import numpy as np

from simplexcert import Alphabet, Dist, is_alpha_family, simplex_model
from simplexcert.alpha import ExponentialSpec, SampledModel

grid = (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)
X = Alphabet(3)

models = {
    # disjoint supports: an alpha-family for every alpha
    "blocks": simplex_model([Dist(X, [1, 0, 0]), Dist(X, [0, 0.5, 0.5])]),
    # exponential curve (1, e^t, e^2t): alpha = 1 only
    "curve": SampledModel.from_spec(ExponentialSpec(X, np.zeros(3), [[0.0, 1.0, 2.0]])),
    # mixture of overlapping distributions: alpha = -1 only
    "segment": simplex_model([Dist(X, [0.5, 0.3, 0.2]), Dist(X, [0.2, 0.3, 0.5])]),
}

for name, M in models.items():
    print(f"{name}:")
    for a in grid:
        v = is_alpha_family(a, M)
        print(f"  alpha={a:+.1f}  family={v.is_family!s:5}  dim={v.dimension} (need {v.expected_dimension})")
