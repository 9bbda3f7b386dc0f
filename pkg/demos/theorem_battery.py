"""
All four conditions on random models
====================================

For models built from disjoint-support generators every condition holds;
for the two negative models none does. Either way the verdicts agree.
"""

import numpy as np

from simplexcert import Alphabet, Dist, Partition, run_theorem_battery, simplex_model
from simplexcert.alpha import ExponentialSpec, SampledModel

rng = np.random.default_rng(0)


def random_model(n, k):
    labels = rng.permutation(np.concatenate([np.arange(k), rng.integers(0, k, n - k)]))
    P = Partition(Alphabet(n), [tuple(np.flatnonzero(labels == i)) for i in range(k)])
    qs = []
    for b in P.blocks:
        w = np.zeros(n)
        w[list(b)] = rng.uniform(0.2, 1.0, len(b))
        qs.append(Dist(P.alphabet, w / w.sum()))
    return simplex_model(qs)


X = Alphabet(3)
cases = [(f"random {n}/{k}", random_model(n, k)) for n, k in ((4, 2), (6, 3), (8, 4))]
cases.append(("curve", SampledModel.from_spec(ExponentialSpec(X, np.zeros(3), [[0.0, 1.0, 2.0]]))))
cases.append(("segment", simplex_model([Dist(X, [0.5, 0.3, 0.2]), Dist(X, [0.2, 0.3, 0.5])])))

for name, M in cases:
    r = run_theorem_battery(M)
    verdicts = " ".join(f"({k})={v!s:5}" for k, v in r.conditions.items())
    print(f"{name:12} {verdicts} passing alpha: {r.passing_alphas} consistent: {r.consistent}")
