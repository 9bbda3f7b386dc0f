"""
Certificates and where they fail
=================================

A model generated by distributions with disjoint supports is certified;
two models that are not get stopped at a named stage.
"""

import numpy as np

from simplexcert import Alphabet, CertificationError, Dist, certify_simplex_equivalence, simplex_model
from simplexcert.alpha import ExponentialSpec, SampledModel
from simplexcert.formats import parse_certificate, render_certificate

rng = np.random.default_rng(3)
X = Alphabet(7)
blocks = [(0, 5), (1, 2, 6), (3, 4)]
qs = []
for b in blocks:
    w = np.zeros(7)
    w[list(b)] = rng.uniform(0.2, 1.0, len(b))
    qs.append(Dist(X, w / w.sum()))

M = simplex_model(qs)
cert = certify_simplex_equivalence(M, seed=11)
print("recovered blocks:", cert.partition.blocks)
print("max |q_i - recovered|:", max(np.abs(q.weights - g.weights).max() for q, g in zip(qs, cert.generators)))
print("residuals:", {k: f"{v:.1e}" for k, v in cert.residuals.items()})

# lambda for any model point is just the block masses
p = M.points[4]
print("simplex coordinates of a sample:", cert.simplex_coordinates(Dist(X, p)).weights)

text = render_certificate(cert, "demo")
print(text)
assert parse_certificate(text).partition == cert.partition

X3 = Alphabet(3)
negatives = {
    "curve": SampledModel.from_spec(ExponentialSpec(X3, np.zeros(3), [[0.0, 1.0, 2.0]])),
    "segment": simplex_model([Dist(X3, [0.5, 0.3, 0.2]), Dist(X3, [0.2, 0.3, 0.5])]),
}
for name, model in negatives.items():
    try:
        certify_simplex_equivalence(model)
    except CertificationError as exc:
        print(f"{name}: stopped at {exc.stage}")
        if exc.witness is not None:
            f, g = exc.witness
            print("  product of", f.round(3) + 0.0, "and", g.round(3) + 0.0, "leaves the candidate space")
