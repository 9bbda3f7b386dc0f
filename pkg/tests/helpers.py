"""Model generators and brute-force oracles shared by the test modules."""

import numpy as np

from simplexcert.alpha import ExponentialSpec, SampledModel
from simplexcert.core import Alphabet, Dist, Partition
from simplexcert.equivalence import simplex_model

GRID = (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)
TAUS = (0.5, 1.0, 2.0)


def random_partition(rng, n, blocks):
    labels = np.concatenate([np.arange(blocks), rng.integers(0, blocks, n - blocks)])
    rng.shuffle(labels)
    return Partition(Alphabet(n), [tuple(np.flatnonzero(labels == i)) for i in range(blocks)]).canonical()


def random_generators(rng, partition, low=0.2):
    n = partition.alphabet.size
    qs = []
    for block in partition.blocks:
        w = np.zeros(n)
        w[list(block)] = rng.uniform(low, 1.0, len(block))
        qs.append(Dist(partition.alphabet, w / w.sum()))
    return qs


def partition_models(seed, count):
    """``count`` random models {sum lambda_i q_i} with |X| in 3..8 and 2..|X| blocks."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(3, 9))
        b = int(rng.integers(2, n + 1))
        P = random_partition(rng, n, b)
        qs = random_generators(rng, P)
        out.append((P, qs, simplex_model(qs)))
    return out


def curve_spec():
    """p_theta proportional to (1, e^theta, e^(2 theta))."""
    return ExponentialSpec(Alphabet(3), np.zeros(3), [[0.0, 1.0, 2.0]])


def curve_model():
    return SampledModel.from_spec(curve_spec())


SEGMENT_ENDS = (np.array([0.5, 0.3, 0.2]), np.array([0.2, 0.3, 0.5]))


def segment_model(a=SEGMENT_ENDS[0], b=SEGMENT_ENDS[1]):
    """Mixture segment between two full-support, overlapping generators."""
    return simplex_model([Dist(Alphabet(len(a)), a), Dist(Alphabet(len(b)), b)])


def l_alpha_oracle(alpha, f):
    f = np.asarray(f, dtype=float)
    return np.log(f) if alpha == 1 else np.power(f, (1.0 - alpha) / 2.0)


def rank_oracle(alpha, points, taus=TAUS):
    """Alpha-family verdict from numpy's matrix_rank, independent of fit_affine_hull.

    Returns ``(affine_rank, linear_rank)`` of the denormalized images.
    """
    images = np.array([l_alpha_oracle(alpha, t * p) for t in taus for p in points])
    diffs = images[1:] - images[0]
    return int(np.linalg.matrix_rank(diffs, tol=1e-8 * np.abs(diffs).max())), int(
        np.linalg.matrix_rank(images, tol=1e-8 * np.abs(images).max())
    )


def oracle_is_family(alpha, points, d, taus=TAUS):
    affine, linear = rank_oracle(alpha, points, taus)
    if alpha == 1:
        return affine == d + 1
    return affine == d + 1 and linear == d + 1


def all_partitions(n):
    """Every partition of {0..n-1}, via restricted growth strings."""

    def grow(prefix, top):
        if len(prefix) == n:
            yield Partition(Alphabet(n), [tuple(i for i, b in enumerate(prefix) if b == k) for k in range(top + 1)])
            return
        for b in range(top + 2):
            yield from grow(prefix + [b], max(top, b))

    yield from grow([0], 0)


def random_mix(rng, k):
    """Well-conditioned random invertible k x k matrix."""
    Q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    return Q @ np.diag(rng.uniform(0.5, 2.0, k))


def interior_point(rng, n):
    """Random distribution with every coordinate at least 1/(4n)."""
    return 0.75 * rng.dirichlet(np.ones(n)) + 0.25 / n
