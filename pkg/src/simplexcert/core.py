"""Finite alphabets, distributions, channels, partitions and affine subspaces.

Everything here is an immutable value. Arrays stored on these objects are
flagged read-only, so they can be shared between threads freely.

Conventions
-----------
* Functions on an alphabet of size ``n`` are 1-d float arrays of length ``n``.
* A channel kernel is stored densely as an ``(n_out, n_in)`` array with
  ``kernel[y, x] = W(y|x)``; each column is a distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, NotCongruentError

TOL_NORM = 1e-9
TOL_RANK = 1e-9
TOL_MEMBER = 1e-8


def _frozen(values, ndim=None):
    arr = np.array(values, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise InvalidArgument(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Alphabet:
    """Finite ordered alphabet. Elements are addressed by index or by label."""

    size: int
    labels: tuple = None

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise InvalidArgument(f"alphabet size must be a positive integer, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))
        if self.labels is None:
            labels = tuple(str(i) for i in range(self.size))
        else:
            labels = tuple(str(s) for s in self.labels)
        if len(labels) != self.size:
            raise InvalidArgument(f"{len(labels)} labels for an alphabet of size {self.size}")
        if len(set(labels)) != len(labels):
            raise InvalidArgument("alphabet labels must be pairwise distinct")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, labels):
        labels = tuple(labels)
        return cls(len(labels), labels)

    def __len__(self):
        return self.size

    def index(self, element) -> int:
        """Index of ``element``, given either as an integer index or a label."""
        if isinstance(element, (int, np.integer)) and not isinstance(element, bool):
            if 0 <= element < self.size:
                return int(element)
            raise InvalidArgument(f"element index {element} outside 0..{self.size - 1}")
        try:
            return self.labels.index(str(element))
        except ValueError:
            raise InvalidArgument(f"unknown alphabet element {element!r}") from None


def _alphabet_for(n, alphabet):
    if alphabet is None:
        return Alphabet(n)
    if alphabet.size != n:
        raise InvalidArgument(f"array of length {n} does not match alphabet of size {alphabet.size}")
    return alphabet


@dataclass(frozen=True, eq=False)
class Dist:
    """Probability distribution on a finite alphabet.

    Validation rejects rather than renormalizes: negative weights or a total
    mass off by more than ``tol`` raise :class:`InvalidArgument`.
    """

    alphabet: Alphabet
    weights: np.ndarray
    tol: float = TOL_NORM

    def __post_init__(self):
        w = _frozen(self.weights, ndim=1)
        if w.shape[0] != self.alphabet.size:
            raise InvalidArgument(
                f"{w.shape[0]} weights for an alphabet of size {self.alphabet.size}"
            )
        if not np.all(np.isfinite(w)):
            raise InvalidArgument("distribution weights must be finite")
        if w.min() < 0:
            raise InvalidArgument(f"negative weight {w.min():.3g} in distribution")
        if abs(w.sum() - 1.0) > self.tol:
            raise InvalidArgument(f"weights sum to {w.sum():.17g}, not 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_array(cls, weights, alphabet=None, tol=TOL_NORM):
        w = np.asarray(weights, dtype=float)
        return cls(_alphabet_for(w.shape[0], alphabet), w, tol)

    @property
    def strictly_positive(self) -> bool:
        return bool(self.weights.min() > 0)

    @property
    def support(self) -> tuple:
        return tuple(int(i) for i in np.flatnonzero(self.weights > 0))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    def __repr__(self):
        return f"Dist({np.array2string(self.weights, precision=6)})"


@dataclass(frozen=True, eq=False)
class PositiveFunction:
    """Real function on an alphabet, optionally tagged as strictly positive."""

    alphabet: Alphabet
    values: np.ndarray
    positive: bool = False

    def __post_init__(self):
        v = _frozen(self.values, ndim=1)
        if v.shape[0] != self.alphabet.size:
            raise InvalidArgument(f"{v.shape[0]} values for an alphabet of size {self.alphabet.size}")
        if self.positive and not v.min() > 0:
            raise InvalidArgument("function tagged positive has a non-positive entry")
        object.__setattr__(self, "values", v)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True, eq=False)
class Channel:
    """Stochastic kernel ``W(y|x)`` from ``input`` to ``output``."""

    input: Alphabet
    output: Alphabet
    kernel: np.ndarray
    tol: float = TOL_NORM

    def __post_init__(self):
        k = _frozen(self.kernel, ndim=2)
        if k.shape != (self.output.size, self.input.size):
            raise InvalidArgument(
                f"kernel shape {k.shape} != (|output|, |input|) = "
                f"({self.output.size}, {self.input.size})"
            )
        if k.min() < 0:
            raise InvalidArgument("channel kernel has a negative entry")
        colsum = k.sum(axis=0)
        if np.max(np.abs(colsum - 1.0)) > self.tol:
            bad = int(np.argmax(np.abs(colsum - 1.0)))
            raise InvalidArgument(f"column for input {bad} sums to {colsum[bad]:.17g}, not 1")
        object.__setattr__(self, "kernel", k)

    @classmethod
    def from_matrix(cls, kernel, input=None, output=None):
        k = np.asarray(kernel, dtype=float)
        return cls(_alphabet_for(k.shape[1], input), _alphabet_for(k.shape[0], output), k)


def identity_channel(alphabet: Alphabet) -> Channel:
    return Channel(alphabet, alphabet, np.eye(alphabet.size))


@dataclass(frozen=True, eq=False)
class Partition:
    """Disjoint nonempty blocks of alphabet indices covering the alphabet."""

    alphabet: Alphabet
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(self.alphabet.index(x)) for x in b)) for b in self.blocks)
        seen = set()
        for b in blocks:
            if not b:
                raise InvalidArgument("partition blocks must be nonempty")
            if seen.intersection(b) or len(set(b)) != len(b):
                raise InvalidArgument("partition blocks must be pairwise disjoint")
            seen.update(b)
        if seen != set(range(self.alphabet.size)):
            missing = sorted(set(range(self.alphabet.size)) - seen)
            raise InvalidArgument(f"partition does not cover elements {missing}")
        object.__setattr__(self, "blocks", blocks)

    def __len__(self):
        return len(self.blocks)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.alphabet == other.alphabet and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.alphabet, self.blocks))

    def __repr__(self):
        return "Partition(" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + ")"

    def canonical(self) -> "Partition":
        """Same partition with blocks ordered by their smallest element."""
        return Partition(self.alphabet, tuple(sorted(self.blocks, key=min)))

    def labels(self) -> np.ndarray:
        """``labels[x]`` is the index of the block containing ``x``."""
        out = np.empty(self.alphabet.size, dtype=int)
        for i, b in enumerate(self.blocks):
            out[list(b)] = i
        return out

    def indicators(self) -> np.ndarray:
        """``(n_blocks, n)`` array whose rows are the block indicator functions."""
        ind = np.zeros((len(self.blocks), self.alphabet.size))
        for i, b in enumerate(self.blocks):
            ind[i, list(b)] = 1.0
        return ind


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """Affine subspace ``base + span(basis)`` of the function space on ``alphabet``.

    ``basis`` is a ``(k, n)`` array of orthonormal rows. ``residual`` is the
    largest distance of the points the subspace was fitted to (zero when the
    subspace was constructed directly).
    """

    alphabet: Alphabet
    base: np.ndarray
    basis: np.ndarray
    tol: float = TOL_MEMBER
    residual: float = 0.0

    def __post_init__(self):
        n = self.alphabet.size
        base = _frozen(self.base, ndim=1)
        basis = _frozen(np.reshape(self.basis, (-1, n)), ndim=2)
        if base.shape[0] != n:
            raise InvalidArgument("base point does not match the alphabet")
        if basis.shape[0] > n:
            raise InvalidArgument("more basis vectors than alphabet elements")
        gram = basis @ basis.T
        if basis.shape[0] and np.max(np.abs(gram - np.eye(basis.shape[0]))) > 1e-8:
            raise InvalidArgument("basis vectors are not orthonormal")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def spanned_by(cls, vectors, base=None, alphabet=None, tol=TOL_MEMBER, tol_rank=TOL_RANK):
        """Subspace ``base + span(vectors)``; ``vectors`` need not be orthonormal."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        n = vectors.shape[1]
        alphabet = _alphabet_for(n, alphabet)
        base = np.zeros(n) if base is None else np.asarray(base, dtype=float)
        return cls(alphabet, base, orthonormal_basis(vectors, tol_rank), tol)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project(self, f) -> np.ndarray:
        """Orthogonal projection of ``f`` onto the subspace."""
        f = np.asarray(f, dtype=float)
        c = f - self.base
        return self.base + (c @ self.basis.T) @ self.basis

    def distance(self, f) -> float:
        f = np.asarray(f, dtype=float)
        return float(np.linalg.norm(f - self.project(f)))

    @property
    def is_linear(self) -> bool:
        """True iff the subspace passes through the origin (base in span(basis))."""
        b = self.base
        off = b - (b @ self.basis.T) @ self.basis
        return bool(np.linalg.norm(off) <= self.tol * max(1.0, np.linalg.norm(b)))


def orthonormal_basis(vectors, tol_rank=TOL_RANK) -> np.ndarray:
    """Orthonormal rows spanning ``vectors`` (rows), dropping relative singular values <= tol_rank."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[-1]))
    _, s, vt = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((0, vectors.shape[1]))
    return vt[s > tol_rank * s[0]]


def numerical_rank(vectors, tol_rank=TOL_RANK) -> int:
    return orthonormal_basis(vectors, tol_rank).shape[0]


# --- operations -------------------------------------------------------------


def point_mass(alphabet: Alphabet, i) -> Dist:
    w = np.zeros(alphabet.size)
    w[alphabet.index(i)] = 1.0
    return Dist(alphabet, w)


def apply_channel(W: Channel, p: Dist) -> Dist:
    """Output distribution ``sum_x W(.|x) p(x)``."""
    if p.alphabet != W.input:
        raise InvalidArgument("distribution alphabet does not match the channel input")
    out = W.kernel @ p.weights
    # rounding can leave tiny negative entries when the kernel has exact zeros
    return Dist(W.output, np.clip(out, 0.0, None), tol=max(p.tol, W.tol))


def compose_channels(W2: Channel, W1: Channel) -> Channel:
    """Channel ``W2 o W1`` (apply ``W1`` first)."""
    if W1.output != W2.input:
        raise InvalidArgument("output alphabet of the first channel must be the input of the second")
    return Channel(W1.input, W2.output, W2.kernel @ W1.kernel, tol=max(W1.tol, W2.tol))


def channel_from_partition(P: Partition) -> Channel:
    """Deterministic channel ``x -> i`` for ``x in A_i``; realizes ``p -> sum_i p(A_i) delta_i``."""
    return Channel(P.alphabet, Alphabet(len(P.blocks)), P.indicators())


def channel_from_embedding(qs: Sequence[Dist]) -> Channel:
    """Channel from ``{0..d}`` whose column ``i`` is ``q_i``.

    Raises :class:`NotCongruentError` if two supports overlap; such a channel is
    still a Markov map but cannot be inverted by a partition channel.
    """
    if not qs:
        raise InvalidArgument("need at least one generator distribution")
    alphabet = qs[0].alphabet
    if any(q.alphabet != alphabet for q in qs):
        raise InvalidArgument("generator distributions must share one alphabet")
    kernel = np.column_stack([q.weights for q in qs])
    owners = (kernel > 0).sum(axis=1)
    if np.any(owners > 1):
        x = int(np.flatnonzero(owners > 1)[0])
        raise NotCongruentError(f"element {alphabet.labels[x]!r} lies in more than one support")
    return Channel(Alphabet(len(qs)), alphabet, kernel)


def fit_affine_hull(points, tol_rank=TOL_RANK, alphabet=None, tol=TOL_MEMBER) -> AffineSubspace:
    """Affine hull of ``points`` (rows) centred at their centroid.

    Directions whose singular value falls below ``tol_rank`` times the largest
    one are discarded; ``residual`` reports how far the discarded part leaves
    the farthest point from the returned subspace.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 1:
        raise InvalidArgument("need at least one point")
    centroid = pts.mean(axis=0)
    centred = pts - centroid
    basis = orthonormal_basis(centred, tol_rank)
    resid = centred - (centred @ basis.T) @ basis
    residual = float(np.max(np.linalg.norm(resid, axis=1)))
    return AffineSubspace(_alphabet_for(pts.shape[1], alphabet), centroid, basis, tol, residual)


def subspace_contains(S: AffineSubspace, f, tol=None):
    """``(inside, residual)``; inside iff distance(f, S) <= tol * max(1, |f|)."""
    f = np.asarray(f, dtype=float)
    if f.shape != (S.alphabet.size,):
        raise InvalidArgument("function does not match the subspace alphabet")
    tol = S.tol if tol is None else tol
    r = S.distance(f)
    return r <= tol * max(1.0, float(np.linalg.norm(f))), r
