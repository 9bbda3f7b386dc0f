"""Unital subalgebras of R^X and the partitions that generate them.

A linear space of functions on a finite set that contains the constants and
is closed under pointwise multiplication is exactly the span of the indicator
functions of some partition. :func:`partition_from_subalgebra` recovers that
partition by common refinement of level sets. :func:`atoms_oracle` and
:func:`indicator_via_lagrange` follow the level-set construction directly and
exist to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import TOL_MEMBER, TOL_RANK, Alphabet, Partition, _alphabet_for, _frozen, orthonormal_basis
from .errors import (
    DomainError,
    IllConditionedError,
    InconsistentSubalgebraError,
    InvalidArgument,
)

VALUE_TOL = 1e-7
ORACLE_MAX_SIZE = 16
RANGE_FLOOR = 1e-6


class NotSubalgebraError(InvalidArgument):
    """Raised when an operation requires a unital subalgebra and gets something else."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


@dataclass(frozen=True, eq=False)
class FunctionSubspace:
    """Linear span of ``basis`` (rows) inside the functions on ``alphabet``."""

    alphabet: Alphabet
    basis: np.ndarray
    tol: float = TOL_MEMBER
    tol_rank: float = TOL_RANK

    def __post_init__(self):
        n = self.alphabet.size
        basis = _frozen(np.reshape(self.basis, (-1, n)), ndim=2)
        if basis.shape[0] > n:
            raise InvalidArgument("more basis functions than alphabet elements")
        if orthonormal_basis(basis, self.tol_rank).shape[0] != basis.shape[0]:
            raise InvalidArgument("basis functions are linearly dependent")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_onb", _frozen(orthonormal_basis(basis, self.tol_rank)))

    @classmethod
    def span(cls, functions, alphabet=None, tol=TOL_MEMBER, tol_rank=TOL_RANK):
        """Subspace spanned by ``functions``, which may be linearly dependent."""
        functions = np.atleast_2d(np.asarray(functions, dtype=float))
        alphabet = _alphabet_for(functions.shape[1], alphabet)
        return cls(alphabet, orthonormal_basis(functions, tol_rank), tol, tol_rank)

    @classmethod
    def of_partition(cls, partition: Partition, mix=None, tol=TOL_MEMBER):
        """Span of the block indicators; ``mix`` (square matrix) scrambles the basis."""
        ind = partition.indicators()
        basis = ind if mix is None else np.asarray(mix, dtype=float) @ ind
        return cls(partition.alphabet, basis, tol)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def orthonormal(self) -> np.ndarray:
        return self._onb

    def residual(self, f) -> float:
        """Distance from ``f`` to the subspace."""
        f = np.asarray(f, dtype=float)
        Q = self._onb
        return float(np.linalg.norm(f - (f @ Q.T) @ Q))

    def contains(self, f) -> bool:
        f = np.asarray(f, dtype=float)
        return self.residual(f) <= self.tol * max(1.0, float(np.linalg.norm(f)))

    def same_span(self, other: "FunctionSubspace") -> bool:
        return self.dim == other.dim and all(self.contains(b) for b in other.orthonormal)


@dataclass(frozen=True, eq=False)
class SubalgebraVerdict:
    verdict: bool
    witness: Optional[tuple]
    constant_residual: float
    max_product_residual: float

    def __bool__(self):
        return self.verdict


def is_unital_subalgebra(V: FunctionSubspace) -> SubalgebraVerdict:
    """Check that ``1`` and every product of two basis functions lie in ``V``.

    By bilinearity, closure on basis pairs is closure on all of ``V``. On
    failure ``witness`` is the first offending basis pair, or ``None`` when the
    constant function is what is missing (see ``constant_residual``).
    """
    n = V.alphabet.size
    one = np.ones(n)
    const_res = V.residual(one)
    has_one = const_res <= V.tol * np.sqrt(n)
    witness = None
    worst = 0.0
    B = V.basis
    for i in range(V.dim):
        for j in range(i, V.dim):
            prod = B[i] * B[j]
            r = V.residual(prod)
            rel = r / max(1.0, float(np.linalg.norm(prod)))
            worst = max(worst, rel)
            if witness is None and rel > V.tol:
                witness = (np.array(B[i]), np.array(B[j]))
    ok = bool(has_one and witness is None)
    return SubalgebraVerdict(ok, witness, float(const_res), float(worst))


def _value_clusters(values, tol):
    """Single-linkage clusters of 1-d values: labels and per-cluster gaps."""
    order = np.argsort(values, kind="stable")
    gaps = np.diff(values[order])
    labels = np.empty(len(values), dtype=int)
    labels[order] = np.concatenate([[0], np.cumsum(gaps > tol)])
    return labels, gaps


def _value_scale(f):
    # range of f, floored so rounding noise on a constant function is not a range
    size = float(np.max(np.abs(f))) if len(f) else 0.0
    return max(float(np.ptp(f)), RANGE_FLOOR * size) or 1.0


def partition_from_subalgebra(V: FunctionSubspace, value_tol=VALUE_TOL) -> Partition:
    """Atoms of ``x ~ y  iff  f(x) = f(y) for every basis f`` of a unital subalgebra."""
    verdict = is_unital_subalgebra(V)
    if not verdict:
        raise NotSubalgebraError("subspace is not a unital subalgebra", verdict)
    n = V.alphabet.size
    keys = np.zeros((n, 0), dtype=int)
    for f in V.orthonormal:
        labels, _ = _value_clusters(f, value_tol * _value_scale(f))
        keys = np.column_stack([keys, labels])
    _, atom_of = np.unique(keys, axis=0, return_inverse=True)
    atom_of = np.asarray(atom_of).reshape(-1)
    blocks = [tuple(np.flatnonzero(atom_of == a)) for a in range(atom_of.max() + 1)]
    P = Partition(V.alphabet, blocks).canonical()
    if len(P) != V.dim:
        raise InconsistentSubalgebraError(f"{len(P)} atoms for a subalgebra of dimension {V.dim}")
    for ind in P.indicators():
        if not V.contains(ind):
            raise InconsistentSubalgebraError("an atom indicator lies outside the subalgebra")
    return P


def indicator_via_lagrange(f, lambda0, value_tol=VALUE_TOL, tol=1e-8) -> np.ndarray:
    """Evaluate ``a(f)`` with ``a(t) = prod_i (t - l_i) / (l0 - l_i)`` over the other values ``l_i`` of f.

    The result is the indicator of the level set ``{f = lambda0}``.
    """
    f = np.asarray(f, dtype=float)
    vtol = value_tol * _value_scale(f)
    labels, gaps = _value_clusters(f, vtol)
    if np.any((gaps > vtol) & (gaps <= 2 * vtol)):
        raise IllConditionedError("values of f are not separated by twice the value tolerance")
    levels = np.array([f[labels == c].mean() for c in range(labels.max() + 1)])
    hit = np.flatnonzero(np.abs(levels - lambda0) <= vtol)
    if hit.size == 0:
        raise DomainError(f"{lambda0!r} is not a value of f")
    l0 = levels[hit[0]]
    a = np.ones_like(f)
    for li in np.delete(levels, hit[0]):
        a *= (f - li) / (l0 - li)
    if np.any(np.minimum(np.abs(a), np.abs(a - 1.0)) > tol):
        raise IllConditionedError("Lagrange indicator deviates from {0, 1} beyond tolerance")
    return a


def generic_element(V: FunctionSubspace, seed=0, value_tol=VALUE_TOL, attempts=100):
    """Random combination of the basis whose atoms take well-separated values.

    The draw is reproducible from ``seed``. Returns ``(f, partition)``.
    """
    P = partition_from_subalgebra(V, value_tol)
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        f = rng.standard_normal(V.dim) @ V.orthonormal
        levels = np.sort([f[b[0]] for b in P.blocks])
        if len(levels) < 2 or np.min(np.diff(levels)) > 1e3 * value_tol * _value_scale(f):
            return f, P
    raise IllConditionedError("could not draw a separating element")


def lagrange_indicators(V: FunctionSubspace, seed=0, value_tol=VALUE_TOL):
    """Atom indicators rebuilt by the Lagrange construction from one generic element."""
    f, P = generic_element(V, seed, value_tol)
    return P, np.array([indicator_via_lagrange(f, f[b[0]], value_tol) for b in P.blocks])


def atoms_oracle(V: FunctionSubspace) -> Partition:
    """Brute force: collect every B with ``1_B`` in V, then take minimal sets.

    Exponential in the alphabet size, so limited to 16 elements.
    """
    n = V.alphabet.size
    if n > ORACLE_MAX_SIZE:
        raise InvalidArgument(f"atoms_oracle enumerates 2^n subsets; n = {n} exceeds {ORACLE_MAX_SIZE}")
    masks = np.arange(2**n, dtype=np.int64)
    ind = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    Q = V.orthonormal
    res = np.linalg.norm(ind - (ind @ Q.T) @ Q, axis=1)
    members = masks[res <= V.tol * np.maximum(1.0, np.linalg.norm(ind, axis=1))]
    atoms = []
    for x in range(n):
        containing = members[(members >> x) & 1 == 1]
        if containing.size == 0:
            raise InvalidArgument(f"element {x} lies in no set of the class (is 1 in V?)")
        atoms.append(int(np.bitwise_and.reduce(containing)))
    blocks = {a: tuple(int(x) for x in range(n) if (a >> x) & 1) for a in atoms}
    return Partition(V.alphabet, list(blocks.values())).canonical()


def set_class(V: FunctionSubspace):
    """All subsets B (as sorted tuples) with ``1_B`` in V. Small alphabets only."""
    n = V.alphabet.size
    if n > ORACLE_MAX_SIZE:
        raise InvalidArgument("alphabet too large to enumerate")
    out = []
    for mask in range(2**n):
        ind = np.array([(mask >> x) & 1 for x in range(n)], dtype=float)
        if V.contains(ind):
            out.append(tuple(x for x in range(n) if (mask >> x) & 1))
    return out
