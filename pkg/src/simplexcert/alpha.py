"""The alpha-representation and alpha-family detection.

``L_alpha(u) = u ** ((1 - alpha) / 2)`` for ``alpha != 1`` and ``log u`` for
``alpha == 1``. A model is an alpha-family when the image of its
denormalization ``{tau * p}`` under ``L_alpha`` fills an open piece of an
affine subspace. Exponential families are the case ``alpha = 1`` and mixture
families the case ``alpha = -1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog
from scipy.special import logsumexp
from scipy.stats import qmc

from .core import (
    TOL_MEMBER,
    TOL_NORM,
    TOL_RANK,
    AffineSubspace,
    Alphabet,
    Dist,
    PositiveFunction,
    _alphabet_for,
    _frozen,
    fit_affine_hull,
    numerical_rank,
)
from .errors import DomainError, InvalidArgument

DEFAULT_TAUS = (0.5, 1.0, 2.0)


def _is_one(alpha):
    return float(alpha) == 1.0


def l_alpha(alpha: float, u: float) -> float:
    if not u > 0:
        raise DomainError(f"L_alpha is defined for u > 0 only, got {u!r}")
    if _is_one(alpha):
        return float(np.log(u))
    return float(u ** ((1.0 - alpha) / 2.0))


def l_alpha_map(alpha: float, f) -> np.ndarray:
    """Pointwise ``L_alpha`` of a strictly positive function (or a stack of them)."""
    f = np.asarray(f, dtype=float)
    if not np.all(f > 0):
        raise DomainError("L_alpha needs a strictly positive function")
    if _is_one(alpha):
        return np.log(f)
    return f ** ((1.0 - alpha) / 2.0)


def l_alpha_inverse(alpha: float, g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if _is_one(alpha):
        return np.exp(g)
    if not np.all(g > 0):
        raise DomainError("inverse of L_alpha needs a strictly positive function when alpha != 1")
    return g ** (2.0 / (1.0 - alpha))


def denormalize(p: Dist, tau: float) -> PositiveFunction:
    if not tau > 0:
        raise DomainError(f"denormalization factor must be positive, got {tau!r}")
    if not p.strictly_positive:
        raise DomainError("denormalization is defined on strictly positive distributions")
    return PositiveFunction(p.alphabet, tau * p.weights, positive=True)


def _table(values, n, what):
    arr = np.atleast_2d(np.asarray(values, dtype=float))
    if arr.size == 0:
        return np.zeros((0, n))
    if arr.shape[1] != n:
        raise InvalidArgument(f"{what} rows must have length {n}")
    return arr


# --- exponential family -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExponentialSpec:
    """``p_theta(x) = exp(C(x) + theta . F(x) - psi(theta))``."""

    alphabet: Alphabet
    C: np.ndarray
    F: np.ndarray
    tol_rank: float = TOL_RANK

    def __post_init__(self):
        n = self.alphabet.size
        C = _frozen(self.C, ndim=1)
        if C.shape[0] != n:
            raise InvalidArgument("C does not match the alphabet")
        F = _frozen(_table(self.F, n, "F"), ndim=2)
        if numerical_rank(np.vstack([np.ones(n), F]), self.tol_rank) != F.shape[0] + 1:
            raise InvalidArgument("{1, F_1, ..., F_d} are linearly dependent")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "F", F)

    @classmethod
    def from_arrays(cls, C, F, alphabet=None):
        C = np.asarray(C, dtype=float)
        return cls(_alphabet_for(C.shape[0], alphabet), C, F)

    @property
    def dim(self) -> int:
        return self.F.shape[0]

    def psi(self, theta) -> np.ndarray:
        """Log-normalizer, evaluated with a max shift (safe for |theta| up to ~700)."""
        theta = np.asarray(theta, dtype=float)
        return logsumexp(self.C + theta @ self.F, axis=-1)

    def parametrization(self) -> Callable:
        def param(theta):
            s = self.C + np.asarray(theta, dtype=float) @ self.F
            return np.exp(s - logsumexp(s, axis=-1, keepdims=True))

        return param


def eval_exponential(spec: ExponentialSpec, theta) -> Dist:
    theta = np.asarray(theta, dtype=float).reshape(spec.dim)
    return Dist(spec.alphabet, spec.parametrization()(theta))


# --- mixture family -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MixtureSpec:
    """``p_theta(x) = C(x) + theta . F(x)`` with ``sum C = 1`` and ``sum F_i = 0``."""

    alphabet: Alphabet
    C: np.ndarray
    F: np.ndarray
    tol_rank: float = TOL_RANK

    def __post_init__(self):
        n = self.alphabet.size
        C = _frozen(self.C, ndim=1)
        if C.shape[0] != n:
            raise InvalidArgument("C does not match the alphabet")
        if abs(C.sum() - 1.0) > TOL_NORM:
            raise InvalidArgument(f"C sums to {C.sum():.17g}, not 1")
        F = _frozen(_table(self.F, n, "F"), ndim=2)
        if F.shape[0] and np.max(np.abs(F.sum(axis=1))) > TOL_NORM:
            raise InvalidArgument("every F_i must sum to zero")
        if F.shape[0] and numerical_rank(F, self.tol_rank) != F.shape[0]:
            raise InvalidArgument("F_1, ..., F_d are linearly dependent")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "F", F)

    @classmethod
    def from_arrays(cls, C, F, alphabet=None):
        C = np.asarray(C, dtype=float)
        return cls(_alphabet_for(C.shape[0], alphabet), C, F)

    @property
    def dim(self) -> int:
        return self.F.shape[0]

    def parametrization(self) -> Callable:
        def param(theta):
            p = self.C + np.asarray(theta, dtype=float) @ self.F
            if not np.all(p > 0):
                raise DomainError("theta outside the positivity domain of the mixture family")
            return p

        return param


def eval_mixture(spec: MixtureSpec, theta) -> Dist:
    theta = np.asarray(theta, dtype=float).reshape(spec.dim)
    p = spec.C + theta @ spec.F
    if not np.all(p > 0):
        x = int(np.argmin(p))
        raise DomainError(
            f"theta outside Theta: p_theta({spec.alphabet.labels[x]!r}) = {p[x]:.6g} <= 0"
        )
    return Dist(spec.alphabet, p)


# --- general alpha-family -----------------------------------------------------


def _admissible_point(F):
    """A coefficient vector xi with xi . F > 0 pointwise, or None if there is none."""
    m, n = F.shape
    # maximize t subject to F^T xi >= t, |xi_j| <= 1
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A = np.hstack([-F.T, np.ones((n, 1))])
    res = linprog(c, A_ub=A, b_ub=np.zeros(n), bounds=[(-1, 1)] * m + [(None, 1)], method="highs")
    if res.status != 0 or -res.fun <= 1e-12:
        return None
    return res.x[:m]


@dataclass(frozen=True, eq=False)
class AlphaSpec:
    """``p proportional to (sum_j xi_j F_j) ** (2 / (1 - alpha))``, alpha != 1.

    ``center`` is an admissible coefficient vector; one is found by linear
    programming when omitted.
    """

    alpha: float
    alphabet: Alphabet
    F: np.ndarray
    center: Optional[np.ndarray] = None
    tol_rank: float = TOL_RANK

    def __post_init__(self):
        if _is_one(self.alpha):
            raise InvalidArgument("use ExponentialSpec for alpha = 1")
        n = self.alphabet.size
        F = _frozen(_table(self.F, n, "F"), ndim=2)
        if numerical_rank(F, self.tol_rank) != F.shape[0]:
            raise InvalidArgument("F_0, ..., F_d are linearly dependent")
        if self.center is None:
            center = _admissible_point(F)
            if center is None:
                raise InvalidArgument("no coefficient vector makes sum_j xi_j F_j positive")
        else:
            center = np.asarray(self.center, dtype=float)
            if not np.all(center @ F > 0):
                raise InvalidArgument("center is not an admissible coefficient vector")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "center", _frozen(center / np.linalg.norm(center), ndim=1))

    @property
    def dim(self) -> int:
        return self.F.shape[0] - 1

    def chart(self) -> np.ndarray:
        """``(d, d+1)`` orthonormal directions complementary to ``center``."""
        m = self.F.shape[0]
        _, _, vt = np.linalg.svd(self.center.reshape(1, m))
        return vt[1:]

    def parametrization(self) -> Callable:
        """``theta -> eval_alpha(center + theta @ chart)``; scale of xi is irrelevant."""
        E = self.chart()

        def param(theta):
            xi = self.center + np.asarray(theta, dtype=float) @ E
            return _alpha_point(self.alpha, xi @ self.F)

        return param


def _alpha_point(alpha, g):
    if not np.all(g > 0):
        raise DomainError("sum_j xi_j F_j must be strictly positive")
    f = g ** (2.0 / (1.0 - alpha))
    return f / f.sum(axis=-1, keepdims=True)


def eval_alpha(spec: AlphaSpec, xi) -> Dist:
    xi = np.asarray(xi, dtype=float).reshape(spec.F.shape[0])
    return Dist(spec.alphabet, _alpha_point(spec.alpha, xi @ spec.F))


# --- sampled models -------------------------------------------------------------


def min_samples(d: int) -> int:
    return (d + 2) * (d + 3) // 2


def default_count(d: int) -> int:
    return max(25, (d + 2) * (d + 3))


def parameter_grid(box, count=None) -> np.ndarray:
    """Deterministic Halton grid over the box ``[(lo, hi), ...]``; shape ``(count, d)``."""
    box = np.asarray(box, dtype=float).reshape(-1, 2)
    d = box.shape[0]
    count = default_count(d) if count is None else int(count)
    if d == 0:
        return np.zeros((count, 0))
    # skip the first Halton point, which sits on the box corner
    u = qmc.Halton(d=d, scramble=False).random(count + 1)[1:]
    return box[:, 0] + u * (box[:, 1] - box[:, 0])


@dataclass(frozen=True, eq=False)
class SampledModel:
    """Finite sample of a ``dim``-dimensional model in the open simplex.

    ``points[k]`` is the distribution at ``parameters[k]``. When
    ``parametrization`` is given it maps a ``(k, dim)`` parameter array to a
    ``(k, n)`` array of distributions; the geometry module needs it for
    derivatives.
    """

    alphabet: Alphabet
    dim: int
    points: np.ndarray
    parameters: np.ndarray
    parametrization: Optional[Callable] = None
    tol_rank: float = TOL_RANK

    def __post_init__(self):
        n = self.alphabet.size
        pts = _frozen(np.atleast_2d(self.points), ndim=2)
        params = _frozen(np.reshape(self.parameters, (pts.shape[0], self.dim)), ndim=2)
        if pts.shape[1] != n:
            raise InvalidArgument("sample points do not match the alphabet")
        if self.dim < 0:
            raise InvalidArgument("model dimension must be nonnegative")
        if pts.shape[0] < min_samples(self.dim):
            raise InvalidArgument(
                f"{pts.shape[0]} samples; a {self.dim}-dimensional model needs at least "
                f"{min_samples(self.dim)}"
            )
        if not np.all(pts > 0):
            raise DomainError("model samples must be strictly positive distributions")
        if np.max(np.abs(pts.sum(axis=1) - 1.0)) > TOL_NORM:
            raise InvalidArgument("model samples must sum to one")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "parameters", params)
        if self.parametrization is not None and self.dim > 0:
            from .geometry import tangent_vectors

            rank = numerical_rank(tangent_vectors(self, params[:1])[0].T, 1e-6)
            if rank != self.dim:
                raise InvalidArgument(f"local dimension {rank} != declared dimension {self.dim}")

    @classmethod
    def from_parametrization(cls, alphabet, dim, parametrization, box, count=None):
        params = parameter_grid(box, count) if dim else np.zeros((default_count(0), 0))
        pts = np.asarray(parametrization(params), dtype=float)
        return cls(alphabet, dim, pts, params, parametrization)

    @classmethod
    def from_spec(cls, spec, box=None, count=None):
        """Sample an Exponential/Mixture/AlphaSpec over ``box`` (default ``[-1, 1]^d``)."""
        if box is None:
            box = [(-1.0, 1.0)] * spec.dim
        return cls.from_parametrization(spec.alphabet, spec.dim, spec.parametrization(), box, count)

    @property
    def distributions(self):
        return [Dist(self.alphabet, p) for p in self.points]

    def permuted(self, sample_order=None, relabel=None) -> "SampledModel":
        """Same model with samples reordered and/or alphabet elements permuted."""
        pts, params = self.points, self.parameters
        if sample_order is not None:
            pts, params = pts[sample_order], params[sample_order]
        fn = self.parametrization
        alphabet = self.alphabet
        if relabel is not None:
            relabel = np.asarray(relabel)
            pts = pts[:, relabel]
            alphabet = Alphabet.of(alphabet.labels[i] for i in relabel)
            if fn is not None:
                inner = fn

                def fn(t):
                    return np.asarray(inner(t))[..., relabel]

        return SampledModel(alphabet, self.dim, pts, params, fn, self.tol_rank)


def denormalized_images(alpha, M: SampledModel, taus=DEFAULT_TAUS) -> np.ndarray:
    """``L_alpha(tau * p)`` for every tau and every sample, stacked as rows."""
    taus = np.asarray(taus, dtype=float)
    if np.any(taus <= 0):
        raise DomainError("denormalization factors must be positive")
    mu = (taus[:, None, None] * M.points[None, :, :]).reshape(-1, M.alphabet.size)
    return l_alpha_map(alpha, mu)


@dataclass(frozen=True, eq=False)
class AlphaVerdict:
    """Result of :func:`is_alpha_family`.

    ``is_family`` means "locally alpha-affine of full denormalized dimension":
    the sampled images span exactly ``dim + 1`` dimensions and lie on the
    fitted subspace. Finitely many samples cannot certify global maximality.
    """

    alpha: float
    is_family: bool
    Z: AffineSubspace
    max_residual: float
    dimension: int
    expected_dimension: int
    is_linear: bool

    @property
    def reason(self) -> str:
        if self.is_family:
            return "ok"
        if self.dimension != self.expected_dimension:
            return f"hull dimension {self.dimension} != {self.expected_dimension}"
        if self.max_residual > self.Z.tol:
            return f"residual {self.max_residual:.3g} above tolerance"
        return "affine hull is not a linear subspace"


def is_alpha_family(alpha, M: SampledModel, taus=DEFAULT_TAUS, tol=TOL_MEMBER, tol_rank=TOL_RANK):
    if len(set(float(t) for t in taus)) < 3:
        raise InvalidArgument("need at least three distinct denormalization factors")
    images = denormalized_images(alpha, M, taus)
    Z = fit_affine_hull(images, tol_rank, M.alphabet, tol)
    norms = np.maximum(1.0, np.linalg.norm(images, axis=1))
    dist = np.array([Z.distance(f) for f in images])
    max_residual = float(np.max(dist / norms))
    expected = M.dim + 1
    ok = Z.dim == expected and max_residual <= tol
    linear = Z.is_linear
    if not _is_one(alpha):
        ok = ok and linear
    return AlphaVerdict(float(alpha), bool(ok), Z, max_residual, Z.dim, expected, linear)
