"""Fisher metric, alpha-connections and autoparallel submanifolds of P(X).

Two charts cover the open simplex on ``X = {0, ..., n}``:

* mixture coordinates ``eta_i = p(i)``, ``i = 1..n``, in which the
  (-1)-connection has vanishing Christoffel symbols;
* exponential coordinates ``theta_i = log(p(i) / p(0))``, in which the
  (+1)-connection has vanishing Christoffel symbols.

Each flat connection is carried into the other chart with the usual
change-of-coordinates rule, and ``Gamma(alpha) = (1+alpha)/2 Gamma(1) +
(1-alpha)/2 Gamma(-1)``. Symbols are stored all-lower, ``entries[i, j, k] =
g(nabla_i d_j, d_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dist
from .errors import DegenerateParametrizationError, DomainError, InvalidArgument

CHARTS = ("mixture", "exponential")
STEP_FIRST = 1e-5
STEP_SECOND = 1e-4
AUTOPARALLEL_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """A strictly positive distribution with its mixture coordinates ``p[1:]``."""

    p: Dist

    def __post_init__(self):
        if not self.p.strictly_positive:
            raise DomainError("chart points must be strictly positive")
        if self.p.alphabet.size < 2:
            raise InvalidArgument("the simplex on one point has no coordinates")

    @classmethod
    def from_array(cls, p):
        return cls(Dist.from_array(p))

    @classmethod
    def from_coords(cls, eta):
        eta = np.asarray(eta, dtype=float)
        return cls.from_array(np.concatenate([[1.0 - eta.sum()], eta]))

    @property
    def coords(self) -> np.ndarray:
        return self.p.weights[1:]

    @property
    def theta(self) -> np.ndarray:
        w = self.p.weights
        return np.log(w[1:]) - np.log(w[0])

    @property
    def n(self) -> int:
        return self.p.alphabet.size - 1


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Tangent vector of P(X), as a function on X summing to zero."""

    ambient: np.ndarray

    def __post_init__(self):
        v = np.array(self.ambient, dtype=float)
        if abs(v.sum()) > 1e-12 * max(1.0, np.abs(v).sum()):
            raise InvalidArgument("tangent vectors of the simplex must sum to zero")
        v.setflags(write=False)
        object.__setattr__(self, "ambient", v)

    def mixture_components(self) -> np.ndarray:
        return self.ambient[1:]


@dataclass(frozen=True, eq=False)
class ChristoffelTensor:
    entries: np.ndarray
    chart: str

    @property
    def dims(self) -> int:
        return self.entries.shape[0]


def _as_points(p):
    if isinstance(p, ChartPoint):
        return p.p.weights
    if isinstance(p, Dist):
        return ChartPoint(p).p.weights
    P = np.asarray(p, dtype=float)
    if not np.all(P > 0):
        raise DomainError("point on the boundary of the simplex")
    return P


# Closed-form derivatives of the coordinate changes; P has shape (..., n+1).

def _metric_eta(P):
    """Fisher metric in mixture coordinates, also the Jacobian d(theta)/d(eta)."""
    eta, p0 = P[..., 1:], P[..., :1]
    n = eta.shape[-1]
    return np.eye(n) / eta[..., None, :] + 1.0 / p0[..., None]


def _metric_theta(P):
    """Fisher metric in exponential coordinates, also the Jacobian d(eta)/d(theta)."""
    eta = P[..., 1:]
    n = eta.shape[-1]
    return eta[..., :, None] * np.eye(n) - eta[..., :, None] * eta[..., None, :]


def _hess_theta_in_eta(P):
    """``H[a, i, j] = d^2 theta_a / d eta_i d eta_j``."""
    eta, p0 = P[..., 1:], P[..., 0]
    n = eta.shape[-1]
    diag = np.zeros(eta.shape[:-1] + (n, n, n))
    idx = np.arange(n)
    diag[..., idx, idx, idx] = -1.0 / eta**2
    return diag + (1.0 / p0**2)[..., None, None, None]


def _hess_eta_in_theta(P):
    """``H[a, i, j] = d^2 eta_a / d theta_i d theta_j``."""
    eta = P[..., 1:]
    n = eta.shape[-1]
    I = np.eye(n)
    A = I - eta[..., None, :]  # A[a, i] = delta_ai - eta_i
    first = A[..., :, :, None] * A[..., :, None, :]
    second = eta[..., None, :, None] * (I - eta[..., None, None, :])
    return eta[..., :, None, None] * (first - second)


def _transport(jac, hess, metric):
    """Lower-index symbols, in chart y, of the connection flat in chart x.

    ``jac[k, a] = dy_k/dx_a``, ``hess[a, i, j] = d^2 x_a / dy_i dy_j`` and
    ``metric`` is the Fisher metric in chart y.
    """
    upper = np.einsum("...ka,...aij->...kij", jac, hess)
    return np.einsum("...lij,...lk->...ijk", upper, metric)


def _christoffel_array(alpha, P, chart):
    a1, am = (1.0 + alpha) / 2.0, (1.0 - alpha) / 2.0
    if chart == "mixture":
        e_part = _transport(_metric_theta(P), _hess_theta_in_eta(P), _metric_eta(P))
        return a1 * e_part  # the (-1) part vanishes identically here
    if chart == "exponential":
        m_part = _transport(_metric_eta(P), _hess_eta_in_theta(P), _metric_theta(P))
        return am * m_part
    raise InvalidArgument(f"unknown chart {chart!r}; expected one of {CHARTS}")


def fisher_metric(p, chart="mixture") -> np.ndarray:
    """``g_ij = delta_ij / p(i) + 1 / p(0)`` in mixture coordinates."""
    P = _as_points(p)
    if chart == "mixture":
        return _metric_eta(P)
    if chart == "exponential":
        return _metric_theta(P)
    raise InvalidArgument(f"unknown chart {chart!r}")


def christoffel(alpha, p, chart="mixture") -> ChristoffelTensor:
    P = _as_points(p)
    return ChristoffelTensor(_christoffel_array(float(alpha), P, chart), chart)


def christoffel_expectation_oracle(alpha, p, chart="mixture", h=STEP_SECOND):
    """``E[(d_i d_j l + (1-alpha)/2 d_i l d_j l) d_k l]`` with log-likelihood derivatives by finite differences.

    Uses central differences at steps ``h`` and ``2h`` combined by Richardson
    extrapolation. Kept independent of :func:`christoffel` for testing.
    """
    P = _as_points(p)
    n = P.shape[0] - 1
    if P.min() <= 4 * n * h:
        raise DomainError("point too close to the boundary for the finite-difference stencil")
    if chart == "mixture":
        c0 = P[1:]

        def loglik(c):
            return np.log(np.concatenate([[1.0 - c.sum()], c]))

    elif chart == "exponential":
        c0 = np.log(P[1:]) - np.log(P[0])

        def loglik(c):
            s = np.concatenate([[0.0], c])
            return s - np.log(np.exp(s).sum())

    else:
        raise InvalidArgument(f"unknown chart {chart!r}")

    E = np.eye(n)

    def derivs(step):
        d1 = np.array([(loglik(c0 + step * E[i]) - loglik(c0 - step * E[i])) / (2 * step) for i in range(n)])
        d2 = np.empty((n, n, n + 1))
        for i in range(n):
            for j in range(n):
                d2[i, j] = (
                    loglik(c0 + step * (E[i] + E[j]))
                    - loglik(c0 + step * (E[i] - E[j]))
                    - loglik(c0 - step * (E[i] - E[j]))
                    + loglik(c0 - step * (E[i] + E[j]))
                ) / (4 * step * step)
        return d1, d2

    d1h, d2h = derivs(h)
    d1H, d2H = derivs(2 * h)
    d1 = (4 * d1h - d1H) / 3
    d2 = (4 * d2h - d2H) / 3
    w = (1.0 - alpha) / 2.0
    inner = d2 + w * d1[:, None, :] * d1[None, :, :]
    return np.einsum("ijx,kx,x->ijk", inner, d1, P)


def combination_identity_check(alpha, beta, gamma, p, chart="mixture") -> float:
    """Max-norm of ``Gamma(gamma) - [(gamma-beta)/(alpha-beta) Gamma(alpha) + (alpha-gamma)/(alpha-beta) Gamma(beta)]``."""
    if alpha == beta:
        raise DomainError("alpha and beta must differ")
    ga = christoffel(alpha, p, chart).entries
    gb = christoffel(beta, p, chart).entries
    gg = christoffel(gamma, p, chart).entries
    combo = (gamma - beta) / (alpha - beta) * ga + (alpha - gamma) / (alpha - beta) * gb
    return float(np.max(np.abs(gg - combo))) if gg.size else 0.0


# --- autoparallel submanifolds ------------------------------------------------


def _evaluate(M, T):
    out = np.asarray(M.parametrization(T), dtype=float)
    if out.shape != (T.shape[0], M.alphabet.size):
        raise InvalidArgument("parametrization must map a (k, d) array to a (k, n) array")
    return out


def tangent_vectors(M, params=None, h=STEP_FIRST) -> np.ndarray:
    """Central-difference ``d p / d t_a`` as ambient vectors, shape ``(k, d, n+1)``."""
    if M.parametrization is None:
        raise InvalidArgument("model has no parametrization")
    T = M.parameters if params is None else np.atleast_2d(np.asarray(params, dtype=float))
    d = M.dim
    out = np.empty((T.shape[0], d, M.alphabet.size))
    for a in range(d):
        e = np.zeros(d)
        e[a] = h
        out[:, a] = (_evaluate(M, T + e) - _evaluate(M, T - e)) / (2 * h)
    return out


def second_derivatives(M, params=None, h=STEP_SECOND) -> np.ndarray:
    """Central-difference ``d^2 p / d t_a d t_b``, shape ``(k, d, d, n+1)``."""
    T = M.parameters if params is None else np.atleast_2d(np.asarray(params, dtype=float))
    d = M.dim
    out = np.empty((T.shape[0], d, d, M.alphabet.size))
    f0 = _evaluate(M, T)
    I = np.eye(d) * h
    for a in range(d):
        out[:, a, a] = (_evaluate(M, T + I[a]) - 2 * f0 + _evaluate(M, T - I[a])) / (h * h)
        for b in range(a + 1, d):
            mixed = (
                _evaluate(M, T + I[a] + I[b])
                - _evaluate(M, T + I[a] - I[b])
                - _evaluate(M, T - I[a] + I[b])
                + _evaluate(M, T - I[a] - I[b])
            ) / (4 * h * h)
            out[:, a, b] = out[:, b, a] = mixed
    return out


@dataclass(frozen=True, eq=False)
class ModelJet:
    """Points, first and second derivatives of a parametrized model at its samples."""

    points: np.ndarray
    first: np.ndarray
    second: np.ndarray


def model_jet(M) -> ModelJet:
    if M.parametrization is None:
        raise InvalidArgument("autoparallelity needs a parametrized model")
    pts = _evaluate(M, M.parameters)
    if M.dim == 0:
        k, N = pts.shape
        return ModelJet(pts, np.zeros((k, 0, N)), np.zeros((k, 0, 0, N)))
    return ModelJet(pts, tangent_vectors(M), second_derivatives(M))


@dataclass(frozen=True)
class AutoparallelVerdict:
    alpha: float
    verdict: bool
    max_normal_component: float


def is_alpha_autoparallel(M, alpha, tol=AUTOPARALLEL_TOL, jet=None) -> AutoparallelVerdict:
    """Check ``nabla(alpha)_{d_a} d_b`` stays tangent at every sample of ``M``.

    The covariant derivative of coordinate fields is computed in mixture
    coordinates, its Fisher-orthogonal projection onto the normal space is
    taken, and the largest Fisher norm over samples and index pairs is
    compared with ``tol``. Testing coordinate fields suffices because the
    second fundamental form is bilinear.
    """
    if M.alphabet.size < 2 or M.dim == 0:
        if M.parametrization is None:
            raise InvalidArgument("autoparallelity needs a parametrized model")
        return AutoparallelVerdict(float(alpha), True, 0.0)
    jet = model_jet(M) if jet is None else jet
    P = jet.points
    T = jet.first[..., 1:]  # (k, d, n) mixture components
    S = jet.second[..., 1:]  # (k, d, d, n)
    G = _metric_eta(P)
    Ginv = _metric_theta(P)
    lower = _christoffel_array(float(alpha), P, "mixture")
    upper = np.einsum("mkl,mijl->mijk", Ginv, lower)
    acc = S + np.einsum("mijk,mai,mbj->mabk", upper, T, T)

    gram = np.einsum("mai,mij,mbj->mab", T, G, T)
    svals = np.linalg.svd(gram, compute_uv=False)
    if np.any(svals[:, -1] <= 1e-10 * svals[:, 0]):
        raise DegenerateParametrizationError("tangent vectors are linearly dependent at some sample")
    # Fisher-orthogonal projection onto the tangent span
    rhs = np.einsum("mai,mij,mbcj->mabc", T, G, acc)
    coef = np.linalg.solve(gram[:, None, None, :, :], np.moveaxis(rhs, 1, -1)[..., None])[..., 0]
    # coef[m, b, c, a]: tangent coordinates of acc[m, b, c]
    tangential = np.einsum("mbca,mai->mbci", coef, T)
    normal = acc - tangential
    norms = np.sqrt(np.maximum(np.einsum("mbci,mij,mbcj->mbc", normal, G, normal), 0.0))
    worst = float(norms.max())
    return AutoparallelVerdict(float(alpha), worst <= tol, worst)
