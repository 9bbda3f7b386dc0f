"""Simplex-equivalence certificates and the four-way equivalence battery.

A model ``M`` in the open simplex on ``X`` is statistically equivalent to the
``d``-simplex exactly when ``M = {sum_i lambda_i q_i}`` for distributions
``q_0..q_d`` with disjoint supports. :func:`certify_simplex_equivalence`
finds such ``q_i`` from samples (via the mixture span and the unital
subalgebra it induces) and returns the channels ``V`` and ``W`` with
``W V = I``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .alpha import (
    DEFAULT_TAUS,
    ExponentialSpec,
    MixtureSpec,
    SampledModel,
    is_alpha_family,
    l_alpha_map,
)
from .core import (
    TOL_MEMBER,
    TOL_RANK,
    AffineSubspace,
    Alphabet,
    Channel,
    Dist,
    Partition,
    apply_channel,
    channel_from_embedding,
    channel_from_partition,
    compose_channels,
    orthonormal_basis,
)
from .errors import (
    CertificationError,
    DomainError,
    IllConditionedError,
    InconsistentSubalgebraError,
    InvalidArgument,
    SimplexCertError,
)
from .geometry import AUTOPARALLEL_TOL, is_alpha_autoparallel, model_jet
from .subalgebra import (
    FunctionSubspace,
    NotSubalgebraError,
    is_unital_subalgebra,
    lagrange_indicators,
    partition_from_subalgebra,
)

log = logging.getLogger(__name__)

DEFAULT_GRID = (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)
TOL_IDENTITY = 1e-12
CONDITIONS = ("i", "ii", "iii", "iv")


@dataclass(frozen=True, eq=False)
class Certificate:
    """Witness that a model is the image of the open d-simplex under ``V``.

    ``embedding`` has column ``i`` equal to ``generators[i]``;
    ``left_inverse`` is the deterministic channel of ``partition``.
    """

    partition: Partition
    generators: tuple
    embedding: Channel
    left_inverse: Channel
    base_point: Dist
    residuals: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def alphabet(self) -> Alphabet:
        return self.partition.alphabet

    @property
    def dim(self) -> int:
        return len(self.partition) - 1

    def check(self, samples=None, tol=TOL_MEMBER) -> dict:
        """Recompute the certificate's invariants; raises on violation, returns residuals."""
        for q, block in zip(self.generators, self.partition.blocks):
            if q.support != block:
                raise CertificationError("roundtrip-failed", f"support of q is {q.support}, block is {block}")
        wv = compose_channels(self.left_inverse, self.embedding).kernel
        id_res = float(np.max(np.abs(wv - np.eye(len(self.generators)))))
        if id_res > TOL_IDENTITY:
            raise CertificationError("roundtrip-failed", f"|WV - I| = {id_res:.3g}")
        out = {"wv_identity": id_res}
        if samples is not None:
            pts = np.atleast_2d(np.asarray(samples, dtype=float))
            back = (self.embedding.kernel @ (self.left_inverse.kernel @ pts.T)).T
            rt = float(np.max(np.abs(back - pts)))
            if rt > tol:
                raise CertificationError("roundtrip-failed", f"V(W(p)) differs from p by {rt:.3g}")
            out["roundtrip"] = rt
        return out

    def simplex_coordinates(self, p: Dist) -> Dist:
        """``(p(A_0), ..., p(A_d))``, the preimage of ``p`` in the simplex."""
        return apply_channel(self.left_inverse, p)


def _pipeline_fail(stage, message, **kw):
    log.debug("certification failed at %s: %s", stage, message)
    raise CertificationError(stage, message, **kw)


def v_e_from_model(M, taus=DEFAULT_TAUS, tol=TOL_MEMBER, tol_rank=TOL_RANK) -> FunctionSubspace:
    """Translation space of the log-image of the denormalized model.

    For an :class:`ExponentialSpec` this is ``span{1, F_1, ..., F_d}``; for a
    sampled model it is fitted from ``{log(tau p)}``.
    """
    if isinstance(M, ExponentialSpec):
        return FunctionSubspace.span(np.vstack([np.ones(M.alphabet.size), M.F]), M.alphabet, tol, tol_rank)
    verdict = is_alpha_family(1.0, M, taus, tol, tol_rank)
    if not verdict.is_family:
        raise CertificationError("not-e-family", verdict.reason, residual=verdict.max_residual)
    return FunctionSubspace(M.alphabet, verdict.Z.basis, tol, tol_rank)


def _mixture_span(M, m_spec, taus, tol, tol_rank):
    """Orthonormal basis of the linear span of the denormalized model, and a residual."""
    if m_spec is not None:
        basis = orthonormal_basis(np.vstack([m_spec.C, m_spec.F]), tol_rank)
        resid = M.points - (M.points @ basis.T) @ basis
        r = float(np.max(np.linalg.norm(resid, axis=1)))
        if basis.shape[0] != M.dim + 1 or r > tol:
            _pipeline_fail("not-m-family", f"samples leave the declared mixture span by {r:.3g}", residual=r)
        return basis, r
    verdict = is_alpha_family(-1.0, M, taus, tol, tol_rank)
    if not verdict.is_family:
        _pipeline_fail("not-m-family", verdict.reason, residual=verdict.max_residual)
    return verdict.Z.basis, verdict.max_residual


def certify_simplex_equivalence(
    M: SampledModel,
    e_spec: Optional[ExponentialSpec] = None,
    m_spec: Optional[MixtureSpec] = None,
    taus=DEFAULT_TAUS,
    tol=TOL_MEMBER,
    tol_rank=TOL_RANK,
    seed=0,
) -> Certificate:
    """Build a simplex-equivalence certificate or fail at a named stage.

    Stages, in order: ``not-m-family``, ``not-e-family`` (declared e-spec
    disagrees), ``not-subalgebra``, ``not-e-family`` (sampled log-image),
    ``partition-extraction-failed``, ``roundtrip-failed``.

    The candidate translation space of the log-image is ``{f / p_0 : f in
    V_m}``, the image of the mixture span under the differential of ``log``
    at ``p_0``. It coincides with the true one whenever ``M`` is also an
    exponential family, and otherwise exposes a concrete pair of functions
    whose product leaves it.
    """
    residuals = {}
    # 1. mixture structure
    vm, residuals["m_family"] = _mixture_span(M, m_spec, taus, tol, tol_rank)

    # 2. candidate V_e
    p0 = M.points[0]
    ve = FunctionSubspace.span(vm / p0, M.alphabet, tol, tol_rank)
    if ve.dim != M.dim + 1:
        _pipeline_fail("not-m-family", f"mixture span has dimension {ve.dim}, expected {M.dim + 1}")
    if e_spec is not None:
        declared = v_e_from_model(e_spec, taus, tol, tol_rank)
        if not declared.same_span(ve):
            _pipeline_fail("not-e-family", "declared exponential family does not match the samples")

    # 3. V_e must contain 1 and be closed under products
    sub = is_unital_subalgebra(ve)
    residuals["subalgebra_constant"] = sub.constant_residual
    residuals["subalgebra_product"] = sub.max_product_residual
    if not sub:
        if sub.witness is None:
            _pipeline_fail(
                "not-subalgebra",
                f"constant function missing (residual {sub.constant_residual:.3g})",
                residual=sub.constant_residual,
            )
        _pipeline_fail(
            "not-subalgebra",
            f"product of a basis pair leaves V_e (relative residual {sub.max_product_residual:.3g})",
            witness=sub.witness,
            residual=sub.max_product_residual,
        )

    # cross-check against the sampled log-image
    if e_spec is None:
        fitted = v_e_from_model(M, taus, tol, tol_rank)
        if not fitted.same_span(ve):
            _pipeline_fail("not-e-family", "log-image translation space differs from V_m / p_0")

    # 4. partition
    try:
        P = partition_from_subalgebra(ve)
        _, lag = lagrange_indicators(ve, seed)
    except (InconsistentSubalgebraError, NotSubalgebraError, IllConditionedError, DomainError) as exc:
        _pipeline_fail("partition-extraction-failed", str(exc))
    residuals["lagrange_indicator"] = float(np.max(np.abs(lag - P.indicators())))
    if residuals["lagrange_indicator"] > 1e-8:
        _pipeline_fail("partition-extraction-failed", "Lagrange indicators disagree with the atoms")

    # 5-6. generators and channels
    qs = []
    for ind in P.indicators():
        mass = p0 * ind
        qs.append(Dist(M.alphabet, mass / mass.sum()))
    V = channel_from_embedding(qs)
    W = channel_from_partition(P)
    cert = Certificate(P, tuple(qs), V, W, Dist(M.alphabet, p0), residuals, int(seed))

    # 7. round trip
    residuals.update(cert.check(M.points, tol))
    return cert


def alpha_family_from_partition(alpha, qs, tol=TOL_MEMBER) -> AffineSubspace:
    """Subspace containing ``L_alpha`` of the denormalized model ``{sum_i lambda_i q_i}``.

    For ``alpha != 1`` this is the linear span of the block-restricted powers
    ``q_i ** ((1 - alpha) / 2)`` (zero off the support of ``q_i``). For
    ``alpha == 1`` it is ``C + span{1_A_i}`` with ``C = sum_i log(q_i) 1_A_i``.
    """
    if not qs:
        raise InvalidArgument("need at least one generator")
    alphabet = qs[0].alphabet
    Q = np.vstack([np.asarray(q.weights) for q in qs])
    support = Q > 0
    if np.any(support.sum(axis=0) > 1):
        raise DomainError("generator supports overlap")
    if np.any(support.sum(axis=0) == 0):
        raise DomainError("generator supports do not cover the alphabet")
    safe = np.where(support, Q, 1.0)
    if float(alpha) == 1.0:
        C = (np.log(safe) * support).sum(axis=0)
        ind = support.astype(float)
        basis = ind / np.sqrt(ind.sum(axis=1, keepdims=True))
        return AffineSubspace(alphabet, C, basis, tol)
    L = l_alpha_map(alpha, safe) * support
    basis = L / np.linalg.norm(L, axis=1, keepdims=True)
    return AffineSubspace(alphabet, np.zeros(alphabet.size), basis, tol)


def simplex_model(qs, box=None, count=None) -> SampledModel:
    """Sampled model ``{sum_i lambda_i q_i}`` with ``lambda = softmax(0, t)`` over ``box``.

    ``q_i`` need not have disjoint supports; with overlapping supports this is
    a general mixture family.
    """
    Q = np.vstack([np.asarray(q.weights if isinstance(q, Dist) else q, dtype=float) for q in qs])
    alphabet = qs[0].alphabet if isinstance(qs[0], Dist) else Alphabet(Q.shape[1])
    d = Q.shape[0] - 1
    if box is None:
        box = [(-1.0, 1.0)] * d

    def param(T):
        T = np.asarray(T, dtype=float)
        s = np.concatenate([np.zeros(T.shape[:-1] + (1,)), T], axis=-1)
        lam = np.exp(s - s.max(axis=-1, keepdims=True))
        lam /= lam.sum(axis=-1, keepdims=True)
        return lam @ Q

    return SampledModel.from_parametrization(alphabet, d, param, box, count)


@dataclass(frozen=True, eq=False)
class TheoremReport:
    """Verdicts for the four equivalent conditions, plus per-alpha details.

    ``conditions`` maps ``"i"``..``"iv"`` to booleans. ``faults`` lists every
    departure from the forced pattern (all four agree, and the
    autoparallel verdicts agree with the family verdicts); a non-empty list
    signals a tolerance problem, not a mathematical one.
    """

    alpha_grid: tuple
    family: dict
    autoparallel: Optional[dict]
    conditions: dict
    certificate: Optional[Certificate]
    failure: Optional[CertificationError]
    faults: tuple

    @property
    def consistent(self) -> bool:
        return not self.faults

    @property
    def passing_alphas(self):
        return tuple(a for a in self.alpha_grid if self.family[a].is_family)


def run_theorem_battery(
    M: SampledModel,
    alpha_grid=DEFAULT_GRID,
    taus=DEFAULT_TAUS,
    tol=TOL_MEMBER,
    tol_rank=TOL_RANK,
    autoparallel_tol=AUTOPARALLEL_TOL,
    geometry=None,
    seed=0,
) -> TheoremReport:
    """Evaluate every condition independently and report their agreement.

    ``geometry`` defaults to "on when ``M`` has a parametrization".
    """
    grid = tuple(float(a) for a in alpha_grid)
    if -1.0 not in grid or 1.0 not in grid or len(set(grid)) < 3:
        raise InvalidArgument("alpha grid must contain -1, 1 and at least one other value")
    family = {a: is_alpha_family(a, M, taus, tol, tol_rank) for a in grid}

    geometry = M.parametrization is not None if geometry is None else geometry
    auto = None
    if geometry:
        jet = model_jet(M)
        auto = {a: is_alpha_autoparallel(M, a, autoparallel_tol, jet) for a in grid}

    cert, failure = None, None
    try:
        cert = certify_simplex_equivalence(M, taus=taus, tol=tol, tol_rank=tol_rank, seed=seed)
    except CertificationError as exc:
        failure = exc
    except SimplexCertError as exc:
        failure = CertificationError("partition-extraction-failed", str(exc))

    passing = [a for a in grid if family[a].is_family]
    conditions = {
        "i": cert is not None,
        "ii": family[-1.0].is_family and family[1.0].is_family,
        "iii": len(passing) >= 2,
        "iv": len(passing) == len(grid),
    }
    faults = []
    if len(set(conditions.values())) > 1:
        faults.append(
            "conditions disagree: " + ", ".join(f"({k})={v}" for k, v in conditions.items())
        )
    if auto is not None:
        for a in grid:
            if auto[a].verdict != family[a].is_family:
                faults.append(
                    f"alpha={a:g}: autoparallel={auto[a].verdict} "
                    f"(normal {auto[a].max_normal_component:.3g}) but family={family[a].is_family}"
                )
    return TheoremReport(grid, family, auto, conditions, cert, failure, tuple(faults))
