"""Decide whether a finite-alphabet statistical model is statistically
equivalent to an open probability simplex, and certify it when it is."""

__version__ = "0.1.0"

from .alpha import (
    AlphaSpec,
    ExponentialSpec,
    MixtureSpec,
    SampledModel,
    denormalize,
    eval_alpha,
    eval_exponential,
    eval_mixture,
    is_alpha_family,
    l_alpha,
    l_alpha_map,
)
from .core import (
    AffineSubspace,
    Alphabet,
    Channel,
    Dist,
    Partition,
    PositiveFunction,
    apply_channel,
    channel_from_embedding,
    channel_from_partition,
    compose_channels,
    fit_affine_hull,
    point_mass,
    subspace_contains,
)
from .equivalence import (
    Certificate,
    TheoremReport,
    alpha_family_from_partition,
    certify_simplex_equivalence,
    run_theorem_battery,
    simplex_model,
    v_e_from_model,
)
from .errors import CertificationError, DomainError, InvalidArgument, SimplexCertError
from .geometry import (
    ChartPoint,
    christoffel,
    combination_identity_check,
    fisher_metric,
    is_alpha_autoparallel,
)
from .subalgebra import (
    FunctionSubspace,
    atoms_oracle,
    indicator_via_lagrange,
    is_unital_subalgebra,
    partition_from_subalgebra,
)

__all__ = [
    "__version__",
    "AlphaSpec",
    "ExponentialSpec",
    "MixtureSpec",
    "SampledModel",
    "denormalize",
    "eval_alpha",
    "eval_exponential",
    "eval_mixture",
    "is_alpha_family",
    "l_alpha",
    "l_alpha_map",
    "AffineSubspace",
    "Alphabet",
    "Channel",
    "Dist",
    "Partition",
    "PositiveFunction",
    "apply_channel",
    "channel_from_embedding",
    "channel_from_partition",
    "compose_channels",
    "fit_affine_hull",
    "point_mass",
    "subspace_contains",
    "Certificate",
    "TheoremReport",
    "alpha_family_from_partition",
    "certify_simplex_equivalence",
    "run_theorem_battery",
    "simplex_model",
    "v_e_from_model",
    "CertificationError",
    "DomainError",
    "InvalidArgument",
    "SimplexCertError",
    "ChartPoint",
    "christoffel",
    "combination_identity_check",
    "fisher_metric",
    "is_alpha_autoparallel",
    "FunctionSubspace",
    "atoms_oracle",
    "indicator_via_lagrange",
    "is_unital_subalgebra",
    "partition_from_subalgebra",
]
