"""Exception hierarchy shared by all modules."""


class SimplexCertError(Exception):
    """Base class for every error raised by simplexcert."""


class InvalidArgument(SimplexCertError, ValueError):
    """Malformed input: wrong alphabet, bad shape, violated type invariant."""


class DomainError(SimplexCertError, ValueError):
    """A value lies outside the domain of a map (log of zero, theta outside Theta, ...)."""


class NotCongruentError(SimplexCertError):
    """Generator distributions with overlapping supports."""


class IllConditionedError(SimplexCertError):
    """Level-set values cluster below the separation threshold."""


class InconsistentSubalgebraError(SimplexCertError):
    """Atom count disagrees with the subspace dimension (a tolerance pathology)."""


class DegenerateParametrizationError(SimplexCertError):
    """Tangent vectors of a parametrized model do not have full rank."""


class CertificationError(SimplexCertError):
    """A stage of the certification pipeline failed.

    ``stage`` is one of ``not-m-family``, ``not-e-family``, ``not-subalgebra``,
    ``partition-extraction-failed`` or ``roundtrip-failed``. ``witness`` carries
    the offending function pair for ``not-subalgebra``.
    """

    STAGES = (
        "not-m-family",
        "not-e-family",
        "not-subalgebra",
        "partition-extraction-failed",
        "roundtrip-failed",
    )

    def __init__(self, stage, message, witness=None, residual=None):
        if stage not in self.STAGES:
            raise ValueError(f"unknown pipeline stage {stage!r}")
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.witness = witness
        self.residual = residual
