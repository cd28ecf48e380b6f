"""Exception and warning types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid configuration: bad grid parameters, unsupported exponents, etc."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class BlockError(ValueError):
    """A dyadic block index is not resolvable on the given grid."""


class OracleGuardError(ValueError):
    """A slow reference implementation refused an input it is not sized for."""


class PreconditionError(ValueError):
    """A mathematical precondition of an operation is violated."""


class ManifestError(ConfigurationError):
    """A run manifest failed to parse or validate."""


class BoundaryDecayWarning(UserWarning):
    """A field does not decay at the domain boundary to the guarded tolerance.

    Whole-line kernel identities are only approximated by the periodic
    truncation when fields vanish near the boundary; results are still
    produced but carry this warning.
    """


class FlowDegeneracyWarning(UserWarning):
    """Characteristic particles lost strict ordering (flow map degenerating)."""
