"""Exception types shared across the package."""


class PovError(Exception):
    """Base class for every error raised by this package."""


class MalformedSystemError(PovError):
    """System description violates a structural invariant."""


class UnsupportedSystemError(PovError):
    """System is valid but cannot be simulated (e.g. an algebraic loop)."""


class ConfigurationError(PovError):
    """Inconsistent run configuration (sources, SNR, options)."""


class CannotSetSnrError(ConfigurationError):
    """A target SNR cannot be realised for a zero-variance variable."""


class DataTooShortError(PovError):
    """Not enough samples for the requested lag stacking."""


class NotIdentifiableError(PovError):
    """Noise variances are not identifiable for the requested constraint count."""


class ConstraintCountSelectionError(PovError):
    """No candidate constraint count produced an acceptable unity spectrum."""


class InconsistentCountsError(PovError):
    """Unity counts at the chosen lags do not yield a consistent equation count."""


class NoFreeVariablesError(PovError):
    """Estimated structure leaves no free variables (n_S <= 0)."""


class StructuralMismatchError(PovError):
    """Constraint basis size disagrees with the estimated structure."""


class TooManyCombinationsError(PovError):
    """Partition enumeration would exceed the combination cap."""


class NoAdmissiblePartitionError(PovError):
    """No candidate dependent set passed the condition-number threshold.

    Carries the smallest condition number observed (``min_cond``) to guide
    threshold tuning, and the full list of scored partitions.
    """

    def __init__(self, message, min_cond=None, partitions=None):
        super().__init__(message)
        self.min_cond = min_cond
        self.partitions = partitions


class ParseError(PovError):
    """Malformed data or configuration file."""


class SchemaVersionError(PovError):
    """Serialized artifact carries an unsupported schema version."""
