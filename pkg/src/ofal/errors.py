"""Exception and warning types shared across the package."""


class OfalError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedFormat(OfalError):
    """File magic does not identify a known IDX payload."""


class CorruptFile(OfalError):
    """IDX payload is shorter than its declared dimensions."""


class InsufficientClassSamples(OfalError):
    """A class has fewer samples than the split requests."""


class IncompatibleCheckpoint(OfalError):
    """Checkpoint was written by an unsupported format version."""


class CorruptCheckpoint(OfalError):
    """Checkpoint file is truncated, damaged, or not a checkpoint."""


class EmptyTrainingSet(OfalError):
    """fit() was called with no samples."""


class EmptyTestSet(OfalError):
    """Evaluation was requested on an empty set."""


class ShapeError(OfalError):
    """Input array has the wrong shape or dimension."""


class InvalidDropoutRate(OfalError):
    """Dropout rate outside (0, 1) where a stochastic pass needs one."""


class InvalidConfig(OfalError):
    """Configuration value outside its legal range."""


class NumericalFailure(OfalError):
    """Non-finite value encountered during optimization."""


class InsufficientPool(OfalError):
    """Selection asked for more samples than the pool holds."""


class UnknownSample(OfalError):
    """An id was passed that is not a member of the pool."""


class RequiresTwoDimLatent(OfalError):
    """Latent-grid export needs a 2-dimensional latent space."""


class ClassExhaustedWarning(UserWarning):
    """A class ran out of candidates before reaching its quota.

    Carries ``label`` and ``achieved_count`` so callers can log how short
    the batch came up.
    """

    def __init__(self, label: int, achieved_count: int, message: str | None = None):
        self.label = label
        self.achieved_count = achieved_count
        super().__init__(
            message
            or f"class {label} exhausted with {achieved_count} accepted samples"
        )
