"""Exception taxonomy shared across the pipeline."""


class ClimatextError(Exception):
    """Base class for all pipeline errors."""


# --- document ingestion ---

class UnreadableFile(ClimatextError):
    """File is missing or cannot be opened."""


class UnsupportedFormat(ClimatextError):
    """Extension/content is not one of the supported document formats."""


class EmptyDocument(ClimatextError):
    """Document yielded zero extractable characters."""


# --- classifier backends ---

class BackendUnavailable(ClimatextError):
    """The requested classifier backend cannot be constructed."""


class ModelLoadFailure(ClimatextError):
    """A model file exists but could not be loaded/parsed."""


class FixtureMiss(ClimatextError):
    """A paragraph is absent from the fixture playback file."""


# --- aggregation ---

class EmptyReport(ClimatextError):
    """A firm has no classified paragraphs to aggregate."""


# --- firm data ---

class SchemaMismatch(ClimatextError):
    """CSV header does not match the documented schema."""


class DuplicateFirmId(ClimatextError):
    """The same firm_id appears more than once."""


# --- stats ---

class ZeroVariance(ClimatextError):
    """A correlation input vector is constant; rho undefined."""


# --- clustering ---

class DegenerateDistribution(ClimatextError):
    """Too few distinct values to form the requested quantile bins."""


# --- pipeline ---

class MissingUpstream(ClimatextError):
    """A stage was invoked before its upstream artifacts exist."""

    def __init__(self, artifact: str):
        super().__init__(f"missing upstream artifact: {artifact}")
        self.artifact = artifact


class StageFailure(ClimatextError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


class MissingAnalysis(ClimatextError):
    """A figure was requested for an analysis absent from the bundle."""


class ConfigError(ClimatextError):
    """Pipeline configuration is invalid."""
