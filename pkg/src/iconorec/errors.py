"""Exception types shared across the package."""


class IconorecError(Exception):
    """Base class for every error raised by this package."""


class MalformedNotation(IconorecError):
    """A string does not follow the Iconclass notation grammar."""


class FormatError(IconorecError):
    """An input record or file does not match its declared format."""


class EmptyLabelSet(IconorecError):
    """A matching operation received no labels to work with."""


class RuleFormatError(IconorecError):
    """A rule file is structurally invalid."""


class UnknownCode(IconorecError):
    """A code was looked up in an IDF table that does not contain it."""


class DuplicateImageId(IconorecError):
    """Two corpus documents share the same image id."""


class EmptyQuery(IconorecError):
    """A recommendation query contained no codes."""


class ExternalCommandFailure(IconorecError):
    """An external selector command failed or produced invalid output."""


class DetectorFailure(IconorecError):
    """The configured detector command failed or produced invalid output."""


class PipelineStageFailure(IconorecError):
    """An error raised inside a pipeline stage, tagged with the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause
