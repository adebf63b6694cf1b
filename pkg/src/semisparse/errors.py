"""Exception hierarchy shared by all modules."""


class SemiSparseError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(SemiSparseError, ValueError):
    """Array shapes or lengths do not agree."""


class ParameterError(SemiSparseError, ValueError):
    """A numeric parameter is outside its admissible range."""


class ConfigurationError(ParameterError):
    """An option combination is not supported (e.g. difference order 4)."""


class SingularityError(SemiSparseError, ArithmeticError):
    """A linear system would be singular."""


class DegenerateInputError(SemiSparseError, ValueError):
    """Input carries no information for the requested measurement."""


class ImageFormatError(SemiSparseError, ValueError):
    """Unsupported image format or bit depth."""


class TuningError(SemiSparseError):
    """Parameter search failed to reach its target.

    ``best`` holds the configuration that came closest and ``best_str`` its
    structure-to-texture ratio.
    """

    def __init__(self, message, best=None, best_str=None):
        super().__init__(message)
        self.best = best
        self.best_str = best_str


class ImageDecodeError(ImageFormatError):
    """The file claims a supported format but its data cannot be decoded."""
