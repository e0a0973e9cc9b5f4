class DTRError(Exception):
    """Base class for all errors raised by the dtr package."""


class ConfigError(DTRError, ValueError):
    pass


class DegenerateTriangleError(DTRError, ValueError):
    pass


class DegeneratePathError(DTRError, ValueError):
    pass


class EmptyPathError(DTRError, ValueError):
    pass


class NoGapError(DTRError, ValueError):
    pass


class TrackFormatError(DTRError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
