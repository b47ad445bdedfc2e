class PerceptronError(Exception):
    """Base class; ``name`` is the machine-readable error tag printed by the CLI."""

    @property
    def name(self) -> str:
        return type(self).__name__


class DimensionMismatch(PerceptronError, ValueError):
    pass


class InvalidConfig(PerceptronError, ValueError):
    pass


class InfeasibleSchedule(PerceptronError):
    pass


class InvalidMargins(PerceptronError, ValueError):
    pass


class RoundsExhausted(PerceptronError):
    pass


class OutOfRange(PerceptronError, ValueError):
    pass


class InvalidInput(PerceptronError, ValueError):
    pass


class TooLarge(PerceptronError):
    pass


class EmptyInput(PerceptronError, ValueError):
    pass
