"""Exception hierarchy shared across the package."""


class TspAnytimeError(Exception):
    pass


class InvalidInputError(TspAnytimeError, ValueError):
    pass


class InvalidTourError(InvalidInputError):
    pass


class InvalidConfigError(InvalidInputError):
    pass


class GenerationFailure(TspAnytimeError):
    pass


class SizeLimitError(InvalidInputError):
    pass


class MonotonicityViolation(TspAnytimeError):
    """Raised when a recorder receives an event that does not improve the incumbent."""


class MissingReferenceError(TspAnytimeError, KeyError):
    def __init__(self, instance_ids):
        self.instance_ids = sorted(instance_ids) if not isinstance(instance_ids, str) else [instance_ids]
        super().__init__(f"no reference length for: {', '.join(self.instance_ids)}")

    def __str__(self):
        return self.args[0]


class OutOfRangeError(InvalidInputError):
    pass
