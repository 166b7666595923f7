"""Exception hierarchy shared across the toolkit."""


class StanceError(Exception):
    """Base class for domain errors (bad data, missing seeds, ...)."""


class MalformedInputError(StanceError):
    pass


class EmptyInputError(StanceError):
    pass


class FilterError(StanceError):
    pass


class MissingSeedError(StanceError):
    def __init__(self, seed):
        super().__init__(f"seed hashtag not present in corpus: {seed!r}")
        self.seed = seed


class UnsupportedInputError(StanceError):
    pass
