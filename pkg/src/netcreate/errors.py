class NetCreateError(Exception):
    """Base class for errors raised by this package."""


class SchemaError(NetCreateError, ValueError):
    """Malformed input: bad profile JSON, invalid ids, unparsable rationals."""


class PreconditionError(NetCreateError, ValueError):
    """An operation was called outside its domain."""


class LimitExceeded(NetCreateError):
    """An exhaustive search was refused because the instance is too large."""

    def __init__(self, what: str, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(f"{what} refused: n={n} exceeds limit {limit}")


class SearchExhausted(NetCreateError):
    """A randomized search ran out of trials."""

    def __init__(self, trials: int):
        self.trials = trials
        super().__init__(f"no successful sample within max_trials={trials}")
