"""Exception types. Each carries a stable ``code`` used in CLI diagnostics."""


class SeqCanaryError(ValueError):
    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(f"{self.code}: {message}" if message else self.code)


class EmptySample(SeqCanaryError):
    code = "EMPTY_SAMPLE"


class InvalidProbability(SeqCanaryError):
    code = "INVALID_PROBABILITY"


class BelowNStar(SeqCanaryError):
    code = "BELOW_NSTAR"


class InsufficientEvents(SeqCanaryError):
    code = "INSUFFICIENT_EVENTS"


class NonincreasingTimestamps(SeqCanaryError):
    code = "NONINCREASING_TIMESTAMPS"


class UpdateAfterDecision(SeqCanaryError):
    code = "UPDATE_AFTER_DECISION"


class MalformedEvent(SeqCanaryError):
    code = "MALFORMED_EVENT"


class MissingValue(MalformedEvent):
    code = "MISSING_VALUE"


class OutOfOrderTimestamp(SeqCanaryError):
    code = "OUT_OF_ORDER_TIMESTAMP"


class VersionMismatch(SeqCanaryError):
    code = "VERSION_MISMATCH"


class CorruptSnapshot(SeqCanaryError):
    code = "CORRUPT_SNAPSHOT"


class ConfigError(SeqCanaryError):
    code = "INVALID_CONFIG"


# Non-fatal diagnostics, attached to states and snapshots as plain strings.
STARVED_ARM = "STARVED_ARM"
IGNORED_POST_DECISION = "IGNORED_POST_DECISION"
TIE_PERTURBED = "TIE_PERTURBED"
EMPTY_INTERSECTION = "EMPTY_INTERSECTION"
