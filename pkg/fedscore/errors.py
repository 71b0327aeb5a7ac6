class FedScoreError(Exception):
    """Base class of every error raised by fedscore."""


class UnknownLabel(FedScoreError, KeyError):
    def __init__(self, label: str, where: str = ""):
        self.label = label
        self.where = where
        suffix = f" in {where}" if where else ""
        super().__init__(f"Unknown label {label!r}{suffix}")

    def __str__(self) -> str:
        # KeyError quotes its argument; keep the plain message
        return self.args[0]


class EmptyCandidates(FedScoreError, ValueError):
    pass


class ParseError(FedScoreError, ValueError):
    def __init__(self, path: str, line: int, reason: str):
        self.path = path
        self.line = line
        self.reason = reason
        super().__init__(f"{path}:{line}: {reason}")


class InvalidSpec(FedScoreError, ValueError):
    pass


class PoolExhausted(FedScoreError):
    pass


class InvalidArch(FedScoreError, ValueError):
    pass


class LabelOutsideCols(FedScoreError, ValueError):
    pass


class ShapeMismatch(FedScoreError, ValueError):
    pass


class EmptyShard(FedScoreError, ValueError):
    pass


class UnclaimedLabel(FedScoreError):
    pass


class NoParticipants(FedScoreError):
    pass


class NoEligibleExamples(FedScoreError, ValueError):
    pass


class ConfigInvalid(FedScoreError, ValueError):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        where = path if path else "<root>"
        super().__init__(f"{where}: {reason}")


class PayloadError(FedScoreError, ValueError):
    pass
