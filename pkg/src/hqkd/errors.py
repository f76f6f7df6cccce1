"""Exception hierarchy shared by the simulator, channels and protocols."""


class InvalidArgument(ValueError):
    pass


class ProtocolViolation(RuntimeError):
    """A party broke the channel or protocol rules (e.g. re-sending a qubit)."""


class NoCloneViolation(ProtocolViolation):
    """Someone tried to read or copy a qubit they do not hold."""


class SingularityError(ArithmeticError):
    """The random-number formula's denominator vanished for this estimate."""


class PersistentSingularityError(SingularityError):
    pass


class EavesdroppingDetected(RuntimeError):
    """The embedded-C check failed on receipt of the peer's masked message.

    ``mismatches`` counts the bit positions where the recovered middle
    segment differs from the receiver's local C. ``transcript`` carries the
    partial session record up to the abort.
    """

    def __init__(self, party: str, mismatches: int, width: int, transcript=None):
        self.party = party
        self.mismatches = mismatches
        self.width = width
        self.transcript = transcript
        super().__init__(
            f"{party}: embedded C mismatch in {mismatches}/{width} bits"
        )


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(message)
