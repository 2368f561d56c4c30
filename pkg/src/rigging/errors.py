"""Exception types shared across the rigging package."""

from __future__ import annotations

from enum import Enum


class RiggingError(Exception):
    """Base class for every error raised by this package."""


class EncodingError(RiggingError, ValueError):
    """A value cannot be encoded or decoded in canonical form."""


class UnknownReference(RiggingError, LookupError):
    """A hash reference could not be resolved with the data at hand.

    This is the third outcome of relational queries: it is distinct from
    ``False`` so that verifiers can ask for more data instead of concluding.
    """

    def __init__(self, ref, message: str | None = None):
        self.ref = ref
        super().__init__(message or f"unknown reference {ref}")


class NoFastPredecessor(RiggingError, ValueError):
    pass


class LengthUndefined(RiggingError, ValueError):
    pass


class NotAligned(RiggingError, ValueError):
    pass


class TrieError(RiggingError, ValueError):
    pass


class Reason(str, Enum):
    """Stable rule names reported by assembly and verification failures."""

    MALFORMED = "Malformed"
    UNKNOWN_REFERENCE = "UnknownReference"
    NOT_CONSECUTIVE = "NotConsecutive"
    TOPLINE_TOO_SHORT = "ToplineTooShort"
    FOOTLINE_TOO_SHORT = "FootlineTooShort"
    LEAD_NOT_FAST = "LeadNotFast"
    MEET_NOT_FAST = "MeetNotFast"
    LEAD_NOT_FAST_PREVIOUS = "LeadNotFastPrevious"
    FASTENER_MISMATCH = "FastenerMismatch"
    SELF_TETHERED = "SelfTethered"
    HOIST_INCLUSION_FAILED = "HoistInclusionFailed"
    INCOMPLETE_FIRSTNESS = "IncompleteFirstness"
    NOT_FIRST_SUCCESSOR = "NotFirstSuccessor"
    INVALID_EXCLUSION = "InvalidExclusion"
    MEET_NOT_FAST_PREVIOUS = "MeetNotFastPrevious"
    POST_INCLUSION_FAILED = "PostInclusionFailed"
    POST_BINDING_MISMATCH = "PostBindingMismatch"
    CORK_FILL = "CorkFill"
    NOT_SPLICEABLE = "NotSpliceable"
    CORKLINES_MISALIGNED = "CorklinesMisaligned"
    UNUSED_BRIDGE = "UnusedBridge"
    NOT_LASHABLE = "NotLashable"
    CORKLINE_REUSE = "CorklineReuse"
    TETHER_PRECEDENCE = "TetherPrecedence"
    BROKEN_CHAIN = "BrokenChain"


class Rejected(RiggingError):
    """A certificate failed a verification rule.

    ``reason`` is the first failing rule; ``where`` names the derivation node
    (``"root"``, ``"root.left"``, ``"root.upper.bottom"`` ...).
    """

    def __init__(self, reason: Reason, detail: str = "", where: str = "root"):
        self.reason = Reason(reason)
        self.detail = detail
        self.where = where
        msg = f"{self.reason.value} at {where}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)

    def at(self, prefix: str) -> "Rejected":
        where = prefix if self.where == "root" else prefix + self.where[len("root"):]
        return Rejected(self.reason, self.detail, where)


class ConstructionError(Rejected):
    """Raised by builders when the requested structure's relations do not hold."""


class EquivocationDetected(RiggingError):
    """Two accepted certificates assert different successors of one twist."""

    def __init__(self, twist, first, second):
        self.twist = twist
        self.first = first
        self.second = second
        super().__init__(
            f"equivocation at {twist}: successors {first[0]} and {second[0]}"
        )
