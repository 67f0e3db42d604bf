"""Exception types raised by the core analyses."""
from __future__ import annotations


class PorosityError(Exception):
    """Base class for all domain errors."""


class InvalidSpec(PorosityError):
    """Set description parameters are out of range or inconsistent."""


class BitBudgetExceeded(PorosityError):
    """A rational outgrew the configured bit budget."""


class DepthExceedsFiniteSet(PorosityError):
    """An operation needed more points than the finite set contains."""


class WindowNotCovered(PorosityError):
    """The requested window reaches below the enumerated points."""


class ZeroIsolated(PorosityError):
    """The quantity is undefined/degenerate because 0 is isolated."""


class NoAdmissibleGaps(PorosityError):
    """No complement gap meets the relative-length threshold."""


class LengthMismatch(PorosityError):
    """Two sequences that must share a frame have different lengths."""


class TauNotInSet(PorosityError):
    """A sequence asserted to take values in E failed the membership scan."""


class ChainTooShort(PorosityError):
    """The gap chain is too short for a deep-half estimate."""


class RatioNotVanishing(PorosityError):
    """The rule does not certify consecutive ratios tending to 0."""


class FactorTooLarge(PorosityError):
    """Scaling factor causes point collisions / ordering violations."""


class InvalidTauRule(PorosityError):
    """The tau rule violates the required decay inequality."""


class InvalidPartition(PorosityError):
    """The index partition rule violates its hypotheses."""


class EmptyFamily(PorosityError):
    """A family operation received no spaces."""


class NoStableSubsequenceAtDepth(PorosityError):
    """Subsequence extraction exhausted its index budget."""
