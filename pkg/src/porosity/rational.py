"""Exact rational scalars, shared tolerances, and window conventions.

Every quantity in the core is a `fractions.Fraction` (aliased `Q`); floats
appear only in the display/plotting layer. Comparisons, suprema and the
certified estimates below therefore never round.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import BitBudgetExceeded

Q = Fraction

DEFAULT_DEPTH = 32
DEFAULT_EPSILON = Q(1, 4)
DEFAULT_TOL = Q(1, 2 ** 16)
DEFAULT_BIT_BUDGET = 2 ** 20


def parse_rational(text: str | int | Q) -> Q:
    """Parse "p/q" / integer strings into an exact rational.

    Floats are rejected: binary artifacts must not leak into the core.
    """
    if isinstance(text, Q):
        return text
    if isinstance(text, bool):
        raise TypeError("bool is not a rational")
    if isinstance(text, int):
        return Q(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted; pass a 'p/q' string")
    return Q(str(text).strip())


def format_rational(q: Q) -> str:
    """Canonical "p/q" encoding ("p" when the denominator is 1)."""
    return str(q)


def bit_size(q: Q) -> int:
    return max(q.numerator.bit_length(), q.denominator.bit_length())


def check_budget(q: Q, budget: int) -> Q:
    """Hard cap on numerator/denominator width; exceeding it is an error,
    never a silent truncation."""
    if bit_size(q) > budget:
        raise BitBudgetExceeded(
            f"rational needs {bit_size(q)} bits, budget is {budget}"
        )
    return q


def deep_start(length: int) -> int:
    """0-based start of the deep half of a window of `length` entries.

    Asymptotic quantities (limsups, eventual properties) are estimated on
    indices >= deep_start; the shallow prefix only pollutes them.
    """
    if length <= 0:
        return 0
    return (length - 1) // 2


def deep_slice(values):
    """The deep-half tail of a sequence, as a list."""
    values = list(values)
    return values[deep_start(len(values)):]
