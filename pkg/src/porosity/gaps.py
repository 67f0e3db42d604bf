"""Complement-gap extraction and the one-sided porosity estimate at 0.

All suprema/limsups are evaluated on the finite candidate grid of enumerated
points; the unexplored tail below the deepest point is never counted as a
gap (results carry `partial` flags instead of extrapolating).
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import NoAdmissibleGaps, WindowNotCovered, ZeroIsolated
from .rational import DEFAULT_EPSILON, DEFAULT_TOL, Q, deep_start
from .sets import NO, PorousSet, require_points


@dataclass(frozen=True)
class Gap:
    """Maximal open interval (left, right) missing the set."""

    left: Q
    right: Q

    def __post_init__(self):
        if self.left < 0 or self.right <= self.left:
            raise ValueError(f"invalid gap ({self.left}, {self.right})")

    @property
    def length(self) -> Q:
        return self.right - self.left

    @property
    def relative_length(self) -> Q:
        return (self.right - self.left) / self.right


@dataclass(frozen=True)
class GapChain:
    """Decreasing run of gaps whose relative length clears 1 - epsilon."""

    gaps: tuple[Gap, ...]
    epsilon: Q
    depth: int

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        threshold = 1 - self.epsilon
        for i, gap in enumerate(self.gaps):
            if gap.relative_length < threshold:
                raise ValueError(
                    f"gap {i} has relative length {gap.relative_length} < {threshold}"
                )
            if i and gap.right > self.gaps[i - 1].left:
                raise ValueError(f"gaps {i - 1}, {i} are not decreasing")

    @property
    def lefts(self) -> tuple[Q, ...]:
        return tuple(g.left for g in self.gaps)

    @property
    def rights(self) -> tuple[Q, ...]:
        return tuple(g.right for g in self.gaps)

    def __len__(self) -> int:
        return len(self.gaps)


@dataclass(frozen=True)
class GapMeasure:
    """Largest-empty-subinterval length with its certification status."""

    value: Q
    partial: bool  # True when the unexplored tail could hide a longer gap
    witness: Gap | None


@dataclass(frozen=True)
class PorosityEstimate:
    estimate: Q
    converged: bool
    partial: bool
    witness_h: Q


def gaps(E: PorousSet, depth: int) -> list[Gap]:
    """Components of the complement between consecutive enumerated points.

    Exactly depth - 1 gaps, ordered decreasing.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    points = require_points(E, depth)
    return [Gap(lo, hi) for hi, lo in zip(points, points[1:])]


def largest_gap_length(E: PorousSet, h: Q, depth: int) -> GapMeasure:
    """Length of the largest open subinterval of (0, h) missing E.

    Exact above the deepest enumerated point; the tail (0, x_depth) counts
    only when the set is finite and fully enumerated. Ties choose the gap
    with the largest left endpoint.
    """
    if h <= 0:
        raise ValueError("h must be > 0")
    points, complete = E.take(depth)
    if not complete and (not points or h <= points[-1]):
        raise WindowNotCovered(
            f"window (0, {h}) reaches below the deepest enumerated point"
        )
    inside = [p for p in points if p < h]

    candidates: list[Gap] = []
    if inside:
        candidates.append(Gap(inside[0], h))
        candidates.extend(Gap(lo, hi) for hi, lo in zip(inside, inside[1:]))
        if complete:
            candidates.append(Gap(Q(0), inside[-1]))
    else:
        # every point sits at or above h
        if complete:
            candidates.append(Gap(Q(0), h))
        else:
            raise WindowNotCovered(f"no certified coverage inside (0, {h})")

    best = max(candidates, key=lambda g: (g.length, g.left))
    floor = points[-1] if points else Q(0)
    partial = (not complete) and inside and best.length < inside[-1]
    # any gap hidden below the deepest point inside the window is shorter
    # than that point itself, so a longer certified gap closes the question
    return GapMeasure(value=best.length, partial=bool(partial), witness=best)


def porosity_plus(
    E: PorousSet, depth: int, tol: Q = DEFAULT_TOL
) -> PorosityEstimate:
    """Estimate of limsup_{h->0+} lambda(E,0,h)/h on the deep candidate grid.

    Candidate h values are the enumerated points in the deep half of the
    window (gap endpoints are themselves points, so the grid covers the
    extrema of the step function h -> lambda/h). `converged` certifies
    depth-halving agreement within `tol`, never assumed.
    """
    if E.zero_isolated != NO:
        raise ZeroIsolated("porosity at 0 is degenerate when 0 is isolated")
    estimate, partial, witness = _porosity_estimate(E, depth)
    if depth >= 4:
        half_estimate, _, _ = _porosity_estimate(E, depth // 2)
        converged = abs(estimate - half_estimate) < tol
    else:
        converged = False
    return PorosityEstimate(
        estimate=estimate, converged=converged, partial=partial, witness_h=witness
    )


def _porosity_estimate(E: PorousSet, depth: int) -> tuple[Q, bool, Q]:
    if depth < 2:
        raise ValueError("depth must be >= 2")
    points = require_points(E, depth)
    best: Q | None = None
    best_h: Q | None = None
    best_partial = False
    for j in range(deep_start(depth), depth - 1):
        h = points[j]
        measure = largest_gap_length(E, h, depth)
        ratio = measure.value / h
        # prefer the deepest candidate among equal ratios: closest to the limit
        if best is None or ratio > best or (ratio == best and h < best_h):
            best, best_h, best_partial = ratio, h, measure.partial
    return best, best_partial, best_h


def admissible_gaps(E: PorousSet, depth: int, epsilon: Q = DEFAULT_EPSILON) -> list[Gap]:
    """All window gaps with relative length >= 1 - epsilon, decreasing."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    threshold = 1 - epsilon
    return [g for g in gaps(E, depth) if g.relative_length >= threshold]


def admissible_chains(
    E: PorousSet, depth: int, epsilon: Q = DEFAULT_EPSILON
) -> list[GapChain]:
    """Maximal decreasing chains of admissible gaps.

    Complement components are pairwise disjoint, so all admissible gaps
    form one chain that every other admissible chain embeds into; the
    list therefore carries that single universal candidate.
    """
    selected = admissible_gaps(E, depth, epsilon)
    if not selected:
        raise NoAdmissibleGaps(
            f"no gap reaches relative length {1 - epsilon} at depth {depth}"
        )
    return [GapChain(gaps=tuple(selected), epsilon=epsilon, depth=depth)]


def chain_embeds(sub: GapChain, whole: GapChain) -> bool:
    """Left-endpoint embedding test: every left of `sub` appears in `whole`."""
    lefts = set(whole.lefts)
    return all(left in lefts for left in sub.lefts)
