"""Quantitative porosity machinery and the certificate-producing classifier.

The central objects are decreasing sequences of set points (`TruncatedSequence`)
and chains of admissible complement gaps. The classifier combines negative
evidence (recurring points inside scaled test intervals) with positive
evidence (a universal gap chain with a converged separation ratio) and
downgrades to `indeterminate` whenever an estimate has not converged.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    ChainTooShort,
    LengthMismatch,
    NoAdmissibleGaps,
    TauNotInSet,
    ZeroIsolated,
)
from .gaps import Gap, GapChain, admissible_gaps
from .rational import DEFAULT_EPSILON, DEFAULT_TOL, Q, deep_slice, deep_start
from .sets import NO, YES, PorousSet, enumerate_points, require_points

FROM_ENUMERATION = "from-set-enumeration"
USER_SUPPLIED = "user-supplied"
CHAIN_ENDPOINTS = "derived-chain-endpoints"

DEFAULT_K_SCHEDULE = tuple(Q(2) ** e for e in range(1, 11))
DEFAULT_K_DOUBLINGS = 10


@dataclass(frozen=True)
class TruncatedSequence:
    """Finite prefix of a positive point sequence.

    `last_violation` is the largest 0-based index where the next value
    increases (None when the prefix is non-increasing); almost-decreasing
    inputs are accepted with the violation reported rather than rejected.
    """

    values: tuple[Q, ...]
    source: str = USER_SUPPLIED
    rule_label: str | None = None

    def __post_init__(self):
        if not self.values:
            raise ValueError("sequence must be non-empty")
        if any(v <= 0 for v in self.values):
            raise ValueError("sequence values must be strictly positive")
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def last_violation(self) -> int | None:
        bad = [i for i in range(len(self.values) - 1) if self.values[i + 1] > self.values[i]]
        return bad[-1] if bad else None

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RatioEquivalence:
    equivalent: str  # yes | no | indeterminate
    c1: Q | None
    c2: Q | None
    min_ratio: Q
    max_ratio: Q


def ratio_equivalent(a: TruncatedSequence, g: TruncatedSequence) -> RatioEquivalence:
    """Two-sided comparability test: is g_n/a_n pinned between constants?

    Bounds are read off the deep half and checked for stability against the
    half-length prefix; a range that drifts by more than a factor 4 across
    the halving is declared divergent.
    """
    if len(a) != len(g):
        raise LengthMismatch(f"lengths differ: {len(a)} vs {len(g)}")
    if len(a) < 8:
        raise ValueError("need at least 8 entries")
    ratios = [gv / av for av, gv in zip(a.values, g.values)]
    length = len(ratios)
    full = deep_slice(ratios)
    # disjoint windows so a monotone drift cannot hide in an overlap
    early = ratios[length // 4: length // 2]
    late = ratios[(3 * length) // 4:]
    lo_f, hi_f = min(full), max(full)

    drifting_down = max(late) < min(early) / 4
    drifting_up = min(late) > 4 * max(early)
    if drifting_down or drifting_up:
        return RatioEquivalence("no", None, None, lo_f, hi_f)
    stable = lo_f >= min(early) / 2 and hi_f <= 2 * max(early) and hi_f <= 4 * lo_f
    if stable:
        return RatioEquivalence("yes", lo_f * Q(2, 3), hi_f * Q(4, 3), lo_f, hi_f)
    return RatioEquivalence("indeterminate", None, None, lo_f, hi_f)


# ---------------------------------------------------------------------------
# scaled-interval clearance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClearanceViolation:
    index: int  # 0-based position in the tau frame
    point: Q  # the set member found inside (k tau_n, K tau_n)


@dataclass(frozen=True)
class ClearanceResult:
    holds_eventually: str  # yes | no | indeterminate
    first_good_index: int | None
    violations: tuple[ClearanceViolation, ...]
    deep_violations: tuple[ClearanceViolation, ...]
    certified_escape: bool


def _membership_checked(E: PorousSet, tau: TruncatedSequence, depth: int) -> bool:
    """Verify user-supplied tau values against the enumerated prefix.

    Values below the deepest enumerated point cannot be checked; they leave
    the sequence unverified (but not rejected).
    """
    if tau.source in (FROM_ENUMERATION, CHAIN_ENDPOINTS):
        return True
    points = enumerate_points(E, depth)
    members = set(points)
    floor = points[-1]
    all_checkable = True
    for value in tau.values:
        if value < floor:
            all_checkable = False
            continue
        if value not in members:
            raise TauNotInSet(f"tau value {value} is not a point of the set")
    return all_checkable


def clearance_test(
    E: PorousSet,
    tau: TruncatedSequence,
    k: Q,
    K: Q,
    depth: int,
) -> ClearanceResult:
    """Scan for set points inside (k tau_n, K tau_n).

    `holds_eventually` is 'yes' when the deep half is clean, or when the
    set certifies that every point-pair ratio recurring at infinitely many
    scales stays <= some bound B with k >= B (any observed violation then
    comes from a diverging ratio and is transient); 'no' when violations
    recur in the deep half with no such certificate.
    """
    k, K = Q(k), Q(K)
    if k <= 1:
        raise ValueError("k must be > 1")
    if K <= k:
        raise ValueError("K must exceed k")
    in_set = _membership_checked(E, tau, depth)
    points = enumerate_points(E, depth)
    asc = points[::-1]

    violations: list[ClearanceViolation] = []
    for i, t in enumerate(tau.values):
        lo, hi = k * t, K * t
        j = bisect_right(asc, lo)
        if j < len(asc) and asc[j] < hi:
            violations.append(ClearanceViolation(index=i, point=asc[j]))

    start = deep_start(len(tau))
    deep = tuple(v for v in violations if v.index >= start)
    bound = E.recurring_ratio_bound
    certified = bound is not None and k >= bound and in_set

    if not deep:
        first_good = violations[-1].index + 1 if violations else 0
        return ClearanceResult("yes", first_good, tuple(violations), deep, certified)
    if certified:
        return ClearanceResult("yes", None, tuple(violations), deep, True)
    if len(deep) >= 2:
        return ClearanceResult("no", None, tuple(violations), deep, False)
    return ClearanceResult("indeterminate", None, tuple(violations), deep, False)


# ---------------------------------------------------------------------------
# chain cover ratios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainCoverResult:
    """Minimal dominated-tail max of (chain left)/(tau) over chains.

    `value` None means infinite: no admissible chain dominates tau.
    """

    value: Q | None
    chain: GapChain | None
    aligned: tuple[tuple[int, Q, Q], ...]  # (position, tau value, chosen left)

    @property
    def infinite(self) -> bool:
        return self.value is None


def chain_cover_ratio(
    E: PorousSet,
    tau: TruncatedSequence,
    depth: int,
    epsilon: Q = DEFAULT_EPSILON,
) -> ChainCoverResult:
    """Cheapest admissible-chain domination of tau.

    Chains may revisit a gap (they are almost-decreasing sequences of
    components), so the optimum is the pointwise smallest admissible left
    endpoint >= tau_n, which is automatically non-increasing. Domination is
    only required eventually: the measured tail starts at the first deep
    position whose tau value the gap window can reach at all (tau decreases,
    so infeasibility is a prefix phenomenon) and must cover at least a
    quarter of the frame, else the ratio is infinite at this depth.
    """
    _membership_checked(E, tau, depth)
    selected = admissible_gaps(E, depth, epsilon)
    if not selected:
        return ChainCoverResult(value=None, chain=None, aligned=())
    by_left_asc = sorted(selected, key=lambda gap: gap.left)
    lefts_asc = [gap.left for gap in by_left_asc]
    max_left = lefts_asc[-1]

    length = len(tau)
    first = next(
        (i for i in range(deep_start(length), length) if tau.values[i] <= max_left),
        None,
    )
    if first is None or first > (3 * length) // 4:
        return ChainCoverResult(value=None, chain=None, aligned=())

    aligned: list[tuple[int, Q, Q]] = []
    used: dict[Q, Gap] = {}
    best: Q | None = None
    for i in range(first, length):
        t = tau.values[i]
        j = _first_at_least(lefts_asc, t)
        gap = by_left_asc[j]
        ratio = gap.left / t
        aligned.append((i, t, gap.left))
        used[gap.left] = gap
        if best is None or ratio > best:
            best = ratio
    chain_gaps = tuple(sorted(used.values(), key=lambda gap: gap.left, reverse=True))
    chain = GapChain(gaps=chain_gaps, epsilon=epsilon, depth=depth)
    return ChainCoverResult(value=best, chain=chain, aligned=tuple(aligned))


def _first_at_least(asc: list[Q], target: Q) -> int | None:
    lo, hi = 0, len(asc)
    while lo < hi:
        mid = (lo + hi) // 2
        if asc[mid] < target:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo < len(asc) else None


def tau_sample_family(
    E: PorousSet, depth: int, epsilon: Q = DEFAULT_EPSILON, suffixes: int = 6
) -> list[TruncatedSequence]:
    """Deterministic tau candidates: enumeration suffixes plus, when an
    admissible chain exists, its endpoint sequences and their 1-shifts."""
    points = require_points(E, depth)
    min_len = max(8, depth // 2)
    samples: list[TruncatedSequence] = []
    for offset in range(suffixes):
        if depth - offset < min_len:
            break
        samples.append(
            TruncatedSequence(
                values=tuple(points[offset:]),
                source=FROM_ENUMERATION,
                rule_label=f"enumeration-suffix-{offset}",
            )
        )
    selected = admissible_gaps(E, depth, epsilon)
    if len(selected) >= 8:
        lefts = tuple(g.left for g in selected)
        rights = tuple(g.right for g in selected)
        for label, seq in (("chain-lefts", lefts), ("chain-rights", rights)):
            for offset in (0, 1):
                if len(seq) - offset >= 8:
                    samples.append(
                        TruncatedSequence(
                            values=seq[offset:],
                            source=CHAIN_ENDPOINTS,
                            rule_label=f"{label}-{offset}",
                        )
                    )
    return samples


@dataclass(frozen=True)
class CoverSupremum:
    value: Q | None  # None = infinite
    achieving: TruncatedSequence | None
    achieving_result: ChainCoverResult | None
    sample_count: int

    @property
    def infinite(self) -> bool:
        return self.value is None


def cover_ratio_supremum(
    E: PorousSet,
    depth: int,
    epsilon: Q = DEFAULT_EPSILON,
    suffixes: int = 6,
) -> CoverSupremum:
    """Supremum of the chain cover ratio over the sampled tau family.

    A lower-bound estimate unless the classifier's identity check pins it
    to the universal chain's separation ratio.
    """
    if E.zero_isolated != NO:
        raise ZeroIsolated("cover ratios need 0 as an accumulation point")
    samples = tau_sample_family(E, depth, epsilon, suffixes)
    best: ChainCoverResult | None = None
    best_tau: TruncatedSequence | None = None
    for tau in samples:
        result = chain_cover_ratio(E, tau, depth, epsilon)
        if result.infinite:
            return CoverSupremum(None, tau, result, len(samples))
        if best is None or result.value > best.value:
            best, best_tau = result, tau
    return CoverSupremum(
        value=None if best is None else best.value,
        achieving=best_tau,
        achieving_result=best,
        sample_count=len(samples),
    )


# ---------------------------------------------------------------------------
# universal chain and its separation ratio
# ---------------------------------------------------------------------------


def universal_chain(E: PorousSet, depth: int, epsilon: Q = DEFAULT_EPSILON) -> GapChain:
    """Chain of all admissible gaps; every admissible chain embeds into it."""
    selected = admissible_gaps(E, depth, epsilon)
    if not selected:
        raise NoAdmissibleGaps(
            f"no gap reaches relative length {1 - epsilon} at depth {depth}"
        )
    return GapChain(gaps=tuple(selected), epsilon=epsilon, depth=depth)


@dataclass(frozen=True)
class SeparationResult:
    value: Q
    converged: bool


def chain_separation(chain: GapChain, tol: Q = DEFAULT_TOL) -> SeparationResult:
    """Deep-half max of left_n / right_{n+1} over consecutive chain gaps.

    Always >= 1: the next gap ends at or below the current gap's left
    endpoint. Convergence is depth-halving agreement within `tol`.
    """
    if len(chain) < 4:
        raise ChainTooShort(f"chain has {len(chain)} gaps, need >= 4")
    ratios = [
        chain.gaps[i].left / chain.gaps[i + 1].right for i in range(len(chain) - 1)
    ]
    value = max(deep_slice(ratios))
    half = ratios[: len(ratios) // 2]
    converged = bool(half) and abs(value - max(deep_slice(half))) < tol
    return SeparationResult(value=value, converged=converged)


# ---------------------------------------------------------------------------
# classifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DefeatRecord:
    """One (k, K) pair whose scaled intervals keep catching set points."""

    k: Q
    K: Q
    violations: tuple[ClearanceViolation, ...]


@dataclass(frozen=True)
class PorosityCertificate:
    verdict: str  # csp | not-csp | indeterminate
    depth: int
    epsilon: Q
    trivial_branch: bool = False
    universal: GapChain | None = None
    M_value: Q | None = None
    M_converged: bool | None = None
    C_E_value: Q | None = None
    witness_tau: TruncatedSequence | None = None
    defeats: tuple[DefeatRecord, ...] = ()
    reason: str | None = None


@dataclass(frozen=True)
class ScanOutcome:
    """Evidence from the escalating (k, K) scan for one tau.

    `witness` is True when some k is defeated and no scheduled k is
    certified clean: a defeat propagates to every smaller k (the tested
    interval only shrinks as k grows) and nothing blocks it.
    """

    defeats: tuple[DefeatRecord, ...]
    certified_ks: tuple[Q, ...]

    @property
    def witness(self) -> bool:
        return bool(self.defeats) and not self.certified_ks


def defeat_scan(
    E: PorousSet,
    tau: TruncatedSequence,
    depth: int,
    k_schedule: Sequence[Q] = DEFAULT_K_SCHEDULE,
    doublings: int = DEFAULT_K_DOUBLINGS,
) -> ScanOutcome:
    """Escalating scan over (k, K) pairs for one tau.

    When the set carries a finite recurring-ratio bound the schedule is
    extended to reach it, so the escape certificate always gets a chance
    to assert a clean k.
    """
    schedule = sorted(set(Q(k) for k in k_schedule))
    bound = E.recurring_ratio_bound
    if bound is not None and bound > schedule[-1]:
        extra = Q(1)
        while extra < bound:
            extra *= 2
        schedule.append(extra)
    defeats: list[DefeatRecord] = []
    certified: list[Q] = []
    for k in schedule:
        for j in range(1, doublings + 1):
            K = k * 2 ** j
            result = clearance_test(E, tau, k, K, depth)
            if result.certified_escape:
                certified.append(k)
                break
            if result.holds_eventually == "no":
                defeats.append(DefeatRecord(k=k, K=K, violations=result.violations))
    return ScanOutcome(defeats=tuple(defeats), certified_ks=tuple(certified))


def classify_csp(
    E: PorousSet,
    depth: int,
    epsilon: Q = DEFAULT_EPSILON,
    tol: Q = DEFAULT_TOL,
    suffixes: int = 6,
    k_schedule: Sequence[Q] = DEFAULT_K_SCHEDULE,
) -> PorosityCertificate:
    """Certified-at-depth classification of complete strong porosity at 0.

    Order matters: negative evidence (a sampled sequence whose scaled
    intervals keep catching points) wins over a converged chain estimate,
    because interleaved sets can exhibit a finite separation ratio while a
    sampled sequence still defeats porosity.
    """
    if E.zero_isolated == YES:
        _, complete = E.take(depth)
        if complete:
            return PorosityCertificate(
                verdict="csp", depth=depth, epsilon=epsilon, trivial_branch=True
            )
        # a data snapshot longer than the probe window certifies nothing
        return PorosityCertificate(
            verdict="indeterminate",
            depth=depth,
            epsilon=epsilon,
            reason="finite-list-unexhausted",
        )
    require_points(E, depth)
    samples = tau_sample_family(E, depth, epsilon, suffixes)
    for tau in samples:
        outcome = defeat_scan(E, tau, depth, k_schedule)
        if outcome.witness:
            return PorosityCertificate(
                verdict="not-csp",
                depth=depth,
                epsilon=epsilon,
                witness_tau=tau,
                defeats=outcome.defeats,
            )
    try:
        chain = universal_chain(E, depth, epsilon)
        separation = chain_separation(chain, tol)
    except NoAdmissibleGaps:
        return PorosityCertificate(
            verdict="indeterminate",
            depth=depth,
            epsilon=epsilon,
            reason="no-admissible-gaps",
        )
    except ChainTooShort:
        return PorosityCertificate(
            verdict="indeterminate",
            depth=depth,
            epsilon=epsilon,
            reason="chain-too-short",
        )
    if not separation.converged:
        return PorosityCertificate(
            verdict="indeterminate",
            depth=depth,
            epsilon=epsilon,
            universal=chain,
            M_value=separation.value,
            M_converged=False,
            reason="separation-unconverged",
        )
    cover = cover_ratio_supremum(E, depth, epsilon, suffixes)
    if cover.sample_count == 0:
        return PorosityCertificate(
            verdict="indeterminate",
            depth=depth,
            epsilon=epsilon,
            universal=chain,
            M_value=separation.value,
            M_converged=True,
            reason="tau-samples-unavailable",
        )
    if cover.value != separation.value:
        return PorosityCertificate(
            verdict="indeterminate",
            depth=depth,
            epsilon=epsilon,
            universal=chain,
            M_value=separation.value,
            M_converged=True,
            C_E_value=cover.value,
            reason="identity-mismatch",
        )
    return PorosityCertificate(
        verdict="csp",
        depth=depth,
        epsilon=epsilon,
        universal=chain,
        M_value=separation.value,
        M_converged=True,
        C_E_value=cover.value,
    )
