"""Finite-depth simulation of pretangent spaces over distance sets.

Point sequences converging to 0 are compared through a scaling sequence;
mutually stable families are built greedily from declared candidate pools,
identified metrically (near-zero classes merged), and measured. Estimated
limits are deep-half midpoints recorded with their oscillation; candidate
pools of constant multiples of set points give exact constants, so the
recorded distances are exact rationals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyFamily, LengthMismatch, ZeroIsolated
from .metrics import (
    FROM_ENUMERATION,
    TruncatedSequence,
    cover_ratio_supremum,
)
from .gaps import admissible_gaps
from .rational import DEFAULT_EPSILON, DEFAULT_TOL, Q, deep_start
from .sets import NO, YES, PorousSet, require_points

Seq = tuple  # tuple[Q, ...]; the constant-0 sequence is allowed

POOL_CONSTANTS = (Q(1, 4), Q(1, 3), Q(1, 2), Q(1), Q(2), Q(3), Q(4))


def _values(seq) -> Seq:
    if isinstance(seq, TruncatedSequence):
        return seq.values
    if isinstance(seq, ScalingSequence):
        return seq.values.values
    return tuple(seq)


@dataclass(frozen=True)
class ScalingSequence:
    """Positive null sequence used to magnify distances near the point."""

    values: TruncatedSequence
    normal_witness: TruncatedSequence | None = None
    label: str = "scaling"


@dataclass(frozen=True)
class StabilityResult:
    status: str  # stable | unstable | indeterminate
    limit: Q | None
    oscillation: Q


def limit_ratio(
    x,
    y,
    scaling,
    tol: Q = DEFAULT_TOL,
    positions: Sequence[int] | None = None,
) -> StabilityResult:
    """Exact evaluation of |x_n - y_n| / r_n with a stability verdict.

    Stable needs deep-half oscillation < tol plus agreement with the
    half-length window; persistent oscillation at both depths is unstable.
    `positions` restricts the frame to an index subsequence.
    """
    xv, yv, rv = _values(x), _values(y), _values(scaling)
    if not len(xv) == len(yv) == len(rv):
        raise LengthMismatch(
            f"sequence lengths differ: {len(xv)}, {len(yv)}, {len(rv)}"
        )
    if positions is None:
        positions = range(len(rv))
    positions = list(positions)
    if len(positions) < 4:
        raise ValueError("need at least 4 frame positions")
    ratios = [abs(xv[i] - yv[i]) / rv[i] for i in positions]
    return _stability(ratios, tol)


def _stability(ratios: list[Q], tol: Q) -> StabilityResult:
    full = ratios[deep_start(len(ratios)):]
    half_window = ratios[: len(ratios) // 2]
    half = half_window[deep_start(len(half_window)):]
    osc_full = max(full) - min(full)
    mid_full = (max(full) + min(full)) / 2
    osc_half = max(half) - min(half)
    mid_half = (max(half) + min(half)) / 2
    if osc_full < tol and abs(mid_full - mid_half) < tol:
        return StabilityResult("stable", mid_full, osc_full)
    if osc_full >= tol and osc_half >= tol:
        return StabilityResult("unstable", None, osc_full)
    return StabilityResult("indeterminate", None, osc_full)


def monotone_envelope(y: TruncatedSequence) -> TruncatedSequence:
    """Running-minimum reindexing: the non-increasing envelope of y."""
    out: list[Q] = []
    current = None
    for value in y.values:
        current = value if current is None else min(current, value)
        out.append(current)
    return TruncatedSequence(
        values=tuple(out), source=y.source, rule_label="monotone-envelope"
    )


@dataclass(frozen=True)
class NormalityResult:
    normal: str  # yes | no | indeterminate
    witness: TruncatedSequence | None
    max_deep_deviation: Q


def is_normal_scaling(
    E: PorousSet, scaling, depth: int, tol: Q = DEFAULT_TOL
) -> NormalityResult:
    """Search for a set-valued sequence matching the scaling in ratio -> 1.

    Per index the point nearest r_n in ratio is chosen (ties to the larger
    point); the witness is that choice, its monotone envelope left to the
    caller when the raw choice is not almost decreasing.
    """
    if E.zero_isolated == YES:
        raise ZeroIsolated("no normal scalings exist when 0 is isolated")
    rv = _values(scaling)
    points = require_points(E, depth)
    asc = points[::-1]
    chosen = [_nearest_in_ratio(asc, r) for r in rv]
    deviations = [abs(s / r - 1) for s, r in zip(chosen, rv)]
    deep = deviations[deep_start(len(deviations)):]
    half_window = deviations[: len(deviations) // 2]
    half_deep = half_window[deep_start(len(half_window)):]
    witness = TruncatedSequence(
        values=tuple(chosen), source=FROM_ENUMERATION, rule_label="nearest-point"
    )
    max_deep = max(deep)
    if max_deep < tol:
        return NormalityResult("yes", witness, max_deep)
    bad = [d for d in deep if d >= tol]
    bad_half = [d for d in half_deep if d >= tol]
    if len(bad) >= 2 and bad_half:
        return NormalityResult("no", witness, max_deep)
    return NormalityResult("indeterminate", witness, max_deep)


def _nearest_in_ratio(asc: list[Q], target: Q) -> Q:
    """Point minimizing |p/target - 1|; ties resolved to the larger point."""
    lo, hi = 0, len(asc)
    while lo < hi:
        mid = (lo + hi) // 2
        if asc[mid] < target:
            lo = mid + 1
        else:
            hi = mid
    candidates = []
    if lo < len(asc):
        candidates.append(asc[lo])
    if lo > 0:
        candidates.append(asc[lo - 1])
    return min(candidates, key=lambda p: (abs(p / target - 1), -p))


# ---------------------------------------------------------------------------
# self-stable families and their metric identification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceClass:
    distance: Q  # recorded distance to the marked class
    members: tuple[int, ...]  # candidate indices (-1 is the constant-0 sequence)
    representative: Seq


@dataclass(frozen=True)
class PretangentApprox:
    """Metric identification of a greedy self-stable family.

    Classes are ordered with the marked class (constant-0 sequence) first;
    `distances` is the full symmetric matrix of recorded limits.
    """

    scaling: Seq
    frame: tuple[int, ...]  # surviving index subsequence of the window
    classes: tuple[SpaceClass, ...]
    distances: tuple[tuple[Q, ...], ...]
    rejected: tuple[tuple[int, str], ...]
    marked_index: int = 0

    def triangle_violations(self) -> list[tuple[int, int, int]]:
        n = len(self.classes)
        out = []
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.distances[i][j] > self.distances[i][k] + self.distances[k][j]:
                        out.append((i, j, k))
        return out


def build_self_stable(
    E: PorousSet,
    scaling,
    candidates: Sequence,
    tol: Q = DEFAULT_TOL,
    max_rounds: int | None = None,
) -> PretangentApprox:
    """Greedy self-stable family over a declared candidate pool.

    Candidates are accepted iff stable against every accepted member; an
    indeterminate pair triggers bisection of the index frame (the
    finite-depth analogue of countable-subfamily subsequence extraction),
    with at most log2(frame) rounds. Refinements that would destabilize
    already-accepted pairs are rolled back and the candidate rejected.
    """
    rv = _values(scaling)
    pools = [_values(c) for c in candidates]
    length = min([len(rv)] + [len(p) for p in pools]) if pools else len(rv)
    if length < 4:
        raise ValueError("frame too short; need at least 4 entries")
    rv = rv[:length]
    pools = [p[:length] for p in pools]
    zero = tuple(Q(0) for _ in range(length))
    budget = max_rounds if max_rounds is not None else max(1, int(math.log2(length)))

    frame = list(range(length))
    accepted: list[tuple[int, Seq]] = [(-1, zero)]
    rejected: list[tuple[int, str]] = []

    for index, cand in enumerate(pools):
        frame_backup = list(frame)
        rounds = 0
        verdict: str | None = None
        while True:
            results = [
                _ratio_stability(cand, member, rv, frame, tol)
                for _, member in accepted
            ]
            if all(r.status == "stable" for r in results):
                verdict = "accepted"
                break
            if any(r.status == "unstable" for r in results):
                verdict = "unstable"
                break
            if rounds >= budget or len(frame) < 4:
                verdict = "no-stable-subsequence"
                break
            problem = next(
                (i for i, r in enumerate(results) if r.status == "indeterminate")
            )
            refined = _refine_frame(cand, accepted[problem][1], rv, frame)
            if not _frame_keeps_accepted(accepted, rv, refined, tol):
                verdict = "no-stable-subsequence"
                break
            frame = refined
            rounds += 1
        if verdict == "accepted":
            accepted.append((index, cand))
        else:
            rejected.append((index, verdict))
            frame = frame_backup

    return _identify(rv, frame, accepted, rejected, tol)


def _ratio_stability(x: Seq, y: Seq, rv: Seq, frame: list[int], tol: Q) -> StabilityResult:
    ratios = [abs(x[i] - y[i]) / rv[i] for i in frame]
    return _stability(ratios, tol)


def _refine_frame(x: Seq, y: Seq, rv: Seq, frame: list[int]) -> list[int]:
    """Keep the more populated value-half of the problem pair's ratios."""
    ratios = [abs(x[i] - y[i]) / rv[i] for i in frame]
    lo, hi = min(ratios), max(ratios)
    mid = (lo + hi) / 2
    lower = [i for i, r in zip(frame, ratios) if r <= mid]
    upper = [i for i, r in zip(frame, ratios) if r > mid]
    return lower if len(lower) >= len(upper) else upper


def _frame_keeps_accepted(
    accepted: list[tuple[int, Seq]], rv: Seq, frame: list[int], tol: Q
) -> bool:
    if len(frame) < 4:
        return False
    for a in range(len(accepted)):
        for b in range(a + 1, len(accepted)):
            result = _ratio_stability(accepted[a][1], accepted[b][1], rv, frame, tol)
            if result.status != "stable":
                return False
    return True


def _identify(
    rv: Seq,
    frame: list[int],
    accepted: list[tuple[int, Seq]],
    rejected: list[tuple[int, str]],
    tol: Q,
) -> PretangentApprox:
    """Merge near-zero pairs into classes and record the distance matrix."""
    classes: list[list[tuple[int, Seq]]] = []
    for index, seq in accepted:
        placed = False
        for group in classes:
            result = _ratio_stability(seq, group[0][1], rv, frame, tol)
            if result.status == "stable" and result.limit < tol:
                group.append((index, seq))
                placed = True
                break
        if not placed:
            classes.append([(index, seq)])

    reps = [group[0][1] for group in classes]
    alpha_distances = [
        _ratio_stability(rep, reps[0], rv, frame, tol).limit for rep in reps
    ]
    order = sorted(range(len(classes)), key=lambda i: (alpha_distances[i], i))
    classes = [classes[i] for i in order]
    reps = [reps[i] for i in order]

    size = len(classes)
    matrix = [[Q(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            limit = _ratio_stability(reps[i], reps[j], rv, frame, tol).limit
            matrix[i][j] = matrix[j][i] = limit if limit is not None else Q(0)

    space_classes = tuple(
        SpaceClass(
            distance=matrix[0][i],
            members=tuple(idx for idx, _ in classes[i]),
            representative=reps[i],
        )
        for i in range(size)
    )
    return PretangentApprox(
        scaling=rv,
        frame=tuple(frame),
        classes=space_classes,
        distances=tuple(tuple(row) for row in matrix),
        rejected=tuple(rejected),
    )


@dataclass(frozen=True)
class SpaceExtremes:
    rho_star: Q
    rho_low: Q | float  # math.inf for the one-point space


def space_extremes(omega: PretangentApprox) -> SpaceExtremes:
    """Max distance from the marked class and min nonzero such distance."""
    distances = [c.distance for c in omega.classes[1:]]
    rho_star = max(distances, default=Q(0))
    nonzero = [d for d in distances if d > 0]
    rho_low = min(nonzero) if nonzero else math.inf
    return SpaceExtremes(rho_star=rho_star, rho_low=rho_low)


# ---------------------------------------------------------------------------
# sampled radius bounds over normal scalings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceSummary:
    label: str
    rho_star: Q
    rho_low: Q | float
    class_count: int
    has_unit_class: bool


@dataclass(frozen=True)
class RadiusBounds:
    R_star: Q
    R_low: Q | float
    cover_value: Q | None
    spaces: tuple[SpaceSummary, ...]


def sample_radius_bounds(
    E: PorousSet,
    depth: int,
    trials: int = 8,
    tol: Q = DEFAULT_TOL,
    epsilon: Q = DEFAULT_EPSILON,
) -> RadiusBounds:
    """Radius extremes over sampled normal scalings.

    Scalings come from enumeration suffixes and admissible-gap endpoints;
    the deterministic cover-ratio witness scaling is always included, so
    the reported max is attained, not just approached.
    """
    if E.zero_isolated != NO:
        raise ZeroIsolated("radius sampling needs 0 as an accumulation point")
    points = require_points(E, depth)
    min_len = max(8, depth // 2)

    scalings: list[tuple[str, Seq, list[Seq]]] = []
    for offset in range(trials):
        if depth - offset < min_len:
            break
        scalings.append((f"suffix-{offset}", tuple(points[offset:]), []))
    selected = admissible_gaps(E, depth, epsilon)
    if len(selected) >= 4:
        scalings.append(("chain-lefts", tuple(g.left for g in selected), []))
        scalings.append(("chain-rights", tuple(g.right for g in selected), []))

    cover = cover_ratio_supremum(E, depth, epsilon)
    if cover.value is not None and cover.achieving_result is not None:
        hits = [
            (t, left)
            for _, t, left in cover.achieving_result.aligned
            if left / t == cover.value
        ]
        hits = [h for i, h in enumerate(hits) if i == 0 or h[0] < hits[i - 1][0]]
        if len(hits) >= 4:
            witness_scaling = tuple(t for t, _ in hits)
            witness_candidate = tuple(left for _, left in hits)
            scalings.append(("cover-witness", witness_scaling, [witness_candidate]))

    asc = points[::-1]
    summaries: list[SpaceSummary] = []
    r_star: Q = Q(0)
    r_low: Q | float = math.inf
    for label, rv, extra in scalings:
        pool: list[Seq] = []
        pool.append(rv)
        for c in POOL_CONSTANTS:
            pool.append(tuple(_nearest_in_ratio(asc, c * r) for r in rv))
        pool.extend(extra)
        pool = _dedupe(pool)
        omega = build_self_stable(E, rv, pool, tol=tol)
        extremes = space_extremes(omega)
        has_unit = any(c.distance == 1 for c in omega.classes)
        summaries.append(
            SpaceSummary(
                label=label,
                rho_star=extremes.rho_star,
                rho_low=extremes.rho_low,
                class_count=len(omega.classes),
                has_unit_class=has_unit,
            )
        )
        r_star = max(r_star, extremes.rho_star)
        r_low = min(r_low, extremes.rho_low)
    return RadiusBounds(
        R_star=r_star, R_low=r_low, cover_value=cover.value, spaces=tuple(summaries)
    )


def _dedupe(pool: list[Seq]) -> list[Seq]:
    seen: set[Seq] = set()
    out: list[Seq] = []
    for seq in pool:
        if seq not in seen:
            seen.add(seq)
            out.append(seq)
    return out


# ---------------------------------------------------------------------------
# weakly self-similar families of finite pointed spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyProfile:
    max_radius_ratio: Q  # max over spaces of rho_star / rho_low
    weakly_self_similar: bool
    spheres_nonempty: bool
    radius_sup: Q
    radius_inf: Q | float


def family_profile(spaces: Sequence[Iterable[Q]]) -> FamilyProfile:
    """Profile of a family given by distance sets (0 = marked point).

    Weak self-similarity demands exact closure under rescaling each space
    by any of its own nonzero distances.
    """
    if not spaces:
        raise EmptyFamily("family must contain at least one space")
    normalized: list[frozenset[Q]] = []
    for space in spaces:
        values = frozenset(Q(v) for v in space)
        if Q(0) not in values:
            raise ValueError("each distance set must contain 0 (the marked point)")
        if any(v < 0 for v in values):
            raise ValueError("distances must be nonnegative")
        normalized.append(values)
    family = set(normalized)

    ratio_max = Q(0)
    radius_sup = Q(0)
    radius_inf: Q | float = math.inf
    spheres = True
    self_similar = True
    for values in normalized:
        nonzero = sorted(v for v in values if v > 0)
        rho_star = max(values)
        rho_low: Q | float = nonzero[0] if nonzero else math.inf
        radius_sup = max(radius_sup, rho_star)
        radius_inf = min(radius_inf, rho_low)
        if nonzero:
            ratio_max = max(ratio_max, rho_star / nonzero[0])
        spheres = spheres and Q(1) in values
        for t in nonzero:
            rescaled = frozenset(v / t for v in values)
            if rescaled not in family:
                self_similar = False
    return FamilyProfile(
        max_radius_ratio=ratio_max,
        weakly_self_similar=self_similar,
        spheres_nonempty=spheres,
        radius_sup=radius_sup,
        radius_inf=radius_inf,
    )
