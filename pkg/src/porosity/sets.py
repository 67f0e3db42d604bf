"""Exact models of subsets of the positive reals accumulating at 0.

A set is described declaratively (`SetSpec`) and realized as a `PorousSet`
whose points are enumerated lazily in strictly decreasing order. All kinds
either certify an infinite decay rule or declare themselves finite, so the
"0 is an accumulation point" question is answered by the rule, never by
numerics.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

from .errors import (
    DepthExceedsFiniteSet,
    FactorTooLarge,
    InvalidPartition,
    InvalidSpec,
    InvalidTauRule,
)
from .rational import DEFAULT_BIT_BUDGET, Q, check_budget, parse_rational

YES = "yes"
NO = "no"
UNKNOWN = "unknown-at-depth"

KINDS = (
    "explicit",
    "power-decay",
    "super-geometric",
    "factorial-decay",
    "geometric",
    "doubled",
    "union",
    "rescaled",
    "prop28",
)

# kinds allowed as the rule behind an explicit list's declared tail
_RULE_KINDS = ("geometric", "power-decay", "super-geometric", "factorial-decay")

_PROBE = 16


@dataclass(frozen=True)
class SetSpec:
    """Declarative description of a set; `params` are kind-specific."""

    kind: str
    params: Mapping[str, object]

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": _params_to_json(self.params)}

    @classmethod
    def from_json(cls, doc: Mapping) -> "SetSpec":
        if not isinstance(doc, Mapping) or "kind" not in doc:
            raise InvalidSpec("set document must be {'kind': ..., 'params': {...}}")
        kind = doc["kind"]
        if kind == "prop28-family-member":
            kind = "prop28"
        return cls(kind=kind, params=dict(doc.get("params", {})))


def _params_to_json(params: Mapping[str, object]) -> dict:
    out: dict = {}
    for key, value in params.items():
        if isinstance(value, SetSpec):
            out[key] = value.to_json()
        elif isinstance(value, Q):
            out[key] = str(value)
        elif isinstance(value, (list, tuple)):
            out[key] = [
                v.to_json() if isinstance(v, SetSpec) else (str(v) if isinstance(v, Q) else v)
                for v in value
            ]
        else:
            out[key] = value
    return out


@dataclass(frozen=True)
class _Engine:
    """Validated realization of a SetSpec.

    `recurring_ratio_bound` certifies that every point-pair ratio occurring
    at infinitely many scales is <= the bound (all other upward ratios
    diverge along the enumeration); None means no such certificate.
    """

    stream: Callable[[], Iterator[Q]] = field(repr=False)
    finite_size: int | None  # None = certified infinite, tending to 0
    recurring_ratio_bound: Q | None


@dataclass(frozen=True)
class PorousSet:
    """A set together with its lazy decreasing enumeration.

    Immutable; `take` restarts the underlying generator on every call, so
    concurrent read-only use needs no locking.
    """

    spec: SetSpec
    zero_isolated: str  # YES / NO (UNKNOWN reserved for future data-only sets)
    bit_budget: int = DEFAULT_BIT_BUDGET
    metadata: Mapping[str, object] = field(default_factory=dict)
    _engine: _Engine = field(repr=False, compare=False, default=None)

    def take(self, depth: int) -> tuple[list[Q], bool]:
        """First `depth` points (decreasing) and a completeness flag."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        out: list[Q] = []
        for value in self._engine.stream():
            check_budget(value, self.bit_budget)
            out.append(value)
            if len(out) == depth:
                break
        size = self._engine.finite_size
        complete = size is not None and size <= depth
        return out, complete

    @property
    def is_finite(self) -> bool:
        return self._engine.finite_size is not None

    @property
    def recurring_ratio_bound(self) -> Q | None:
        return self._engine.recurring_ratio_bound

    @property
    def ratio_vanishes(self) -> bool:
        """Certified x_{n+1}/x_n -> 0 (no recurring ratio above 1)."""
        bound = self._engine.recurring_ratio_bound
        return bound is not None and bound <= 1


def make_set(
    spec: SetSpec | Mapping,
    *,
    bit_budget: int = DEFAULT_BIT_BUDGET,
    metadata: Mapping[str, object] | None = None,
) -> PorousSet:
    """Validate a spec and return the realized set.

    Raises InvalidSpec for out-of-range parameters or a rule whose probe
    is not strictly decreasing.
    """
    if isinstance(spec, Mapping) and not isinstance(spec, SetSpec):
        spec = SetSpec.from_json(spec)
    engine = _build_engine(spec)
    _probe_decreasing(engine)
    zero_isolated = YES if engine.finite_size is not None else NO
    return PorousSet(
        spec=spec,
        zero_isolated=zero_isolated,
        bit_budget=bit_budget,
        metadata=dict(metadata or {}),
        _engine=engine,
    )


def enumerate_points(E: PorousSet, depth: int) -> list[Q]:
    """First `depth` points of E, strictly decreasing.

    Finite sets smaller than `depth` yield all their points (use `take`
    for the completeness flag); consumers that need exactly `depth`
    points call `require_points`.
    """
    return E.take(depth)[0]


def require_points(E: PorousSet, depth: int) -> list[Q]:
    points, _ = E.take(depth)
    if len(points) < depth:
        raise DepthExceedsFiniteSet(
            f"set has {len(points)} points, {depth} requested"
        )
    return points


def rescale(E: PorousSet, t: Q) -> PorousSet:
    """Pointwise-scaled set t*E (the distance set of the metric scaled by t)."""
    t = parse_rational(t)
    if t <= 0:
        raise InvalidSpec("rescale factor must be > 0")
    if t == 1:
        return E
    spec = SetSpec("rescaled", {"base": E.spec, "factor": t})
    return make_set(spec, bit_budget=E.bit_budget, metadata=E.metadata)


def union_sets(E: PorousSet, F: PorousSet) -> PorousSet:
    """Sorted-merge union with duplicate elimination."""
    spec = SetSpec("union", {"members": [E.spec, F.spec]})
    budget = max(E.bit_budget, F.bit_budget)
    return make_set(spec, bit_budget=budget)


def accumulates_at_zero(E: PorousSet, depth: int) -> str:
    """Tri-state '0 is an accumulation point' as certified at `depth`.

    Rule-backed infinite kinds answer from the rule; explicit lists answer
    from inspection only, so an unexhausted list stays unknown.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    size = E._engine.finite_size
    if size is None:
        return YES
    if size <= depth:
        return NO
    return UNKNOWN


# ---------------------------------------------------------------------------
# kind engines
# ---------------------------------------------------------------------------


def _probe_decreasing(engine: _Engine) -> None:
    previous = None
    for value in itertools.islice(engine.stream(), _PROBE):
        if value <= 0:
            raise InvalidSpec(f"non-positive point {value} on probe")
        if previous is not None and value >= previous:
            raise InvalidSpec("non-decreasing rule detected on probe")
        previous = value


def _build_engine(spec: SetSpec) -> _Engine:
    builder = _BUILDERS.get(spec.kind)
    if builder is None:
        raise InvalidSpec(f"unknown kind {spec.kind!r}; expected one of {KINDS}")
    return builder(dict(spec.params))


def _geometric(params: dict) -> _Engine:
    q = parse_rational(params.get("ratio", "1/2"))
    if not 0 < q < 1:
        raise InvalidSpec(f"geometric ratio must be in (0, 1), got {q}")

    def stream() -> Iterator[Q]:
        x = q
        while True:
            yield x
            x *= q

    # upward ratios (1/q)^j recur at every scale: no escape certificate
    return _Engine(stream=stream, finite_size=None, recurring_ratio_bound=None)


def _power_decay(params: dict) -> _Engine:
    s = params.get("exponent", 1)
    if not isinstance(s, int) or s < 1:
        raise InvalidSpec(f"power-decay exponent must be a positive integer, got {s!r}")

    def stream() -> Iterator[Q]:
        for n in itertools.count(1):
            yield Q(1, n ** s)

    return _Engine(stream=stream, finite_size=None, recurring_ratio_bound=None)


def _poly(coeffs: list[int]) -> Callable[[int], int]:
    def evaluate(n: int) -> int:
        return sum(c * n ** i for i, c in enumerate(coeffs))

    return evaluate


def _check_exponent_coeffs(coeffs: object, *, min_degree: int) -> list[int]:
    if not isinstance(coeffs, (list, tuple)) or not coeffs:
        raise InvalidSpec("exponent_coeffs must be a non-empty integer list")
    coeffs = [int(c) for c in coeffs]
    if any(c < 0 for c in coeffs):
        raise InvalidSpec("exponent_coeffs must be nonnegative")
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    degree = len(coeffs) - 1
    if degree < min_degree or coeffs[-1] <= 0:
        raise InvalidSpec(
            f"exponent rule must have degree >= {min_degree} "
            f"(got degree-{degree} coefficients {coeffs})"
        )
    return coeffs


def _super_geometric(params: dict) -> _Engine:
    base = params.get("base", 2)
    if not isinstance(base, int) or base < 2:
        raise InvalidSpec(f"super-geometric base must be an integer >= 2, got {base!r}")
    coeffs = _check_exponent_coeffs(
        params.get("exponent_coeffs", [0, 0, 1]), min_degree=2
    )
    exponent = _poly(coeffs)

    def stream() -> Iterator[Q]:
        for n in itertools.count(1):
            yield Q(1, base ** exponent(n))

    # degree >= 2 with nonnegative coefficients makes the exponent gaps
    # e(n+1) - e(n) strictly increasing and unbounded: all upward ratios diverge
    return _Engine(stream=stream, finite_size=None, recurring_ratio_bound=Q(1))


def _factorial_decay(params: dict) -> _Engine:
    if params:
        raise InvalidSpec(f"factorial-decay takes no parameters, got {params}")

    def stream() -> Iterator[Q]:
        fact = 1
        for n in itertools.count(1):
            fact *= n
            yield Q(1, fact)

    return _Engine(stream=stream, finite_size=None, recurring_ratio_bound=Q(1))


def _explicit(params: dict) -> _Engine:
    raw = params.get("points")
    if not raw:
        raise InvalidSpec("explicit set needs a non-empty 'points' list")
    points = sorted({parse_rational(p) for p in raw}, reverse=True)
    if points[-1] <= 0:
        raise InvalidSpec("explicit points must be strictly positive")

    tail = params.get("tail")
    if tail is None:
        def stream() -> Iterator[Q]:
            yield from points

        return _Engine(
            stream=stream, finite_size=len(points), recurring_ratio_bound=None
        )

    if isinstance(tail, Mapping) and not isinstance(tail, SetSpec):
        tail = SetSpec.from_json(tail)
    if tail.kind not in _RULE_KINDS:
        raise InvalidSpec(f"explicit tail must be a rule kind, got {tail.kind!r}")
    tail_engine = _build_engine(tail)
    cutoff = points[-1]

    def stream() -> Iterator[Q]:
        yield from points
        for value in tail_engine.stream():
            if value < cutoff:
                yield value

    # the explicit head is transient; asymptotics are the tail's
    return _Engine(
        stream=stream,
        finite_size=None,
        recurring_ratio_bound=tail_engine.recurring_ratio_bound,
    )


def _doubled(params: dict) -> _Engine:
    base = params.get("base")
    if isinstance(base, Mapping) and not isinstance(base, SetSpec):
        base = SetSpec.from_json(base)
    if not isinstance(base, SetSpec):
        raise InvalidSpec("doubled set needs a 'base' spec")
    if base.kind not in ("geometric", "super-geometric", "factorial-decay"):
        raise InvalidSpec(f"doubled base kind {base.kind!r} is not rule-certified")
    factor = parse_rational(params.get("factor", 2))
    if factor <= 1:
        raise InvalidSpec(f"doubled factor must be > 1, got {factor}")
    base_engine = _build_engine(base)

    # collision certificate: need factor * x_{n+1} < x_n for every n.
    if base.kind == "geometric":
        q = parse_rational(base.params.get("ratio", "1/2"))
        if factor * q >= 1:
            raise FactorTooLarge(
                f"factor {factor} collides with geometric ratio {q} (points coincide)"
            )
    else:
        # consecutive ratios of these rules decrease monotonically, so the
        # first pair certifies all later ones
        first = list(itertools.islice(base_engine.stream(), 2))
        if factor * first[1] >= first[0]:
            raise FactorTooLarge(
                f"factor {factor} collides at the first probe pair {first}"
            )

    def stream() -> Iterator[Q]:
        return _merge_decreasing(
            base_engine.stream(),
            (factor * x for x in base_engine.stream()),
        )

    # the only ratio recurring at every scale is the layer factor itself;
    # cross-level ratios inherit the base rule's divergence
    base_bound = base_engine.recurring_ratio_bound
    bound = max(base_bound, factor) if base_bound is not None else None
    return _Engine(stream=stream, finite_size=None, recurring_ratio_bound=bound)


def _union(params: dict) -> _Engine:
    members = params.get("members")
    if not members:
        raise InvalidSpec("union needs a non-empty 'members' list")
    specs = [
        SetSpec.from_json(m) if isinstance(m, Mapping) and not isinstance(m, SetSpec) else m
        for m in members
    ]
    engines = [_build_engine(s) for s in specs]

    finite_size: int | None = 0
    infinite = [e for e in engines if e.finite_size is None]
    if infinite:
        finite_size = None
    else:
        # upper bound before dedup; exact size found by exhausting the merge
        merged = list(_merge_decreasing(*(e.stream() for e in engines)))
        finite_size = len(merged)

    # a single infinite member eventually dominates the merge, so its
    # certificate survives the union; interleaved infinite members do not
    bound = infinite[0].recurring_ratio_bound if len(infinite) == 1 else None

    def stream() -> Iterator[Q]:
        return _merge_decreasing(*(e.stream() for e in engines))

    return _Engine(stream=stream, finite_size=finite_size, recurring_ratio_bound=bound)


def _rescaled(params: dict) -> _Engine:
    base = params.get("base")
    if isinstance(base, Mapping) and not isinstance(base, SetSpec):
        base = SetSpec.from_json(base)
    if not isinstance(base, SetSpec):
        raise InvalidSpec("rescaled set needs a 'base' spec")
    factor = parse_rational(params.get("factor", 1))
    if factor <= 0:
        raise InvalidSpec(f"rescale factor must be > 0, got {factor}")
    base_engine = _build_engine(base)

    def stream() -> Iterator[Q]:
        return (factor * x for x in base_engine.stream())

    # pointwise scaling leaves all point-pair ratios unchanged
    return _Engine(
        stream=stream,
        finite_size=base_engine.finite_size,
        recurring_ratio_bound=base_engine.recurring_ratio_bound,
    )


def dyadic_index_class(n: int) -> int:
    """1 + (2-adic valuation of n): the default index-partition rule."""
    if n < 1:
        raise ValueError("index must be >= 1")
    m = 1
    while n % 2 == 0:
        n //= 2
        m += 1
    return m


def _partition_rule(partition: object) -> tuple[str, Callable[[int], int], bool]:
    """Returns (label, m(n), is_true_partition)."""
    if partition in (None, "dyadic"):
        return "dyadic", dyadic_index_class, True
    if isinstance(partition, Mapping) and partition.get("kind") == "constant":
        value = int(partition.get("value", 1))
        if value < 1:
            raise InvalidPartition("constant partition value must be >= 1")
        if value > 1:
            # m(n) <= n already fails at n = 1
            raise InvalidPartition(
                f"constant partition {value} violates m(n) <= n at n=1"
            )
        return "constant:1", (lambda n: 1), False
    raise InvalidPartition(f"unknown partition rule {partition!r}")


def _prop28(params: dict) -> _Engine:
    member = params.get("member", "union")
    if member not in ("e1", "e1-star", "union"):
        raise InvalidSpec(f"prop28 member must be e1 | e1-star | union, got {member!r}")
    try:
        coeffs = _check_exponent_coeffs(
            params.get("tau_exponent_coeffs", [0, 0, 0, 1]), min_degree=3
        )
    except InvalidSpec as error:
        raise InvalidTauRule(str(error)) from None
    exponent = _poly(coeffs)
    for n in range(1, 65):
        if exponent(n + 1) < exponent(n) + n * n:
            raise InvalidTauRule(
                f"tau rule violates tau_(n+1) <= 2^(-n^2) tau_n at n={n}"
            )
    _, m_of, _ = _partition_rule(params.get("partition"))
    for n in range(1, 257):
        if m_of(n) > n:
            raise InvalidPartition(f"partition violates m(n) <= n at n={n}")

    def tau(n: int) -> Q:
        return Q(1, 2 ** exponent(n))

    def tau_star(n: int) -> Q:
        return Q(1, 2 ** (exponent(n) + m_of(n)))

    def stream_e1() -> Iterator[Q]:
        return (tau(n) for n in itertools.count(1))

    def stream_star() -> Iterator[Q]:
        return (tau_star(n) for n in itertools.count(1))

    if member == "e1":
        return _Engine(stream=stream_e1, finite_size=None, recurring_ratio_bound=Q(1))
    if member == "e1-star":
        return _Engine(stream=stream_star, finite_size=None, recurring_ratio_bound=Q(1))

    def stream() -> Iterator[Q]:
        return _merge_decreasing(stream_e1(), stream_star())

    # the damping ratios 2^(m(n)) recur unboundedly: no certificate
    return _Engine(stream=stream, finite_size=None, recurring_ratio_bound=None)


_BUILDERS = {
    "geometric": _geometric,
    "power-decay": _power_decay,
    "super-geometric": _super_geometric,
    "factorial-decay": _factorial_decay,
    "explicit": _explicit,
    "doubled": _doubled,
    "union": _union,
    "rescaled": _rescaled,
    "prop28": _prop28,
}


def _merge_decreasing(*streams: Iterator[Q]) -> Iterator[Q]:
    """Merge strictly decreasing streams into one, dropping duplicates."""
    heap: list[tuple[Q, int, Iterator[Q]]] = []
    for idx, it in enumerate(streams):
        first = next(it, None)
        if first is not None:
            heap.append((-first, idx, it))
    heapq.heapify(heap)
    last: Q | None = None
    while heap:
        negated, idx, it = heapq.heappop(heap)
        value = -negated
        if last is None or value < last:
            yield value
            last = value
        nxt = next(it, None)
        if nxt is not None:
            heapq.heappush(heap, (-nxt, idx, it))
