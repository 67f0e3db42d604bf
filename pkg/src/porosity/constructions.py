"""Builders for the named example sets used as ground truth in the tests.

Every builder attaches expectation metadata, but nothing downstream trusts
it: the generic classifiers re-derive verdicts and values independently.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import RatioNotVanishing
from .rational import Q, deep_start, parse_rational
from .sets import PorousSet, SetSpec, dyadic_index_class, make_set

_VANISHING_KINDS = ("super-geometric", "factorial-decay")


def _coerce_spec(spec: SetSpec | Mapping) -> SetSpec:
    if isinstance(spec, SetSpec):
        return spec
    return SetSpec.from_json(spec)


def example_ratio_vanishing(rule: SetSpec | Mapping) -> PorousSet:
    """Set {x_n} with x_{n+1}/x_n -> 0; the canonical csp example.

    Only rule kinds that certify the vanishing ratio are accepted.
    """
    spec = _coerce_spec(rule)
    if spec.kind not in _VANISHING_KINDS:
        raise RatioNotVanishing(
            f"kind {spec.kind!r} does not certify a vanishing consecutive ratio"
        )
    return make_set(
        spec, metadata={"expected_M": Q(1), "expected_verdict": "csp"}
    )


def doubled_gap_set(base: SetSpec | Mapping, factor: Q | str | int) -> PorousSet:
    """Set {x_n} union {c x_n}: the engineered family with separation c.

    Collisions (c x_{n+1} >= x_n) raise FactorTooLarge from the set engine.
    Expectation metadata is attached only for vanishing-ratio bases, where
    the big gaps (c x_{n+1}, x_n) dominate.
    """
    base_spec = _coerce_spec(base)
    factor = parse_rational(factor)
    spec = SetSpec("doubled", {"base": base_spec, "factor": factor})
    metadata: dict[str, object] = {}
    if base_spec.kind in _VANISHING_KINDS:
        metadata = {
            "expected_M": factor,
            "expected_verdict": "csp",
            "expected_R_star": factor,
            "expected_R_low": 1 / factor,
        }
    return make_set(spec, metadata=metadata)


@dataclass(frozen=True)
class Prop28Family:
    """The two-sequence family realizing a csp set whose union with its
    parent fails complete strong porosity.

    tau_n = 2^(-e(n)) with e(n+1) >= e(n) + n^2; the index class m(n) <= n
    picks the damping tau_n^* = 2^(-m(n)) tau_n.
    """

    tau_exponent_coeffs: tuple[int, ...]
    partition_label: str
    E1: PorousSet
    E1_star: PorousSet
    union: PorousSet

    def exponent(self, n: int) -> int:
        return sum(c * n ** i for i, c in enumerate(self.tau_exponent_coeffs))

    def index_class(self, n: int) -> int:
        if self.partition_label == "dyadic":
            return dyadic_index_class(n)
        return 1  # constant:1

    def tau(self, n: int) -> Q:
        return Q(1, 2 ** self.exponent(n))

    def tau_star(self, n: int) -> Q:
        return Q(1, 2 ** (self.exponent(n) + self.index_class(n)))


def prop28_family(
    tau_exponent_coeffs=(0, 0, 0, 1),
    partition: str | Mapping = "dyadic",
) -> Prop28Family:
    """Build the family with defaults tau_n = 2^(-n^3), m(n) = 1 + val_2(n).

    The defaults keep bit sizes ~n^3 and make every index class infinite
    with strictly increasing first-hitting indices.
    """
    if isinstance(partition, str) and partition.startswith("constant:"):
        partition = {"kind": "constant", "value": int(partition.split(":", 1)[1])}
    params = {
        "tau_exponent_coeffs": list(tau_exponent_coeffs),
        "partition": partition,
    }
    label = partition if isinstance(partition, str) else "constant:1"
    e1 = make_set(SetSpec("prop28", {**params, "member": "e1"}))
    e1_star = make_set(
        SetSpec("prop28", {**params, "member": "e1-star"}),
        metadata={"expected_M": Q(1), "expected_verdict": "csp"},
    )
    union = make_set(
        SetSpec("prop28", {**params, "member": "union"}),
        metadata={"expected_verdict": "not-csp"},
    )
    return Prop28Family(
        tau_exponent_coeffs=tuple(int(c) for c in tau_exponent_coeffs),
        partition_label=label,
        E1=e1,
        E1_star=e1_star,
        union=union,
    )


def ratio_growth_check(family: Prop28Family, depth: int) -> Q:
    """Min over the deep half of tau_n^* / tau_{n+1}^*.

    Diverges with depth: each step gains at least a 2^(n^2 + 1 - n) factor.
    """
    if depth < 4:
        raise ValueError("depth must be >= 4")
    ratios = [
        family.tau_star(n) / family.tau_star(n + 1) for n in range(1, depth + 1)
    ]
    return min(ratios[deep_start(len(ratios)):])
