import math

import pytest

from porosity import (
    EmptyFamily,
    LengthMismatch,
    Q,
    SetSpec,
    TruncatedSequence,
    ZeroIsolated,
    build_self_stable,
    family_profile,
    is_normal_scaling,
    limit_ratio,
    make_set,
    monotone_envelope,
    sample_radius_bounds,
    space_extremes,
)
from porosity.metrics import USER_SUPPLIED


def xs(depth):
    return [Q(1, 2 ** (n * n)) for n in range(1, depth + 1)]


def zeros(length):
    return tuple(Q(0) for _ in range(length))


class TestLimitRatio:
    def test_constant_one(self):
        values = tuple(xs(16))
        result = limit_ratio(values, zeros(16), values)
        assert result.status == "stable"
        assert result.limit == 1 and result.oscillation == 0

    def test_constant_two(self):
        values = tuple(xs(16))
        doubled = tuple(2 * v for v in values)
        result = limit_ratio(doubled, zeros(16), values)
        assert result.status == "stable" and result.limit == 2

    def test_alternating_is_unstable(self):
        scale = tuple(Q(1, 2 ** n) for n in range(1, 17))
        wobble = tuple((2 if n % 2 else 1) * v for n, v in enumerate(scale))
        result = limit_ratio(wobble, zeros(16), scale)
        assert result.status == "unstable"
        assert result.oscillation == 1

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            limit_ratio(zeros(8), zeros(9), tuple(xs(8)) + (Q(1),))

    def test_restriction_to_positions(self):
        values = tuple(xs(16))
        doubled = tuple(2 * v for v in values)
        sub = limit_ratio(doubled, zeros(16), values, positions=range(0, 16, 2))
        assert sub.status == "stable" and sub.limit == 2


class TestMonotoneEnvelope:
    def test_running_minimum(self):
        raw = TruncatedSequence(
            values=(Q(3), Q(1), Q(2), Q(1, 2)), source=USER_SUPPLIED
        )
        assert monotone_envelope(raw).values == (Q(3), Q(1), Q(1), Q(1, 2))

    def test_decreasing_unchanged(self):
        raw = TruncatedSequence(values=(Q(3), Q(2), Q(1)), source=USER_SUPPLIED)
        assert monotone_envelope(raw).values == raw.values

    def test_increasing_flattens(self):
        raw = TruncatedSequence(values=(Q(1), Q(2), Q(3)), source=USER_SUPPLIED)
        assert monotone_envelope(raw).values == (Q(1), Q(1), Q(1))


class TestNormalScaling:
    def test_set_valued_scaling_is_normal(self, w_n2):
        result = is_normal_scaling(w_n2, tuple(xs(16)), 16)
        assert result.normal == "yes"
        assert result.witness.values == tuple(xs(16))
        assert result.max_deep_deviation == 0

    def test_power_scaling_not_normal(self, w_n2):
        scaling = tuple(Q(1, n) for n in range(1, 17))
        assert is_normal_scaling(w_n2, scaling, 16).normal == "no"

    def test_off_grid_geometric_scaling(self, geo_half):
        scaling = tuple(Q(3, 2 ** (n + 1)) for n in range(1, 17))
        result = is_normal_scaling(geo_half, scaling, 20)
        assert result.normal == "no"
        # nearest points sit at ratio 2/3 or 4/3: deviation exactly 1/3
        assert result.max_deep_deviation == Q(1, 3)

    def test_zero_isolated(self):
        E = make_set(SetSpec("explicit", {"points": ["1"]}))
        with pytest.raises(ZeroIsolated):
            is_normal_scaling(E, (Q(1),) * 8, 1)


class TestSelfStable:
    def test_three_class_space(self, doubled2):
        scale = tuple(xs(16))
        pool = [scale, tuple(2 * v for v in scale)]
        omega = build_self_stable(doubled2, scale, pool)
        assert [c.distance for c in omega.classes] == [0, 1, 2]
        assert omega.distances[1][2] == 1
        assert omega.triangle_violations() == []

    def test_zero_distance_members_merge(self, doubled2):
        scale = tuple(xs(16))
        jitter = tuple(v * (1 + Q(1, 2 ** (20 + n))) for n, v in enumerate(scale))
        omega = build_self_stable(doubled2, scale, [scale, jitter])
        assert len(omega.classes) == 2
        assert omega.classes[1].members == (0, 1)

    def test_empty_pool_gives_one_point_space(self, doubled2):
        omega = build_self_stable(doubled2, tuple(xs(16)), [])
        extremes = space_extremes(omega)
        assert extremes.rho_star == 0 and extremes.rho_low == math.inf

    def test_unstable_candidate_rejected(self, doubled2):
        scale = tuple(xs(16))
        flip = tuple((2 * v if n % 2 else v) for n, v in enumerate(scale))
        omega = build_self_stable(doubled2, scale, [flip])
        assert omega.rejected == ((0, "unstable"),)

    def test_half_switch_triggers_extraction(self, doubled2):
        scale = tuple(xs(16))
        switch = tuple((v if n < 8 else 2 * v) for n, v in enumerate(scale))
        omega = build_self_stable(doubled2, scale, [switch])
        assert not omega.rejected
        assert len(omega.frame) < 16  # a subsequence was extracted
        assert omega.classes[-1].distance in (1, 2)

    def test_extremes_two_classes(self, doubled2):
        scale = tuple(xs(16))
        omega = build_self_stable(doubled2, scale, [scale])
        extremes = space_extremes(omega)
        assert extremes.rho_star == extremes.rho_low == 1


class TestRadiusBounds:
    def test_vanishing_ratio_unit_bounds(self, w_n2):
        bounds = sample_radius_bounds(w_n2, 16)
        assert bounds.R_star == bounds.cover_value == 1
        assert bounds.R_low == 1
        assert all(s.has_unit_class for s in bounds.spaces)

    def test_doubled_attains_factor(self, doubled2):
        bounds = sample_radius_bounds(doubled2, 16)
        assert bounds.R_star == bounds.cover_value == 2
        assert bounds.R_low == Q(1, 2)
        assert bounds.R_star * bounds.R_low == 1
        assert any(s.label == "cover-witness" for s in bounds.spaces)

    def test_rho_star_below_cover_supremum(self, doubled2):
        bounds = sample_radius_bounds(doubled2, 16)
        assert all(s.rho_star <= bounds.cover_value for s in bounds.spaces)

    def test_zero_isolated_rejected(self):
        E = make_set(SetSpec("explicit", {"points": ["1"]}))
        with pytest.raises(ZeroIsolated):
            sample_radius_bounds(E, 8)


class TestFamilyProfile:
    def test_single_space(self):
        profile = family_profile([[Q(0), Q(1), Q(2)]])
        assert profile.max_radius_ratio == 2
        assert profile.spheres_nonempty
        assert not profile.weakly_self_similar  # {0, 1/2, 1} is missing

    def test_closed_pair(self):
        profile = family_profile([[Q(0), Q(1), Q(2)], [Q(0), Q(1, 2), Q(1)]])
        assert profile.weakly_self_similar
        assert profile.max_radius_ratio == 2
        assert profile.radius_inf == Q(1, 2)

    def test_unit_interval_space(self):
        profile = family_profile([[Q(0), Q(1)]])
        assert profile.max_radius_ratio == 1 and profile.weakly_self_similar

    def test_one_point_space(self):
        profile = family_profile([[Q(0)]])
        assert profile.radius_inf == math.inf
        assert profile.max_radius_ratio == 0

    def test_empty_family(self):
        with pytest.raises(EmptyFamily):
            family_profile([])

    def test_marked_point_required(self):
        with pytest.raises(ValueError):
            family_profile([[Q(1), Q(2)]])


class TestScalingSequenceType:
    def test_wraps_truncated_sequence(self, w_n2):
        from porosity import ScalingSequence, is_normal_scaling
        from porosity.metrics import FROM_ENUMERATION

        values = TruncatedSequence(values=tuple(xs(16)), source=FROM_ENUMERATION)
        scaling = ScalingSequence(values=values, label="level-points")
        result = is_normal_scaling(w_n2, scaling, 16)
        assert result.normal == "yes"
        wrapped = ScalingSequence(values=values, normal_witness=result.witness)
        check = limit_ratio(values.values, zeros(16), wrapped)
        assert check.status == "stable" and check.limit == 1


class TestProductLawBeyondPowersOfTwo:
    def test_doubled_factorial_three_halves(self):
        from porosity import SetSpec, make_set

        E = make_set(
            SetSpec(
                "doubled",
                {"base": {"kind": "factorial-decay", "params": {}}, "factor": "3/2"},
            )
        )
        bounds = sample_radius_bounds(E, 20)
        assert bounds.R_star == bounds.cover_value == Q(3, 2)
        assert bounds.R_low == Q(2, 3)
        assert bounds.R_star * bounds.R_low == 1
