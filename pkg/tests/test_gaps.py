import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from porosity import (
    DepthExceedsFiniteSet,
    NoAdmissibleGaps,
    Q,
    SetSpec,
    WindowNotCovered,
    ZeroIsolated,
    admissible_chains,
    enumerate_points,
    gaps,
    largest_gap_length,
    make_set,
    porosity_plus,
    rescale,
    union_sets,
)
from porosity.verify import oracle_largest_gap
from conftest import FACTORIAL, GEO_HALF, SUPER_N2


class TestGaps:
    def test_consecutive_components(self, geo_half):
        result = gaps(geo_half, 3)
        assert [(g.left, g.right) for g in result] == [
            (Q(1, 4), Q(1, 2)),
            (Q(1, 8), Q(1, 4)),
        ]

    def test_doubled_alternates_small_and_large(self, doubled2):
        result = gaps(doubled2, 4)
        assert [(g.left, g.right) for g in result] == [
            (Q(1, 2), Q(1)),
            (Q(1, 8), Q(1, 2)),
            (Q(1, 16), Q(1, 8)),
        ]
        assert [g.relative_length for g in result] == [Q(1, 2), Q(3, 4), Q(1, 2)]

    def test_finite_set_too_small(self):
        E = make_set(SetSpec("explicit", {"points": ["1"]}))
        with pytest.raises(DepthExceedsFiniteSet):
            gaps(E, 2)

    def test_gap_count(self, w_n2):
        assert len(gaps(w_n2, 9)) == 8

    @given(depth=st.integers(min_value=2, max_value=12))
    @settings(max_examples=20, deadline=None)
    def test_gaps_contain_no_points(self, depth):
        E = make_set(SetSpec("prop28", {"member": "union"}))
        points = set(enumerate_points(E, depth + 4))
        for gap in gaps(E, depth):
            assert not any(gap.left < p < gap.right for p in points)


class TestLargestGap:
    def test_boundary_gap(self, geo_half):
        measure = largest_gap_length(geo_half, Q(1), 8)
        assert measure.value == Q(1, 2)
        assert (measure.witness.left, measure.witness.right) == (Q(1, 2), Q(1))

    def test_empty_window_of_finite_set(self):
        E = make_set(SetSpec("explicit", {"points": ["1"]}))
        measure = largest_gap_length(E, Q(1, 2), 1)
        assert measure.value == Q(1, 2)
        assert not measure.partial

    def test_tie_breaks_to_largest_left(self, geo_half):
        measure = largest_gap_length(geo_half, Q(3, 8), 8)
        assert measure.value == Q(1, 8)
        assert measure.witness.left == Q(1, 4)

    def test_window_below_enumeration(self, geo_half):
        with pytest.raises(WindowNotCovered):
            largest_gap_length(geo_half, Q(1, 1024), 4)

    @given(
        h=st.fractions(min_value=Q(1, 50), max_value=2, max_denominator=50),
        values=st.lists(
            st.fractions(min_value=Q(1, 64), max_value=1, max_denominator=64),
            min_size=2,
            max_size=20,
            unique=True,
        ),
    )
    @settings(max_examples=60, deadline=None)
    def test_matches_exhaustive_oracle(self, h, values):
        E = make_set(SetSpec("explicit", {"points": [str(v) for v in values]}))
        points, complete = E.take(len(values))
        assert complete
        measure = largest_gap_length(E, h, len(values))
        assert Q(0) <= measure.value <= h
        assert measure.value == oracle_largest_gap(points, h, complete=True)

    def test_monotone_in_set_inclusion(self, geo_half):
        h = Q(1)
        larger = union_sets(geo_half, make_set(SetSpec("explicit", {"points": ["3/8"]})))
        assert (
            largest_gap_length(larger, h, 9).value
            <= largest_gap_length(geo_half, h, 8).value
        )


class TestPorosityEstimate:
    @pytest.mark.parametrize("q", [Q(1, 2), Q(1, 3), Q(9, 10)])
    def test_geometric_exact(self, q):
        E = make_set(SetSpec("geometric", {"ratio": q}))
        result = porosity_plus(E, 16)
        assert result.estimate == 1 - q
        assert result.converged

    def test_vanishing_ratio_tends_to_one(self, w_n2):
        result = porosity_plus(w_n2, 16)
        assert result.estimate == 1 - Q(1, 2 ** 31)
        assert not result.converged  # halving gap still 2^-15 at this depth
        assert porosity_plus(w_n2, 18).converged

    def test_zero_isolated_degenerate(self):
        E = make_set(SetSpec("explicit", {"points": ["1"]}))
        with pytest.raises(ZeroIsolated):
            porosity_plus(E, 4)

    def test_estimates_live_in_unit_interval(self):
        for spec in (GEO_HALF, SUPER_N2, FACTORIAL):
            result = porosity_plus(make_set(spec), 20)
            assert Q(0) <= result.estimate <= Q(1)

    @pytest.mark.parametrize("t", [Q(2), Q(1, 3), Q(7, 5)])
    def test_scale_invariance(self, w_n2, t):
        base = porosity_plus(w_n2, 16)
        scaled = porosity_plus(rescale(w_n2, t), 16)
        assert (scaled.estimate, scaled.converged, scaled.partial) == (
            base.estimate,
            base.converged,
            base.partial,
        )
        assert scaled.witness_h == t * base.witness_h


class TestAdmissibleChains:
    def test_geometric_has_none_at_default_epsilon(self, geo_half):
        with pytest.raises(NoAdmissibleGaps):
            admissible_chains(geo_half, 8, Q(1, 4))

    def test_vanishing_ratio_keeps_all_consecutive_gaps(self, w_n2):
        chains = admissible_chains(w_n2, 6, Q(1, 4))
        assert len(chains) == 1
        points = enumerate_points(w_n2, 6)
        assert chains[0].lefts == tuple(points[1:])

    def test_doubled_keeps_only_large_gaps(self, doubled2):
        chain = admissible_chains(doubled2, 12, Q(1, 4))[0]
        xs = [Q(1, 2 ** (n * n)) for n in range(1, 7)]
        assert chain.lefts == tuple(2 * x for x in xs[1:])
        assert chain.rights == tuple(xs[:-1])

    def test_chain_respects_threshold(self, doubled2):
        chain = admissible_chains(doubled2, 12, Q(1, 4))[0]
        assert all(g.relative_length >= Q(3, 4) for g in chain.gaps)


class TestPartialFlag:
    def test_slow_geometric_tail_is_partial(self):
        E = make_set(SetSpec("geometric", {"ratio": "9/10"}))
        # the achieving window's floor point exceeds the best certified gap
        assert porosity_plus(E, 16).partial

    def test_half_geometric_not_partial(self, geo_half):
        assert not porosity_plus(geo_half, 16).partial

    def test_vanishing_ratio_not_partial(self, w_n2):
        assert not porosity_plus(w_n2, 16).partial


class TestConcurrency:
    def test_parallel_equals_sequential(self, w_n2, doubled2):
        from concurrent.futures import ThreadPoolExecutor

        jobs = [(w_n2, 12), (doubled2, 12), (w_n2, 16), (doubled2, 16)] * 3
        sequential = [porosity_plus(E, d) for E, d in jobs]
        with ThreadPoolExecutor(max_workers=4) as pool:
            parallel = list(pool.map(lambda j: porosity_plus(*j), jobs))
        assert parallel == sequential
