import pytest

from porosity import (
    ChainTooShort,
    LengthMismatch,
    NoAdmissibleGaps,
    Q,
    SetSpec,
    TauNotInSet,
    TruncatedSequence,
    chain_cover_ratio,
    chain_embeds,
    chain_separation,
    classify_csp,
    clearance_test,
    cover_ratio_supremum,
    defeat_scan,
    enumerate_points,
    make_set,
    prop28_family,
    ratio_equivalent,
    rescale,
    tau_sample_family,
    universal_chain,
)
from porosity.metrics import FROM_ENUMERATION, USER_SUPPLIED
from conftest import GEO_HALF, SUPER_N2


def seq(values, source=USER_SUPPLIED):
    return TruncatedSequence(values=tuple(values), source=source)


def enum_seq(E, depth):
    return TruncatedSequence(
        values=tuple(enumerate_points(E, depth)), source=FROM_ENUMERATION
    )


class TestTruncatedSequence:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            seq([Q(1), Q(0)])

    def test_last_violation_reported(self):
        assert seq([Q(3), Q(1), Q(2), Q(1, 2)]).last_violation == 1
        assert seq([Q(3), Q(2), Q(1)]).last_violation is None


class TestRatioEquivalence:
    def test_constant_ratio(self):
        a = seq([Q(1, 2 ** n) for n in range(1, 17)])
        g = seq([Q(3, 4) * v for v in a.values])
        result = ratio_equivalent(a, g)
        assert result.equivalent == "yes"
        assert (result.c1, result.c2) == (Q(1, 2), Q(1))

    def test_identity_margins(self):
        a = seq([Q(1, 2 ** n) for n in range(1, 17)])
        result = ratio_equivalent(a, a)
        assert result.equivalent == "yes"
        assert result.c1 < 1 < result.c2
        assert (result.c1, result.c2) == (Q(2, 3), Q(4, 3))

    def test_vanishing_ratio_diverges(self):
        a = seq([Q(1, 2 ** n) for n in range(1, 17)])
        g = seq([Q(1, 2 ** (n * n)) for n in range(1, 17)])
        assert ratio_equivalent(a, g).equivalent == "no"

    def test_bounded_oscillation_is_equivalent(self):
        a = seq([Q(1, 2 ** n) for n in range(1, 17)])
        g = seq([(2 if n % 2 else 1) * Q(1, 2 ** n) for n in range(1, 17)])
        assert ratio_equivalent(a, g).equivalent == "yes"

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            ratio_equivalent(seq([Q(1)] ), seq([Q(1), Q(1, 2)]))


class TestClearance:
    def test_super_geometric_transient_band(self, w_n2):
        tau = enum_seq(w_n2, 24)
        result = clearance_test(w_n2, tau, Q(2), Q(1024), 24)
        assert result.holds_eventually == "yes"
        assert [v.index for v in result.violations] == [1, 2, 3, 4]
        assert result.violations[0].point == Q(1, 2)

    def test_rejects_bad_window(self, w_n2):
        tau = enum_seq(w_n2, 8)
        with pytest.raises(ValueError):
            clearance_test(w_n2, tau, Q(2), Q(2), 8)
        with pytest.raises(ValueError):
            clearance_test(w_n2, tau, Q(1), Q(4), 8)

    def test_membership_scan_rejects_outsiders(self, geo_half):
        tau = seq([Q(1, 3), Q(1, 5)])
        with pytest.raises(TauNotInSet):
            clearance_test(geo_half, tau, Q(2), Q(4), 8)

    def test_parent_sequence_passes_on_union(self):
        family = prop28_family()
        tau = seq([family.tau(n) for n in range(1, 13)])
        result = clearance_test(family.union, tau, Q(2), Q(8), 24)
        assert result.holds_eventually == "yes"
        assert not result.violations

    def test_damped_sequence_fails_on_union(self):
        # the starred sequence is the one whose porosity the union defeats
        family = prop28_family()
        tau = seq([family.tau_star(n) for n in range(1, 25)])
        result = clearance_test(family.union, tau, Q(2), Q(8), 48)
        assert result.holds_eventually == "no"
        expected = [n - 1 for n in range(1, 25) if family.index_class(n) == 2]
        assert [v.index for v in result.violations] == expected
        for violation in result.violations:
            n = violation.index + 1
            assert violation.point == family.tau(n)  # 4 tau* lands inside (2,8)


class TestChainCover:
    def test_vanishing_ratio_costs_one(self, w_n2):
        result = chain_cover_ratio(w_n2, enum_seq(w_n2, 12), 12)
        assert result.value == 1
        assert all(left == t for _, t, left in result.aligned)

    def test_doubled_costs_factor(self, doubled2):
        xs = [Q(1, 2 ** (n * n)) for n in range(1, 13)]
        tau = seq(xs, source=USER_SUPPLIED)
        result = chain_cover_ratio(doubled2, tau, 24)
        assert result.value == 2
        assert all(left == 2 * t for _, t, left in result.aligned)

    def test_doubled_lefts_cost_one(self, doubled2):
        chain = universal_chain(doubled2, 24)
        tau = TruncatedSequence(values=chain.lefts, source=FROM_ENUMERATION)
        assert chain_cover_ratio(doubled2, tau, 24).value == 1

    def test_geometric_is_infinite(self, geo_half):
        result = chain_cover_ratio(geo_half, enum_seq(geo_half, 12), 12)
        assert result.infinite and result.value is None


class TestCoverSupremum:
    @pytest.mark.parametrize("fixture,expected", [("w_n2", 1), ("doubled2", 2), ("doubled3", 3)])
    def test_corpus_values(self, request, fixture, expected):
        E = request.getfixturevalue(fixture)
        result = cover_ratio_supremum(E, 24)
        assert result.value == expected

    def test_geometric_infinite(self, geo_half):
        assert cover_ratio_supremum(geo_half, 16).infinite

    def test_samples_cover_endpoints(self, doubled2):
        labels = {t.rule_label for t in tau_sample_family(doubled2, 24)}
        assert "enumeration-suffix-0" in labels
        assert "chain-lefts-0" in labels and "chain-rights-0" in labels


class TestUniversalChain:
    def test_w_chain_and_separation(self, w_n2):
        chain = universal_chain(w_n2, 12)
        points = enumerate_points(w_n2, 12)
        assert chain.lefts == tuple(points[1:])
        separation = chain_separation(chain)
        assert separation.value == 1 and separation.converged

    def test_doubled_separation(self, doubled2):
        separation = chain_separation(universal_chain(doubled2, 24))
        assert separation.value == 2 and separation.converged

    def test_no_admissible_gaps(self, geo_half):
        with pytest.raises(NoAdmissibleGaps):
            universal_chain(geo_half, 12)

    def test_short_chain_rejected(self, w_n2):
        chain = universal_chain(w_n2, 3)
        with pytest.raises(ChainTooShort):
            chain_separation(chain)

    def test_separation_at_least_one(self, w_n2, doubled2, doubled3):
        for E in (w_n2, doubled2, doubled3):
            assert chain_separation(universal_chain(E, 24)).value >= 1

    def test_every_admissible_chain_embeds(self, doubled2):
        from porosity import admissible_chains

        universal = universal_chain(doubled2, 24)
        for chain in admissible_chains(doubled2, 24):
            assert chain_embeds(chain, universal)


class TestClassifier:
    def test_trivial_branch(self):
        E = make_set(SetSpec("explicit", {"points": ["1"]}))
        cert = classify_csp(E, 8)
        assert cert.verdict == "csp" and cert.trivial_branch
        assert cert.M_value is None

    def test_vanishing_ratio_certified(self, w_n2):
        cert = classify_csp(w_n2, 24)
        assert cert.verdict == "csp"
        assert cert.M_value == 1 and cert.M_converged
        assert cert.C_E_value == 1
        assert cert.universal is not None

    def test_geometric_not_csp_with_witness(self, geo_half):
        cert = classify_csp(geo_half, 24)
        assert cert.verdict == "not-csp"
        assert cert.defeats and cert.witness_tau is not None

    def test_slowly_porous_geometric_still_not_csp(self):
        # every gap is admissible here, yet the point ladder recurs in
        # every scaled window: negative evidence must win
        E = make_set(SetSpec("geometric", {"ratio": "1/8"}))
        assert classify_csp(E, 24).verdict == "not-csp"

    def test_witness_violations_recheck(self):
        family = prop28_family()
        cert = classify_csp(family.union, 24)
        assert cert.verdict == "not-csp"
        points = set(enumerate_points(family.union, 24))
        tau = cert.witness_tau.values
        for defeat in cert.defeats:
            for violation in defeat.violations:
                assert violation.point in points
                t = tau[violation.index]
                assert defeat.k * t < violation.point < defeat.K * t

    def test_indeterminate_when_window_too_small(self, w_n2):
        cert = classify_csp(w_n2, 6, epsilon=Q(1, 64))
        assert cert.verdict == "indeterminate"
        assert cert.reason == "chain-too-short"

    def test_no_admissible_reason(self):
        E = make_set(SetSpec("explicit", {"points": ["1", "1/2"], "tail": GEO_HALF}))
        cert = classify_csp(E, 12, epsilon=Q(1, 64))
        assert cert.verdict in ("not-csp", "indeterminate")

    @pytest.mark.parametrize("t", [Q(2), Q(7, 5)])
    def test_scale_invariant_verdicts(self, doubled2, t):
        base = classify_csp(doubled2, 24)
        scaled = classify_csp(rescale(doubled2, t), 24)
        assert (scaled.verdict, scaled.M_value, scaled.C_E_value) == (
            base.verdict,
            base.M_value,
            base.C_E_value,
        )


class TestDefeatScan:
    def test_certified_ks_block_witness(self, doubled3):
        tau = enum_seq(doubled3, 24)
        outcome = defeat_scan(doubled3, tau, 24)
        # the layer ratio 3 genuinely recurs inside (2, K), but k >= 4 is
        # certified clean by the recurring-ratio bound
        assert any(d.k == 2 for d in outcome.defeats)
        assert outcome.certified_ks and min(outcome.certified_ks) == 4
        assert not outcome.witness

    def test_union_witnesses(self):
        family = prop28_family()
        tau = enum_seq(family.union, 24)
        outcome = defeat_scan(family.union, tau, 24)
        assert outcome.witness
        assert not outcome.certified_ks
        assert len([d for d in outcome.defeats if d.k == 2]) >= 3


class TestClearanceHorizon:
    def test_first_good_index_after_transient_band(self, w_n2):
        tau = enum_seq(w_n2, 24)
        result = clearance_test(w_n2, tau, Q(2), Q(1024), 24)
        assert result.first_good_index == 5  # violations stop at index 4
        assert result.certified_escape

    def test_clean_scan_reports_zero(self, w_n2):
        tau = enum_seq(w_n2, 24)
        result = clearance_test(w_n2, tau, Q(2), Q(3), 24)
        assert result.holds_eventually == "yes"
        assert result.first_good_index == 0 and not result.violations


class TestClassifierConsistency:
    def test_csp_sets_are_strongly_porous(self, w_n2, doubled2, doubled3):
        # a csp verdict must come with the porosity estimate heading to 1
        from porosity import porosity_plus

        for E in (w_n2, doubled2, doubled3):
            assert classify_csp(E, 24).verdict == "csp"
            assert porosity_plus(E, 24).estimate > 1 - Q(1, 2 ** 16)
        # the depth-halving flag needs one more doubling on the doubled sets
        assert porosity_plus(w_n2, 24).converged
        assert porosity_plus(doubled2, 48).converged


class TestExplicitListSnapshots:
    def test_exhausted_list_is_trivially_csp(self):
        E = make_set(SetSpec("explicit", {"points": ["1", "1/2", "1/4"]}))
        cert = classify_csp(E, 8)
        assert cert.verdict == "csp" and cert.trivial_branch

    def test_unexhausted_list_is_indeterminate(self):
        points = [str(Q(1, n)) for n in range(1, 41)]
        E = make_set(SetSpec("explicit", {"points": points}))
        cert = classify_csp(E, 24)
        assert cert.verdict == "indeterminate"
        assert cert.reason == "finite-list-unexhausted"
        assert classify_csp(E, 40).verdict == "csp"


class TestSlowAdmissibilityOnset:
    def test_doubled_factorial_small_factor(self):
        # gap admissibility only kicks in a few levels down here; the cover
        # ratio must skip the uncoverable prefix instead of calling the
        # full-enumeration sample infinite
        E = make_set(
            SetSpec(
                "doubled",
                {"base": {"kind": "factorial-decay", "params": {}}, "factor": "3/2"},
            )
        )
        cert = classify_csp(E, 20)
        assert cert.verdict == "csp"
        assert cert.M_value == cert.C_E_value == Q(3, 2)
