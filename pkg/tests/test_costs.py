import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from costfree import (
    CostWarning,
    NormalizedCosts,
    RawCostMatrix,
    check_feasibility,
    conditional_risk,
    equivalent_misclassification_cost,
    equivalent_rejection_costs,
    normalize_costs,
    optimal_threshold,
    rejection_thresholds_from_costs,
    risk,
)


@st.composite
def feasible_tuples(draw):
    """(lambda_fp, t_rn, t_rp) strictly inside the admissible bands."""
    fp = draw(st.floats(0.05, 5.0))
    u = draw(st.floats(0.02, 0.98))
    v = draw(st.floats(0.02, 0.98))
    t_rn = u * fp / (1.0 + fp)
    t_rp = v * 1.0 / (1.0 + fp)
    return fp, t_rn, t_rp


class TestNormalize:
    def test_unit_matrix(self):
        got = normalize_costs(RawCostMatrix([[0, 1], [1, 0]]))
        assert got.lambda_fp == 1.0
        assert not got.abstaining

    def test_asymmetric_matrix(self):
        got = normalize_costs(RawCostMatrix([[0, 2], [5, 0]]))
        assert got.lambda_fp == pytest.approx(2 / 5)

    def test_nonzero_diagonal(self):
        # correct-decision costs shift out, beta = 7 - 1 = 6
        got = normalize_costs(RawCostMatrix([[1, 4], [7, 1]]))
        assert got.lambda_fp == pytest.approx((4 - 1) / 6)

    def test_full_table(self):
        got = normalize_costs(RawCostMatrix([[0.0, 2.0, 0.5], [4.0, 0.0, 1.0]]))
        assert got.lambda_fp == pytest.approx(0.5)
        assert got.lambda_rn == pytest.approx(0.125)
        assert got.lambda_rp == pytest.approx(0.25)

    def test_fp_agrees_between_modes(self):
        raw = RawCostMatrix([[1.0, 4.0, 2.0], [7.0, 1.0, 3.0]])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CostWarning)
            both = normalize_costs(raw)
            plain = normalize_costs(raw, abstaining=False)
        assert both.lambda_fp == plain.lambda_fp
        assert both.abstaining and not plain.abstaining

    def test_nonpositive_beta_rejected(self):
        with pytest.raises(ValueError):
            normalize_costs(RawCostMatrix([[0, 1], [0, 0]]))

    def test_reject_column_required_when_requested(self):
        with pytest.raises(ValueError):
            normalize_costs(RawCostMatrix([[0, 1], [1, 0]]), abstaining=True)

    def test_raw_validation(self):
        with pytest.raises(ValueError):
            RawCostMatrix([[0, 1, 0, 0], [1, 0, 0, 0]])
        with pytest.raises(ValueError):
            RawCostMatrix([[2, 1], [1, 0]])  # correct dearer than error
        with pytest.raises(ValueError):
            RawCostMatrix([[0, np.inf], [1, 0]])


class TestNormalizedCosts:
    def test_rejection_costs_come_in_pairs(self):
        with pytest.raises(ValueError):
            NormalizedCosts(lambda_fp=1.0, lambda_rn=0.5)

    def test_out_of_band_warns(self):
        with pytest.warns(CostWarning):
            NormalizedCosts(lambda_fp=0.5, lambda_rn=0.7, lambda_rp=0.3)
        with pytest.warns(CostWarning):
            NormalizedCosts(lambda_fp=0.5, lambda_rn=0.3, lambda_rp=1.2)

    def test_as_matrix_layout(self):
        costs = NormalizedCosts(lambda_fp=0.4, lambda_rn=0.2, lambda_rp=0.3)
        assert costs.as_matrix().tolist() == [[0.0, 0.4, 0.2], [1.0, 0.0, 0.3]]

    def test_nonpositive_fp_rejected(self):
        with pytest.raises(ValueError):
            NormalizedCosts(lambda_fp=0.0)


class TestRisk:
    def test_perfect_outcomes_cost_nothing(self):
        costs = NormalizedCosts(lambda_fp=0.4, lambda_rn=0.2, lambda_rp=0.3)
        outcomes = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        assert risk(costs, outcomes, np.array([0.7, 0.3])) == 0.0

    def test_hand_computed(self):
        costs = NormalizedCosts(lambda_fp=0.4, lambda_rn=0.2, lambda_rp=0.3)
        outcomes = np.array([[0.8, 0.1, 0.1], [0.2, 0.6, 0.2]])
        expected = 0.7 * (0.1 * 0.4 + 0.1 * 0.2) + 0.3 * (0.2 * 1.0 + 0.2 * 0.3)
        assert risk(costs, outcomes, np.array([0.7, 0.3])) == pytest.approx(expected)

    def test_conditional_risk(self):
        costs = NormalizedCosts(lambda_fp=0.4, lambda_rn=0.2, lambda_rp=0.3)
        got = conditional_risk(costs, np.array([0.6, 0.4]))
        assert got.tolist() == pytest.approx([0.4, 0.24, 0.24])


class TestOptimalThreshold:
    def test_symmetric_costs(self):
        assert optimal_threshold(1.0) == 0.5

    def test_diabetes_weight(self):
        assert optimal_threshold(0.3725) == pytest.approx(0.2714, abs=5e-5)

    def test_threshold_rule_matches_risk_argmin(self):
        fp = 0.6
        tau = optimal_threshold(fp)
        costs = NormalizedCosts(lambda_fp=fp)
        table = np.array([[0.0, fp], [1.0, 0.0]])
        for p in np.linspace(0.01, 0.99, 23):
            risks = np.array([1 - p, p]) @ table
            by_rule = 2 if p >= tau else 1
            by_risk = int(np.argmin(risks)) + 1
            if abs(p - tau) > 1e-12:
                assert by_rule == by_risk
        assert costs.lambda_fp == fp


class TestEquivalentMisclassificationCost:
    def test_identity_diabetes(self):
        assert equivalent_misclassification_cost(0.3725) == 0.3725

    def test_identity_rooftop(self):
        assert equivalent_misclassification_cost(0.1372) == 0.1372

    def test_weight_at_one_warns(self):
        with pytest.warns(CostWarning):
            equivalent_misclassification_cost(1.0)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            equivalent_misclassification_cost(0.0)


class TestEquivalentRejectionCosts:
    def test_diabetes_row(self):
        rn, rp = equivalent_rejection_costs(0.3725, 0.1725, 0.5284)
        assert rn == pytest.approx(0.1585, abs=5e-4)
        assert rp == pytest.approx(0.2398, abs=5e-4)

    def test_ism_row(self):
        rn, rp = equivalent_rejection_costs(0.2312, 0.0743, 0.7643)
        assert rn == pytest.approx(0.0272, abs=5e-4)
        assert rp == pytest.approx(0.6616, abs=5e-4)

    def test_zero_thresholds_zero_costs(self):
        assert equivalent_rejection_costs(0.5, 0.0, 0.0) == (0.0, 0.0)

    def test_thresholds_summing_to_one_rejected(self):
        with pytest.raises(ValueError):
            equivalent_rejection_costs(0.5, 0.4, 0.6)

    def test_threshold_bounds(self):
        with pytest.raises(ValueError):
            equivalent_rejection_costs(0.5, 1.0, 0.2)
        with pytest.raises(ValueError):
            equivalent_rejection_costs(0.5, -0.1, 0.2)


class TestRejectionThresholdsFromCosts:
    def test_diabetes_row_forward(self):
        costs = NormalizedCosts(lambda_fp=0.3725, lambda_rn=0.1585, lambda_rp=0.2398)
        t_rn, t_rp = rejection_thresholds_from_costs(costs)
        assert t_rn == pytest.approx(0.1725, abs=5e-4)
        assert t_rp == pytest.approx(0.5284, abs=5e-4)

    def test_equal_rejection_costs_identity(self):
        # with both rejection costs equal to c, the negative threshold is c
        for c in (0.1, 0.25, 0.4):
            costs = NormalizedCosts(lambda_fp=0.5, lambda_rn=c, lambda_rp=c)
            t_rn, t_rp = rejection_thresholds_from_costs(costs)
            assert t_rn == pytest.approx(c, abs=1e-12)
            assert t_rp == pytest.approx(c / 0.5, abs=1e-12)

    def test_requires_rejection_costs(self):
        with pytest.raises(ValueError):
            rejection_thresholds_from_costs(NormalizedCosts(lambda_fp=0.5))

    @given(feasible_tuples())
    @settings(max_examples=200, deadline=None)
    def test_round_trip_identity(self, tpl):
        fp, t_rn, t_rp = tpl
        rn, rp = equivalent_rejection_costs(fp, t_rn, t_rp)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CostWarning)
            costs = NormalizedCosts(lambda_fp=fp, lambda_rn=rn, lambda_rp=rp)
        back_rn, back_rp = rejection_thresholds_from_costs(costs)
        assert back_rn == pytest.approx(t_rn, abs=1e-10)
        assert back_rp == pytest.approx(t_rp, abs=1e-10)

    @given(feasible_tuples())
    @settings(max_examples=200, deadline=None)
    def test_feasible_thresholds_give_in_band_costs(self, tpl):
        fp, t_rn, t_rp = tpl
        rn, rp = equivalent_rejection_costs(fp, t_rn, t_rp)
        assert 0.0 < rn < fp
        assert 0.0 < rp < 1.0


class TestCheckFeasibility:
    def test_diabetes_row_all_satisfied(self):
        rep = check_feasibility(0.3725, 0.1725, 0.5284)
        assert rep.threshold_bands_ok
        assert rep.cost_bands_ok
        assert rep.consistent
        assert not rep.boundary

    def test_saturated_thresholds_violated(self):
        rep = check_feasibility(0.1, 0.9, 0.9)
        assert not rep.threshold_bands_ok
        assert not rep.cost_bands_ok
        assert not rep.boundary

    def test_one_sided_violation_is_inconsistency_visible(self):
        rep = check_feasibility(0.1, 0.9, 0.09)
        assert not rep.threshold_bands_ok
        assert rep.consistent == (rep.threshold_bands_ok == rep.cost_bands_ok)

    def test_zero_thresholds_boundary(self):
        rep = check_feasibility(0.5, 0.0, 0.0)
        assert rep.boundary
        assert rep.consistent
        assert rep.lambda_rn == 0.0
        assert rep.lambda_rp == 0.0

    def test_reports_equivalent_costs(self):
        rep = check_feasibility(0.3725, 0.1725, 0.5284)
        assert rep.lambda_rn == pytest.approx(0.1585, abs=5e-4)
        assert rep.lambda_rp == pytest.approx(0.2398, abs=5e-4)

    @given(feasible_tuples())
    @settings(max_examples=150, deadline=None)
    def test_strict_band_equivalence(self, tpl):
        fp, t_rn, t_rp = tpl
        rep = check_feasibility(fp, t_rn, t_rp)
        assert rep.threshold_bands_ok
        assert rep.cost_bands_ok
        assert rep.consistent
