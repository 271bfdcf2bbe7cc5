"""
Unit tests for the inventory system model.
"""

import numpy as np
import pytest
from scipy import integrate, stats

from conftest import make_system
from tools.model import (
    DemandSpec,
    LocationParams,
    SystemConfig,
    classify_inventory,
    evaluate_scenario,
    evaluate_scenarios,
    validate_config,
)
from utils.validators import ConfigValidationError, ValidationError


def _table1(tau12=0.5, tau21=0.5, period_duration=None):
    return make_system(
        holding=[3.0, 3.0],
        shortage=[2.0, 2.0],
        tau=[[0.0, tau12], [tau21, 0.0]],
        lead=[[0.0, 5.0], [5.0, 0.0]],
        period_duration=period_duration,
    )


class TestValidateConfig:
    """Tests for system configuration validation."""

    def test_table1_accepted(self):
        """Test the table1 system with a period of 10 is accepted."""
        config = _table1(period_duration=10.0)
        assert validate_config(config) is config

    def test_default_period_duration(self, table1_config):
        """Test period_duration defaults to the longest lead time plus one."""
        assert table1_config.period_duration == 6.0
        validate_config(table1_config)

    def test_lead_equal_to_period_rejected(self):
        """Test L_ij equal to the period violates the lead-time bound."""
        config = _table1(period_duration=5.0)
        with pytest.raises(ConfigValidationError) as excinfo:
            validate_config(config)
        assert excinfo.value.field == "lead_time"
        assert excinfo.value.index == (0, 1)

    def test_negative_transship_cost_rejected(self):
        """Test a negative tau entry is rejected with its indices."""
        config = _table1(tau12=-1.0)
        with pytest.raises(ConfigValidationError) as excinfo:
            validate_config(config)
        assert excinfo.value.field == "transship_cost"
        assert excinfo.value.index == (0, 1)

    def test_negative_costs_rejected(self):
        """Test negative holding or shortage costs are rejected."""
        config = make_system([3.0, -1.0], [2.0, 2.0], [[0, 1], [1, 0]], [[0, 1], [1, 0]])
        with pytest.raises(ConfigValidationError, match=r"locations\[1\].holding_cost"):
            validate_config(config)

    def test_negative_std_dev_rejected(self):
        """Test a negative demand standard deviation is rejected."""
        config = make_system([1.0], [1.0], [[0]], [[0]], std_devs=[-5.0])
        with pytest.raises(ConfigValidationError, match="std_dev"):
            validate_config(config)

    def test_wrong_matrix_size_rejected(self):
        """Test a matrix not matching the location count is rejected."""
        config = make_system([1.0, 1.0], [1.0, 1.0], [[0.0]], [[0, 1], [1, 0]])
        with pytest.raises(ConfigValidationError, match="transship_cost"):
            validate_config(config)

    def test_unknown_demand_kind_rejected(self):
        """Test only normal demand is supported."""
        loc = LocationParams(1.0, 1.0, DemandSpec(100.0, 10.0, kind="poisson"))
        config = SystemConfig(locations=(loc,), transship_cost=[[0.0]], lead_time=[[0.0]])
        with pytest.raises(ConfigValidationError, match="demand kind"):
            validate_config(config)

    def test_matrices_are_read_only(self, table1_config):
        """Test configs cannot be mutated after construction."""
        with pytest.raises(ValueError):
            table1_config.transship_cost[0, 1] = 3.0


class TestDemandSpec:
    """Tests for clamped normal demand."""

    def test_samples_nonnegative(self):
        """Test sampled demand is clamped at zero."""
        spec = DemandSpec(mean=10.0, std_dev=50.0)
        draws = spec.sample(np.random.default_rng(0), 10_000)
        assert draws.min() >= 0.0
        assert (draws == 0.0).any()

    def test_degenerate_distribution(self):
        """Test std_dev=0 always yields the mean."""
        draws = DemandSpec(mean=100.0, std_dev=0.0).sample(np.random.default_rng(1), 100)
        assert np.all(draws == 100.0)

    def test_expected_value_matches_integration(self):
        """Test E[max(X, 0)] against numeric integration."""
        spec = DemandSpec(mean=10.0, std_dev=30.0)
        reference, _ = integrate.quad(lambda x: x * stats.norm.pdf(x, 10.0, 30.0), 0, np.inf)
        assert spec.expected_value() == pytest.approx(reference, rel=1e-8)


class TestClassifyInventory:
    """Tests for surplus/shortage classification."""

    def test_mixed(self):
        """Test S=(10,0), D=(4,5)."""
        surplus, shortage = classify_inventory([10, 0], [4, 5])
        np.testing.assert_array_equal(surplus, [6, 0])
        np.testing.assert_array_equal(shortage, [0, 5])

    def test_balanced(self):
        """Test S=D leaves nothing."""
        surplus, shortage = classify_inventory([7, 3], [7, 3])
        assert not surplus.any() and not shortage.any()

    def test_disjoint_sets(self):
        """Test S=(100,100), D=(120,80)."""
        surplus, shortage = classify_inventory([100, 100], [120, 80])
        np.testing.assert_array_equal(surplus, [0, 20])
        np.testing.assert_array_equal(shortage, [20, 0])
        assert not np.any((surplus > 0) & (shortage > 0))

    def test_length_mismatch(self):
        """Test mismatched lengths are rejected."""
        with pytest.raises(ValidationError):
            classify_inventory([1, 2], [1, 2, 3])


class TestEvaluateScenario:
    """Tests for exact single-scenario evaluation."""

    def test_hand_computed_scenario(self, table1_config):
        """Test S=(10,0), D=(4,5) ships 5 units from 1 to 2."""
        outcome = evaluate_scenario(table1_config, [10, 0], [4, 5])
        assert outcome.plan.quantities[0, 1] == pytest.approx(5.0)
        assert outcome.cost == pytest.approx(5.5)
        assert outcome.fill_rate == pytest.approx(1.0)
        assert outcome.lead_time == pytest.approx(25.0)
        assert outcome.newsvendor_cost == pytest.approx(28.0)
        assert outcome.transship_income == pytest.approx(22.5)

    def test_balanced_scenario(self, three_location_config):
        """Test S=D gives zero cost, full fill and no shipments."""
        outcome = evaluate_scenario(three_location_config, [50, 60, 70], [50, 60, 70])
        assert outcome.cost == 0.0
        assert outcome.fill_rate == 1.0
        assert outcome.lead_time == 0.0
        assert outcome.plan.total_shipped == 0.0

    def test_unprofitable_route(self):
        """Test tau above h+p blocks shipping."""
        config = _table1(tau12=10.0)
        outcome = evaluate_scenario(config, [10, 0], [4, 5])
        assert outcome.plan.total_shipped == 0.0
        assert outcome.cost == pytest.approx(28.0)
        assert outcome.lead_time == 0.0
        assert outcome.fill_rate == pytest.approx(4 / 9)

    def test_zero_demand_fill_rate(self, table1_config):
        """Test fill rate is 1 when there is no demand."""
        outcome = evaluate_scenario(table1_config, [10, 10], [0, 0])
        assert outcome.fill_rate == 1.0
        assert outcome.cost == pytest.approx(60.0)

    def test_decomposition_identity(self, three_location_config):
        """Test cost = newsvendor - income on random scenarios."""
        rng = np.random.default_rng(3)
        for _ in range(200):
            S = rng.uniform(0, 200, 3)
            D = rng.uniform(0, 200, 3)
            outcome = evaluate_scenario(three_location_config, S, D)
            assert outcome.cost == pytest.approx(outcome.newsvendor_cost - outcome.transship_income, abs=1e-9)
            assert outcome.transship_income >= 0.0
            assert 0.0 <= outcome.fill_rate <= 1.0
            assert outcome.lead_time >= 0.0

    def test_fill_rate_monotone_in_stock(self, three_location_config):
        """Test raising stock never lowers the fill rate."""
        rng = np.random.default_rng(4)
        for _ in range(200):
            S = rng.uniform(0, 200, 3)
            D = rng.uniform(0, 200, 3)
            bump = rng.uniform(0, 50, 3)
            low = evaluate_scenario(three_location_config, S, D).fill_rate
            high = evaluate_scenario(three_location_config, S + bump, D).fill_rate
            assert high >= low - 1e-12

    def test_permutation_equivariance(self, three_location_config):
        """Test relabeling locations leaves all objectives unchanged."""
        order = [2, 0, 1]
        permuted = three_location_config.permuted(order)
        rng = np.random.default_rng(5)
        for _ in range(100):
            S = rng.uniform(0, 200, 3)
            D = rng.uniform(0, 200, 3)
            a = evaluate_scenario(three_location_config, S, D)
            b = evaluate_scenario(permuted, S[order], D[order])
            assert b.cost == pytest.approx(a.cost, abs=1e-9)
            assert b.fill_rate == pytest.approx(a.fill_rate, abs=1e-12)
            assert b.transship_income == pytest.approx(a.transship_income, abs=1e-9)

    def test_all_routes_unprofitable(self):
        """Test tau above h+p everywhere gives the zero plan."""
        config = make_system(
            [1.0, 1.0, 1.0], [1.0, 1.0, 1.0],
            tau=np.full((3, 3), 5.0), lead=np.full((3, 3), 2.0),
        )
        outcome = evaluate_scenario(config, [100, 0, 0], [0, 50, 50])
        assert outcome.plan.total_shipped == 0.0
        assert outcome.lead_time == 0.0

    def test_wrong_dimension(self, table1_config):
        """Test a base stock of the wrong length is rejected."""
        with pytest.raises(ValidationError):
            evaluate_scenario(table1_config, [1, 2, 3], [1, 2])


class TestEvaluateScenarios:
    """Tests for batch evaluation."""

    def test_two_location_batch_matches_single(self, table1_config):
        """Test the closed-form path agrees with per-scenario LPs."""
        rng = np.random.default_rng(6)
        demands = rng.uniform(0, 200, size=(300, 2))
        S = np.array([110.0, 70.0])
        batch = evaluate_scenarios(table1_config, S, demands)
        assert len(batch) == 300
        for k in range(0, 300, 7):
            single = evaluate_scenario(table1_config, S, demands[k])
            assert batch.cost[k] == pytest.approx(single.cost, abs=1e-9)
            assert batch.fill_rate[k] == pytest.approx(single.fill_rate, abs=1e-9)
            assert batch.lead_time[k] == pytest.approx(single.lead_time, abs=1e-9)

    def test_three_location_batch(self, three_location_config):
        """Test the general path returns per-scenario arrays."""
        demands = np.array([[90.0, 80.0, 130.0], [120.0, 50.0, 100.0]])
        batch = evaluate_scenarios(three_location_config, [100, 70, 110], demands)
        assert batch.cost.shape == (2,)
        assert batch.shipped.shape == (2, 3, 3)
        np.testing.assert_allclose(batch.cost, batch.newsvendor_cost - batch.transship_income, atol=1e-9)

    def test_bad_demand_shape(self, table1_config):
        """Test demand matrices must have n columns."""
        with pytest.raises(ValidationError):
            evaluate_scenarios(table1_config, [1, 1], np.ones((4, 3)))
