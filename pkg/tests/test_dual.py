import numpy as np
import pytest
from hypothesis import given, settings

from expectiled import (
    DisappointmentSet,
    FiniteSpace,
    Scenario,
    SpaceMismatchError,
    UtilityAct,
    brute_force_dual,
    event_scenario,
    event_table,
    expectile,
    optimal_scenario,
    scenario_in_density_set,
    scenario_value,
)
from expectiled.dual import EnumerationTooLarge, iter_events

from oracles import exact_event_values
from strategies import acts, betas

X036 = UtilityAct.of((0, 3, 6))
S3 = FiniteSpace.uniform(3)


class TestEventScenario:
    def test_worked_example(self):
        Q = event_scenario(S3, DisappointmentSet.of(0), 1.0)
        assert Q.probs == pytest.approx((0.5, 0.25, 0.25), abs=1e-15)
        assert Q.density == pytest.approx((1.5, 0.75, 0.75), abs=1e-15)

    @pytest.mark.parametrize("members", [(), (0, 1, 2)])
    def test_trivial_events_give_p(self, members):
        Q = event_scenario(S3, DisappointmentSet.of(*members), 3.0)
        assert Q.density == pytest.approx((1.0, 1.0, 1.0))

    @given(acts(min_n=1, max_n=8), betas)
    def test_inside_density_set(self, U, beta):
        rng = np.random.default_rng(len(U.values))
        D = DisappointmentSet(frozenset(np.flatnonzero(rng.random(U.n) < 0.5).tolist()))
        assert scenario_in_density_set(event_scenario(U.space, D, beta), beta)


class TestOptimalScenario:
    def test_worked_example(self):
        Q = optimal_scenario(X036, 1.0)
        assert tuple(Q.probs) == (0.5, 0.25, 0.25)
        assert scenario_value(X036, Q) == 2.25

    def test_constant(self):
        U = UtilityAct.of((2.0, 2.0, 2.0))
        Q = optimal_scenario(U, 5.0)
        assert Q.density == (1.0, 1.0, 1.0)
        assert scenario_value(U, Q) == 2.0

    @given(acts(max_n=8))
    def test_beta_zero_is_p(self, U):
        assert optimal_scenario(U, 0.0).density == pytest.approx((1.0,) * U.n)

    @given(acts(max_n=12), betas)
    def test_attains_expectile(self, U, beta):
        v = expectile(U, beta)
        assert scenario_value(U, optimal_scenario(U, beta)) == pytest.approx(v, abs=1e-10)

    @given(acts(max_n=10), betas)
    def test_boundary_states_do_not_matter(self, U, beta):
        strict = scenario_value(U, optimal_scenario(U, beta))
        weak = scenario_value(U, optimal_scenario(U, beta, weak=True))
        assert strict == pytest.approx(weak, abs=1e-10)

    def test_boundary_with_a_tie(self):
        U = UtilityAct.of((0, 3, 3, 6))
        assert scenario_value(U, optimal_scenario(U, 0.0, weak=True)) == 3.0


class TestScenarioValue:
    def test_hand_value(self):
        Q = Scenario(S3, (1.5, 0.75, 0.75))
        assert scenario_value(X036, Q) == 2.25

    def test_p_gives_mean(self):
        assert scenario_value(X036, Scenario(S3, (1.0, 1.0, 1.0))) == 3.0

    def test_constant(self):
        Q = Scenario(S3, (0.3, 1.2, 1.5))
        assert scenario_value(UtilityAct.of((4, 4, 4)), Q) == pytest.approx(4.0, abs=1e-15)

    def test_space_mismatch(self):
        Q = Scenario(FiniteSpace.uniform(2), (1.0, 1.0))
        with pytest.raises(SpaceMismatchError):
            scenario_value(X036, Q)


class TestBruteForce:
    def test_worked_example(self):
        value, D = brute_force_dual(X036, 1.0)
        assert value == 2.25 and D.sorted() == (0,)

    def test_event_table(self):
        table = event_table(X036, 1.0)
        assert [D.sorted() for D, _ in table] == [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
        assert [v for _, v in table] == pytest.approx([3, 2.25, 3, 3.75, 2.4, 3, 3.6, 3], abs=1e-14)

    def test_table_matches_exact_oracle(self):
        exact = exact_event_values((0, 3, 6), (1, 1, 1), 1)
        for D, v in event_table(X036, 1.0):
            assert v == pytest.approx(float(exact[D.sorted()]), abs=1e-14)

    def test_beta_zero_all_tie(self):
        value, D = brute_force_dual(X036, 0.0)
        assert value == 3.0 and D.sorted() == ()
        assert all(v == pytest.approx(3.0) for _, v in event_table(X036, 0.0))

    def test_single_state(self):
        value, D = brute_force_dual(UtilityAct.of((5.0,)), 2.0)
        assert value == 5.0 and D.sorted() in [(), (0,)]

    def test_negative_beta_takes_max(self):
        value, D = brute_force_dual(X036, -0.5)
        assert value == pytest.approx(3.75, abs=1e-14)
        assert D.sorted() == (0, 1)

    def test_guard(self):
        U = UtilityAct.of(tuple(range(25)))
        with pytest.raises(EnumerationTooLarge, match="limit is 24"):
            brute_force_dual(U, 1.0)
        with pytest.raises(EnumerationTooLarge):
            event_table(U, 1.0)

    def test_block_enumeration_above_sixteen_states(self):
        rng = np.random.default_rng(3)
        U = UtilityAct.of(tuple(rng.uniform(-10, 10, 18)))
        value, D = brute_force_dual(U, 2.0)
        assert value == pytest.approx(expectile(U, 2.0), abs=1e-10)
        assert D.sorted() == optimal_scenario_event(U, 2.0)

    @settings(max_examples=60)
    @given(acts(max_n=10), betas)
    def test_matches_expectile(self, U, beta):
        value, D = brute_force_dual(U, beta)
        assert value == pytest.approx(expectile(U, beta), abs=1e-9)

    @settings(max_examples=60)
    @given(acts(max_n=9), betas)
    def test_expectile_bounds_every_event(self, U, beta):
        v = expectile(U, beta)
        for _, w in event_table(U, beta):
            if beta >= 0:
                assert w >= v - 1e-10
            else:
                assert w <= v + 1e-10


def optimal_scenario_event(U, beta):
    v = expectile(U, beta)
    return tuple(int(i) for i in np.flatnonzero(U.u < v))


class TestDensitySet:
    def test_p(self):
        assert scenario_in_density_set(Scenario(S3, (1, 1, 1)), -0.5)

    def test_ratio_too_large(self):
        Q = Scenario(FiniteSpace.uniform(2), (1.5, 0.5))
        assert not scenario_in_density_set(Q, 1.0)

    def test_zero_density_excluded(self):
        Q = Scenario(FiniteSpace.uniform(2), (2.0, 0.0))
        assert not scenario_in_density_set(Q, 1.0)


def test_iter_events_order():
    assert [D.sorted() for D in iter_events(2)] == [(), (0,), (1,), (0, 1)]
