import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expectiled import (
    Agent,
    Dominance,
    FiniteSpace,
    ModelError,
    OutcomeAct,
    UtilityAct,
    apply_utility,
    beta_sweep,
    certainty_equivalent,
    compare_agents,
    evaluate,
    fosd_compare,
    midpoint_value,
    rank,
)

from strategies import acts, betas

S3 = FiniteSpace.uniform(3)
TABLE = {"lo": 0.0, "mid": 3.0, "hi": 6.0, "m": 2.25}
A036 = OutcomeAct(S3, ("lo", "mid", "hi"))
A630 = OutcomeAct(S3, ("hi", "mid", "lo"))
C3 = OutcomeAct(S3, ("mid",) * 3)


class TestEvaluate:
    def test_worked_example(self):
        assert evaluate(A036, Agent(1.0, TABLE)) == pytest.approx(2.25, abs=1e-12)

    def test_expected_utility(self):
        assert evaluate(A036, Agent(0.0, TABLE)) == pytest.approx(3.0, abs=1e-12)

    def test_constant(self):
        assert evaluate(C3, Agent(5.0, TABLE)) == 3.0


class TestRank:
    def test_permutation_tie(self):
        (names, value), = rank([("A", A036), ("B", A630)], Agent(1.0, TABLE))
        assert names == ("A", "B") and value == pytest.approx(2.25)

    def test_constant_on_top(self):
        ranking = rank([("A", A036), ("C", C3)], Agent(1.0, TABLE))
        assert [names for names, _ in ranking] == [("C",), ("A",)]
        assert ranking[0][1] == 3.0

    def test_expected_utility_tie(self):
        ranking = rank([("A", A036), ("C", C3)], Agent(0.0, TABLE))
        assert len(ranking) == 1 and set(ranking[0][0]) == {"A", "C"}

    def test_empty(self):
        with pytest.raises(ValueError):
            rank([], Agent(1.0, TABLE))

    @settings(max_examples=40)
    @given(st.lists(st.lists(st.sampled_from(sorted(TABLE)), min_size=3, max_size=3), min_size=1, max_size=6),
           st.floats(0.1, 10), st.floats(-5, 5), betas)
    def test_affine_representation_invariance(self, outcome_lists, a, b, beta):
        acts_ = [(f"X{i}", OutcomeAct(S3, tuple(o))) for i, o in enumerate(outcome_lists)]
        agent = Agent(beta, TABLE)
        moved = Agent(beta, {k: a * v + b for k, v in TABLE.items()})
        for _, X in acts_:
            assert evaluate(X, moved) == pytest.approx(a * evaluate(X, agent) + b, abs=1e-9)
        order = [n for names, _ in rank(acts_, agent) for n in sorted(names)]
        moved_order = [n for names, _ in rank(acts_, moved) for n in sorted(names)]
        assert order == moved_order


class TestCertaintyEquivalent:
    def test_label_found(self):
        assert certainty_equivalent(A036, Agent(1.0, TABLE)) == (pytest.approx(2.25), "m")

    def test_constant(self):
        assert certainty_equivalent(C3, Agent(1.0, TABLE)) == (3.0, "mid")

    def test_no_label(self):
        table = {k: v for k, v in TABLE.items() if k != "m"}
        value, label = certainty_equivalent(A036, Agent(1.0, table))
        assert value == pytest.approx(2.25) and label is None


class TestMidpoint:
    def test_values(self):
        agent = Agent(1.0, {"x": 0.0, "y": 6.0, "a": 1.0, "b": 0.0})
        assert midpoint_value("x", "y", agent) == 3.0
        assert midpoint_value("x", "x", agent) == 0.0
        assert midpoint_value("a", "b", agent) == 0.5


class TestSweep:
    def test_worked_example(self):
        sweep = beta_sweep(UtilityAct.of((0, 3, 6)), (-0.5, 0.0, 1.0))
        assert [v for _, v in sweep] == pytest.approx([3.75, 3.0, 2.25], abs=1e-12)

    def test_constant(self):
        assert [v for _, v in beta_sweep(UtilityAct.of((2, 2)), (-0.5, 0, 9))] == [2, 2, 2]

    def test_single_beta(self):
        (b, v), = beta_sweep(UtilityAct.of((1, 2, 6)), (0.0,))
        assert b == 0.0 and v == pytest.approx(3.0)

    @given(acts(max_n=10))
    def test_nonincreasing(self, U):
        vals = [v for _, v in beta_sweep(U, (-0.95, -0.5, 0, 0.5, 1, 5, 50))]
        assert all(a >= b - 1e-12 * max(1.0, U.range()) for a, b in zip(vals, vals[1:]))


class TestProbabilisticSophistication:
    @given(st.lists(st.floats(-50, 50), min_size=2, max_size=7), st.integers(0, 10**6), betas)
    def test_strict_dominance_is_strictly_preferred(self, values, seed, beta):
        rng = np.random.default_rng(seed)
        n = len(values)
        space = FiniteSpace.uniform(n)
        labels = [f"o{i}" for i in range(2 * n)]
        worse = np.array(values)
        better = rng.permutation(worse) + rng.uniform(0, 3, n) * (rng.random(n) < 0.5)
        better[rng.integers(n)] += 0.5
        table = dict(zip(labels, [*worse, *better]))
        agent = Agent(beta, table)
        X = OutcomeAct(space, tuple(labels[n:]))
        Y = OutcomeAct(space, tuple(labels[:n]))
        if fosd_compare(apply_utility(X, agent), apply_utility(Y, agent)) is Dominance.DOMINATES_STRICTLY:
            assert evaluate(X, agent) > evaluate(Y, agent)


class TestCompareAgents:
    SPACE = FiniteSpace.uniform(4)
    BASE = {"a": 0.0, "b": 1.0, "c": 2.5, "d": 7.0}

    def test_more_averse(self):
        A = Agent(2.0, {k: 2 * v + 1 for k, v in self.BASE.items()})
        B = Agent(1.0, self.BASE)
        report = compare_agents(A, B, self.SPACE, trials=1000, seed=0)
        assert report.affine_related
        assert report.affine_coeffs == pytest.approx((2.0, 1.0))
        assert report.beta_order == ">"
        assert report.empirical_relation_holds
        assert report.verdict == "A more disappointment averse than B"

    def test_self(self):
        A = Agent(1.0, self.BASE)
        report = compare_agents(A, A, self.SPACE, trials=200)
        assert report.affine_related and report.empirical_relation_holds
        assert report.verdict == "A and B equally disappointment averse"

    def test_negated_utility(self):
        A = Agent(1.0, {k: -v for k, v in self.BASE.items()})
        report = compare_agents(A, Agent(1.0, self.BASE), self.SPACE, trials=50)
        assert not report.affine_related
        assert report.affine_coeffs[0] < 0
        assert "non-increasing" in report.verdict

    def test_not_affine(self):
        A = Agent(1.0, {k: v ** 2 for k, v in self.BASE.items()})
        report = compare_agents(A, Agent(1.0, self.BASE), self.SPACE, trials=50)
        assert not report.affine_related
        assert report.verdict == "utilities not affinely related; not comparable"

    def test_less_averse(self):
        report = compare_agents(Agent(0.5, self.BASE), Agent(3.0, self.BASE), self.SPACE, trials=50)
        assert report.beta_order == "<" and not report.more_averse
        assert report.describe("ann", "bo") == "bo more disappointment averse than ann"

    @pytest.mark.parametrize("b_hi, b_lo", [(0.5, 0.0), (5.0, 1.0), (50.0, 0.5)])
    def test_constant_act_attachment(self, b_hi, b_lo):
        report = compare_agents(Agent(b_hi, self.BASE), Agent(b_lo, self.BASE), self.SPACE, trials=1000, seed=4)
        assert report.empirical_relation_holds and report.counterexample is None

    def test_reverse_direction_finds_counterexample(self):
        report = compare_agents(Agent(0.0, self.BASE), Agent(5.0, self.BASE), self.SPACE, trials=1000)
        assert not report.empirical_relation_holds
        outcomes, y = report.counterexample
        assert len(outcomes) == 4 and y in self.BASE

    def test_needs_variation(self):
        with pytest.raises(ModelError):
            compare_agents(Agent(1.0, {"a": 1.0}), Agent(1.0, {"a": 2.0}), self.SPACE)
