# %% [markdown]
# Two agents with affinely related utilities: the one with the larger beta is
# more disappointment averse, so whenever it takes a gamble over a sure
# thing the other agent does too.

# %%
from expectiled import Agent, DisappointmentSet, FiniteSpace, OutcomeAct, compare_agents, evaluate
from expectiled import binary_closed_form, infer_beta

space = FiniteSpace.uniform(4)
base = {"a": 0.0, "b": 1.0, "c": 2.5, "d": 7.0}
cautious = Agent(2.0, {k: 2 * u + 1 for k, u in base.items()})
bold = Agent(1.0, base)

# %%
report = compare_agents(cautious, bold, space, trials=1000, seed=0)
print(report.describe("cautious", "bold"))
print("fit u_cautious = a*u_bold + b:", report.affine_coeffs, "residual", report.max_residual)
print("relation held on", report.trials, "sampled gambles:", report.empirical_relation_holds)

# %% the reverse direction fails, and the report carries the gamble that breaks it
report = compare_agents(bold, cautious, space, trials=1000, seed=0)
print(report.describe("bold", "cautious"), "| relation holds:", report.empirical_relation_holds)
outcomes, sure = report.counterexample
gamble = OutcomeAct(space, outcomes)
print("gamble", outcomes, "vs sure", sure)
print("  bold:     ", evaluate(gamble, bold), "vs", bold.u(sure))
print("  cautious: ", evaluate(gamble, cautious), "vs", cautious.u(sure))

# %% reading beta off a single price: a fair coin paying 1 or 0, valued at 1/3
coin = FiniteSpace(("heads", "tails"), (0.5, 0.5))
beta = infer_beta(coin, DisappointmentSet.of(0), 1 / 3, 1.0, 0.0)
print("implied beta:", beta, "check:", binary_closed_form(0.5, 1.0, 0.0, beta))
