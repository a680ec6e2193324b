# %% [markdown]
# Three equally likely states, utilities 0, 3 and 6, disappointment aversion 1.
# Every solver should land on 2.25, and the reweighting recursion gets there in one step.

# %%
from expectiled import UtilityAct, expectile, iterative_reweighting, solve_all
from expectiled import disappointment_set, optimal_scenario, scenario_value, balance_gap

X = UtilityAct.of((0, 3, 6))
beta = 1.0

# %% four solvers, one answer
report = solve_all(X, beta)
for name, value in report.values.items():
    print(f"{name:>9}: {value!r}")
print("spread:", report.max_discrepancy)

# %% the balance equation at the answer: elation 1.5, twice the disappointment 0.75
v = expectile(X, beta)
print("gap at", v, "=", balance_gap(X, beta, v))

# %% the recursion starts at the mean and overweights the states below it
v, trace = iterative_reweighting(X, beta)
for k, (vk, masses) in enumerate(trace.iterates):
    print(k, vk, [round(m, 4) for m in masses])

# %% who is disappointed, and what the pessimist believes
D = disappointment_set(X, v)
Q = optimal_scenario(X, beta)
print("disappointed states:", D.labels(X.space))
print("worst-case probabilities:", Q.probs.tolist())
print("expected utility under them:", scenario_value(X, Q))

# %% sliding beta from elation seeking to strong aversion
for b in (-0.9, -0.5, 0.0, 0.5, 1.0, 5.0, 50.0):
    print(f"beta={b:>5}: {expectile(X, b):.6f}")
