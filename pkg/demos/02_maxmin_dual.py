# %% [markdown]
# Nature picks an event and inflates its probability by (1 + beta).
# The agent evaluates an act by the worst such reweighting, and the worst one
# is always the act's own disappointment set.

# %%
import numpy as np

from expectiled import FiniteSpace, UtilityAct, expectile
from expectiled import brute_force_dual, event_table, optimal_scenario, scenario_in_density_set

space = FiniteSpace(("bust", "flat", "boom", "mania"), (0.15, 0.45, 0.3, 0.1))
X = UtilityAct(space, (-4.0, 0.5, 2.0, 9.0))
beta = 1.5

# %% every event, its scenario value, best first
rows = sorted(event_table(X, beta), key=lambda row: row[1])
for D, value in rows[:6]:
    print(f"{str(D.labels(space)):<32} {value:+.6f}")

# %% enumeration agrees with the solver
value, D = brute_force_dual(X, beta)
print("brute force:", value, D.labels(space))
print("solver:     ", expectile(X, beta))

# %% the attaining scenario keeps the density ratio at 1 + beta
Q = optimal_scenario(X, beta)
phi = np.asarray(Q.density)
print("density:", phi.round(4).tolist(), "ratio:", phi.max() / phi.min())
print("inside the ratio ball:", scenario_in_density_set(Q, beta))

# %% for an elation seeker Nature turns friendly: the maximum replaces the minimum
value, D = brute_force_dual(X, -0.6)
print("beta=-0.6 brute force max:", value, D.labels(space), "solver:", expectile(X, -0.6))
