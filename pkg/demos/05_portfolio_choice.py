# %% [markdown]
# Ranking a few investments over named outcomes for agents with different
# attitudes to disappointment.

# %%
from expectiled import Agent, FiniteSpace, OutcomeAct, certainty_equivalent, rank
from expectiled import apply_utility, beta_sweep

space = FiniteSpace(("bust", "flat", "boom"), (0.2, 0.5, 0.3))
utility = {"lose": -10.0, "keep": 0.0, "gain": 1.0, "double": 12.0}
acts = [
    ("stock", OutcomeAct(space, ("lose", "keep", "double"))),
    ("bond", OutcomeAct(space, ("keep", "keep", "gain"))),
    ("cash", OutcomeAct(space, ("keep", "keep", "keep"))),
]

# %% the expected-utility maximizer buys the stock; aversion pushes it down the list
for beta in (0.0, 0.5, 1.5, 5.0):
    ranking = rank(acts, Agent(beta, utility))
    print(f"beta={beta}: " + "  >  ".join(f"{'/'.join(n)} ({v:.3f})" for n, v in ranking))

# %% the stock stops beating cash where 0.3 * 12 = (1 + beta) * 0.2 * 10, at beta = 0.8
U = apply_utility(acts[0][1], Agent(0.0, utility))
for beta, value in beta_sweep(U, (0.5, 0.7, 0.8, 0.9, 1.0)):
    print(f"beta={beta}: stock worth {value:+.4f} utils")

# %% certainty equivalents land on a named outcome only when the table has one
for name, X in acts:
    print(name, certainty_equivalent(X, Agent(1.5, utility)))
