# %% [markdown]
# Random tests of the structural properties, the two behavioural axioms,
# and a black-box detector that tells expectiles apart from look-alikes.

# %%
from expectiled import FiniteSpace, run_property
from expectiled.axioms import LEMMA_PROPERTIES, Property, REFERENCE_FUNCTIONALS
from expectiled.axioms import expectile_functional, fingerprint_functional

space = FiniteSpace.uniform(6)

# %% properties at a handful of coefficients
for beta in (-0.5, 0.0, 2.0):
    for prop in LEMMA_PROPERTIES:
        r = run_property(prop, space, beta, trials=500, seed=0)
        print(f"beta={beta:>4}  {r.property_id:<22} failures={r.failures}  worst={r.worst_violation:.1e}")

# %% hedging and stacking hold for the disappointment averse ...
for beta in (0.5, 5.0):
    for prop in (Property.DISAPPOINTMENT_HEDGING, Property.DISAPPOINTMENT_STACKING):
        r = run_property(prop, space, beta, trials=500, seed=1)
        print(f"beta={beta}: {r.property_id} failures={r.failures}")

# %% ... and reverse for elation seekers (the checks flip direction automatically)
r = run_property(Property.DISAPPOINTMENT_HEDGING, space, -0.5, trials=500, seed=1)
print("beta=-0.5 reversed hedging failures:", r.failures)

# %% fingerprinting: price one bet, infer beta, then try to catch the evaluator out
candidates = {"expectile(3)": expectile_functional(3.0), **REFERENCE_FUNCTIONALS}
for name, fn in candidates.items():
    fp = fingerprint_functional(fn, space, trials=100, seed=0)
    witness = None if fp.witness is None else [round(x, 2) for x in fp.witness.values]
    print(f"{name:<13} {fp.verdict:<12} beta_hat={fp.beta_hat}  witness={witness}")
