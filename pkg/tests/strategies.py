"""Hypothesis strategies for acts and coefficients."""

import numpy as np
from hypothesis import strategies as st

from expectiled import UtilityAct

utils = st.floats(-100, 100, allow_nan=False)
betas = st.one_of(
    st.sampled_from([-0.9, -0.5, 0.0, 0.5, 1.0, 5.0, 50.0]),
    st.floats(-0.95, 50.0),
)


@st.composite
def acts(draw, min_n=1, max_n=8, uniform=False):
    n = draw(st.integers(min_n, max_n))
    values = draw(st.lists(utils, min_size=n, max_size=n))
    if uniform:
        return UtilityAct.of(values)
    w = np.array(draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n)))
    return UtilityAct.of(values, tuple(w / w.sum()))
