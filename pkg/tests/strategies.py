"""Hypothesis strategies for sparse vectors."""

from hypothesis import strategies as st

from epshyp.space import InnerVec, OuterVec

coeff = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
dyadic = st.integers(min_value=-64, max_value=64).map(lambda n: n / 8.0)


def inner_vecs(max_index=30, values=coeff, max_size=6):
    return st.dictionaries(st.integers(0, max_index), values, max_size=max_size).map(InnerVec)


def outer_vecs(max_block=8, max_index=30, values=coeff, max_size=4):
    return st.dictionaries(st.integers(0, max_block), inner_vecs(max_index, values), max_size=max_size).map(OuterVec)


norm_exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0, float("inf")])
