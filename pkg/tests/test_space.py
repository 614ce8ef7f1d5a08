import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from epshyp.space import SUP, InnerVec, OuterVec, add, basis, check_exponent, dist, inner_norm, outer_norm, scale
from strategies import coeff, inner_vecs, norm_exponents, outer_vecs


def test_inner_norm_examples():
    assert inner_norm(InnerVec({0: 3, 1: 4}), 2) == pytest.approx(5.0)
    assert inner_norm(InnerVec(), 2) == 0.0
    assert inner_norm(InnerVec(), SUP) == 0.0
    assert inner_norm(InnerVec({7: -2}), SUP) == 2.0


def test_outer_norm_examples():
    z = OuterVec({0: {0: 3, 1: 4}})
    assert outer_norm(z, 1, 2) == pytest.approx(5.0)
    z = OuterVec({0: {0: 3, 1: 4}, 3: {2: 1}})
    assert outer_norm(z, 1, 2) == pytest.approx(6.0)
    assert outer_norm(z, SUP, 2) == pytest.approx(5.0)


def test_arithmetic_examples():
    assert add(OuterVec({0: {0: 1}}), OuterVec({0: {0: -1}})) == OuterVec()
    assert len(add(OuterVec({0: {0: 1}}), OuterVec({0: {0: -1}}))) == 0
    assert scale(2, OuterVec({1: {4: 3}})) == OuterVec({1: {4: 6}})
    z = OuterVec({2: {1: 0.5}, 5: {0: -3}})
    assert dist(z, z, 2, 2) == 0.0


def test_zero_entries_are_pruned():
    x = InnerVec({0: 0.0, 3: 1.0})
    assert list(x) == [3]
    z = OuterVec({0: {1: 0.0}, 2: {1: 1.0}})
    assert list(z) == [2]
    assert scale(0.0, z) == OuterVec()
    assert len(InnerVec({1: 2.0}) - InnerVec({1: 2.0})) == 0


def test_check_exponent():
    assert check_exponent("sup") == SUP
    assert check_exponent("c0") == SUP
    assert check_exponent(3) == 3.0
    with pytest.raises(ValueError):
        check_exponent(0.5)
    with pytest.raises(ValueError):
        check_exponent(float("nan"))


def test_json_round_trip():
    z = OuterVec({0: {0: 1.5}, 12: {3: -0.25, 9: 2.0}})
    text = json.dumps(z.to_json())
    assert json.loads(text) == {"0": {"0": 1.5}, "12": {"3": -0.25, "9": 2.0}}
    assert OuterVec.from_json(json.loads(text)) == z


def test_norm_of_tiny_and_huge_entries():
    # scaled evaluation keeps both ends in range
    x = InnerVec({0: 1e-200, 1: 1e-200})
    assert inner_norm(x, 3) == pytest.approx(1e-200 * 2 ** (1 / 3))
    x = InnerVec({0: 1e200, 1: 1e200})
    assert inner_norm(x, 2) == pytest.approx(1e200 * math.sqrt(2))


@given(outer_vecs(), outer_vecs(), norm_exponents, norm_exponents)
def test_triangle_inequality(z1, z2, p, q):
    lhs = outer_norm(z1 + z2, p, q)
    rhs = outer_norm(z1, p, q) + outer_norm(z2, p, q)
    assert lhs <= rhs + 1e-12 * max(1.0, rhs)


@given(outer_vecs(), coeff, norm_exponents, norm_exponents)
def test_homogeneity(z, c, p, q):
    n = outer_norm(z, p, q)
    assert outer_norm(scale(c, z), p, q) == pytest.approx(abs(c) * n, rel=1e-12, abs=1e-300)


@given(outer_vecs(), st.data(), norm_exponents, norm_exponents)
def test_unconditional_blocks(z, data, p, q):
    """Shrinking one block in norm never increases the outer norm."""
    if not len(z):
        return
    n = data.draw(st.sampled_from(sorted(z)))
    shrink = data.draw(st.floats(min_value=0.0, max_value=1.0))
    replacement = data.draw(inner_vecs())
    rn = inner_norm(replacement, q)
    target = shrink * inner_norm(z[n], q)
    if rn:
        replacement = replacement * (target / rn)
    blocks = dict(z.items())
    blocks[n] = replacement
    assert outer_norm(OuterVec(blocks), p, q) <= outer_norm(z, p, q) * (1 + 1e-12) + 1e-300


@given(outer_vecs())
def test_add_inverse_is_zero(z):
    assert len(z - z) == 0
    assert len(z + (-z)) == 0


@given(outer_vecs())
def test_json_round_trip_property(z):
    assert OuterVec.from_json(json.loads(json.dumps(z.to_json()))) == z


def test_basis_helper():
    assert basis(4, 2.0) == InnerVec({4: 2.0})
