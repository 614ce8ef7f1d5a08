import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epshyp.construction import (DeltaSearchError, SearchConfig, assemble_families, block_residuals, build_v,
                                 choose_delta, d2_witnesses, gen_dense_family, make_pair, random_dyadic_targets)
from epshyp.space import InnerVec, OuterVec
from epshyp.weights import BlockWeights, Params
from strategies import dyadic

W3 = BlockWeights(Params(0.3, 2.0, 3, (10, 12, 15)))


def test_family_shape_and_nonzero():
    fam = gen_dense_family(300, seed=0)
    assert sorted(fam) == list(range(2, 301))
    first = fam[2]
    assert first.max_block <= 1 and all(max(x) <= 1 for x in first.values())
    for k, z in fam.items():
        assert len(z) > 0
        assert z.max_block <= k - 1
        assert all(max(x) <= k - 1 for x in z.values())


def test_family_is_deterministic_and_seeded():
    a = gen_dense_family(200, seed=4)
    b = gen_dense_family(200, seed=4)
    c = gen_dense_family(200, seed=5)
    assert all(a[k] == b[k] for k in a)
    assert any(a[k] != c[k] for k in a)


def test_family_has_no_duplicates():
    fam = gen_dense_family(2000, seed=0)
    keys = {json.dumps(z.to_json(), sort_keys=True) for z in fam.values()}
    assert len(keys) == len(fam)


def test_family_density_on_random_targets():
    fam = gen_dense_family(4000, seed=0)
    targets = random_dyadic_targets(10, seed=3, blocks=2, inner=1, denominator=4, bound=1.0)
    for w in targets:
        best = min((z - w).norm() for z in fam.values())
        assert best <= 0.05 * w.norm()


def test_anchors_come_first_in_order():
    anchors = [OuterVec({0: {0: 0.375}}), OuterVec({2: {1: 1.0}})]
    fam = gen_dense_family(10, seed=0, anchors=anchors * 2)
    assert fam[2] == anchors[0]
    assert fam[3] == anchors[1]
    assert fam[4] == anchors[0]
    assert fam[5] == anchors[1]
    with pytest.raises(ValueError):
        gen_dense_family(3, anchors=[OuterVec()])


def test_anchor_waits_until_it_fits():
    big = OuterVec({4: {0: 1.0}})
    fam = gen_dense_family(8, anchors=[big])
    assert fam[5] == big
    assert all(fam[k] != big for k in range(2, 5))


def test_build_v_examples():
    v = build_v(5, 0, InnerVec({0: 1.0}), W3)
    assert v == InnerVec({25: 1 / 8})
    assert build_v(5, 0, InnerVec({3: 1.0, 2: -4.0}), W3) == InnerVec()
    with pytest.raises(ValueError):
        build_v(3, 3, InnerVec({0: 1.0}), W3)


@given(st.data())
def test_build_v_bound_in_all_cases(data):
    sched = W3.schedule
    k = 70
    j = data.draw(st.integers(0, min(k - 1, sched.nprime[2] - 1)))
    x = InnerVec({i: data.draw(dyadic) for i in range(0, 10)})
    v = build_v(k, j, x, W3)
    assert set(v) <= {k * k}
    assert abs(v.get(k * k, 0.0)) <= 2 * 2.0**-3 * x.norm(2) * (1 + 1e-12)


def test_build_v_reaches_every_case():
    sched, d = W3.schedule, W3.d
    a, nl, dl = sched.nprime[0], sched.n[1], W3.params.deltas[0]
    x = InnerVec({0: 0.0, 1: 1.0})
    values = {j: build_v(40, j, x, W3).get(1600, 0.0) for j in range(0, sched.nprime[1])}
    assert values[a + d] == 0.0
    assert values[a + d + 1] == pytest.approx(2.0 ** -(d + d + 1))
    assert values[nl + 1] > 0.0 and values[nl + dl + 1] == 0.0


def test_make_pair_properties():
    x = OuterVec({0: {0: 1.0, 1: -2.0}, 2: {0: 0.5}})
    pair = make_pair(4, x, W3)
    assert pair.z == x + pair.v
    assert pair.support_bound == 4 and pair.z.max_block < 4
    assert (pair.z - pair.x).norm() <= 0.25 * x.norm()
    assert len(pair.coeffs) == 4
    with pytest.raises(ValueError):
        make_pair(2, x, W3)


def test_choose_delta_items_for_k_2_to_8(small_construction):
    con = small_construction
    for k, pair in con.pairs.items():
        assert con.params.deltas[k - 1] > k
        res = block_residuals(pair, con.weights, (0,), skip_full_blocks=False)
        assert max(r for _, _, r in res) <= 2.0**-k


def test_choose_delta_clearance(small_construction):
    con = small_construction
    n = con.weights.schedule.n
    for k, pair in con.pairs.items():
        res = block_residuals(pair, con.weights, n[1:k])
        assert all(r <= 2.0**-k / k for _, _, r in res)


def test_choose_delta_monotonicity_probe(small_construction):
    for rec in small_construction.records:
        if rec.rejected_half is not None:
            assert rec.max_item3 <= rec.rejected_half


def test_choose_delta_without_clearance_is_smaller():
    params = Params(0.3, 2.0, 3)
    a = assemble_families(6, params, SearchConfig(clearance=False))
    b = assemble_families(6, params, SearchConfig(clearance=True))
    assert all(x <= y for x, y in zip(a.params.deltas, b.params.deltas))
    for k, pair in a.pairs.items():
        res = block_residuals(pair, a.weights, (0,))
        assert max(r for _, _, r in res) <= 2.0**-k


def test_choose_delta_cap_failure():
    prev = BlockWeights(Params(0.3, 2.0, 3, (8,)))
    pair = make_pair(2, OuterVec({0: {0: 1.0}, 1: {1: 1.0}}), prev)
    with pytest.raises(DeltaSearchError) as info:
        choose_delta(2, prev, pair, SearchConfig(cap_log2=3))
    assert info.value.k == 2
    assert info.value.residuals


def test_perturbation_and_support(main_construction):
    for k, pair in main_construction.pairs.items():
        assert (pair.z - pair.x).norm() <= 0.25 * pair.x.norm() * (1 + 1e-12)
        assert pair.z.max_block < k
        assert len(pair.z) > 0


def test_d2_witnesses(main_construction, targets20):
    rho = 1.05 * 0.25
    for w in targets20:
        assert len(d2_witnesses(main_construction.pairs, w, rho)) >= 3


def test_determinism():
    params = Params(0.3, 2.0, 3)
    a = assemble_families(7, params, SearchConfig(seed=2))
    b = assemble_families(7, params, SearchConfig(seed=2))
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())


def test_search_config_json():
    cfg = SearchConfig(delta_min=9, cap_log2=40, seed=3, clearance=False)
    assert SearchConfig.from_json(cfg.to_json()) == cfg


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 1000))
def test_assembly_random_seeds(seed):
    con = assemble_families(5, Params(0.3, 2.0, 3), SearchConfig(seed=seed))
    for k, pair in con.pairs.items():
        res = block_residuals(pair, con.weights, (0,), skip_full_blocks=False)
        assert max(r for _, _, r in res) <= 2.0**-k
        assert con.params.deltas[k - 1] > k
