import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from epshyp.construction import assemble_families, random_dyadic_targets
from epshyp.criterion import (CriterionError, DiagonalIsomorphism, RolewiczOperator, build_product_vector,
                              build_vector, conjugate_certificate, default_eta, default_rho, make_rolewicz,
                              block_shift_instance, plan_pairs, precedes, refine_schedule, unpair)
from epshyp.shift import Lifted
from epshyp.space import OuterVec
from epshyp.weights import Params

E0 = OuterVec({0: {0: 1.0}})


@given(st.integers(0, 10**6))
def test_unpair_inverts_cantor_pairing(k):
    a, b = unpair(k)
    assert a >= 0 and b >= 0
    assert (a + b) * (a + b + 1) // 2 + b == k


def test_rolewicz_examples():
    rw = RolewiczOperator(2.0)
    s4 = rw.apply_U_pow(4, E0)
    assert s4 == OuterVec({4: {0: 1 / 16}})
    assert rw.norm(s4) == 1 / 16
    z = OuterVec({0: {0: 1.0}, 3: {0: -0.5}})
    assert rw.apply_T_pow(5, rw.apply_U_pow(5, z)) == z
    assert rw.apply_T_pow(4, z) == OuterVec()
    with pytest.raises(ValueError):
        RolewiczOperator(1.0)


def test_rolewicz_enumeration_recurs(rolewicz):
    enum = rolewicz.enumeration
    assert len({json.dumps(enum[a].to_json()) for a in range(300)}) == 300
    hits = [k for k in range(1, 400) if rolewicz.d2(k) == enum[2]]
    assert len(hits) >= 5


def test_rolewicz_instance_hypotheses(rolewicz):
    assert all(c.ok for c in rolewicz.check(60))


def test_build_vector_rolewicz_exact_hits(rolewicz):
    enum = rolewicz.enumeration
    targets = [E0] + [enum[a] for a in range(1, 12)]
    cert = build_vector(rolewicz, targets)
    assert cert.sound()
    for row in cert.rows:
        assert row.achieved <= 1e-12
        assert row.achieved <= row.bound
    # the summand itself is hit exactly; only later summands leave a tiny residue
    assert cert.model.evaluate(cert.hit_times[0], cert.summands[0]) == E0
    assert all(a < b for a, b in zip(cert.hit_times, cert.hit_times[1:]))
    assert cert.tail_bound <= 1e-14


def test_build_vector_records_every_inequality(rolewicz):
    cert = build_vector(rolewicz, [E0, E0, E0])
    names = {c.name for c in cert.checks}
    assert "||S_n y_m|| < eta_j" in names
    assert "||T^n x_1|| < eta_j" in names
    assert "||T^n(m_1) x_j|| <= tail" in names
    assert all(c.ok for c in cert.checks)
    doc = json.loads(json.dumps(cert.to_json()))
    assert len(doc["per_target"]) == 3 and len(doc["summands"]) == 3


def test_build_vector_errors(rolewicz):
    with pytest.raises(ValueError):
        build_vector(rolewicz, [OuterVec()])
    short = make_rolewicz(horizon=20)
    with pytest.raises(CriterionError) as info:
        build_vector(short, [OuterVec({0: {0: 1.0}, 9: {0: 3.0}})])
    assert info.value.failed is not None


def test_eta_schedule():
    for k in range(200):
        assert default_eta(k) <= 1 / (k + 1) ** 3
    vals = [k * k * default_eta(k) for k in range(1, 200)]
    assert vals[-1] < 1e-50


def test_refine_schedule_rolewicz(rolewicz):
    refined, checks = refine_schedule(rolewicz, 20)
    times = [refined.time(k) for k in range(1, 21)]
    assert all(a < b for a, b in zip(times, times[1:]))
    assert all(c.ok for c in checks)
    for k in range(1, 21):
        y = rolewicz.d2(k)
        assert 2.0 ** -times[k - 1] * rolewicz.model.norm(y) <= 1 / k
    assert all(c.ok for c in refined.check(20))


def test_block_shift_instance_certificate(main_certificate, targets20):
    cert = main_certificate
    assert cert.sound()
    rel = cert.relative_errors()
    assert len(rel) == 20
    assert max(rel) <= 0.30
    assert cert.radius == pytest.approx(0.2625)
    for r in cert.rows:
        assert r.achieved <= r.bound
    # beyond the burn-in prefix the certified bound is within the declared slack
    burn = cert.burn_in(0.05)
    assert burn < len(cert.rows)
    assert all(b <= cert.radius + 0.05 for b in cert.relative_bounds()[burn:])


def test_limsup_along_repeated_target():
    w = random_dyadic_targets(1, seed=11)[0]
    con = assemble_families(8, Params(0.3, 2.0, 3), anchors=[w] * 7)
    cert = build_vector(block_shift_instance(con), [w] * 6)
    slack = [r.eta_part + r.tail_part for r in cert.rows]
    wn = cert.model.norm(w)
    assert all(b < a for a, b in zip(slack, slack[1:]))
    for r, s in zip(cert.rows, slack):
        assert r.achieved <= 0.25 * wn + s
    assert cert.rows[-1].achieved <= (0.25 + 0.05) * wn


def test_order_and_plan():
    assert precedes((0, 0), (1, 0))
    assert precedes((1, 0), (0, 1))
    assert precedes((0, 1), (2, 0))
    assert not precedes((0, 1), (1, 0))
    plan = plan_pairs(4, 10)
    assert plan[:4] == [(0, 0), (1, 0), (0, 1), (2, 0)]
    assert len(plan) == 40
    assert all(precedes(a, b) for a, b in zip(plan, plan[1:]))
    assert {k for k, _ in plan} == {0, 1, 2, 3}


def test_rho_decay():
    for s in range(1, 60):
        assert s**3 * default_rho(s, 0) <= 2.0**-s
    assert default_rho(3, 4) == default_rho(4, 3)


def test_product_vector():
    w = random_dyadic_targets(6, seed=1, blocks=3, inner=1)
    v = random_dyadic_targets(3, seed=2)
    plan = plan_pairs(3, len(w))
    con = assemble_families(len(plan) + 1, Params(0.3, 2.0, 3), anchors=[v[k] for k, _ in plan])
    pc = build_product_vector(make_rolewicz(), block_shift_instance(con), w, v)
    assert all(c.ok for c in pc.checks)
    errs = pc.product_errors([(w[i], v[i % 3]) for i in range(len(w))])
    assert max(e for e, _ in errs) <= 0.35
    for cls in range(3):
        assert max(pc.first_factor_errors(w, cls)) <= 0.05
    assert json.loads(json.dumps(pc.to_json()))["pairs"][1] == [1, 0]


def test_product_norm_is_max():
    w = [OuterVec({0: {0: 3.0}})]
    v = [OuterVec({0: {0: 1.0}})]
    plan = plan_pairs(1, 1)
    con = assemble_families(3, Params(0.3, 2.0, 3), anchors=[v[0]] * 2)
    pc = build_product_vector(make_rolewicz(), block_shift_instance(con), w, v)
    (err, n), = pc.product_errors([(w[0], v[0])])
    expected = max(pc.hc_model.dist(pc.x_orbit(n), w[0]), pc.y_certificate.model.dist(pc.y_certificate.orbit(n), v[0]))
    assert err == pytest.approx(expected / 3.0)
    assert plan == [(0, 0)]


def test_conjugation(rolewicz):
    enum = rolewicz.enumeration
    cert = build_vector(rolewicz, [E0, enum[3], enum[7]])
    same = conjugate_certificate(cert, DiagonalIsomorphism.identity())
    assert [r.bound for r in same.rows] == pytest.approx([r.bound for r in cert.rows])
    assert [r.achieved for r in same.rows] == pytest.approx([r.achieved for r in cert.rows])
    homothety = conjugate_certificate(cert, DiagonalIsomorphism.uniform(2.0))
    assert homothety.relative_bounds() == pytest.approx(cert.relative_bounds())
    parity = DiagonalIsomorphism.parity(2.0, 1.0)
    assert parity.condition == 2.0
    moved = conjugate_certificate(cert, parity)
    for r0, r1, n0, n1 in zip(cert.rows, moved.rows, cert.norms(), moved.norms()):
        assert r1.bound / n1 == pytest.approx(2.0 * r0.bound / n0)
        assert r1.achieved <= r1.bound
    with pytest.raises(ValueError):
        DiagonalIsomorphism(lambda n, i: 1.0, 0.0, 1.0)


def test_conjugation_direct_orbit():
    """Transported distances equal a direct run of J T J^{-1} on J x̄."""
    rw = RolewiczOperator(2.0)
    iso = DiagonalIsomorphism.parity(2.0, 1.0)
    x = Lifted(6, OuterVec({0: {0: 1.0}, 1: {0: 0.5}}))
    for n in range(8):
        direct = iso.apply(rw.evaluate(n, x))
        jx = iso.apply(rw.evaluate(0, x))
        inv = OuterVec({m: {0: b[0] / iso.scale(m, 0)} for m, b in jx.items()})
        assert rw.dist(iso.apply(rw.apply_T_pow(n, inv)), direct) <= 1e-15
