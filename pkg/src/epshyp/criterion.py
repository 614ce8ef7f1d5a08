"""Constructive ε-Hypercyclicity Criterion, schedule refinement and the
direct-sum construction.

An instance bundles an operator model (``T`` with an exact right inverse
``U``), an enumerated set ``D₂ = {y_k}``, increasing times ``n(k)`` and the
right maps ``S_{n(k)} = U^{n(k)}``.  :func:`build_vector` picks summands
``x_j = S_{n(m_j)} y_{m_j}`` one target at a time and records every
inequality it relied on, so the resulting certificate can be re-checked
without trusting the search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .construction import Construction, _cells, _decode
from .shift import Lifted, OrbitModel
from .space import InnerVec, OuterVec
from .weights import power_scale

__all__ = [
    "CriterionError",
    "CriterionInstance",
    "Check",
    "TargetRow",
    "HypVectorCertificate",
    "RolewiczOperator",
    "DyadicEnumeration",
    "DiagonalIsomorphism",
    "ProductCertificate",
    "default_eta",
    "default_rho",
    "precedes",
    "plan_pairs",
    "unpair",
    "make_rolewicz",
    "block_shift_instance",
    "build_vector",
    "refine_schedule",
    "build_product_vector",
    "conjugate_certificate",
]


class CriterionError(RuntimeError):
    """No admissible index was found; ``failed`` names the inequality."""

    def __init__(self, message: str, step=None, failed: str | None = None, lhs=None, rhs=None):
        super().__init__(message)
        self.step = step
        self.failed = failed
        self.lhs = lhs
        self.rhs = rhs


def default_eta(k: int) -> float:
    return 2.0**-k / (k + 1) ** 3


def default_rho(k: int, l: int) -> float:
    return 2.0 ** -(k + l) / (k + l + 1) ** 3


def unpair(k: int) -> tuple[int, int]:
    """Inverse Cantor pairing ``k = (a+b)(a+b+1)/2 + b``."""
    w = (math.isqrt(8 * k + 1) - 1) // 2
    b = k - w * (w + 1) // 2
    return w - b, b


# -- Rolewicz operator ---------------------------------------------------------

class RolewiczOperator(OrbitModel):
    """``T = λB`` on scalar sequences; vectors are :class:`OuterVec` with inner index 0.

    ``U = λ^{-1}F`` is its exact right inverse, so ``S_n = U^n``.
    """

    def __init__(self, lam: float = 2.0, p: float = 2.0):
        if not lam > 1.0:
            raise ValueError(f"lambda must exceed 1, got {lam}")
        self.lam = float(lam)
        self.p = p
        self.q = 2.0

    def apply_T_pow(self, n: int, z: OuterVec) -> OuterVec:
        if n < 0:
            raise ValueError("power must be nonnegative")
        out = {}
        for t, x in z.items():
            if t - n >= 0:
                out[t - n] = InnerVec({i: power_scale(v, n, self.lam) for i, v in x.items()})
        return OuterVec(out)

    def apply_U_pow(self, n: int, z: OuterVec) -> OuterVec:
        if n < 0:
            raise ValueError("power must be nonnegative")
        return OuterVec({t + n: {i: power_scale(v, -n, self.lam) for i, v in x.items()}
                         for t, x in z.items()})


class DyadicEnumeration:
    """Deterministic injective list of nonzero finitely supported dyadic scalar sequences."""

    def __init__(self):
        self._items: list[OuterVec] = []
        self._seen: set = set()
        self._stream = self._generate()

    def _generate(self):
        for nb, ni, m, r, count in _cells(1):
            for idx in range(count):
                z = _decode(idx, nb, ni, m, r)
                key = tuple(sorted((n, x[0]) for n, x in z.items()))
                if key and key not in self._seen:
                    self._seen.add(key)
                    yield z

    def __getitem__(self, a: int) -> OuterVec:
        while len(self._items) <= a:
            self._items.append(next(self._stream))
        return self._items[a]

    def index(self, z: OuterVec, limit: int = 100_000) -> int:
        for a in range(limit):
            if self[a] == z:
                return a
        raise KeyError("vector not found below limit")


# -- instances -----------------------------------------------------------------

@dataclass
class CriterionInstance:
    """Data of the criterion for one operator.

    ``d2(k)`` returns ``y_k``, ``time(k)`` returns ``n(k)``; both are defined
    for ``first <= k <= horizon``.  ``radius`` is the relative distance within
    which every target is expected to have (infinitely many) ``y_k``.
    ``tail_scale`` multiplies the ``2^{-k}`` bound imposed on later summands
    at earlier hit times.
    """

    name: str
    model: OrbitModel
    d2: Callable[[int], OuterVec]
    time: Callable[[int], int]
    first: int
    horizon: int
    radius: float
    tail_scale: float = 1.0
    d1_sampler: Callable[[int], OuterVec] | None = None
    has_time: Callable[[int], bool] | None = None

    def right_map(self, k: int, y: OuterVec | None = None) -> Lifted:
        return Lifted(self.time(k), self.d2(k) if y is None else y)

    def tail_tol(self, k: int) -> float:
        return self.tail_scale * 2.0**-k

    def check(self, upto: int | None = None) -> list["Check"]:
        """Empirical checks of the three hypotheses on the prefix ``first..upto``."""
        last = min(self.horizon, self.first + 40 if upto is None else upto)
        out = []
        times = [self.time(k) for k in range(self.first, last + 1)]
        out.append(Check(None, "times strictly increasing", 0.0, 0.0,
                         all(a < b for a, b in zip(times, times[1:]))))
        if self.d1_sampler is not None:
            for s in range(3):
                x = self.d1_sampler(s)
                val = self.model.norm(self.model.apply_T_pow(self.time(last), x))
                out.append(Check(s, "T^n(k) x -> 0 on D1", val, 1e-12, val <= 1e-12))
        for k in (last - 2, last - 1, last):
            y = self.d2(k)
            lifted = self.right_map(k, y)
            s_norm = self.model.norm(self.model.evaluate(0, lifted))
            back = self.model.dist(self.model.evaluate(self.time(k), lifted), y)
            out.append(Check(k, "||S_n(k) y_k|| <= 1/k", s_norm, 1.0 / k, s_norm <= 1.0 / k))
            out.append(Check(k, "T^n(k) S_n(k) y_k = y_k", back, 1e-12, back <= 1e-12))
        return out


def make_rolewicz(p: float = 2.0, lam: float = 2.0, horizon: int = 1_000_000) -> CriterionInstance:
    """``T = λB``, ``S_n = λ^{-n}F^n``, ``n(k) = k`` and ``D₂`` enumerating every
    dyadic sequence infinitely often (``y_k`` is entry ``a`` of the enumeration
    where ``k`` pairs ``(a, b)``)."""
    model = RolewiczOperator(lam, p)
    enum = DyadicEnumeration()
    inst = CriterionInstance(
        name=f"rolewicz(lambda={lam})",
        model=model,
        d2=lambda k: enum[unpair(k)[0]],
        time=lambda k: k,
        first=1,
        horizon=horizon,
        radius=0.0,
        tail_scale=1e-14,
        d1_sampler=lambda s: enum[s],
        has_time=lambda n: n >= 1,
    )
    inst.enumeration = enum
    return inst


def block_shift_instance(construction: Construction) -> CriterionInstance:
    """The operator ``T`` of the construction with ``y_k = z^k`` and ``n(k) = n_k``."""
    sched = construction.weights.schedule
    pairs = construction.pairs
    times = set(sched.n[min(pairs):])
    return CriterionInstance(
        name="block-weighted shift",
        model=construction.operator,
        d2=lambda k: pairs[k].z,
        time=lambda k: sched.n[k],
        first=min(pairs),
        horizon=max(pairs),
        radius=1.05 * construction.params.perturbation_ratio,
        d1_sampler=lambda s: pairs[min(pairs) + s].x,
        has_time=lambda n: n in times,
    )


# -- certificates --------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    step: object
    name: str
    lhs: float
    rhs: float
    ok: bool

    def to_json(self) -> dict:
        return {"step": self.step, "name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.ok}


@dataclass(frozen=True)
class TargetRow:
    index: int
    target: OuterVec
    family_index: int
    time: int
    achieved: float
    eta_part: float
    radius_part: float
    tail_part: float

    @property
    def bound(self) -> float:
        return self.eta_part + self.radius_part + self.tail_part

    def relative(self, norm: float) -> tuple[float, float]:
        return self.achieved / norm, self.bound / norm

    def to_json(self, norm: float) -> dict:
        return {
            "index": self.index,
            "target": self.target.to_json(),
            "family_index": self.family_index,
            "time": self.time,
            "achieved": self.achieved,
            "bound": self.bound,
            "relative_achieved": self.achieved / norm,
            "relative_bound": self.bound / norm,
            "eta_part": self.eta_part,
            "radius_part": self.radius_part,
            "tail_part": self.tail_part,
        }


@dataclass
class HypVectorCertificate:
    """Partial vector ``x̄ = Σ x_j`` with hit times and a checked bound per target.

    ``tail_bound`` bounds the contribution of all summands beyond the
    computed ones at any recorded hit time.
    """

    instance_name: str
    model: OrbitModel = field(repr=False)
    summands: list[Lifted]
    family_indices: list[int]
    hit_times: list[int]
    eta: list[float]
    radius: float
    tail_scale: float
    rows: list[TargetRow]
    checks: list[Check]

    @property
    def tail_bound(self) -> float:
        return self.tail_scale * 2.0 ** (1 - len(self.summands))

    def norms(self) -> list[float]:
        return [self.model.norm(r.target) for r in self.rows]

    def relative_errors(self) -> list[float]:
        return [r.achieved / n for r, n in zip(self.rows, self.norms())]

    def relative_bounds(self) -> list[float]:
        return [r.bound / n for r, n in zip(self.rows, self.norms())]

    def sound(self) -> bool:
        return all(r.achieved <= r.bound for r in self.rows) and all(c.ok for c in self.checks)

    def burn_in(self, slack: float) -> int:
        """First row index from which every certified bound is ``<= (radius + slack)‖z‖``."""
        rel = self.relative_bounds()
        idx = len(rel)
        while idx > 0 and rel[idx - 1] <= self.radius + slack:
            idx -= 1
        return idx

    def vector(self) -> OuterVec:
        return self.model.orbit_point(0, self.summands)

    def orbit(self, n: int) -> OuterVec:
        return self.model.orbit_point(n, self.summands)

    def to_json(self) -> dict:
        return {
            "instance": self.instance_name,
            "summands": [s.to_json() for s in self.summands],
            "family_indices": self.family_indices,
            "hit_times": self.hit_times,
            "eta": self.eta,
            "radius": self.radius,
            "tail_bound": self.tail_bound,
            "per_target": [r.to_json(n) for r, n in zip(self.rows, self.norms())],
            "checks": [c.to_json() for c in self.checks],
        }


def _evaluate_rows(model: OrbitModel, summands, family, times, targets, eta, radius, tail_scale):
    rows = []
    for j, (z, m, n) in enumerate(zip(targets, family, times)):
        achieved = model.dist(model.orbit_point(n, summands), z)
        # later summands: the computed ones obey tail_tol(k) and so do all uncomputed ones
        tail = tail_scale * 2.0**-j
        rows.append(TargetRow(j, z, m, n, achieved, (j + 1) * eta[j],
                              radius * model.norm(z), tail))
    return rows


def build_vector(instance: CriterionInstance, targets: Sequence[OuterVec], K: int | None = None,
                 eta: Callable[[int], float] = default_eta) -> HypVectorCertificate:
    """Pick ``m_0 < m_1 < ...`` and summands ``x_j = S_{n(m_j)} y_{m_j}``, one per target.

    ``m_j`` is the smallest index after ``m_{j-1}`` for which

    * ``‖z_j - y_m‖ <= radius·‖z_j‖``,
    * ``‖S_{n(m)} y_m‖ < η_j`` and ``‖T^{n(m)} S_{n(m)} y_m - y_m‖ < η_j``,
    * ``‖T^{n(m)} x_i‖ < η_j`` for ``i < j``,
    * ``‖T^{n(m_i)} x_j‖ <= tail_scale·2^{-j}`` for ``i < j``.

    Only the first ``K`` targets are used when ``K`` is given.
    """
    targets = list(targets)[:K]
    model = instance.model
    summands: list[Lifted] = []
    family: list[int] = []
    times: list[int] = []
    etas: list[float] = []
    checks: list[Check] = []
    m = instance.first - 1
    for j, z in enumerate(targets):
        zn = model.norm(z)
        if zn == 0.0:
            raise ValueError(f"target {j} is zero")
        e = eta(j)
        tol = instance.tail_tol(j)
        last_fail = None
        for m in range(m + 1, instance.horizon + 1):
            y = instance.d2(m)
            close = model.dist(z, y)
            if close > instance.radius * zn:
                continue
            n = instance.time(m)
            x = Lifted(n, y)
            step = [Check(j, "||z_j - y_m|| <= radius ||z_j||", close, instance.radius * zn, True)]
            step.append(_check(j, "||S_n y_m|| < eta_j", model.norm(model.evaluate(0, x)), e, strict=True))
            step.append(_check(j, "||T^n S_n y_m - y_m|| < eta_j", model.dist(model.evaluate(n, x), y), e,
                               strict=True))
            for i, xi in enumerate(summands):
                step.append(_check(j, f"||T^n x_{i}|| < eta_j", model.norm(model.evaluate(n, xi)), e,
                                   strict=True))
            for i, ti in enumerate(times):
                step.append(_check(j, f"||T^n(m_{i}) x_j|| <= tail", model.norm(model.evaluate(ti, x)), tol))
            bad = [c for c in step if not c.ok]
            if bad:
                last_fail = bad[0]
                continue
            summands.append(x)
            family.append(m)
            times.append(n)
            etas.append(e)
            checks.extend(step)
            break
        else:
            if last_fail is None:
                raise CriterionError(f"target {j}: no y_m within radius up to index {instance.horizon}",
                                     j, "||z_j - y_m|| <= radius ||z_j||")
            raise CriterionError(f"target {j}: no admissible index up to {instance.horizon}; "
                                 f"last failure {last_fail.name} ({last_fail.lhs:.3e} vs {last_fail.rhs:.3e})",
                                 j, last_fail.name, last_fail.lhs, last_fail.rhs)
    rows = _evaluate_rows(model, summands, family, times, targets, etas, instance.radius, instance.tail_scale)
    return HypVectorCertificate(instance.name, model, summands, family, times, etas, instance.radius,
                                instance.tail_scale, rows, checks)


def _check(step, name, lhs, rhs, strict=False) -> Check:
    return Check(step, name, lhs, rhs, lhs < rhs if strict else lhs <= rhs)


def refine_schedule(instance: CriterionInstance, count: int = 20) -> tuple[CriterionInstance, list[Check]]:
    """Indices ``m(1) < m(2) < ...`` with ``‖S_{n(m(k))} y_k‖ <= 1/k`` and
    ``‖T^{n(m(k))} S_{n(m(k))} y_k - y_k‖ <= 1/k``; returns the re-timed instance."""
    model = instance.model
    chosen: list[int] = []
    checks: list[Check] = []
    m = instance.first - 1
    for k in range(1, count + 1):
        y = instance.d2(k)
        for m in range(max(m + 1, instance.first), instance.horizon + 1):
            n = instance.time(m)
            x = Lifted(n, y)
            a = model.norm(model.evaluate(0, x))
            b = model.dist(model.evaluate(n, x), y)
            if a <= 1.0 / k and b <= 1.0 / k:
                checks.append(Check(k, "||S_m(k) y_k|| <= 1/k", a, 1.0 / k, True))
                checks.append(Check(k, "||T^m(k) S_m(k) y_k - y_k|| <= 1/k", b, 1.0 / k, True))
                chosen.append(n)
                break
        else:
            raise CriterionError(f"no refined time for k={k} below horizon", k, "||S_m(k) y_k|| <= 1/k")
    table = tuple(chosen)
    refined = CriterionInstance(
        name=instance.name + " refined",
        model=model,
        d2=instance.d2,
        time=lambda k: table[k - 1],
        first=1,
        horizon=count,
        radius=instance.radius,
        tail_scale=instance.tail_scale,
        d1_sampler=instance.d1_sampler,
        has_time=lambda n: n in table,
    )
    return refined, checks


# -- direct sums ---------------------------------------------------------------

def precedes(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """``a ⪯ b``: smaller index sum first, ties broken by larger first index."""
    (i, j), (k, l) = a, b
    return i + j < k + l or (i + j == k + l and i >= k)


def plan_pairs(classes: int, width: int) -> list[tuple[int, int]]:
    """All ``(k, l)`` with ``k < classes`` and ``l < width`` in ``⪯`` order.

    Step ``t`` of the plan is reserved for pair ``t``; the steps carrying
    first index ``k`` form the class ``ℕ_k``.
    """
    pairs = [(k, l) for k in range(classes) for l in range(width)]
    pairs.sort(key=lambda kl: (kl[0] + kl[1], -kl[0]))
    return pairs


@dataclass
class ProductCertificate:
    pairs: list[tuple[int, int]]
    times: list[int]
    x_summands: list[Lifted]
    y_certificate: HypVectorCertificate
    hc_model: OrbitModel = field(repr=False)
    checks: list[Check]
    rho: list[float]

    def x_orbit(self, n: int) -> OuterVec:
        return self.hc_model.orbit_point(n, self.x_summands)

    def product_errors(self, targets: Sequence[tuple[OuterVec, OuterVec]]) -> list[tuple[float, int]]:
        """``(min_t max(‖T^n x - a‖, ‖S^n y - b‖)/max(‖a‖, ‖b‖), argmin time)`` per target."""
        xs = [self.x_orbit(n) for n in self.times]
        ys = [self.y_certificate.orbit(n) for n in self.times]
        hm, sm = self.hc_model, self.y_certificate.model
        out = []
        for a, b in targets:
            scale = max(hm.norm(a), sm.norm(b))
            best = min((max(hm.dist(xo, a), sm.dist(yo, b)) / scale, n)
                       for xo, yo, n in zip(xs, ys, self.times))
            out.append(best)
        return out

    def first_factor_errors(self, w_targets: Sequence[OuterVec], cls: int) -> list[float]:
        """For class ``cls``: best relative distance of ``{T^{m(cls,j)} x}`` to each target."""
        orbit = [self.x_orbit(n) for (k, _), n in zip(self.pairs, self.times) if k == cls]
        hm = self.hc_model
        return [min(hm.dist(o, w) for o in orbit) / hm.norm(w) for w in w_targets]

    def to_json(self) -> dict:
        return {
            "pairs": [list(p) for p in self.pairs],
            "times": self.times,
            "rho": self.rho,
            "x_summands": [s.to_json() for s in self.x_summands],
            "y": self.y_certificate.to_json(),
            "checks": [c.to_json() for c in self.checks],
        }


def build_product_vector(hc: CriterionInstance, eps: CriterionInstance, targets_w: Sequence[OuterVec],
                         targets_v: Sequence[OuterVec], classes: int | None = None,
                         rho: Callable[[int, int], float] = default_rho) -> ProductCertificate:
    """Pair ``(x, y)`` for ``T ⊕ S`` with ``T`` from ``hc`` and ``S`` from ``eps``.

    Step ``t`` handles pair ``(k, l)`` of :func:`plan_pairs`: the ``S`` side aims
    at ``targets_v[k]`` through :func:`build_vector`, whose hit time ``m(k, l)``
    is then reused for ``x_{k,l} = U_{m(k,l)} w_l``.  ``eps`` must list the
    planned ``S`` targets in its ``D₂`` (see :func:`plan_pairs`).
    """
    classes = len(targets_v) if classes is None else classes
    pairs = plan_pairs(classes, len(targets_w))
    y_cert = build_vector(eps, [targets_v[k] for k, _ in pairs])
    model = hc.model
    checks: list[Check] = []
    xs: list[Lifted] = []
    rhos = []
    for t, ((k, l), n) in enumerate(zip(pairs, y_cert.hit_times)):
        r = rho(k, l)
        rhos.append(r)
        if hc.has_time is not None and not hc.has_time(n):
            raise CriterionError(f"time {n} is not in the sequence of {hc.name}", (k, l), "shared times")
        x = Lifted(n, targets_w[l])
        step = [_check((k, l), "m(k,l) > m(i,j)", float(xs[-1].power if xs else -1), float(n), strict=True)]
        for (i, j), xi in zip(pairs, xs):
            step.append(_check((k, l), f"||T^m(k,l) x_({i},{j})|| <= rho", model.norm(model.evaluate(n, xi)), r))
            step.append(_check((k, l), f"||T^m({i},{j}) x_(k,l)|| <= 2^-(k+l)",
                               model.norm(model.evaluate(xi.power, x)), 2.0 ** -(k + l)))
        u = model.norm(model.evaluate(0, x))
        step.append(_check((k, l), "||U_m w_l|| < rho", u, r, strict=True))
        step.append(_check((k, l), "||x_(k,l)|| <= rho", u, r))
        step.append(_check((k, l), "||T^m x_(k,l) - w_l|| <= rho", model.dist(model.evaluate(n, x), targets_w[l]), r))
        bad = [c for c in step if not c.ok]
        if bad:
            raise CriterionError(f"pair {(k, l)}: {bad[0].name} fails ({bad[0].lhs:.3e} vs {bad[0].rhs:.3e})",
                                 (k, l), bad[0].name, bad[0].lhs, bad[0].rhs)
        checks.extend(step)
        xs.append(x)
    for (k, l), r in zip(pairs, rhos):
        checks.append(_check((k, l), "(k+l)^3 rho(k,l) <= 2^-(k+l)", (k + l) ** 3 * r, 2.0 ** -(k + l)))
    return ProductCertificate(pairs, list(y_cert.hit_times), xs, y_cert, model, checks, rhos)


# -- conjugation ---------------------------------------------------------------

@dataclass(frozen=True)
class DiagonalIsomorphism:
    """``J e_{(n,i)} = s(n, i) e_{(n,i)}`` with ``‖J‖ = sup|s|`` and ``‖J^{-1}‖ = sup 1/|s|``.

    On canonical bases with 1-unconditional norms a diagonal scaling has
    exactly these norms; ``upper`` and ``lower`` are the declared extremes of
    ``|s|`` over all indices.
    """

    scale: Callable[[int, int], float]
    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 < self.lower <= self.upper < math.inf):
            raise ValueError("scaling is not boundedly invertible")

    @classmethod
    def identity(cls) -> "DiagonalIsomorphism":
        return cls(lambda n, i: 1.0, 1.0, 1.0)

    @classmethod
    def uniform(cls, c: float) -> "DiagonalIsomorphism":
        return cls(lambda n, i: c, abs(c), abs(c))

    @classmethod
    def parity(cls, even: float, odd: float) -> "DiagonalIsomorphism":
        """Scale blocks with even outer index by ``even`` and odd ones by ``odd``."""
        lo, hi = sorted((abs(even), abs(odd)))
        return cls(lambda n, i: even if n % 2 == 0 else odd, lo, hi)

    @property
    def norm(self) -> float:
        return self.upper

    @property
    def inverse_norm(self) -> float:
        return 1.0 / self.lower

    @property
    def condition(self) -> float:
        return self.norm * self.inverse_norm

    def apply(self, z: OuterVec) -> OuterVec:
        out = {}
        for n, x in z.items():
            out[n] = {i: self.scale(n, i) * v for i, v in x.items()}
        for n, x in out.items():
            for i in x:
                if not self.lower <= abs(self.scale(n, i)) <= self.upper:
                    raise ValueError(f"scale at {(n, i)} outside the declared bounds")
        return OuterVec(out)


def conjugate_certificate(cert: HypVectorCertificate, iso: DiagonalIsomorphism) -> HypVectorCertificate:
    """Transport ``cert`` to ``J T J^{-1}`` with vector ``J x̄`` and targets ``J z_j``.

    Achieved distances ``‖J T^n x̄ - J z_j‖`` are evaluated directly; each
    relative bound is multiplied by ``‖J‖‖J^{-1}‖``.
    """
    model = cert.model
    rows = []
    for r in cert.rows:
        jz = iso.apply(r.target)
        achieved = model.norm(iso.apply(model.orbit_point(r.time, cert.summands)) - jz)
        ratio = iso.condition * model.norm(jz) / model.norm(r.target)
        rows.append(TargetRow(r.index, jz, r.family_index, r.time, achieved, r.eta_part * ratio,
                              r.radius_part * ratio, r.tail_part * ratio))
    return HypVectorCertificate(
        cert.instance_name + " conjugated", _Conjugated(model, iso), cert.summands, cert.family_indices,
        cert.hit_times, cert.eta, cert.radius * iso.condition, cert.tail_scale, rows, cert.checks)


class _Conjugated(OrbitModel):
    """``J T J^{-1}`` acting on ``J``-images; orbit points are ``J T^n x̄``."""

    def __init__(self, base: OrbitModel, iso: DiagonalIsomorphism):
        self.base = base
        self.iso = iso
        self.p = base.p
        self.q = base.q

    def orbit_point(self, n, summands):
        return self.iso.apply(self.base.orbit_point(n, summands))

    def evaluate(self, n, v):
        return self.iso.apply(self.base.evaluate(n, v))
