"""Block schedule and the weight operators ``S_j`` acting on ``X``.

Every ``S_j`` has the form ``D_{k,σ,β}`` or ``D_{k,1/α,1} ± N_k`` where

* ``D_{k,σ,β}`` multiplies ``e_0`` by 1, ``e_{k²}`` by ``β`` and every other
  basis vector by ``σ``;
* ``N_k x = x_{k²} e_0``.

All ``σ`` and ``β`` that occur are integer powers of ``α``, so descriptors
store the integer exponents and products over long index windows are
accumulated as integer exponents.  Floats are only formed for the final
coordinates, which keeps products such as ``S_{n'_k}···S_1`` exact even when
individual weights (``α^{n'_k-n'_{k-1}-1}``) are far outside binary64 range.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .space import InnerVec, lp_norm

__all__ = [
    "Params",
    "Schedule",
    "WeightDescriptor",
    "BlockWeights",
    "build_schedule",
    "m_bound",
    "empirical_norm",
    "probe_matrix",
    "power_scale",
]

NONE, MINUS_N, PLUS_N = 0, -1, 1
RANK_LABEL = {NONE: "NONE", MINUS_N: "MINUS_N", PLUS_N: "PLUS_N"}


def power_scale(v: float, e: int, alpha: float) -> float:
    """Return ``v * alpha**e`` for an arbitrary (possibly huge) integer ``e``.

    Results beyond binary64 range saturate to ``±inf`` or ``0``.
    """
    if e == 0 or v == 0.0:
        return v
    if alpha == 2.0:
        try:
            return math.ldexp(v, e)
        except OverflowError:
            return math.copysign(math.inf, v)
    t = e * math.log2(alpha) + math.frexp(v)[1]
    if t > 1030:
        return math.copysign(math.inf, v)
    if t < -1080:
        return 0.0
    h = e // 2
    return v * alpha**h * alpha ** (e - h)


@dataclass(frozen=True)
class Params:
    epsilon: float
    alpha: float
    d: int
    deltas: tuple[int, ...] = ()
    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(int(x) for x in self.deltas))
        self.validate()

    def validate(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not self.alpha > 1.0:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not self.perturbation_ratio < self.epsilon:
            raise ValueError(
                f"need 2*alpha^-d*b < epsilon, got {self.perturbation_ratio} >= {self.epsilon}"
            )
        for k, delta in enumerate(self.deltas, start=1):
            if delta <= k:
                raise ValueError(f"Delta_{k} = {delta} must exceed {k}")

    @property
    def perturbation_ratio(self) -> float:
        """``2 α^{-d} b``, the relative size of the perturbations ``z^k - x^k``."""
        return 2.0 * self.alpha ** (-self.d) * self.b

    @property
    def K(self) -> int:
        return len(self.deltas)

    def with_deltas(self, deltas) -> "Params":
        return Params(self.epsilon, self.alpha, self.d, tuple(deltas), self.b)

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "d": self.d,
            "b": self.b,
            "deltas": list(self.deltas),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Params":
        return cls(data["epsilon"], data["alpha"], data["d"], tuple(data.get("deltas", ())), data.get("b", 1.0))


def smallest_d(epsilon: float, alpha: float, b: float = 1.0) -> int:
    """Smallest ``d >= 2`` with ``2 α^{-d} b < ε``."""
    d = 2
    while 2.0 * alpha ** (-d) * b >= epsilon:
        d += 1
    return d


@dataclass(frozen=True)
class Schedule:
    n: tuple[int, ...]
    nprime: tuple[int, ...]

    @property
    def K(self) -> int:
        return len(self.n) - 1

    def to_json(self) -> dict:
        return {"n": list(self.n), "nprime": list(self.nprime)}


def closed_form_n(k: int, d: int, deltas) -> int:
    return (2 * k - 1) * (d + 1) + deltas[k - 1] + 2 * sum(deltas[: k - 1])


def build_schedule(params: Params) -> Schedule:
    n, nprime = [0], [0]
    d, prefix = params.d, 0
    for k, delta in enumerate(params.deltas, start=1):
        n.append(nprime[-1] + d + 1 + delta)
        nprime.append(n[-1] + d + 1 + delta)
        if n[-1] != (2 * k - 1) * (d + 1) + delta + 2 * prefix:
            raise AssertionError(f"closed form for n_{k} disagrees with recurrence")
        prefix += delta
    return Schedule(tuple(n), tuple(nprime))


def m_bound(params: Params) -> float:
    """``M(d) = 1 + 3b + 2bα^d``, the uniform bound on ``‖S_j···S_1‖``."""
    return 1.0 + 3.0 * params.b + 2.0 * params.b * params.alpha**params.d


def _apply_exps(x: InnerVec, k: int, sexp: int, bexp: int, rank: int, alpha: float) -> InnerVec:
    sq = k * k
    out = {}
    for p, v in x.items():
        if p == 0:
            out[0] = out.get(0, 0.0) + v
        elif p == sq:
            out[p] = power_scale(v, bexp, alpha)
            if rank:
                out[0] = out.get(0, 0.0) + rank * v
        else:
            out[p] = power_scale(v, sexp, alpha)
    return InnerVec(out)


@dataclass(frozen=True)
class WeightDescriptor:
    """Symbolic ``S_j``: ``D_{k,α^sigma_exp,α^beta_exp} + rank_one·N_k``."""

    j: int
    k: int
    case: int
    sigma_exp: int
    beta_exp: int
    rank_one: int
    alpha: float = field(repr=False)

    @property
    def sigma(self) -> float:
        return power_scale(1.0, self.sigma_exp, self.alpha)

    @property
    def beta(self) -> float:
        return power_scale(1.0, self.beta_exp, self.alpha)

    @property
    def rank_label(self) -> str:
        return RANK_LABEL[self.rank_one]

    def apply(self, x: InnerVec) -> InnerVec:
        return _apply_exps(x, self.k, self.sigma_exp, self.beta_exp, self.rank_one, self.alpha)

    def apply_inverse(self, x: InnerVec) -> InnerVec:
        # (D_{k,1/α,1} ± N_k)^{-1} = D_{k,α,1} ∓ N_k and D_{k,σ,β}^{-1} = D_{k,1/σ,1/β}
        return _apply_exps(x, self.k, -self.sigma_exp, -self.beta_exp, -self.rank_one, self.alpha)

    def dump(self) -> str:
        return (
            f"j={self.j} case={self.case} k={self.k} sigma=alpha^{self.sigma_exp} "
            f"beta=alpha^{self.beta_exp} rank_one={self.rank_label}"
        )


class HorizonError(ValueError):
    """An index beyond the last scheduled weight ``n'_K`` was requested."""


class BlockWeights:
    """The weights ``S_1, ..., S_{n'_K}`` for a fixed parameter set."""

    def __init__(self, params: Params):
        self.params = params
        self.schedule = build_schedule(params)
        self.alpha = params.alpha
        self.d = params.d

    @property
    def K(self) -> int:
        return self.schedule.K

    @property
    def horizon(self) -> int:
        return self.schedule.nprime[-1]

    def extended(self, delta: int) -> "BlockWeights":
        return BlockWeights(self.params.with_deltas(self.params.deltas + (delta,)))

    def check_index(self, j: int) -> None:
        if not 1 <= j <= self.horizon:
            raise HorizonError(f"weight index {j} outside 1..{self.horizon}")

    def block_of(self, j: int) -> int:
        """The ``k`` with ``n'_{k-1} < j <= n'_k``."""
        self.check_index(j)
        return bisect.bisect_left(self.schedule.nprime, j)

    def _block_cases(self, k: int) -> list[tuple[int, int, int, int, int, int]]:
        """``(case, first, last, sigma_exp, beta_exp, rank)`` for block ``k``."""
        d = self.d
        a = self.schedule.nprime[k - 1]
        nk = self.schedule.n[k]
        delta = self.params.deltas[k - 1]
        npk = self.schedule.nprime[k]
        return [
            (1, a + 1, a + d, -1, 1, NONE),
            (2, a + d + 1, a + d + 1, -1, 0, MINUS_N),
            (3, a + d + 2, nk, -1, -1, NONE),
            (4, nk + 1, nk + delta, -1, 1, NONE),
            (5, nk + delta + 1, nk + delta + 1, -1, 0, PLUS_N),
            (6, nk + delta + 2, nk + delta + d, -1, -1, NONE),
            (7, npk, npk, npk - a - 1, -1, NONE),
        ]

    def weight_at(self, j: int) -> WeightDescriptor:
        k = self.block_of(j)
        for case, lo, hi, se, be, rank in self._block_cases(k):
            if lo <= j <= hi:
                return WeightDescriptor(j, k, case, se, be, rank, self.alpha)
        raise AssertionError("block cases do not cover the block")  # pragma: no cover

    def dump(self, limit: int | None = None) -> str:
        last = self.horizon if limit is None else min(limit, self.horizon)
        return "\n".join(self.weight_at(j).dump() for j in range(1, last + 1))

    def segments(self, lo: int, hi: int, skip_full_blocks: bool = True) -> Iterator[tuple[int, int, int, int, int]]:
        """Runs ``(k, sigma_exp, beta_exp, rank, count)`` of equal weights in ``[lo, hi]``.

        With ``skip_full_blocks`` the blocks lying entirely inside the window are
        omitted, since their full product is the identity.
        """
        if hi < lo:
            return
        self.check_index(lo)
        self.check_index(hi)
        k_lo, k_hi = self.block_of(lo), self.block_of(hi)
        nprime = self.schedule.nprime
        if skip_full_blocks:
            blocks = [k_lo] if k_lo == k_hi else [k_lo, k_hi]
        else:
            blocks = range(k_lo, k_hi + 1)
        for k in blocks:
            if skip_full_blocks and lo <= nprime[k - 1] + 1 and nprime[k] <= hi:
                continue
            for _, first, last, se, be, rank in self._block_cases(k):
                a, b = max(first, lo), min(last, hi)
                if a <= b:
                    yield k, se, be, rank, b - a + 1

    def apply_product(self, j_lo: int, j_hi: int, x: InnerVec, inverse: bool = False,
                      skip_full_blocks: bool = True) -> InnerVec:
        """``S_{j_hi}···S_{j_lo} x``, or ``S_{j_lo}^{-1}···S_{j_hi}^{-1} x`` when ``inverse``.

        An empty window (``j_hi < j_lo``) returns ``x`` unchanged.
        """
        if j_hi < j_lo:
            return x
        segs = list(self.segments(j_lo, j_hi, skip_full_blocks))
        if inverse:
            segs = [(k, -se, -be, -rank, c) for k, se, be, rank, c in reversed(segs)]
        alpha = self.alpha
        c0 = x.get(0, 0.0)
        # coordinate p holds rest[p][0] * alpha**(rest[p][1] + g)
        rest = {p: [v, 0] for p, v in x.items() if p != 0}
        g = 0
        for k, se, be, rank, count in segs:
            g += se * count
            ent = rest.get(k * k)
            if ent is None:
                continue
            ent[1] += (be - se) * count
            if rank:
                c0 += rank * power_scale(ent[0], ent[1] + g, alpha)
        out = {p: power_scale(v, e + g, alpha) for p, (v, e) in rest.items()}
        if c0 != 0.0:
            out[0] = c0
        return InnerVec(out)

    def apply_S(self, j: int, x: InnerVec) -> InnerVec:
        return self.weight_at(j).apply(x)

    def apply_S_inv(self, j: int, x: InnerVec) -> InnerVec:
        return self.weight_at(j).apply_inverse(x)

    def norm_bound_S_inv(self, j: int) -> float:
        """Triangle-inequality bound on ``‖S_j^{-1}‖`` for the case of ``j``."""
        a, b = self.alpha, self.params.b
        if self.weight_at(j).rank_one != NONE:
            return a * (1 + 2 * b) + 2 * b
        return a * (1 + 3 * b) + b

    def m_bound(self) -> float:
        return m_bound(self.params)


def probe_matrix(dim: int, count: int = 200, seed: int = 0, special: tuple[int, ...] = ()) -> np.ndarray:
    """Unit-free probe rows: ``count`` random mixed-sign vectors plus deterministic ones.

    For every index ``s`` in ``special`` the rows ``e_0``, ``e_s``, ``e_0 ± e_s``
    are appended; these span the only non-diagonal action of the weights.
    """
    rng = np.random.default_rng(seed)
    rows = [rng.standard_normal(dim) * (rng.random(dim) < 0.7) for _ in range(count)]
    for s in special:
        for c0, cs in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)):
            r = np.zeros(dim)
            r[0] += c0
            r[s] += cs
            rows.append(r)
    rows = [r for r in rows if np.any(r)]
    return np.array(rows)


def empirical_norm(operator, probes: np.ndarray, q: float = 2.0) -> float:
    """Largest ``‖A u‖_q / ‖u‖_q`` over probe rows ``u``.

    ``operator`` maps :class:`InnerVec` to :class:`InnerVec` linearly and keeps
    the probe window ``{0, ..., dim-1}`` invariant; it is evaluated once per
    basis vector and the probes are then pushed through the dense matrix.
    """
    dim = probes.shape[1]
    cols = []
    for i in range(dim):
        img = operator(InnerVec({i: 1.0}))
        col = np.zeros(dim)
        for p, v in img.items():
            if p >= dim:
                raise ValueError(f"operator leaves the probe window (index {p})")
            col[p] = v
        cols.append(col)
    mat = np.column_stack(cols)
    images = probes @ mat.T
    best = 0.0
    for u, au in zip(probes, images):
        best = max(best, lp_norm(au, q) / lp_norm(u, q))
    return best
