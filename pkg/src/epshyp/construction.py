"""Dense family ``x^k``, perturbed family ``z^k = x^k + v^k`` and the block
lengths ``Δ_k`` that make ``U^{n_k} z^k`` small.

The perturbation ``v^k_j = c^k_j e_{k²}`` is chosen so that the ``e_0``
coordinate picked up by ``S_{n'_{l-1}+1}^{-1}···S_j^{-1} x^k_j`` is cancelled
by the ``-N_k`` weight at the start of block ``k``.  After that cancellation
every remaining coordinate decays like ``α^{-Δ_k}``, so a long enough block
``k`` drives the residuals below ``2^{-k}``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .shift import ShiftOperator
from .space import InnerVec, OuterVec, outer_norm
from .weights import BlockWeights, Params

log = logging.getLogger(__name__)

__all__ = [
    "DensePair",
    "SearchConfig",
    "DeltaSearchError",
    "Construction",
    "gen_dense_family",
    "random_dyadic_targets",
    "build_v",
    "make_pair",
    "block_residuals",
    "choose_delta",
    "assemble_families",
    "d2_witnesses",
    "D1_DESCRIPTION",
]

D1_DESCRIPTION = "finitely supported vectors of the direct sum (y_i = 0 for all i >= N, some N)"


# -- dense family --------------------------------------------------------------

def _cells(ni_fixed: int | None):
    """Cells ``(nb, ni, m, r)`` in breadth-first order of ``2·nb·ni + m + r``.

    A cell holds every vector with ``nb`` blocks, ``ni`` inner coordinates and
    coefficients in ``2^{-m}ℤ ∩ [-2^r, 2^r]``.  Each key value has finitely many
    cells, so every finitely supported dyadic vector lies in some cell that is
    reached after finitely many steps.
    """
    for key in itertools.count(3):
        batch = []
        for size in range(1, (key - 1) // 2 + 1):
            rest = key - 2 * size
            for nb in range(1, size + 1):
                if size % nb:
                    continue
                ni = size // nb
                if ni_fixed is not None and ni != ni_fixed:
                    continue
                for m in range(rest + 1):
                    r = rest - m
                    count = (2 ** (m + r + 1) + 1) ** size
                    batch.append((count, nb, ni, m, r))
        for count, nb, ni, m, r in sorted(batch):
            yield nb, ni, m, r, count


def _decode(index: int, nb: int, ni: int, m: int, r: int) -> OuterVec:
    radix = 2 ** (m + r + 1) + 1
    half = 2 ** (m + r)
    blocks: dict[int, dict[int, float]] = {}
    for pos in range(nb * ni):
        index, digit = divmod(index, radix)
        if digit != half:
            blocks.setdefault(pos // ni, {})[pos % ni] = (digit - half) / 2.0**m
    return OuterVec(blocks)


def _key(z: OuterVec):
    return tuple(sorted((n, i, v) for n, x in z.items() for i, v in x.items()))


def _fits(z: OuterVec, k: int) -> bool:
    return z.max_block <= k - 1 and all(max(x) <= k - 1 for x in z.values())


def gen_dense_family(K: int, seed: int = 0, anchors: Sequence[OuterVec] = (),
                     inner_dim: int | None = None, start: int = 2) -> dict[int, OuterVec]:
    """Enumerate nonzero dyadic vectors ``x^start, ..., x^K``.

    ``x^k`` has blocks ``0..k-1`` with inner support in ``0..k-1``.  The
    ``anchors`` are placed first, in order, each at the earliest index where
    it fits; the remaining indices follow a breadth-first walk over cells of
    growing size and resolution, each cell visited in a seeded order.
    Duplicates are skipped (anchors excepted), zero never occurs.
    ``inner_dim=1`` restricts to scalar blocks.
    """
    if K < start:
        return {}
    rng = np.random.default_rng(seed)
    pending: list[OuterVec] = []
    for a in anchors:
        if not len(a):
            raise ValueError("anchors must be nonzero")
        pending.append(a)
    seen = {_key(a) for a in anchors}
    cells = _cells(inner_dim)

    def fresh():
        for nb, ni, m, r, count in cells:
            for idx in rng.permutation(count) if count <= 1 << 22 else range(count):
                z = _decode(int(idx), nb, ni, m, r)
                if not len(z):
                    continue
                key = _key(z)
                if key in seen:
                    continue
                seen.add(key)
                yield z

    stream = fresh()
    out: dict[int, OuterVec] = {}
    for k in range(start, K + 1):
        choice = None
        for i, z in enumerate(pending):
            if _fits(z, k) or (inner_dim == 1 and z.max_block <= k - 1):
                choice = pending.pop(i)
                break
        while choice is None:
            z = next(stream)
            if _fits(z, k) or (inner_dim == 1 and z.max_block <= k - 1):
                choice = z
            else:
                pending.append(z)
        out[k] = choice
    return out


def random_dyadic_targets(count: int, seed: int = 0, blocks: int = 2, inner: int = 2,
                          denominator: int = 8, bound: float = 2.0) -> list[OuterVec]:
    """Seeded nonzero dyadic vectors with ``blocks x inner`` shape."""
    rng = np.random.default_rng(seed)
    top = int(bound * denominator)
    out = []
    while len(out) < count:
        vals = rng.integers(-top, top + 1, size=(blocks, inner))
        mask = rng.random((blocks, inner)) < 0.6
        z = OuterVec({n: {i: float(vals[n, i]) / denominator for i in range(inner) if mask[n, i]}
                      for n in range(blocks)})
        if len(z):
            out.append(z)
    return out


# -- perturbations -------------------------------------------------------------

def build_v(k: int, j: int, x_block: InnerVec, weights: BlockWeights) -> InnerVec:
    """``v^k_j = c^k_j e_{k²}``, cancelling the ``e_0`` drift of block ``l``.

    ``l`` is the block with ``n'_{l-1} <= j < n'_l``; only blocks ``< k`` of
    ``weights`` are read.
    """
    if not 0 <= j < k:
        raise ValueError(f"need 0 <= j < k, got j={j}, k={k}")
    sched = weights.schedule
    alpha, d = weights.alpha, weights.d
    l = next(i for i in range(1, len(sched.nprime)) if sched.nprime[i - 1] <= j < sched.nprime[i])
    if l >= k:
        raise ValueError(f"block {l} of index {j} is not below k={k}")
    a = sched.nprime[l - 1]
    nl = sched.n[l]
    delta_l = weights.params.deltas[l - 1]
    x0 = x_block.get(0, 0.0)
    xl = x_block.get(l * l, 0.0)
    if j <= a + d:
        f = x0
    elif j <= nl:
        f = x0 + alpha ** (j - (a + d + 1)) * xl
    elif j <= nl + delta_l:
        f = x0 + alpha ** (delta_l - (j - nl)) * xl
    else:
        f = x0
    c = f * alpha ** (-(d + j - a))
    return InnerVec({k * k: c})


@dataclass(frozen=True)
class DensePair:
    k: int
    x: OuterVec
    z: OuterVec
    v: OuterVec
    coeffs: tuple[float, ...]
    support_bound: int

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "x": self.x.to_json(),
            "z": self.z.to_json(),
            "coeffs": list(self.coeffs),
            "support_bound": self.support_bound,
        }


def make_pair(k: int, x: OuterVec, weights: BlockWeights) -> DensePair:
    if x.max_block >= k:
        raise ValueError(f"x^{k} has a block at index >= {k}")
    v_blocks, coeffs = {}, []
    for j in range(k):
        vj = build_v(k, j, x.get(j), weights)
        coeffs.append(vj.get(k * k, 0.0))
        if len(vj):
            v_blocks[j] = vj
    v = OuterVec(v_blocks)
    return DensePair(k, x, x + v, v, tuple(coeffs), k)


# -- block lengths -------------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    """Controls the search for ``Δ_k``.

    ``clearance`` additionally requires the residuals to stay small when the
    window is shortened by every earlier time ``n_i`` (``i < k``); this is what
    lets the criterion engine combine summands hit at different times.
    """

    delta_min: int = 8
    cap_log2: int = 1024
    seed: int = 0
    clearance: bool = True

    @property
    def cap(self) -> int:
        return 2**self.cap_log2

    def to_json(self) -> dict:
        return {"delta_min": self.delta_min, "cap_log2": self.cap_log2, "seed": self.seed,
                "clearance": self.clearance}

    @classmethod
    def from_json(cls, data: dict) -> "SearchConfig":
        return cls(**{k: data[k] for k in ("delta_min", "cap_log2", "seed", "clearance") if k in data})


class DeltaSearchError(RuntimeError):
    def __init__(self, k: int, delta: int, residuals: list):
        super().__init__(f"no admissible Delta_{k} below cap; last tried {delta}, "
                         f"worst residual {max(r[2] for r in residuals):.3e}")
        self.k = k
        self.residuals = residuals


def block_residuals(pair: DensePair, weights: BlockWeights, shifts: Sequence[int] = (0,),
                    q: float = 2.0, skip_full_blocks: bool = True) -> list[tuple[int, int, float]]:
    """``(j, s, ‖S_{n_k+j-s}···S_{j+1} z^k_j‖)`` for every block ``j`` and shift ``s``.

    ``weights`` must contain block ``k``.
    """
    nk = weights.schedule.n[pair.k]
    out = []
    for j in range(pair.k):
        zj = pair.z.get(j)
        for s in shifts:
            if not len(zj):
                out.append((j, s, 0.0))
                continue
            y = weights.apply_product(j + 1, nk + j - s, zj, skip_full_blocks=skip_full_blocks)
            out.append((j, s, y.norm(q)))
    return out


def _tolerance(k: int, s: int) -> float:
    return 2.0**-k if s == 0 else 2.0**-k / k


def _passes(pair, weights, shifts, q) -> tuple[bool, list]:
    res = block_residuals(pair, weights, shifts, q)
    return all(r <= _tolerance(pair.k, s) for _, s, r in res), res


@dataclass
class DeltaRecord:
    k: int
    delta: int
    start: int
    evaluations: int
    max_item3: float
    max_clearance: float
    rejected_half: float | None = None
    residuals: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "delta": self.delta,
            "start": self.start,
            "evaluations": self.evaluations,
            "max_item3_residual": self.max_item3,
            "max_clearance_residual": self.max_clearance,
            "residual_at_half": self.rejected_half,
        }


def choose_delta(k: int, prev: BlockWeights, pair: DensePair | None, search: SearchConfig,
                 q: float = 2.0) -> tuple[int, DeltaRecord]:
    """Smallest admissible ``Δ_k`` found by galloping up from the start value and bisecting.

    Admissible means ``‖S_{n_k+j}···S_{j+1} z^k_j‖ <= 2^{-k}`` for ``j < k``
    and, with clearance, ``‖S_{n_k+j-n_i}···S_{j+1} z^k_j‖ <= 2^{-k}/k`` for
    every ``1 <= i < k``.  The result is re-checked against the full condition.
    """
    start = max(k + 1, search.delta_min)
    if pair is None:
        return start, DeltaRecord(k, start, start, 0, 0.0, 0.0)
    earlier = list(prev.schedule.n[1:]) if search.clearance else []
    if earlier:
        # below this no weight of block k after the -N_k step acts on the shortest window
        start = max(start, earlier[-1] - k + 1)
    fast = [0] + earlier[-1:]
    full = [0] + earlier
    evals = 0

    def ok(delta, shifts):
        nonlocal evals
        evals += 1
        return _passes(pair, prev.extended(delta), shifts, q)

    lo = start
    while True:
        # gallop: lo, lo+1, lo+3, lo+7, ...
        step, bad, cand = 1, lo - 1, lo
        while True:
            if cand > search.cap:
                _, res = ok(min(cand, search.cap), fast)
                raise DeltaSearchError(k, cand, res)
            good, _ = ok(cand, fast)
            if good:
                break
            bad, cand = cand, cand + step
            step *= 2
        while cand - bad > 1:
            mid = (bad + cand) // 2
            if ok(mid, fast)[0]:
                cand = mid
            else:
                bad = mid
        good, res = ok(cand, full)
        if good:
            break
        lo = cand + 1
    weights = prev.extended(cand)
    item3 = [r for _, s, r in res if s == 0]
    clear = [r for _, s, r in res if s != 0]
    half = None
    if cand // 2 > k and not ok(cand // 2, full)[0]:
        half = max(r for _, s, r in block_residuals(pair, prev.extended(cand // 2), [0], q))
    record = DeltaRecord(k, cand, start, evals, max(item3, default=0.0), max(clear, default=0.0),
                         half, res)
    log.debug("Delta_%d = %d after %d evaluations", k, cand, evals)
    del weights
    return cand, record


# -- assembly ------------------------------------------------------------------

@dataclass
class Construction:
    operator: ShiftOperator
    pairs: dict[int, DensePair]
    records: list[DeltaRecord]
    family: dict[int, OuterVec]
    search: SearchConfig
    d1: str = D1_DESCRIPTION

    @property
    def params(self) -> Params:
        return self.operator.params

    @property
    def weights(self) -> BlockWeights:
        return self.operator.weights

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "schedule": self.weights.schedule.to_json(),
            "search": self.search.to_json(),
            "deltas": [r.to_json() for r in self.records],
            "pairs": [p.to_json() for p in self.pairs.values()],
            "D1": self.d1,
        }


def assemble_families(K: int, params: Params, search: SearchConfig = SearchConfig(),
                      family: dict[int, OuterVec] | None = None, anchors: Sequence[OuterVec] = (),
                      p: float = 2.0, q: float = 2.0) -> Construction:
    """Choose ``Δ_1..Δ_K`` block by block and build the pairs ``(x^k, z^k)``, ``2 <= k <= K``."""
    if K < 2:
        raise ValueError("need K >= 2")
    if family is None:
        family = gen_dense_family(K, search.seed, anchors)
    base = Params(params.epsilon, params.alpha, params.d, (), params.b)
    weights = BlockWeights(base)
    pairs: dict[int, DensePair] = {}
    records = []
    for k in range(1, K + 1):
        pair = make_pair(k, family[k], weights) if k >= 2 else None
        delta, rec = choose_delta(k, weights, pair, search, q)
        weights = weights.extended(delta)
        records.append(rec)
        if pair is not None:
            pairs[k] = pair
    return Construction(ShiftOperator(weights, p, q), pairs, records, family, search)


def d2_witnesses(pairs: dict[int, DensePair], w: OuterVec, rho: float, p: float = 2.0,
                 q: float = 2.0) -> list[int]:
    """Indices ``k`` with ``‖z^k - w‖ <= ρ‖w‖``."""
    wn = outer_norm(w, p, q)
    return [k for k, pr in pairs.items() if outer_norm(pr.z - w, p, q) <= rho * wn]
