"""Backward shift ``T`` on ``⊕_Y X`` with weights ``S_n^{-1}`` and its right inverse ``U``.

``T(x_0, x_1, x_2, ...) = (S_1^{-1} x_1, S_2^{-1} x_2, ...)`` and
``U(y_0, y_1, ...) = (0, S_1 y_0, S_2 y_1, ...)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

from .space import InnerVec, OuterVec, add, outer_norm, scale
from .weights import BlockWeights, HorizonError

__all__ = ["Lifted", "OrbitModel", "ShiftOperator", "HorizonError", "write_orbit_csv"]


@dataclass(frozen=True)
class Lifted:
    """The vector ``U^power base`` kept unevaluated.

    Right-inverse images at large powers have coordinates far below binary64
    range; keeping them symbolic lets ``T^n`` of them be evaluated exactly.
    """

    power: int
    base: OuterVec

    def to_json(self) -> dict:
        return {"power": self.power, "base": self.base.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "Lifted":
        return cls(int(data["power"]), OuterVec.from_json(data["base"]))


class OrbitModel:
    """Shared orbit arithmetic for operators with an exact right inverse.

    Subclasses provide ``apply_T_pow``, ``apply_U_pow`` and the norm exponents
    ``p`` (outer) and ``q`` (inner).
    """

    p: float
    q: float

    def apply_T_pow(self, n: int, z: OuterVec) -> OuterVec:
        raise NotImplementedError

    def apply_U_pow(self, n: int, z: OuterVec) -> OuterVec:
        raise NotImplementedError

    def norm(self, z: OuterVec) -> float:
        return outer_norm(z, self.p, self.q)

    def dist(self, a: OuterVec, b: OuterVec) -> float:
        return outer_norm(a - b, self.p, self.q)

    def evaluate(self, n: int, v: Lifted | OuterVec) -> OuterVec:
        """``T^n v``; lifted vectors use ``T^n U^N = U^{N-n}`` for ``n <= N``."""
        if isinstance(v, OuterVec):
            return self.apply_T_pow(n, v)
        if n <= v.power:
            return self.apply_U_pow(v.power - n, v.base)
        return self.apply_T_pow(n - v.power, v.base)

    def orbit_point(self, n: int, summands: Iterable[Lifted | OuterVec]) -> OuterVec:
        out = OuterVec()
        for v in summands:
            out = add(out, self.evaluate(n, v))
        return out

    def orbit_trace(self, summands: Sequence[Lifted | OuterVec], target: OuterVec,
                    n_max: int) -> list[tuple[int, float, float]]:
        """Rows ``(n, ‖T^n x - z‖, ‖T^n x - z‖/‖z‖)`` for ``n = 0..n_max``."""
        tn = self.norm(target)
        rows = []
        for n in range(n_max + 1):
            dst = self.dist(self.orbit_point(n, summands), target)
            rows.append((n, dst, dst / tn if tn else float("inf")))
        return rows


class ShiftOperator(OrbitModel):
    def __init__(self, weights: BlockWeights, p: float = 2.0, q: float = 2.0):
        self.weights = weights
        self.params = weights.params
        self.schedule = weights.schedule
        self.p = p
        self.q = q

    @property
    def horizon(self) -> int:
        return self.weights.horizon

    @property
    def C(self) -> float:
        """Uniform bound on ``‖S_j^{-1}‖``; with canonical bases ``‖T‖ <= C``."""
        a, b = self.params.alpha, self.params.b
        return max(a * (1 + 3 * b) + b, a * (1 + 2 * b) + 2 * b)

    def _check(self, t: int) -> None:
        if t > self.horizon:
            raise HorizonError(f"block {t} beyond schedule horizon {self.horizon}")

    def apply_T(self, z: OuterVec) -> OuterVec:
        return self.apply_T_pow(1, z)

    def apply_T_pow(self, n: int, z: OuterVec) -> OuterVec:
        if n < 0:
            raise ValueError("power must be nonnegative")
        out = {}
        for t, x in z.items():
            self._check(t)
            m = t - n
            if m < 0:
                continue
            y = self.weights.apply_product(m + 1, t, x, inverse=True)
            if len(y):
                out[m] = y
        return OuterVec._trusted(out)

    def apply_U(self, z: OuterVec) -> OuterVec:
        return self.apply_U_pow(1, z)

    def apply_U_pow(self, n: int, z: OuterVec) -> OuterVec:
        if n < 0:
            raise ValueError("power must be nonnegative")
        out = {}
        for m, x in z.items():
            self._check(m + n)
            y = self.weights.apply_product(m + 1, m + n, x)
            if len(y):
                out[m + n] = y
        return OuterVec._trusted(out)

    def non_hyp_lower_bound(self, w: OuterVec | Sequence[Lifted | OuterVec], lam: float,
                            n: int) -> tuple[float, float]:
        """``(lhs, rhs)`` with ``lhs = (|λ| - sup_k ‖w_k‖)/M(d)`` and
        ``rhs = ‖T^n w - λ(e_0, 0, ...)‖``; always ``rhs >= lhs``."""
        summands = [w] if isinstance(w, OuterVec) else list(w)
        concrete = self.orbit_point(0, summands)
        sup_block = max(concrete.block_norms(self.q).values(), default=0.0)
        lhs = (abs(lam) - sup_block) / self.weights.m_bound()
        target = OuterVec({0: InnerVec({0: lam})})
        rhs = self.dist(self.orbit_point(n, summands), target)
        return lhs, rhs

    def non_hyp_grid(self, summands: Sequence[Lifted | OuterVec], lams: Sequence[float],
                     n_max: int) -> list[tuple[float, int, float, float]]:
        """Rows ``(λ, n, lhs, rhs)`` of :meth:`non_hyp_lower_bound` for all ``n <= n_max``,
        reusing each orbit point across the ``λ`` values."""
        sup_block = max(self.orbit_point(0, summands).block_norms(self.q).values(), default=0.0)
        m = self.weights.m_bound()
        rows = []
        for n in range(n_max + 1):
            point = self.orbit_point(n, summands)
            for lam in lams:
                rhs = self.dist(point, lam_target(lam))
                rows.append((lam, n, (abs(lam) - sup_block) / m, rhs))
        return rows


def write_orbit_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "distance", "relative_distance"])
        for n, dst, rel in rows:
            writer.writerow([n, repr(float(dst)), repr(float(rel))])


def lam_target(lam: float) -> OuterVec:
    return scale(lam, OuterVec({0: InnerVec({0: 1.0})}))
