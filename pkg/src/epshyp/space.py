"""Finitely supported vectors of a sequence space ``X`` and of the direct
sum ``⊕_Y X``.

Both spaces use their canonical coordinate bases, so the inner norm is an
ℓ^q (or sup) norm of the coordinates and the outer norm is the ℓ^p (or sup)
norm of the sequence of block norms.  Norm exponents are plain floats with
``math.inf`` standing for the sup norm (``SUP``).
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping

__all__ = [
    "SUP",
    "InnerVec",
    "OuterVec",
    "check_exponent",
    "lp_norm",
    "inner_norm",
    "outer_norm",
    "add",
    "scale",
    "dist",
    "basis",
    "block",
]

SUP = math.inf


def check_exponent(p: float) -> float:
    """Validate a norm exponent; accepts ``"sup"``/``"inf"`` strings too."""
    if isinstance(p, str):
        if p.lower() in ("sup", "inf", "c0"):
            return SUP
        p = float(p)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"norm exponent must be >= 1 or SUP, got {p!r}")
    return p


def lp_norm(values: Iterable[float], p: float) -> float:
    vals = [abs(v) for v in values]
    if not vals:
        return 0.0
    top = max(vals)
    if p == SUP or top == 0.0 or math.isinf(top):
        return top
    if p == 1:
        return math.fsum(vals)
    if p == 2:
        return math.hypot(*vals)
    # scaled to keep the powers in range
    return top * math.fsum((v / top) ** p for v in vals) ** (1.0 / p)


class InnerVec(Mapping):
    """Sparse element of ``X``: inner index -> nonzero scalar."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, float] | Iterable[tuple[int, float]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        self._entries = {int(i): float(v) for i, v in items if v != 0.0}

    @classmethod
    def _trusted(cls, entries: dict[int, float]) -> "InnerVec":
        obj = cls.__new__(cls)
        obj._entries = entries
        return obj

    def __getitem__(self, i: int) -> float:
        return self._entries[i]

    def get(self, i, default=0.0):
        return self._entries.get(i, default)

    def __iter__(self) -> Iterator[int]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"InnerVec({dict(sorted(self._entries.items()))})"

    def __eq__(self, other) -> bool:
        if isinstance(other, InnerVec):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._entries.items()))

    def __add__(self, other: "InnerVec") -> "InnerVec":
        out = dict(self._entries)
        for i, v in other.items():
            s = out.get(i, 0.0) + v
            if s == 0.0:
                out.pop(i, None)
            else:
                out[i] = s
        return InnerVec._trusted(out)

    def __neg__(self) -> "InnerVec":
        return InnerVec._trusted({i: -v for i, v in self._entries.items()})

    def __sub__(self, other: "InnerVec") -> "InnerVec":
        return self + (-other)

    def __mul__(self, c: float) -> "InnerVec":
        c = float(c)
        if c == 0.0:
            return InnerVec()
        return InnerVec({i: c * v for i, v in self._entries.items()})

    __rmul__ = __mul__

    def norm(self, q: float = 2.0) -> float:
        return lp_norm(self._entries.values(), q)

    def to_json(self) -> dict[str, float]:
        return {str(i): v for i, v in sorted(self._entries.items())}

    @classmethod
    def from_json(cls, data: Mapping[str, float]) -> "InnerVec":
        return cls({int(i): float(v) for i, v in data.items()})


class OuterVec(Mapping):
    """Sparse element of ``⊕_Y X``: outer index -> nonzero :class:`InnerVec`."""

    __slots__ = ("_blocks",)

    def __init__(self, blocks: Mapping[int, InnerVec | Mapping[int, float]] | None = None):
        self._blocks: dict[int, InnerVec] = {}
        for n, x in (blocks or {}).items():
            if not isinstance(x, InnerVec):
                x = InnerVec(x)
            if len(x):
                self._blocks[int(n)] = x

    @classmethod
    def _trusted(cls, blocks: dict[int, InnerVec]) -> "OuterVec":
        obj = cls.__new__(cls)
        obj._blocks = blocks
        return obj

    def __getitem__(self, n: int) -> InnerVec:
        return self._blocks[n]

    def get(self, n, default=None):
        return self._blocks.get(n, InnerVec() if default is None else default)

    def __iter__(self) -> Iterator[int]:
        return iter(self._blocks)

    def __len__(self) -> int:
        return len(self._blocks)

    def __repr__(self) -> str:
        inner = {n: dict(sorted(x.items())) for n, x in sorted(self._blocks.items())}
        return f"OuterVec({inner})"

    def __eq__(self, other) -> bool:
        if isinstance(other, OuterVec):
            return self._blocks == other._blocks
        return NotImplemented

    __hash__ = None

    def __add__(self, other: "OuterVec") -> "OuterVec":
        return add(self, other)

    def __sub__(self, other: "OuterVec") -> "OuterVec":
        return add(self, scale(-1.0, other))

    def __neg__(self) -> "OuterVec":
        return scale(-1.0, self)

    def __mul__(self, c: float) -> "OuterVec":
        return scale(c, self)

    __rmul__ = __mul__

    @property
    def max_block(self) -> int:
        return max(self._blocks) if self._blocks else -1

    def block_norms(self, q: float) -> dict[int, float]:
        return {n: x.norm(q) for n, x in self._blocks.items()}

    def norm(self, p: float = 2.0, q: float = 2.0) -> float:
        return outer_norm(self, p, q)

    def to_json(self) -> dict[str, dict[str, float]]:
        return {str(n): x.to_json() for n, x in sorted(self._blocks.items())}

    @classmethod
    def from_json(cls, data: Mapping[str, Mapping[str, float]]) -> "OuterVec":
        return cls({int(n): InnerVec.from_json(x) for n, x in data.items()})


def inner_norm(x: InnerVec, q: float) -> float:
    return x.norm(q)


def outer_norm(z: OuterVec, p: float, q: float) -> float:
    """Norm of ``⊕_Y X``: the Y-norm of the sequence of X-norms of the blocks."""
    return lp_norm((x.norm(q) for x in z.values()), p)


def add(z1: OuterVec, z2: OuterVec) -> OuterVec:
    out = dict(z1.items())
    for n, x in z2.items():
        s = out[n] + x if n in out else x
        if len(s):
            out[n] = s
        else:
            out.pop(n, None)
    return OuterVec._trusted(out)


def scale(c: float, z: OuterVec) -> OuterVec:
    c = float(c)
    if c == 0.0:
        return OuterVec()
    out = {}
    for n, x in z.items():
        y = x * c
        if len(y):
            out[n] = y
    return OuterVec._trusted(out)


def dist(z1: OuterVec, z2: OuterVec, p: float, q: float) -> float:
    return outer_norm(z1 - z2, p, q)


def basis(i: int, c: float = 1.0) -> InnerVec:
    """``c * e_i`` in ``X``."""
    return InnerVec({i: c})


def block(n: int, x: InnerVec | Mapping[int, float]) -> OuterVec:
    """The element of ``⊕_Y X`` carrying ``x`` in block ``n`` and zero elsewhere."""
    return OuterVec({n: x})
