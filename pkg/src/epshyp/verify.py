"""Property suites that turn every bound of the construction into a recorded check.

Suites never raise on a failed inequality; they append a :class:`Record`
with both sides and the pass flag, and :class:`Report` collects them.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .construction import Construction, block_residuals, d2_witnesses
from .criterion import HypVectorCertificate, ProductCertificate
from .shift import OrbitModel, ShiftOperator
from .space import InnerVec, OuterVec
from .weights import NONE, BlockWeights, closed_form_n, empirical_norm, probe_matrix

__all__ = [
    "Record",
    "Report",
    "run_weight_suite",
    "run_construction_suite",
    "run_dynamics_suite",
    "run_product_suite",
    "run_criterion_suite",
    "window_rank",
    "orbit_span_rank",
]


@dataclass
class Record:
    suite: str
    check: str
    ref: str
    lhs: float
    rhs: float
    ok: bool
    tol: float = 0.0
    asserted: bool = True

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "check": self.check,
            "ref": self.ref,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "pass": self.ok,
            "tol": self.tol,
            "asserted": self.asserted,
        }


@dataclass
class Report:
    params: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    records: list[Record] = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def add(self, suite, check, ref, lhs, rhs, tol=0.0, asserted=True, ok=None) -> Record:
        lhs, rhs = float(lhs), float(rhs)
        rec = Record(suite, check, ref, lhs, rhs, lhs <= rhs + tol if ok is None else bool(ok), tol, asserted)
        self.records.append(rec)
        return rec

    def merge(self, other: "Report") -> "Report":
        self.records.extend(other.records)
        self.tables.update(other.tables)
        self.timing.update(other.timing)
        return self

    @property
    def suites(self) -> list[str]:
        return list(dict.fromkeys(r.suite for r in self.records))

    def failures(self) -> list[Record]:
        return [r for r in self.records if r.asserted and not r.ok]

    @property
    def passed(self) -> bool:
        return not self.failures()

    def to_json(self, with_timing: bool = True) -> dict:
        out = {
            "params": self.params,
            "schedule": self.schedule,
            "passed": self.passed,
            "records": [r.to_json() for r in self.records],
            "tables": self.tables,
        }
        if with_timing:
            out["timing"] = self.timing
        return out

    def write_json(self, path, with_timing: bool = True) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(with_timing), fh, indent=1, default=_json_default)
            fh.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["suite", "check", "lhs", "rhs", "pass"])
            for r in self.records:
                writer.writerow([r.suite, r.check, repr(r.lhs), repr(r.rhs), r.ok])


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not serializable: {type(obj)}")


class _timer:
    def __init__(self, report: Report, name: str):
        self.report, self.name = report, name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timing[self.name] = time.perf_counter() - self.t0


# -- weights -------------------------------------------------------------------

def _diff_norm(a: InnerVec, b: InnerVec) -> float:
    return (a - b).norm(np.inf)


def run_weight_suite(op: ShiftOperator, blocks: int = 4, probes: int = 200, seed: int = 0) -> Report:
    """(Q0), (Q1), corrected (Q2), the bounds on ``‖S_j^{-1}‖`` and ``‖S_j···S_1‖``
    for the first ``blocks`` blocks of ``op``."""
    rep = Report()
    with _timer(rep, "weights"):
        params = op.params
        blocks = min(blocks, params.K)
        weights = BlockWeights(params.with_deltas(params.deltas[:blocks]))
        sched = weights.schedule
        top = sched.nprime[-1]
        alpha = params.alpha
        squares = [k * k for k in range(1, blocks + 1)]
        window = sorted(set(range(21)) | set(squares))
        e0 = InnerVec({0: 1.0})

        worst = max(_diff_norm(weights.apply_S(j, e0), e0) for j in range(1, top + 1))
        rep.add("weights", "S_j e_0 = e_0 for all j", "(Q0)", worst, 0.0)

        worst = 0.0
        for p in window:
            ep = InnerVec({p: 1.0})
            x = ep
            for k in range(1, blocks + 1):
                for j in range(sched.nprime[k - 1] + 1, sched.nprime[k] + 1):
                    x = weights.apply_S(j, x)
                worst = max(worst, _diff_norm(x, ep))
        rep.add("weights", "||S_n'_k...S_1 e_p - e_p|| <= 1e-9", "(Q1)", worst, 1e-9)

        worst, printed_violations = 0.0, 0
        for k in range(blocks):
            lo, hi = max(1, sched.nprime[k]), sched.nprime[k + 1] - 1
            for p in window:
                if p == 0:
                    continue
                ep = InnerVec({p: 1.0})
                for i in range(lo, hi + 1):
                    got = weights.apply_product(1, i, ep, inverse=True, skip_full_blocks=False)
                    want = alpha ** (i - sched.nprime[k])
                    err = abs(got.get(p, 0.0) - want) / want + _diff_norm(got, InnerVec({p: got.get(p, 0.0)}))
                    if p != (k + 1) ** 2:
                        worst = max(worst, err)
                    elif err > 1e-9 and p != k * k:
                        printed_violations += 1
        rep.add("weights", "S_1^-1...S_i^-1 e_p = alpha^(i-n'_k) e_p, p not in {0,(k+1)^2}",
                "(Q2) corrected", worst, 1e-9)
        rep.add("weights", "violations of (Q2) as printed (p = (k+1)^2 allowed)", "(Q2) printed",
                printed_violations, 0, asserted=False)

        rows = probe_matrix(window[-1] + 1, probes, seed, tuple(squares))
        worst_diag, worst_rank = 0.0, 0.0
        for j in range(1, top + 1):
            est = empirical_norm(lambda x, j=j: weights.apply_S_inv(j, x), rows, op.q)
            if weights.weight_at(j).rank_one == NONE:
                worst_diag = max(worst_diag, est)
            else:
                worst_rank = max(worst_rank, est)
        a, b = alpha, params.b
        rep.add("weights", "empirical ||S_j^-1|| (diagonal cases) <= alpha(1+3b)+b", "inverse bound",
                worst_diag, a * (1 + 3 * b) + b, tol=1e-9)
        rep.add("weights", "empirical ||S_j^-1|| (rank-one cases) <= alpha(1+2b)+2b", "inverse bound",
                worst_rank, a * (1 + 2 * b) + 2 * b, tol=1e-9)

        worst = 0.0
        for j in range(1, top + 1):
            worst = max(worst, empirical_norm(lambda x, j=j: weights.apply_product(1, j, x), rows, op.q))
        rep.add("weights", "empirical ||S_j...S_1|| <= M(d)", "product bound", worst, weights.m_bound(), tol=1e-9)
        rep.tables["weights"] = {"blocks": blocks, "n_prime_last": top, "probe_dim": int(rows.shape[1]),
                                 "probes": int(rows.shape[0])}
    return rep


# -- construction --------------------------------------------------------------

def run_construction_suite(con: Construction, targets: Sequence[OuterVec] = (), witnesses: int = 3) -> Report:
    """Items (2)-(4) for every pair, the schedule closed form and the ``D₂`` radius surrogate."""
    rep = Report()
    with _timer(rep, "construction"):
        params, weights = con.params, con.weights
        ratio = params.perturbation_ratio
        p, q = con.operator.p, con.operator.q
        sched = weights.schedule
        ok_closed = all(sched.n[k] == closed_form_n(k, params.d, params.deltas) for k in range(1, params.K + 1))
        rep.add("construction", "n_k matches closed form", "schedule", 0, 0, ok=ok_closed)
        rep.add("construction", "min over k of Delta_k - k", "Delta_k > k",
                -min(dk - k for k, dk in enumerate(params.deltas, 1)), -1)

        worst_pert, worst_block, worst_support = 0.0, 0.0, -1
        table = []
        for k, pair in con.pairs.items():
            xn = pair.x.norm(p, q)
            worst_pert = max(worst_pert, (pair.z - pair.x).norm(p, q) / xn)
            for j in range(k):
                xj = pair.x.get(j).norm(q)
                vj = pair.v.get(j).norm(q)
                if vj:
                    worst_block = max(worst_block, vj / xj if xj else float("inf"))
            worst_support = max(worst_support, pair.z.max_block - k)
            res = block_residuals(pair, weights, (0,), q, skip_full_blocks=False)
            top = max(r for _, _, r in res)
            rep.add("construction", f"k={k}: max_j ||S_(n_k+j)...S_(j+1) z^k_j|| <= 2^-k", "item (3)",
                    top, 2.0**-k)
            table.append({"k": k, "delta": params.deltas[k - 1], "n_k": sched.n[k], "max_residual": top,
                          "perturbation_ratio": (pair.z - pair.x).norm(p, q) / xn})
        rep.add("construction", "max_k ||z^k - x^k|| / ||x^k|| <= 2 alpha^-d b", "item (2)", worst_pert, ratio,
                tol=1e-12)
        rep.add("construction", "max ||v^k_j|| / ||x^k_j|| <= 2 alpha^-d b", "item (2)", worst_block, ratio,
                tol=1e-12)
        rep.add("construction", "max_k (max block of z^k) - k < 0", "item (4)", worst_support, -1)
        rep.add("construction", "zero is not in D2", "D2",
                sum(1 for pr in con.pairs.values() if not len(pr.z)), 0)

        rho = 1.05 * ratio
        counts = []
        for w in targets:
            counts.append(len(d2_witnesses(con.pairs, w, rho, p, q)))
        if counts:
            rep.add("construction", f"min witnesses z^k within {rho:.4g}||w|| of each target",
                    "D2 radius (finite surrogate)", -min(counts), -witnesses)
        rep.tables["construction"] = {"blocks": table, "witnesses": counts, "radius": rho,
                                      "search": [r.to_json() for r in con.records]}
    return rep


# -- dynamics ------------------------------------------------------------------

def window_rank(matrix: np.ndarray, threshold: float = 1e-8) -> int:
    """Rank by Gaussian elimination with full pivoting; pivots below ``threshold``
    (relative to the largest entry) stop the elimination."""
    a = np.array(matrix, dtype=float, copy=True)
    if a.size == 0:
        return 0
    scale = np.abs(a).max()
    if scale == 0.0:
        return 0
    a /= scale
    rank = 0
    rows, cols = a.shape
    for _ in range(min(rows, cols)):
        sub = np.abs(a[rank:, rank:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] < threshold:
            break
        i, j = i + rank, j + rank
        a[[rank, i]] = a[[i, rank]]
        a[:, [rank, j]] = a[:, [j, rank]]
        a[rank + 1:] -= np.outer(a[rank + 1:, rank] / a[rank, rank], a[rank])
        rank += 1
    return rank


def orbit_span_rank(model: OrbitModel, summands, hit_times: Sequence[int], blocks: int, inner: int,
                    points: int = 64, threshold: float = 1e-8) -> tuple[int, int]:
    """``(rank, dimension)`` of orbit points restricted to blocks ``< blocks``, inner indices ``< inner``.

    The orbit points are ``T^{t-s} x̄`` for hit times ``t`` and ``0 <= s < blocks``,
    taken in order until ``points`` of them are collected.
    """
    times = []
    for t in hit_times:
        for s in range(blocks):
            if t - s >= 0 and len(times) < points:
                times.append(t - s)
    mat = np.zeros((len(times), blocks * inner))
    for r, n in enumerate(times):
        pt = model.orbit_point(n, summands)
        for b in range(blocks):
            for i, v in pt.get(b).items():
                if i < inner:
                    mat[r, b * inner + i] = v
    return window_rank(mat, threshold), blocks * inner


def run_dynamics_suite(op: ShiftOperator, cert: HypVectorCertificate, epsilon: float,
                       lambdas: Sequence[float] = (10.0, 100.0, 1000.0, 10000.0), n_max: int = 200,
                       slack: float = 0.05, rolewicz: HypVectorCertificate | None = None) -> Report:
    """Per-target approximation, the non-hypercyclicity grid and the orbit-span rank probe."""
    rep = Report()
    with _timer(rep, "dynamics"):
        rel = cert.relative_errors()
        rep.add("dynamics", f"max relative error over {len(rel)} targets <= epsilon", "epsilon approximation",
                max(rel), epsilon)
        rep.add("dynamics", "achieved distance <= certified bound (all rows)", "certificate",
                max(r.achieved - r.bound for r in cert.rows), 0.0)
        rep.add("dynamics", "every inequality recorded during the build holds", "certificate",
                sum(not c.ok for c in cert.checks), 0)
        rep.add("dynamics", "eta_k <= 1/(k+1)^3", "eta schedule",
                max(e * (k + 1) ** 3 for k, e in enumerate(cert.eta)), 1.0)
        burn = cert.burn_in(slack)
        rep.add("dynamics", f"rows after burn-in {burn} have bound <= (radius + {slack})||z||", "certificate",
                burn, len(cert.rows), asserted=False)
        rep.tables["per_target"] = [r.to_json(n) for r, n in zip(cert.rows, cert.norms())]

        sup_block = max(cert.vector().block_norms(op.q).values(), default=0.0)
        lams = [c * sup_block for c in lambdas]
        grid = op.non_hyp_grid(cert.summands, lams, n_max)
        worst = max(lhs - rhs for _, _, lhs, rhs in grid)
        rep.add("dynamics", f"rhs >= lhs on {len(lams)} lambdas x {n_max + 1} times", "non-hypercyclicity",
                worst, 0.0, tol=1e-9)
        top = max(lams)
        rel_top = min(rhs / top for lam, _, _, rhs in grid if lam == top)
        m = op.weights.m_bound()
        rep.add("dynamics", "min relative distance to lambda e_0 (largest lambda) >= 0.9/M(d)",
                "non-hypercyclicity", -rel_top, -0.9 / m)
        rep.tables["non_hyp"] = {"sup_block_norm": sup_block, "lambdas": lams, "M": m,
                                 "min_relative_distance": {str(l): min(r / l for lam, _, _, r in grid if lam == l)
                                                           for l in lams}}

        rank, dim = orbit_span_rank(op, cert.summands, cert.hit_times, 4, 2)
        rep.add("dynamics", f"orbit-span rank on a {dim}-dimensional window (block shift)", "cyclicity probe",
                rank, dim, asserted=False, ok=rank == dim)
        ranks = {"block_shift": [rank, dim]}
        if rolewicz is not None:
            rrank, rdim = orbit_span_rank(rolewicz.model, rolewicz.summands, rolewicz.hit_times, 8, 1)
            rep.add("dynamics", f"orbit-span rank on an {rdim}-dimensional window (Rolewicz)", "cyclicity probe",
                    -rrank, -rdim)
            ranks["rolewicz"] = [rrank, rdim]
        rep.tables["orbit_span_rank"] = ranks
    return rep


def run_product_suite(pc: ProductCertificate, targets_w: Sequence[OuterVec],
                      product_targets: Sequence[tuple[OuterVec, OuterVec]], product_tol: float = 0.35,
                      factor_tol: float = 0.05, classes: int = 4) -> Report:
    rep = Report()
    with _timer(rep, "product"):
        errs = pc.product_errors(product_targets)
        rep.add("product", f"max relative product error over {len(errs)} targets", "product approximation",
                max(e for e, _ in errs), product_tol)
        worst = 0.0
        for cls in range(classes):
            worst = max(worst, max(pc.first_factor_errors(targets_w, cls)))
        rep.add("product", f"max first-factor relative error over classes < {classes}", "first factor density",
                worst, factor_tol)
        rep.add("product", "every bullet inequality of the pair construction holds", "pair construction",
                sum(not c.ok for c in pc.checks), 0)
        rep.add("product", "rho nonincreasing along the order", "rho decay",
                max((b - a for a, b in zip(pc.rho, pc.rho[1:])), default=0.0), 0.0)
        last = max(k + l for k, l in pc.pairs)
        rep.add("product", f"(k+l)^3 rho(k,l) <= 2^-(k+l) up to k+l = {last}", "rho decay",
                max((k + l) ** 3 * r * 2.0 ** (k + l) for (k, l), r in zip(pc.pairs, pc.rho)), 1.0)
        rep.tables["product"] = {"errors": [{"relative_error": e, "time": n} for e, n in errs],
                                 "pairs": [list(p) for p in pc.pairs], "times": pc.times}
    return rep



def run_criterion_suite(cert: HypVectorCertificate, refine_checks, tol: float = 1e-12) -> Report:
    """Exact hits of the criterion engine on the Rolewicz instance and the refined times."""
    rep = Report()
    with _timer(rep, "criterion"):
        rep.add("criterion", f"max distance at hit times over {len(cert.rows)} targets", "exact hits",
                max(r.achieved for r in cert.rows), tol)
        rep.add("criterion", "every inequality recorded during the build holds", "certificate",
                sum(not c.ok for c in cert.checks), 0)
        rep.add("criterion", "refined times: both 1/k bounds hold for every k", "refined schedule",
                sum(not c.ok for c in refine_checks), 0)
        times = [c.step for c in refine_checks]
        rep.add("criterion", "refined schedule covers k = 1..", "refined schedule", -max(times, default=0), -1)
        rep.tables["rolewicz_hits"] = [{"time": r.time, "distance": r.achieved} for r in cert.rows]
    return rep
