"""Command-line entry point: ``epshyp {verify,orbit,product}``.

Exit codes: 0 when every asserted check passes, 1 when a check or a search
fails, 2 for usage and configuration errors.

Config (JSON, every key optional)::

    {
      "epsilon": 0.3, "alpha": 2.0, "d": "auto", "b": 1.0,
      "outer": 2, "inner": 2,
      "targets": {"count": 20, "seed": 0, "blocks": 2, "inner": 2,
                  "denominator": 8, "bound": 2.0},
      "witnesses": 3, "K": null,
      "search": {"delta_min": 8, "cap_log2": 1024, "seed": 0, "clearance": true},
      "lambdas": [10, 100, 1000, 10000], "n_max": 200,
      "weight_blocks": 4, "probes": 200, "slack": 0.05,
      "rolewicz": {"lambda": 2.0, "targets": 10, "refine": 20},
      "product": {"w_targets": 10, "v_classes": 4, "w_seed": 1, "v_seed": 2,
                  "product_tol": 0.35, "factor_tol": 0.05},
      "out": "out"
    }

``targets`` may also be a list of vectors in the ``{"n": {"i": value}}``
form.  ``K`` is the number of blocks; by default it is just large enough to
hold ``witnesses`` copies of every target.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .construction import DeltaSearchError, SearchConfig, assemble_families, random_dyadic_targets
from .criterion import (CriterionError, build_product_vector, build_vector, make_rolewicz, block_shift_instance,
                        plan_pairs, refine_schedule)
from .shift import write_orbit_csv
from .space import OuterVec, check_exponent
from .verify import (Report, run_construction_suite, run_criterion_suite, run_dynamics_suite,
                     run_product_suite, run_weight_suite)
from .weights import Params, smallest_d

log = logging.getLogger("epshyp")

DEFAULTS = {
    "epsilon": 0.3,
    "alpha": 2.0,
    "d": "auto",
    "b": 1.0,
    "outer": 2,
    "inner": 2,
    "targets": {"count": 20, "seed": 0, "blocks": 2, "inner": 2, "denominator": 8, "bound": 2.0},
    "witnesses": 3,
    "K": None,
    "search": {"delta_min": 8, "cap_log2": 1024, "seed": 0, "clearance": True},
    "lambdas": [10, 100, 1000, 10000],
    "n_max": 200,
    "weight_blocks": 4,
    "probes": 200,
    "slack": 0.05,
    "rolewicz": {"lambda": 2.0, "targets": 10, "refine": 20},
    "product": {"w_targets": 10, "v_classes": 4, "w_seed": 1, "v_seed": 2, "product_tol": 0.35,
                "factor_tol": 0.05},
    "out": "out",
}


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    params: Params
    p: float
    q: float
    targets: list[OuterVec]
    witnesses: int
    K: int
    search: SearchConfig
    raw: dict = field(repr=False)

    @property
    def out(self) -> Path:
        return Path(self.raw["out"])


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if key not in base:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(base[key], dict) and isinstance(val, dict):
            unknown = set(val) - set(base[key])
            if unknown:
                raise ConfigError(f"unknown keys in {key!r}: {sorted(unknown)}")
            out[key].update(val)
        else:
            out[key] = val
    return out


def load_config(path: str | None = None, seed: int | None = None, out: str | None = None,
                overrides: dict | None = None) -> Config:
    """Read, merge with defaults and validate; raises :class:`ConfigError`."""
    raw = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        raw = _merge(raw, user)
    if overrides:
        raw = _merge(raw, overrides)
    if seed is not None:
        if isinstance(raw["targets"], dict):
            raw["targets"]["seed"] = seed
        raw["search"]["seed"] = seed
    if out is not None:
        raw["out"] = out
    try:
        return _validate(raw)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def _validate(raw: dict) -> Config:
    eps, alpha, b = float(raw["epsilon"]), float(raw["alpha"]), float(raw["b"])
    if b != 1.0:
        raise ConfigError("only canonical bases are supported, so b must be 1")
    d = raw["d"]
    if d == "auto":
        if not 0 < eps < 1 or alpha <= 1:
            raise ConfigError("need 0 < epsilon < 1 and alpha > 1")
        d = smallest_d(eps, alpha, b)
    elif not isinstance(d, int) or isinstance(d, bool):
        raise ConfigError(f"d must be an integer or \"auto\", got {d!r}")
    params = Params(eps, alpha, d, (), b)
    p, q = check_exponent(raw["outer"]), check_exponent(raw["inner"])
    tspec = raw["targets"]
    if isinstance(tspec, list):
        targets = [OuterVec.from_json(t) for t in tspec]
    else:
        targets = random_dyadic_targets(int(tspec["count"]), int(tspec["seed"]), int(tspec["blocks"]),
                                        int(tspec["inner"]), int(tspec["denominator"]), float(tspec["bound"]))
    if not targets or any(not len(t) for t in targets):
        raise ConfigError("targets must be a nonempty list of nonzero vectors")
    witnesses = int(raw["witnesses"])
    if witnesses < 1:
        raise ConfigError("witnesses must be >= 1")
    need = witnesses * len(targets) + 1
    K = need if raw["K"] is None else int(raw["K"])
    if K < need:
        raise ConfigError(f"K = {K} cannot hold {witnesses} copies of {len(targets)} targets (need {need})")
    return Config(params, p, q, targets, witnesses, K, SearchConfig.from_json(raw["search"]), raw)


# -- pipelines -----------------------------------------------------------------

def build_main(cfg: Config):
    """Construction anchored at ``witnesses`` round-robin copies of the targets, and its certificate."""
    anchors = list(cfg.targets) * cfg.witnesses
    con = assemble_families(cfg.K, cfg.params, cfg.search, anchors=anchors, p=cfg.p, q=cfg.q)
    cert = build_vector(block_shift_instance(con), cfg.targets)
    return con, cert


def build_rolewicz(cfg: Config):
    rw_cfg = cfg.raw["rolewicz"]
    inst = make_rolewicz(cfg.p, float(rw_cfg["lambda"]))
    enum = inst.enumeration
    targets = [OuterVec({0: {0: 1.0}})] + [enum[a] for a in range(1, int(rw_cfg["targets"]))]
    cert = build_vector(inst, targets)
    _, checks = refine_schedule(inst, int(rw_cfg["refine"]))
    return cert, checks


def build_product(cfg: Config):
    pc_cfg = cfg.raw["product"]
    w = random_dyadic_targets(int(pc_cfg["w_targets"]), int(pc_cfg["w_seed"]), blocks=3, inner=1)
    classes = int(pc_cfg["v_classes"])
    v = random_dyadic_targets(classes, int(pc_cfg["v_seed"]))
    pairs = plan_pairs(classes, len(w))
    anchors = [v[k] for k, _ in pairs]
    con = assemble_families(len(anchors) + 1, cfg.params, cfg.search, anchors=anchors, p=cfg.p, q=cfg.q)
    hc = make_rolewicz(cfg.p, float(cfg.raw["rolewicz"]["lambda"]))
    pc = build_product_vector(hc, block_shift_instance(con), w, v, classes)
    product_targets = [(w[i], v[i % classes]) for i in range(len(w))]
    return con, pc, w, v, product_targets


def _header(rep: Report, cfg: Config, con) -> Report:
    rep.params = {**cfg.params.to_json(), "deltas": list(con.params.deltas), "outer": _exp(cfg.p),
                  "inner": _exp(cfg.q), "K": cfg.K, "search": cfg.search.to_json()}
    rep.schedule = con.weights.schedule.to_json()
    return rep


def _exp(p: float):
    return "sup" if p == float("inf") else p


def run_verify(cfg: Config) -> Report:
    con, cert = build_main(cfg)
    rw_cert, refine_checks = build_rolewicz(cfg)
    rep = _header(Report(), cfg, con)
    rep.merge(run_weight_suite(con.operator, int(cfg.raw["weight_blocks"]), int(cfg.raw["probes"]),
                               cfg.search.seed))
    rep.merge(run_construction_suite(con, cfg.targets, cfg.witnesses))
    rep.merge(run_dynamics_suite(con.operator, cert, cfg.params.epsilon, cfg.raw["lambdas"],
                                 int(cfg.raw["n_max"]), float(cfg.raw["slack"]), rw_cert))
    rep.merge(run_criterion_suite(rw_cert, refine_checks))
    rep.tables["certificate"] = cert.to_json()
    return rep


def run_product(cfg: Config) -> Report:
    con, pc, w, _, product_targets = build_product(cfg)
    pc_cfg = cfg.raw["product"]
    rep = _header(Report(), cfg, con)
    rep.merge(run_product_suite(pc, w, product_targets, float(pc_cfg["product_tol"]),
                                float(pc_cfg["factor_tol"]), int(pc_cfg["v_classes"])))
    return rep


def _write(rep: Report, out: Path, stem: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    rep.write_json(out / f"{stem}.json")
    rep.write_csv(out / "checks.csv")


def _summary(rep: Report) -> None:
    for r in rep.records:
        flag = "PASS" if r.ok else ("FAIL" if r.asserted else "INFO")
        print(f"[{flag}] {r.suite}: {r.check}  ({r.lhs:.6g} vs {r.rhs:.6g})")


def cmd_verify(cfg: Config) -> int:
    rep = run_verify(cfg)
    _write(rep, cfg.out, "report")
    _summary(rep)
    return 0 if rep.passed else 1


def cmd_product(cfg: Config) -> int:
    rep = run_product(cfg)
    _write(rep, cfg.out, "product")
    _summary(rep)
    return 0 if rep.passed else 1


def cmd_orbit(cfg: Config, target: str | None, n_max: int | None) -> int:
    con, cert = build_main(cfg)
    if target is None:
        target = "0"
    if target.lstrip("-").isdigit():
        idx = int(target)
        if not 0 <= idx < len(cfg.targets):
            raise ConfigError(f"target index {idx} outside 0..{len(cfg.targets) - 1}")
        z = cfg.targets[idx]
        default_n = cert.hit_times[idx]
    else:
        try:
            z = OuterVec.from_json(json.loads(target))
        except (json.JSONDecodeError, AttributeError, TypeError, ValueError) as exc:
            raise ConfigError(f"cannot parse target {target!r}: {exc}") from exc
        if not len(z):
            raise ConfigError("target must be nonzero")
        default_n = int(cfg.raw["n_max"])
    n_max = default_n if n_max is None else n_max
    rows = con.operator.orbit_trace(cert.summands, z, n_max)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_orbit_csv(rows, cfg.out / "orbit.csv")
    best = min(rows, key=lambda r: r[2])
    print(f"n_max={n_max} best n={best[0]} relative distance={best[2]:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epshyp", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("verify", "build everything and run all suites"),
                       ("orbit", "CSV trace of relative distances to one target"),
                       ("product", "direct-sum experiment with a Rolewicz factor")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int, help="seed for targets and search")
        if name == "orbit":
            sp.add_argument("--target", help="target index or JSON vector")
            sp.add_argument("--n-max", type=int, help="last time (default: hit time of the target)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config, args.seed, args.out)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "product":
            return cmd_product(cfg)
        return cmd_orbit(cfg, args.target, args.n_max)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (CriterionError, DeltaSearchError) as exc:
        print(f"search failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
