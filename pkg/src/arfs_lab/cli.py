"""Batch experiment runner.

``arfs-lab run --config cfg.json --out DIR`` executes the scenarios named in
the config and writes machine-readable reports (JSON always, CSV for the
tabular scenarios). ``arfs-lab accept`` runs the full acceptance suite and
prints one line per criterion. Exit codes: 0 all checks pass, 1 a check
failed, 2 the config did not validate.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import acceptance
from .bounds import decay_constants, family_pt_bound, verify_coefficient_bound, verify_decay
from .decompose import greedy_decompose, min_cost_decompose, representation_constant
from .distances import golitschek_approximant, l2_distance_closed_form, l2_distance_gram_oracle
from .errors import ArfsLabError, ConfigInvalid
from .expsums import ExponentSet
from .reporting import Report, emit_report
from .spaces import SubspaceFamily, epsilon_star, perturb_family, rho0, stability_floor

SCENARIO_KINDS = (
    "muntz-distance",
    "golitschek",
    "decay",
    "arfs-criterion",
    "stability",
    "decomposition",
    "pt-family",
)

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "arfs-lab scenario config",
    "type": "object",
    "required": ["scenarios"],
    "additionalProperties": False,
    "properties": {
        "scenarios": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "params", "seed", "tolerances"],
                "additionalProperties": False,
                "properties": {
                    "kind": {"enum": list(SCENARIO_KINDS)},
                    "params": {"type": "object"},
                    "seed": {"type": "integer"},
                    "tolerances": {
                        "type": "object",
                        "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            },
        }
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    params: dict
    seed: int
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        return cls(
            kind=data["kind"],
            params=dict(data["params"]),
            seed=int(data["seed"]),
            tolerances=dict(data.get("tolerances", {})),
        )


def load_config(path: str) -> list[ScenarioConfig]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(data, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigInvalid(f"config does not validate: {exc.message}") from exc
    return [ScenarioConfig.from_dict(s) for s in data["scenarios"]]


# ---------------------------------------------------------------------------
# scenario implementations; each returns (reports, rows or None)
# ---------------------------------------------------------------------------

def _scenario_muntz_distance(cfg: ScenarioConfig):
    rel = cfg.tolerances.get("rel", 1e-9)
    gammas = [float(g) for g in cfg.params["gammas"]]
    grid = cfg.params.get("gamma_grid") or [cfg.params["gamma"]]
    rows = []
    worst = 0.0
    for gamma in grid:
        closed = l2_distance_closed_form(float(gamma), gammas)
        gram = l2_distance_gram_oracle(float(gamma), gammas)
        diff = abs(closed - gram) / closed if closed else abs(closed - gram)
        worst = max(worst, diff)
        rows.append(
            {"gamma": float(gamma), "closed_form": closed, "gram_oracle": gram,
             "rel_diff": diff}
        )
    report = Report(
        "muntz-distance-oracle", worst <= rel, rel - worst,
        {"max_rel_diff": worst, "n_points": len(rows)},
    )
    return [report], rows


def _scenario_golitschek(cfg: ScenarioConfig):
    tol = cfg.tolerances.get("tol", 1e-6)
    alpha = float(cfg.params["alpha"])
    exps = ExponentSet(cfg.params["exponents"])
    result = golitschek_approximant(alpha, exps, tol=tol)
    margin = result.bound + tol - result.certified_error.upper
    report = Report(
        "golitschek-soundness", margin >= 0.0, margin,
        {
            "alpha": alpha,
            "bound": result.bound,
            "certified_error_upper": result.certified_error.upper,
            "certified_error_lower": result.certified_error.lower,
            "result": result.to_jsonable(),
        },
    )
    return [report], None


def _scenario_decay(cfg: ScenarioConfig):
    tol = cfg.tolerances.get("tol", 1e-4)
    identity_tol = cfg.tolerances.get("identity_rel", 1e-12)
    deltas = cfg.params.get("delta_grid") or [cfg.params["delta"]]
    big_ms = cfg.params.get("M_grid") or [cfg.params["M"]]
    rows = []
    worst_identity = 0.0
    for delta in deltas:
        for big_m in big_ms:
            consts = decay_constants(float(delta), float(big_m))
            rebuilt = consts.a * consts.M * math.exp(consts.m * (consts.b + 1.0) - 1.0)
            rel_err = abs(consts.c - rebuilt) / consts.c
            worst_identity = max(worst_identity, rel_err)
            rows.append(
                {"delta": consts.delta, "M": consts.M, "a": consts.a, "b": consts.b,
                 "c": consts.c, "m": consts.m, "identity_rel_err": rel_err}
            )
    reports = [
        Report(
            "decay-constants-identity", worst_identity <= identity_tol,
            identity_tol - worst_identity,
            {"max_rel_err": worst_identity, "grid_size": len(rows)},
        )
    ]
    n_random = int(cfg.params.get("n_random", 25))
    if n_random > 0:
        rng = np.random.default_rng(cfg.seed)
        failures = 0
        worst = math.inf
        for _ in range(n_random):
            f, delta, big_m = acceptance.random_admissible_expsum(rng)
            rep_c = verify_coefficient_bound(f, delta, big_m, tol=tol)
            threshold = decay_constants(delta, big_m).threshold
            ts = list(threshold + rng.uniform(0.0, 15.0, 3))
            rep_d = verify_decay(f, delta, big_m, ts, tol=tol)
            failures += (not rep_c.passed) + (not rep_d.passed)
            worst = min(worst, rep_c.margin, rep_d.margin)
        reports.append(
            Report(
                "decay-random-verification", failures == 0, worst,
                {"n_random": n_random, "failures": failures},
            )
        )
    return reports, rows


def _scenario_arfs_criterion(cfg: ScenarioConfig):
    tol = cfg.tolerances.get("tol", 1e-6)
    family = SubspaceFamily.from_jsonable(cfg.params["family"])
    spanning = family.spans_ambient()
    eps = epsilon_star(family, tol=tol)
    consistent = (eps > tol) == spanning
    report = Report(
        "arfs-criterion-constant", consistent, eps,
        {"epsilon_star": eps, "spanning": spanning},
    )
    return [report], None


def _scenario_stability(cfg: ScenarioConfig):
    tol = cfg.tolerances.get("slack", 2e-4)
    family = SubspaceFamily.from_jsonable(cfg.params["family"])
    fractions = cfg.params.get("r_fractions", [0.1, 0.5])
    eps = epsilon_star(family)
    rows = []
    reports = []
    for frac in fractions:
        r = float(frac) * eps
        tilted = perturb_family(family, r, seed=cfg.seed)
        observed_r = max(
            (rho0(s, p, family.space) for (_, s), (_, p) in zip(family.members, tilted.members)),
            default=0.0,
        )
        eps_tilted = epsilon_star(tilted)
        floor = stability_floor(eps, r) if r < eps else 0.0
        margin = eps_tilted - (floor - tol)
        rows.append(
            {"r": r, "observed_rho0": observed_r, "eps_perturbed": eps_tilted,
             "floor": floor, "margin": margin}
        )
        reports.append(
            Report(
                f"stability-r={frac}", margin >= 0.0 and observed_r <= r + 1e-12,
                margin, {"eps": eps, "r": r, "eps_perturbed": eps_tilted, "floor": floor},
            )
        )
    return reports, rows


def _scenario_decomposition(cfg: ScenarioConfig):
    tol = cfg.tolerances.get("tol", 1e-6)
    family = SubspaceFamily.from_jsonable(cfg.params["family"])
    reports = []
    if "x" in cfg.params:
        x = np.asarray(cfg.params["x"], dtype=float)
        eps_budget = float(cfg.params.get("eps", 0.5))
        greedy = greedy_decompose(x, family, eps=eps_budget, tol=tol)
        mincost = min_cost_decompose(x, family, tol=tol)
        sandwich = greedy.cost + tol - mincost.cost
        reports.append(
            Report(
                "decomposition-sandwich",
                mincost.cost >= family.space.norm(x) - tol and sandwich >= 0.0,
                sandwich,
                {
                    "norm_x": family.space.norm(x),
                    "greedy": greedy.to_jsonable(family.space),
                    "min_cost": mincost.to_jsonable(family.space),
                },
            )
        )
    samples = int(cfg.params.get("samples", 0))
    if samples > 0:
        eps = epsilon_star(family)
        m_hat = representation_constant(family, samples=samples, seed=cfg.seed)
        margin = 1.0 / eps + tol - m_hat
        reports.append(
            Report(
                "decomposition-duality", margin >= 0.0, margin,
                {"epsilon_star": eps, "M_hat": m_hat, "samples": samples},
            )
        )
    return reports, None


def _scenario_pt_family(cfg: ScenarioConfig):
    tol = cfg.tolerances.get("tol", 1e-4)
    delta = float(cfg.params["delta"])
    big_m = float(cfg.params["M"])
    families = [ExponentSet(e) for e in cfg.params["families"]]
    t_grid = [float(t) for t in cfg.params["t_grid"]]
    rows = []
    worst = math.inf
    failures = 0
    for t in t_grid:
        rep = family_pt_bound(families, delta, big_m, t, tol=tol)
        rows.append(
            {"t": t, "max_norm": rep.witness["max_observed"],
             "bound": rep.witness["bound"], "margin": rep.margin}
        )
        worst = min(worst, rep.margin)
        failures += 0 if rep.passed else 1
    report = Report(
        "pt-family-bound", failures == 0, worst,
        {"failures": failures, "n_times": len(t_grid)},
    )
    return [report], rows


_SCENARIOS = {
    "muntz-distance": _scenario_muntz_distance,
    "golitschek": _scenario_golitschek,
    "decay": _scenario_decay,
    "arfs-criterion": _scenario_arfs_criterion,
    "stability": _scenario_stability,
    "decomposition": _scenario_decomposition,
    "pt-family": _scenario_pt_family,
}


def run_experiment(cfg: ScenarioConfig, out_dir: str, index: int = 0) -> list[Report]:
    """Execute one scenario deterministically, writing its JSON report (and a
    CSV table when the scenario is tabular) into ``out_dir``. Returns the
    scenario's reports."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        reports, rows = _SCENARIOS[cfg.kind](cfg)
    except KeyError as exc:
        raise ConfigInvalid(f"unknown scenario kind {cfg.kind!r}") from exc
    stem = f"scenario_{index:03d}_{cfg.kind}"
    emit_report(reports, "json", str(out / f"{stem}.json"))
    if rows:
        emit_report(rows, "csv", str(out / f"{stem}.csv"))
    return reports


def _cmd_run(args) -> int:
    try:
        scenarios = load_config(args.config)
    except ConfigInvalid as exc:
        print(f"config invalid: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        scenarios = [
            ScenarioConfig(s.kind, s.params, args.seed, s.tolerances)
            for s in scenarios
        ]

    def execute(pair):
        index, cfg = pair
        return run_experiment(cfg, args.out, index=index)

    Path(args.out).mkdir(parents=True, exist_ok=True)
    threads = int(os.environ.get("ARFS_LAB_THREADS", "1"))
    jobs = list(enumerate(scenarios))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_reports = list(pool.map(execute, jobs))
    else:
        all_reports = [execute(j) for j in jobs]

    flat = [r for reports in all_reports for r in reports]
    emit_report(flat, "json", str(Path(args.out) / "reports.json"))
    if args.format == "csv":
        emit_report(flat, "csv", str(Path(args.out) / "reports.csv"))
    failing = [r for r in flat if not r.passed]
    for rep in flat:
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {rep.check} (margin {rep.margin:.6g})")
    if failing:
        print(f"{len(failing)} failing check(s):", file=sys.stderr)
        for rep in failing:
            print(f"  {rep.check}: margin {rep.margin:.6g}", file=sys.stderr)
        return 1
    return 0


def _cmd_accept(args) -> int:
    reports = acceptance.run_all(verbose=True)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        emit_report(reports, "json", str(Path(args.out) / "acceptance.json"))
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arfs-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run scenarios from a JSON config")
    run_p.add_argument("--config", required=True, help="path to the scenario config")
    run_p.add_argument("--out", required=True, help="output directory for reports")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the seed of every scenario")
    run_p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="also write the aggregate report as CSV")
    run_p.set_defaults(func=_cmd_run)

    acc_p = sub.add_parser("accept", help="run the full acceptance suite")
    acc_p.add_argument("--out", default=None, help="directory for acceptance.json")
    acc_p.set_defaults(func=_cmd_accept)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ArfsLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
