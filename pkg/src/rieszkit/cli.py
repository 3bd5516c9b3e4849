"""Config-driven experiment runner.

Subcommands expose the toolkit's checks and operators with reproducible
seeds.  Exit codes are scriptable: 0 all checks passed, 2 a check failed,
3 a hypothesis audit failed, 4 the config did not validate.  Reports are
deterministic given (config, seed); the write timestamp is kept in a
separate top-level field so byte comparisons can ignore it.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time

import numpy as np

from .atoms import (AtomParams, AtomSampler, read_atom_manifest,
                    sample_atom_campaign, validate_atom, write_atom_manifest)
from .config import RunConfig, load_config
from .errors import ConfigError, HypothesisFailed, RieszkitError
from .geometry import Ball
from .operators import apply_T_batch
from .verify import (CampaignSpec, check_containment_step,
                     check_critical_index_chains, check_maximal_inequalities,
                     check_pointwise_atom_bound, check_quasi_norm_assembly,
                     check_rh_ball_inequality, run_theorem_campaign)
from .weights import (critical_indices, estimate_A1_constant,
                      estimate_Ap_constant, estimate_Apq_constant,
                      estimate_RH_constant)

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_HYPOTHESIS = 3
EXIT_CONFIG = 4


def _with_seed(spec: CampaignSpec, seed: int | None) -> CampaignSpec:
    if seed is None:
        return spec
    return dataclasses.replace(spec, seed=int(seed))


def _write_report(out_dir: str, name: str, payload: dict):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.json")
    with open(path, "w") as fh:
        json.dump({"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
                   "report": payload}, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return path


def _write_witness_csv(out_dir: str, name: str, rows):
    if not rows:
        return None
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.csv")
    keys = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(keys)
        for row in rows:
            writer.writerow([row.get(k) for k in keys])
    return path


def cmd_weights_classify(cfg: RunConfig, out_dir: str) -> int:
    """Estimate the configured class constants and critical indices."""
    block = cfg.classify_block or {}
    family = cfg.family
    scheme = cfg.quadrature
    reports = []
    for i, cls in enumerate(block.get("classes", [{"kind": "A1"}])):
        kind = cls.get("kind")
        if kind == "A1":
            rep = estimate_A1_constant(cfg.weight, family, scheme)
        elif kind == "Ap":
            rep = estimate_Ap_constant(cfg.weight, float(cls["p"]), family, scheme)
        elif kind == "Apq":
            rep = estimate_Apq_constant(cfg.weight, float(cls["p"]), float(cls["q"]),
                                        family, scheme)
        elif kind == "RH":
            rep = estimate_RH_constant(cfg.weight, float(cls["s"]), family, scheme)
        else:
            raise ConfigError(f"classify.classes[{i}].kind",
                              f"unknown class kind {kind!r}")
        reports.append(rep.to_dict())
    payload = {"classes": reports}
    if block.get("critical_indices", True):
        payload["critical_indices"] = critical_indices(
            cfg.weight, family, scheme, tol=float(block.get("tol", 1e-2))).to_dict()
    _write_report(out_dir, "weights-classify", payload)
    print(json.dumps(payload, indent=1, sort_keys=True))
    return EXIT_OK


def cmd_operator_sweep(cfg: RunConfig, out_dir: str) -> int:
    """Evaluate the configured operator on an x-lattice and emit CSV."""
    if not cfg.sweeps:
        return EXIT_OK
    if cfg.exponents is None or cfg.matrices is None:
        raise ConfigError("sweeps", "operator sweeps need matrices and exponents")
    os.makedirs(out_dir, exist_ok=True)
    for sweep in cfg.sweeps:
        xs = np.linspace(sweep["x_min"], sweep["x_max"], sweep["points"])
        if cfg.dimension == 1:
            pts = xs[:, None]
        else:
            pts = np.column_stack([xs, np.zeros_like(xs)])
        vals = apply_T_batch(sweep["function"], pts, cfg.exponents, cfg.matrices,
                             cfg.quadrature)
        path = os.path.join(out_dir, f"{sweep['name']}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i}" for i in range(cfg.dimension)] + ["value"])
            for pt, v in zip(pts, vals):
                writer.writerow([repr(float(c)) for c in pt[:cfg.dimension]] + [repr(float(v))])
        print(f"wrote {path}")
    return EXIT_OK


def _atom_params_from(cfg: RunConfig) -> AtomParams:
    if cfg.campaign is None:
        raise ConfigError("atom", "atom generation needs an atom/campaign block")
    spec = cfg.campaign
    d = spec.d
    if d is None:
        from .atoms import admissible_params

        d = admissible_params(cfg.weight, spec.p, cfg.family, cfg.quadrature).d_min
    return AtomParams(spec.p, spec.p0, d, cfg.weight, cfg.dimension)


def cmd_atoms_gen(cfg: RunConfig, out_dir: str, seed: int | None) -> int:
    params = _atom_params_from(cfg)
    spec = _with_seed(cfg.campaign, seed)
    sampler = AtomSampler(tuple(np.asarray(c) for c in spec.centers), spec.radii)
    atoms = sample_atom_campaign(params, sampler, spec.count, spec.seed, cfg.quadrature)
    os.makedirs(out_dir, exist_ok=True)
    manifest = os.path.join(out_dir, "atoms.jsonl")
    write_atom_manifest(atoms, manifest)
    print(f"wrote {manifest} ({len(atoms)} atoms)")
    return EXIT_OK


def cmd_atoms_validate(cfg: RunConfig, out_dir: str, manifest: str) -> int:
    atoms = read_atom_manifest(manifest)
    rows = []
    all_ok = True
    for i, atom in enumerate(atoms):
        rep = validate_atom(atom, cfg.quadrature)
        rows.append({"index": i, **rep.to_dict()})
        all_ok &= rep.passed
    _write_report(out_dir, "atoms-validate", {"count": len(atoms), "all_passed": all_ok,
                                              "results": rows})
    print(f"validated {len(atoms)} atoms: {'all passed' if all_ok else 'FAILURES'}")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def _run_check(cfg: RunConfig, item: dict, seed: int | None, jobs: int):
    name = item["check"]
    scheme = cfg.quadrature
    if name in ("theorem-thm1", "theorem-ta"):
        if cfg.exponents is None or cfg.matrices is None or cfg.campaign is None:
            raise ConfigError("checks", f"{name} needs matrices, exponents and a campaign")
        kind = "thm-zero" if name == "theorem-thm1" else "thm-positive"
        spec = _with_seed(cfg.campaign, seed)
        return run_theorem_campaign(kind, cfg.weight, cfg.exponents, cfg.matrices,
                                    spec, scheme, jobs=jobs)
    if name == "pointwise-atom-bound":
        if cfg.exponents is None or cfg.matrices is None or cfg.campaign is None:
            raise ConfigError("checks", f"{name} needs matrices, exponents and atom block")
        params = _atom_params_from(cfg)
        return check_pointwise_atom_bound(
            params, cfg.exponents, cfg.matrices,
            item.get("center", [0.0] * cfg.dimension),
            radii=tuple(item.get("radii", (0.25, 1.0, 4.0))),
            seed=seed if seed is not None else int(item.get("seed", 0)),
            scheme=scheme)
    if name == "containment-step":
        if cfg.matrices is None:
            raise ConfigError("checks", f"{name} needs matrices")
        bb = item.get("ball", {"center": [1.0] * cfg.dimension, "radius": 0.1})
        ball = Ball(bb["center"], bb["radius"])
        rng = np.random.default_rng(seed if seed is not None else int(item.get("seed", 0)))
        count = int(item.get("count", 200))
        xi = ball.center + ball.radius * (2.0 * rng.random((count, cfg.dimension)) - 1.0)
        xi = xi[np.linalg.norm(xi - ball.center, axis=1) <= ball.radius]
        big = 2.0 * cfg.matrices.norm_bound * ball.radius
        from .geometry import classify

        xs = []
        for t in np.geomspace(1.1, 32.0, count):
            for sign in (1.0, -1.0):
                x = cfg.matrices.apply(0, ball.center) + sign * big * t * np.ones(cfg.dimension)
                if classify(x, ball, cfg.matrices).is_outer():
                    xs.append(x)
        return check_containment_step(ball, cfg.matrices, xi, xs)
    if name == "rh-ball-inequality":
        return check_rh_ball_inequality(cfg.weight, float(item.get("p", 1.0)),
                                        float(item.get("alpha", 0.5)), cfg.family,
                                        scheme)
    if name == "critical-index-chain":
        q = item.get("q")
        return check_critical_index_chains(cfg.weight, float(item.get("p", 0.5)),
                                           None if q is None else float(q),
                                           cfg.family, scheme,
                                           tol=float(item.get("tol", 1e-2)))
    if name == "maximal-inequality":
        balls = [Ball(b["center"], b["radius"]) for b in
                 item.get("test_balls", [{"center": [0.0], "radius": 1.0},
                                         {"center": [0.0], "radius": 0.5},
                                         {"center": [1.0], "radius": 2.0}])]
        a = item.get("alpha")
        return check_maximal_inequalities(cfg.weight, float(item.get("p", 2.0)), balls,
                                          None if a is None else float(a), scheme)
    if name == "quasi-norm-assembly":
        out = check_quasi_norm_assembly(item.get("lambdas", [1.0]),
                                        float(item.get("q", 1.0)), item.get("p"))
        from .verify import VerificationReport

        ok = out.get("holds", True)
        return VerificationReport("quasi-norm-assembly", "pass" if ok else "fail",
                                  out["assembly"], extras=out)
    raise ConfigError("checks", f"unknown check {name!r}")


def cmd_verify(cfg: RunConfig, out_dir: str, seed: int | None, jobs: int) -> int:
    """Run the selected checks; exit 0 only if every verdict is a pass."""
    if not cfg.checks:
        raise ConfigError("checks", "verify needs a nonempty checks list")
    all_pass = True
    for i, item in enumerate(cfg.checks):
        name = item["check"]
        tag = f"{i:02d}-{name}"
        try:
            report = _run_check(cfg, item, seed, jobs)
        except HypothesisFailed as exc:
            _write_report(out_dir, tag, {"check_id": name, "verdict": "hypothesis-failed",
                                         "failed_item": exc.item, "detail": exc.detail})
            print(f"[{name}] HYPOTHESIS FAILED: {exc.item}")
            return EXIT_HYPOTHESIS
        payload = report.to_dict()
        _write_report(out_dir, tag, payload)
        if report.witnesses and all(isinstance(wit, dict) for wit in report.witnesses):
            _write_witness_csv(out_dir, f"{tag}-witnesses", report.witnesses)
        print(f"[{name}] {report.verdict} (worst {report.worst:.6g})")
        all_pass &= report.passed()
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rieszkit",
        description="Product-kernel fractional integrals, weight diagnostics, "
                    "and weighted-atom verification campaigns")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="path to a JSON run config")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's campaign seed")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for campaigns")

    pw = sub.add_parser("weights", help="weight diagnostics")
    pw.add_argument("action", choices=["classify"])
    common(pw)

    po = sub.add_parser("operator", help="operator evaluation")
    po.add_argument("action", choices=["sweep"])
    common(po)

    pa = sub.add_parser("atoms", help="atom generation and validation")
    pa.add_argument("action", choices=["gen", "validate"])
    pa.add_argument("--manifest", default=None,
                    help="atom manifest to validate (JSON lines)")
    common(pa)

    pv = sub.add_parser("verify", help="run verification checks")
    common(pv)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        out_dir = args.out or os.path.join(cfg.base_dir, cfg.output_dir)
        seed = args.seed if args.seed is not None else cfg.seed
        if args.command == "weights":
            return cmd_weights_classify(cfg, out_dir)
        if args.command == "operator":
            return cmd_operator_sweep(cfg, out_dir)
        if args.command == "atoms":
            if args.action == "gen":
                return cmd_atoms_gen(cfg, out_dir, seed)
            manifest = args.manifest or os.path.join(out_dir, "atoms.jsonl")
            return cmd_atoms_validate(cfg, out_dir, manifest)
        if args.command == "verify":
            return cmd_verify(cfg, out_dir, seed, args.jobs)
        raise ConfigError("(cli)", f"unknown command {args.command}")
    except ConfigError as exc:
        print(json.dumps({"error": "config", "path": exc.path, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisFailed as exc:
        print(json.dumps({"error": "hypothesis", "item": exc.item,
                          "detail": exc.detail}), file=sys.stderr)
        return EXIT_HYPOTHESIS
    except RieszkitError as exc:
        print(json.dumps({"error": "check", "message": str(exc)}), file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
