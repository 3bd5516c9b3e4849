"""Run configurations: a versioned JSON schema validated with field paths.

The Sobolev exponent q is never read from a config; it is always derived
from (p, alpha, n), which keeps configs internally consistent by
construction.  Every validation error names the offending field path so
configs can be fixed without reading the code.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .geometry import Ball, BallFamily, MatrixFamily, dyadic_ball_family
from .operators import ExponentProfile, SampledFunction, indicator, sampled_from_csv
from .quadrature import QuadratureScheme
from .verify import CampaignSpec
from .weights import (LogExampleWeight, PowerWeight, ProductPowerWeight,
                      RegularGrid, TabulatedWeight, tabulated_from_csv)

SCHEMA_VERSION = 1

KNOWN_CHECKS = (
    "theorem-thm1", "theorem-ta", "pointwise-atom-bound", "containment-step",
    "rh-ball-inequality", "critical-index-chain", "maximal-inequality",
    "quasi-norm-assembly",
)


def _expect(cond: bool, path: str, message: str):
    if not cond:
        raise ConfigError(path, message)


def _get(block: dict, key: str, path: str, required: bool = True, default=None):
    if key not in block:
        _expect(not required, f"{path}.{key}", "required field is missing")
        return default
    return block[key]


def _number(block, key, path, required=True, default=None):
    v = _get(block, key, path, required, default)
    if v is None:
        return None
    _expect(isinstance(v, (int, float)) and not isinstance(v, bool),
            f"{path}.{key}", f"expected a number, got {type(v).__name__}")
    return float(v)


def _integer(block, key, path, required=True, default=None):
    v = _get(block, key, path, required, default)
    if v is None:
        return None
    _expect(isinstance(v, int) and not isinstance(v, bool),
            f"{path}.{key}", f"expected an integer, got {type(v).__name__}")
    return int(v)


def build_weight(block: dict, dimension: int, base_dir: str, path: str = "weight"):
    _expect(isinstance(block, dict), path, "expected an object")
    kind = _get(block, "kind", path)
    if kind == "power":
        a = _number(block, "exponent", path)
        _expect(a > -dimension, f"{path}.exponent",
                f"must exceed -{dimension} for local integrability")
        return PowerWeight(a, dimension, _number(block, "scale", path, False, 1.0))
    if kind == "log_example":
        return LogExampleWeight(dimension, _number(block, "power", path, False, 1.0),
                                _number(block, "scale", path, False, 1.0))
    if kind == "product_power":
        raw = _get(block, "factors", path)
        _expect(isinstance(raw, list) and raw, f"{path}.factors",
                "expected a nonempty list of [exponent, center] pairs")
        factors = []
        for i, item in enumerate(raw):
            _expect(isinstance(item, list) and len(item) == 2, f"{path}.factors[{i}]",
                    "expected [exponent, center]")
            a, c = item
            _expect(isinstance(c, list) and len(c) == dimension, f"{path}.factors[{i}][1]",
                    f"center must be a point in R^{dimension}")
            _expect(a > -dimension, f"{path}.factors[{i}][0]",
                    f"must exceed -{dimension}")
            factors.append((float(a), tuple(float(v) for v in c)))
        return ProductPowerWeight(tuple(factors), dimension,
                                  _number(block, "scale", path, False, 1.0))
    if kind == "tabulated":
        gb = _get(block, "grid", path)
        _expect(isinstance(gb, dict), f"{path}.grid", "expected an object")
        grid = RegularGrid(tuple(gb.get("lo", ())), tuple(gb.get("hi", ())),
                           tuple(gb.get("shape", ())))
        _expect(grid.dimension == dimension, f"{path}.grid",
                f"grid dimension {grid.dimension} != config dimension {dimension}")
        csv = _get(block, "csv", path, required=False)
        if csv is not None:
            full = csv if os.path.isabs(csv) else os.path.join(base_dir, csv)
            _expect(os.path.exists(full), f"{path}.csv", f"file not found: {full}")
            return tabulated_from_csv(full, grid)
        values = _get(block, "values", path)
        return TabulatedWeight(grid, np.asarray(values, dtype=float))
    raise ConfigError(f"{path}.kind", f"unknown weight kind {kind!r}")


def build_matrices(block, dimension: int, alpha: float, path: str = "matrices") -> MatrixFamily:
    # pairwise invertibility for the zero-order case is audited by the checks
    # (a violation is a failed hypothesis, not a malformed config)
    _expect(isinstance(block, list) and block, path,
            "expected a nonempty list of row-major matrices")
    mats = []
    for j, rows in enumerate(block):
        arr = np.asarray(rows, dtype=float)
        _expect(arr.shape == (dimension, dimension), f"{path}[{j}]",
                f"expected a {dimension}x{dimension} matrix, got shape {arr.shape}")
        mats.append(arr)
    try:
        return MatrixFamily(tuple(mats))
    except Exception as exc:
        raise ConfigError(path, str(exc))


def build_exponents(block: dict, dimension: int, m: int, path: str = "exponents") -> ExponentProfile:
    _expect(isinstance(block, dict), path, "expected an object")
    alpha = _number(block, "alpha", path)
    raw = _get(block, "alphas", path, required=False, default="equal-split")
    try:
        if raw == "equal-split":
            from .operators import equal_split

            return equal_split(alpha, m, dimension)
        _expect(isinstance(raw, list), f"{path}.alphas",
                "expected 'equal-split' or a list of exponents")
        _expect(len(raw) == m, f"{path}.alphas",
                f"expected {m} exponents to match the matrix family")
        return ExponentProfile(alpha, tuple(float(v) for v in raw), dimension)
    except ValueError as exc:
        raise ConfigError(path, str(exc))


def build_quadrature(block: dict | None, dimension: int, path: str = "quadrature") -> QuadratureScheme:
    from .quadrature import default_scheme

    if block is None:
        return default_scheme(dimension)
    _expect(isinstance(block, dict), path, "expected an object")
    base = default_scheme(dimension)
    try:
        return QuadratureScheme(
            resolution=_integer(block, "resolution", path, False, base.resolution),
            policy=_get(block, "policy", path, False, base.policy),
            tol=_number(block, "tol", path, False, base.tol),
            patch_cells=_integer(block, "patch_cells", path, False, base.patch_cells),
            patch_shells=_integer(block, "patch_shells", path, False, base.patch_shells),
            patch_sectors=_integer(block, "patch_sectors", path, False, base.patch_sectors))
    except ValueError as exc:
        raise ConfigError(path, str(exc))


def build_ball_family(block: dict | None, dimension: int, path: str = "family") -> BallFamily:
    if block is None:
        centers = ([[0.0], [0.5], [-0.5], [1.0], [-1.0], [2.0], [-2.0]]
                   if dimension == 1 else
                   [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
        return dyadic_ball_family(centers, -8, 4)
    _expect(isinstance(block, dict), path, "expected an object")
    centers = _get(block, "centers", path)
    _expect(isinstance(centers, list) and centers, f"{path}.centers",
            "expected a nonempty list of points")
    for i, c in enumerate(centers):
        _expect(isinstance(c, list) and len(c) == dimension, f"{path}.centers[{i}]",
                f"expected a point in R^{dimension}")
    k_min = _integer(block, "k_min", path, False, -8)
    k_max = _integer(block, "k_max", path, False, 4)
    _expect(k_max - k_min >= 3, f"{path}.k_max",
            "radius range must span at least 4 dyadic scales")
    return dyadic_ball_family(centers, k_min, k_max)


def build_campaign(block: dict | None, atom_block: dict | None, dimension: int,
                   path: str = "campaign") -> CampaignSpec:
    block = block or {}
    atom_block = atom_block or {}
    _expect(isinstance(block, dict), path, "expected an object")
    p = _number(atom_block, "p", "atom", False, 1.0)
    _expect(0.0 < p <= 1.0, "atom.p", "must lie in (0, 1]")
    p0 = _number(atom_block, "p0", "atom", False, 2.0)
    _expect(p0 > 1.0 and math.isfinite(p0), "atom.p0",
            "must be finite and exceed 1 (infinite p0 is out of scope)")
    d = _integer(atom_block, "d", "atom", False, None)
    centers = _get(block, "centers", path, False, [[0.0], [1.0], [-2.0]])
    for i, c in enumerate(centers):
        _expect(isinstance(c, list) and len(c) == dimension, f"{path}.centers[{i}]",
                f"expected a point in R^{dimension}")
    radii = _get(block, "radii", path, False, [0.25, 1.0, 4.0])
    _expect(isinstance(radii, list) and radii, f"{path}.radii",
            "expected a nonempty list of radii")
    count = _integer(block, "count", path, False, 50)
    _expect(count >= 1, f"{path}.count", "must be at least 1")
    return CampaignSpec(
        count=count,
        seed=_integer(block, "seed", path, False, 0),
        centers=tuple(tuple(float(v) for v in c) for c in centers),
        radii=tuple(float(r) for r in radii),
        p=p, p0=p0, s=_number(block, "s", path, False, None), d=d,
        outer_octaves=_integer(block, "outer_octaves", path, False, 8),
        inner_resolution=_integer(block, "inner_resolution", path, False, 256),
        outer_resolution=_integer(block, "outer_resolution", path, False, 64))


def build_function(block: dict, dimension: int, base_dir: str, path: str) -> SampledFunction:
    _expect(isinstance(block, dict), path, "expected an object")
    kind = _get(block, "kind", path, False, "indicator")
    center = _get(block, "center", path)
    _expect(isinstance(center, list) and len(center) == dimension, f"{path}.center",
            f"expected a point in R^{dimension}")
    radius = _number(block, "radius", path)
    _expect(radius > 0, f"{path}.radius", "must be positive")
    if kind == "indicator":
        return indicator(center, radius)
    if kind == "csv":
        csv = _get(block, "csv", path)
        full = csv if os.path.isabs(csv) else os.path.join(base_dir, csv)
        _expect(os.path.exists(full), f"{path}.csv", f"file not found: {full}")
        return sampled_from_csv(full, Ball(center, radius))
    raise ConfigError(f"{path}.kind", f"unknown function kind {kind!r}")


@dataclass
class RunConfig:
    """Validated run configuration (q always derived, never supplied)."""

    dimension: int
    weight: object
    quadrature: QuadratureScheme
    raw: dict
    base_dir: str
    seed: int | None = None
    matrices: MatrixFamily | None = None
    exponents: ExponentProfile | None = None
    campaign: CampaignSpec | None = None
    checks: list = field(default_factory=list)
    sweeps: list = field(default_factory=list)
    classify_block: dict | None = None
    family: BallFamily | None = None
    atoms_block: dict | None = None
    output_dir: str = "out"


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("(file)", f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError("(file)", f"invalid JSON: {exc}")
    return parse_config(raw, os.path.dirname(os.path.abspath(path)))


def parse_config(raw: dict, base_dir: str = ".") -> RunConfig:
    _expect(isinstance(raw, dict), "(root)", "config must be a JSON object")
    version = _integer(raw, "version", "(root)")
    _expect(version == SCHEMA_VERSION, "version",
            f"unsupported schema version {version} (expected {SCHEMA_VERSION})")
    n = _integer(raw, "dimension", "(root)")
    _expect(n in (1, 2), "dimension", "only dimensions 1 and 2 are supported")
    # the norm defining the expanded-ball radius is a visible choice; only the
    # spectral norm is implemented
    norm_choice = raw.get("matrix_norm", "spectral")
    _expect(norm_choice == "spectral", "matrix_norm",
            f"only the spectral norm is supported, got {norm_choice!r}")

    weight = build_weight(_get(raw, "weight", "(root)"), n, base_dir)
    scheme = build_quadrature(raw.get("quadrature"), n)

    exponents = None
    matrices = None
    if "matrices" in raw or "exponents" in raw:
        _expect("matrices" in raw and "exponents" in raw, "(root)",
                "matrices and exponents must be given together")
        alpha = _number(raw["exponents"], "alpha", "exponents")
        matrices = build_matrices(raw["matrices"], n, alpha)
        exponents = build_exponents(raw["exponents"], n, matrices.m)

    campaign = None
    if "campaign" in raw or "atom" in raw:
        campaign = build_campaign(raw.get("campaign"), raw.get("atom"), n)

    checks = []
    for i, item in enumerate(raw.get("checks", [])):
        _expect(isinstance(item, dict), f"checks[{i}]",
                "expected an object with a 'check' field")
        name = _get(item, "check", f"checks[{i}]")
        _expect(name in KNOWN_CHECKS, f"checks[{i}].check",
                f"unknown check {name!r}; known: {', '.join(KNOWN_CHECKS)}")
        checks.append(item)

    sweeps = []
    for i, item in enumerate(raw.get("sweeps", [])):
        path_i = f"sweeps[{i}]"
        _expect(isinstance(item, dict), path_i, "expected an object")
        fn = build_function(_get(item, "function", path_i), n, base_dir,
                            f"{path_i}.function")
        name = _get(item, "name", path_i, False, f"sweep{i}")
        x_min = _number(item, "x_min", path_i)
        x_max = _number(item, "x_max", path_i)
        _expect(x_max > x_min, f"{path_i}.x_max", "must exceed x_min")
        points = _integer(item, "points", path_i, False, 101)
        _expect(points >= 2, f"{path_i}.points", "need at least 2 points")
        sweeps.append({"name": name, "function": fn, "x_min": x_min,
                       "x_max": x_max, "points": points})

    out_block = raw.get("output", {})
    _expect(isinstance(out_block, dict), "output", "expected an object")

    return RunConfig(
        dimension=n, weight=weight, quadrature=scheme, raw=raw, base_dir=base_dir,
        seed=_integer(raw, "seed", "(root)", False, None),
        matrices=matrices, exponents=exponents, campaign=campaign,
        checks=checks, sweeps=sweeps,
        classify_block=raw.get("classify"),
        family=build_ball_family(raw.get("classify", {}).get("family")
                                 if isinstance(raw.get("classify"), dict) else None, n),
        atoms_block=raw.get("atoms"),
        output_dir=out_block.get("dir", "out"))
