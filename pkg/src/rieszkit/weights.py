"""Weights and finite-family estimates of their Muckenhoupt-type constants.

A weight here is one of four analytic or tabulated positive functions on
R^n.  Class membership (A_1, A_p, A_{p,q}, reverse Holder) is probed on a
finite family of balls: the supremum defining each constant is replaced
by a maximum over the family, essential infima by minima over quadrature
nodes, and a "diverging" verdict is issued when the estimate either is
infinite outright or keeps growing as the node set refines toward the
singular points.  Estimates are therefore lower bounds for the true
constants; the point of the family design (dyadic radii around the
singular centers) is that power and log weights attain their worst
behavior exactly there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisFailed, NotIntegrable, OutOfGrid, SingularPoint
from .geometry import Ball, BallFamily, MatrixFamily, as_point
from .quadrature import (LogPowerProfile, PowerProfile, QuadratureScheme,
                         RadialSingularity, default_scheme, integrate_ball,
                         refinement_series)

_SING_TOL = 1e-14

#: growth factor over the refinement series that flags a diverging constant
DIVERGENCE_GROWTH = 4.0


# ---------------------------------------------------------------------------
# Weight variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerWeight:
    """w(x) = scale * |x|^exponent, singular (pole or zero) at the origin."""

    exponent: float
    dimension: int = 1
    scale: float = 1.0

    def __post_init__(self):
        if self.exponent <= -self.dimension:
            raise ValueError("power weight needs exponent > -dimension to be locally integrable")
        if self.scale <= 0:
            raise ValueError("weight scale must be positive")


@dataclass(frozen=True)
class LogExampleWeight:
    """w(x) = (log(1/|x|))^power for |x| < 1/e and 1 otherwise (scaled)."""

    dimension: int = 1
    power: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("weight scale must be positive")


@dataclass(frozen=True)
class ProductPowerWeight:
    """w(x) = scale * prod_i |x - c_i|^{a_i} with distinct centers c_i."""

    factors: tuple  # of (exponent, center) pairs
    dimension: int = 1
    scale: float = 1.0

    def __post_init__(self):
        factors = tuple((float(a), tuple(as_point(c, self.dimension)))
                        for a, c in self.factors)
        if not factors:
            raise ValueError("product weight needs at least one factor")
        for a, _ in factors:
            if a <= -self.dimension:
                raise ValueError("each factor exponent must exceed -dimension")
        if self.scale <= 0:
            raise ValueError("weight scale must be positive")
        object.__setattr__(self, "factors", factors)


@dataclass(frozen=True)
class RegularGrid:
    """Uniform cell grid on a box, addressed by cell midpoints."""

    lo: tuple
    hi: tuple
    shape: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        shape = tuple(int(v) for v in np.atleast_1d(self.shape))
        if len(lo) != len(hi) or len(lo) != len(shape):
            raise ValueError("grid lo/hi/shape must have matching lengths")
        if any(h <= l for l, h in zip(lo, hi)) or any(s < 1 for s in shape):
            raise ValueError("grid box must be nondegenerate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "shape", shape)

    @property
    def dimension(self) -> int:
        return len(self.lo)

    def cell_index(self, pts: np.ndarray) -> tuple:
        pts = np.atleast_2d(pts)
        idx = []
        for d in range(self.dimension):
            width = (self.hi[d] - self.lo[d]) / self.shape[d]
            i = np.floor((pts[:, d] - self.lo[d]) / width).astype(int)
            out = (pts[:, d] < self.lo[d] - 1e-12) | (pts[:, d] > self.hi[d] + 1e-12)
            if np.any(out):
                raise OutOfGrid("point outside the tabulated grid domain")
            idx.append(np.clip(i, 0, self.shape[d] - 1))
        return tuple(idx)


@dataclass(frozen=True, eq=False)
class TabulatedWeight:
    """Piecewise-constant positive weight given on a regular grid."""

    grid: RegularGrid
    values: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(self.grid.shape)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("tabulated weight values must be finite and strictly positive")
        if self.scale <= 0:
            raise ValueError("weight scale must be positive")
        object.__setattr__(self, "values", vals)

    @property
    def dimension(self) -> int:
        return self.grid.dimension


def tabulated_from_csv(path, grid: RegularGrid) -> TabulatedWeight:
    """Read (coordinates..., value) rows and bin them onto ``grid``."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    n = grid.dimension
    if data.shape[1] != n + 1:
        raise ValueError(f"expected {n + 1} columns (coordinates..., value)")
    vals = np.full(grid.shape, np.nan)
    idx = grid.cell_index(data[:, :n])
    vals[idx] = data[:, n]
    if np.any(np.isnan(vals)):
        raise ValueError("CSV rows do not cover every grid cell")
    return TabulatedWeight(grid, vals)


def weight_dimension(w) -> int:
    return w.dimension


def weight_to_dict(w) -> dict:
    """Config-block encoding of a weight spec."""
    if isinstance(w, PowerWeight):
        return {"kind": "power", "exponent": w.exponent, "dimension": w.dimension,
                "scale": w.scale}
    if isinstance(w, LogExampleWeight):
        return {"kind": "log_example", "dimension": w.dimension, "power": w.power,
                "scale": w.scale}
    if isinstance(w, ProductPowerWeight):
        return {"kind": "product_power",
                "factors": [[a, list(c)] for a, c in w.factors],
                "dimension": w.dimension, "scale": w.scale}
    if isinstance(w, TabulatedWeight):
        return {"kind": "tabulated", "grid": {"lo": list(w.grid.lo), "hi": list(w.grid.hi),
                                              "shape": list(w.grid.shape)},
                "values": w.values.ravel().tolist(), "scale": w.scale}
    raise TypeError(f"unsupported weight {type(w).__name__}")


def weight_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "power":
        return PowerWeight(d["exponent"], d.get("dimension", 1), d.get("scale", 1.0))
    if kind == "log_example":
        return LogExampleWeight(d.get("dimension", 1), d.get("power", 1.0),
                                d.get("scale", 1.0))
    if kind == "product_power":
        return ProductPowerWeight(tuple((a, tuple(c)) for a, c in d["factors"]),
                                  d.get("dimension", 1), d.get("scale", 1.0))
    if kind == "tabulated":
        grid = RegularGrid(tuple(d["grid"]["lo"]), tuple(d["grid"]["hi"]),
                           tuple(d["grid"]["shape"]))
        return TabulatedWeight(grid, np.asarray(d["values"]), d.get("scale", 1.0))
    raise ValueError(f"unknown weight kind {kind!r}")


def _singular_centers(w):
    """Centers where the analytic form has a pole or zero, with exponents."""
    if isinstance(w, PowerWeight):
        if w.exponent == 0.0:
            return []
        return [(np.zeros(w.dimension), w.exponent)]
    if isinstance(w, LogExampleWeight):
        return [(np.zeros(w.dimension), None)]
    if isinstance(w, ProductPowerWeight):
        return [(np.asarray(c), a) for a, c in w.factors if a != 0.0]
    return []


def eval_weight_batch(w, pts, extended: bool = False) -> np.ndarray:
    """Vectorized weight evaluation on points of shape (N, n).

    With ``extended=False`` an exact hit on a pole/zero raises SingularPoint;
    with ``extended=True`` the limit value (0 or +inf) is returned instead,
    which is what essential-infimum surrogates want.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if pts.shape[1] != w.dimension:
        raise ValueError(f"points must have shape (N, {w.dimension})")
    if isinstance(w, PowerWeight):
        r = np.linalg.norm(pts, axis=1)
        hit = r < _SING_TOL
        if np.any(hit) and w.exponent != 0.0:
            if not extended:
                raise SingularPoint("power weight evaluated at its singular center")
            safe = np.where(hit, 1.0, r)
            out = w.scale * safe**w.exponent
            out[hit] = 0.0 if w.exponent > 0 else math.inf
            return out
        return w.scale * r**w.exponent if w.exponent != 0.0 else np.full(r.shape, w.scale)
    if isinstance(w, LogExampleWeight):
        r = np.linalg.norm(pts, axis=1)
        hit = r < _SING_TOL
        if np.any(hit):
            if not extended:
                raise SingularPoint("log-example weight evaluated at the origin")
        safe = np.where(hit, 1.0, r)
        base = np.where(safe < math.exp(-1.0), np.log(1.0 / safe), 1.0)
        out = w.scale * base**w.power
        out[hit] = math.inf if w.power > 0 else 0.0
        return out
    if isinstance(w, ProductPowerWeight):
        out = np.full(pts.shape[0], w.scale)
        for a, c in w.factors:
            r = np.linalg.norm(pts - np.asarray(c), axis=1)
            hit = r < _SING_TOL
            if np.any(hit) and a != 0.0:
                if not extended:
                    raise SingularPoint("product weight evaluated at a factor center")
                safe = np.where(hit, 1.0, r)
                fac = safe**a
                fac[hit] = 0.0 if a > 0 else math.inf
                out = out * fac
            else:
                out = out * r**a if a != 0.0 else out
        return out
    if isinstance(w, TabulatedWeight):
        idx = w.grid.cell_index(pts)
        return w.scale * w.values[idx]
    raise TypeError(f"unsupported weight {type(w).__name__}")


def eval_weight(w, x) -> float:
    """Evaluate a weight at a single point (rejecting singular points)."""
    return float(eval_weight_batch(w, as_point(x, w.dimension)[None, :])[0])


def weight_power(w, t: float):
    """The weight w**t as a weight spec of the same kind."""
    t = float(t)
    if isinstance(w, PowerWeight):
        return PowerWeight(w.exponent * t, w.dimension, w.scale**t)
    if isinstance(w, LogExampleWeight):
        return LogExampleWeight(w.dimension, w.power * t, w.scale**t)
    if isinstance(w, ProductPowerWeight):
        return ProductPowerWeight(tuple((a * t, c) for a, c in w.factors),
                                  w.dimension, w.scale**t)
    if isinstance(w, TabulatedWeight):
        return TabulatedWeight(w.grid, w.values**t, w.scale**t)
    raise TypeError(f"unsupported weight {type(w).__name__}")


def weight_singularities(w, s: float = 1.0):
    """Radial singularities of x -> w(x)**s for the quadrature engine.

    Powers with exponent >= 1 are C^1 at their center and need no patch;
    only poles and nonsmooth zeros (exponent below 1) are registered.
    """
    sings = []
    if isinstance(w, PowerWeight):
        e = w.exponent * s
        if e != 0.0 and e < 1.0:
            sings.append(RadialSingularity(tuple(np.zeros(w.dimension)), PowerProfile(e)))
    elif isinstance(w, LogExampleWeight):
        e = w.power * s
        if e != 0.0:
            sings.append(RadialSingularity(tuple(np.zeros(w.dimension)), LogPowerProfile(e)))
    elif isinstance(w, ProductPowerWeight):
        for a, c in w.factors:
            e = a * s
            if e != 0.0 and e < 1.0:
                sings.append(RadialSingularity(tuple(c), PowerProfile(e)))
    return sings


def _check_power_integrable(w, s: float):
    if isinstance(w, PowerWeight):
        if w.exponent * s <= -w.dimension:
            raise NotIntegrable(
                f"|x|^{w.exponent * s:g} is not locally integrable in dimension {w.dimension}")
    if isinstance(w, ProductPowerWeight):
        for a, _ in w.factors:
            if a * s <= -w.dimension:
                raise NotIntegrable(
                    f"|x - c|^{a * s:g} is not locally integrable in dimension {w.dimension}")


def weighted_measure(w, s: float, ball: Ball, scheme: QuadratureScheme | None = None) -> float:
    """Quadrature value of integral of w(x)**s over the ball.

    Cells containing a singular center of the analytic form are integrated
    with the exact radial antiderivative of the singular factor.
    """
    s = float(s)
    _check_power_integrable(w, s)
    if scheme is None:
        scheme = default_scheme(ball.dimension)

    def fn(pts):
        return eval_weight_batch(w, pts, extended=True) ** s

    return integrate_ball(fn, ball, scheme, weight_singularities(w, s))


def ball_quad_volume(ball: Ball, scheme: QuadratureScheme) -> float:
    """Lebesgue measure of the ball through the same quadrature (exact in 1-d)."""
    if ball.dimension == 1:
        return 2.0 * ball.radius
    return integrate_ball(lambda pts: np.ones(pts.shape[0]), ball, scheme)


def power_mean(w, s: float, ball: Ball, scheme: QuadratureScheme | None = None) -> float:
    """(average of w**s over the ball)**(1/s), normalized per ball.

    Dividing by a probe maximum before raising to the power keeps extreme
    exponents (reverse Holder probes up to 2^10) inside float range; the
    normalization cancels exactly on recombination.
    """
    s = float(s)
    if s == 0.0:
        raise ValueError("power mean needs a nonzero exponent")
    _check_power_integrable(w, s)
    if scheme is None:
        scheme = default_scheme(ball.dimension)
    probe = _probe_nodes(ball)
    with np.errstate(divide="ignore", over="ignore"):
        pv = eval_weight_batch(w, probe, extended=True)
    finite = pv[np.isfinite(pv) & (pv > 0)]
    c = float(np.max(finite)) if finite.size else 1.0

    def fn(pts):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return (eval_weight_batch(w, pts, extended=True) / c) ** s

    m = integrate_ball(fn, ball, scheme, weight_singularities(w, s))
    if not math.isfinite(m):
        # an infinite integral of w^s means the power mean is +inf for s > 0
        # and 0 for s < 0
        return math.inf if s > 0 else 0.0
    vol = ball_quad_volume(ball, scheme)
    return c * (m / vol) ** (1.0 / s)


def _probe_nodes(ball: Ball) -> np.ndarray:
    """Small fixed midpoint lattice used for per-ball normalization."""
    n = ball.dimension
    k = 33
    if n == 1:
        edges = np.linspace(ball.center[0] - ball.radius, ball.center[0] + ball.radius, k + 1)
        return (0.5 * (edges[:-1] + edges[1:]))[:, None]
    g0 = np.linspace(ball.center[0] - ball.radius, ball.center[0] + ball.radius, k)
    g1 = np.linspace(ball.center[1] - ball.radius, ball.center[1] + ball.radius, k)
    X, Y = np.meshgrid(g0, g1, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    inside = np.linalg.norm(pts - ball.center, axis=1) <= ball.radius
    return pts[inside] if np.any(inside) else ball.center[None, :]


def min_over_nodes(w, ball: Ball, scheme: QuadratureScheme) -> float:
    """Essential-infimum surrogate: minimum of w over the ball's midpoint lattice."""
    n = ball.dimension
    if n == 1:
        cells = 2 * scheme.resolution
        edges = np.linspace(ball.center[0] - ball.radius, ball.center[0] + ball.radius,
                            cells + 1)
        pts = (0.5 * (edges[:-1] + edges[1:]))[:, None]
    else:
        cells = 2 * scheme.resolution
        ax0 = np.linspace(ball.center[0] - ball.radius, ball.center[0] + ball.radius, cells + 1)
        ax1 = np.linspace(ball.center[1] - ball.radius, ball.center[1] + ball.radius, cells + 1)
        X, Y = np.meshgrid(0.5 * (ax0[:-1] + ax0[1:]), 0.5 * (ax1[:-1] + ax1[1:]), indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        pts = pts[np.linalg.norm(pts - ball.center, axis=1) <= ball.radius]
        if pts.size == 0:
            pts = ball.center[None, :]
    return float(np.min(eval_weight_batch(w, pts, extended=True)))


# ---------------------------------------------------------------------------
# Class-constant estimates
# ---------------------------------------------------------------------------


@dataclass
class WeightClassReport:
    """Finite-family estimate of one class constant."""

    label: str
    constant: float
    verdict: str  # "finite" | "diverging"
    worst_ball: Ball | None
    series: list = field(default_factory=list)
    family_size: int = 0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "constant": self.constant,
            "verdict": self.verdict,
            "worst_ball": self.worst_ball.to_dict() if self.worst_ball else None,
            "series": list(self.series),
            "family_size": self.family_size,
        }


def _series_verdict(series) -> str:
    vals = [v for v in series]
    if any(not math.isfinite(v) for v in vals):
        return "diverging"
    monotone = all(vals[i + 1] >= vals[i] * (1.0 - 1e-9) for i in range(len(vals) - 1))
    if monotone and len(vals) > 1 and vals[-1] >= DIVERGENCE_GROWTH * vals[0]:
        return "diverging"
    return "finite"


def _estimate_over_family(label, per_ball, family, scheme, refine_steps):
    """Max of a per-ball functional over the family, with a refinement series."""
    def sup_at(s):
        best, best_ball = -math.inf, None
        for ball in family:
            v = per_ball(ball, s)
            if v > best or not math.isfinite(v):
                best, best_ball = v, ball
            if not math.isfinite(v):
                break
        return best, best_ball

    n = family.balls[0].dimension
    factor = 4 if n == 1 else 2
    series = []
    worst = None
    current = scheme
    for step in range(refine_steps + 1):
        val, ball = sup_at(current)
        series.append(val)
        if step == 0:
            worst = ball
        if not math.isfinite(val):
            break
        current = current.refined(factor)
    verdict = _series_verdict(series)
    return WeightClassReport(label, series[-1] if math.isfinite(series[-1]) else math.inf,
                             verdict, worst, series, len(family))


def estimate_A1_constant(w, family: BallFamily, scheme: QuadratureScheme | None = None,
                         refine_steps: int = 3) -> WeightClassReport:
    """sup_B (average of w over B) / (min of w over the quadrature nodes of B)."""
    if scheme is None:
        scheme = default_scheme(w.dimension)

    def per_ball(ball, s):
        avg = power_mean(w, 1.0, ball, s)
        lo = min_over_nodes(w, ball, s)
        if lo == 0.0:
            return math.inf
        return avg / lo

    return _estimate_over_family("A_1", per_ball, family, scheme, refine_steps)


def estimate_Ap_constant(w, p: float, family: BallFamily,
                         scheme: QuadratureScheme | None = None,
                         refine_steps: int = 3) -> WeightClassReport:
    """sup_B (avg_B w) * (avg_B w^{-1/(p-1)})^{p-1} for p > 1."""
    p = float(p)
    if p <= 1.0:
        raise ValueError("estimate_Ap_constant needs p > 1 (use estimate_A1_constant)")
    if scheme is None:
        scheme = default_scheme(w.dimension)
    dual = -1.0 / (p - 1.0)

    def per_ball(ball, s):
        try:
            num = power_mean(w, 1.0, ball, s)
            den = power_mean(w, dual, ball, s)
        except NotIntegrable:
            return math.inf
        if not (math.isfinite(num) and den > 0.0 and math.isfinite(den)):
            return math.inf
        # (avg w^dual)^(p-1) equals power_mean(w, dual)^(-1)
        return num / den

    return _estimate_over_family(f"A_p(p={p:g})", per_ball, family, scheme, refine_steps)


def estimate_Apq_constant(w, p: float, q: float, family: BallFamily,
                          scheme: QuadratureScheme | None = None,
                          refine_steps: int = 3) -> WeightClassReport:
    """Two-exponent constant for the fractional maximal inequality.

    For p > 1: sup_B (avg w^q)^{1/q} (avg w^{-p'})^{1/p'}; for p = 1 the dual
    average is replaced by the minimum of w over the quadrature nodes.
    """
    p, q = float(p), float(q)
    if q < p or p < 1.0:
        raise ValueError("estimate_Apq_constant needs 1 <= p <= q")
    if scheme is None:
        scheme = default_scheme(w.dimension)

    def per_ball(ball, s):
        try:
            left = power_mean(w, q, ball, s)
            if p > 1.0:
                # (avg w^{-p'})^{1/p'} equals power_mean(w, -p')^{-1}
                den = power_mean(w, -p / (p - 1.0), ball, s)
            else:
                den = min_over_nodes(w, ball, s)
        except NotIntegrable:
            return math.inf
        if not math.isfinite(left) or den <= 0.0 or not math.isfinite(den):
            return math.inf
        return left / den

    return _estimate_over_family(f"A_pq(p={p:g},q={q:g})", per_ball, family, scheme,
                                 refine_steps)


def estimate_RH_constant(w, s_exp: float, family: BallFamily,
                         scheme: QuadratureScheme | None = None,
                         refine_steps: int = 3) -> WeightClassReport:
    """Reverse Holder constant: sup_B (avg_B w^s)^{1/s} / (avg_B w)."""
    s_exp = float(s_exp)
    if s_exp <= 1.0:
        raise ValueError("reverse Holder exponent must exceed 1")
    if scheme is None:
        scheme = default_scheme(w.dimension)

    def per_ball(ball, s):
        try:
            num = power_mean(w, s_exp, ball, s)
        except NotIntegrable:
            return math.inf
        if not math.isfinite(num):
            return math.inf
        return num / power_mean(w, 1.0, ball, s)

    return _estimate_over_family(f"RH_s(s={s_exp:g})", per_ball, family, scheme,
                                 refine_steps)


# ---------------------------------------------------------------------------
# Critical indices
# ---------------------------------------------------------------------------


@dataclass
class CriticalIndices:
    """Bisection brackets for inf{q > 1 : w in A_q} and sup{r > 1 : w in RH_r}."""

    q_critical: float
    q_bracket: tuple
    rh_critical: float
    rh_bracket: tuple
    tol: float

    def to_dict(self) -> dict:
        def enc(v):
            return v if math.isfinite(v) else "inf"
        return {"q_critical": enc(self.q_critical), "q_bracket": [enc(v) for v in self.q_bracket],
                "rh_critical": enc(self.rh_critical),
                "rh_bracket": [enc(v) for v in self.rh_bracket], "tol": self.tol}


def critical_indices(w, family: BallFamily, scheme: QuadratureScheme | None = None,
                     tol: float = 1e-2, ap_cap: float = 256.0, rh_cap: float = 1024.0,
                     refine_steps: int = 2) -> CriticalIndices:
    """Bisection on the finiteness verdicts of the A_p and RH estimators.

    Reports +inf for the reverse Holder index when no divergence shows up to
    ``rh_cap`` (2^10 by default).
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if scheme is None:
        scheme = default_scheme(w.dimension)

    def ap_finite(p):
        return estimate_Ap_constant(w, p, family, scheme, refine_steps).verdict == "finite"

    def rh_finite(s):
        return estimate_RH_constant(w, s, family, scheme, refine_steps).verdict == "finite"

    if ap_finite(1.0 + tol):
        q_val, q_br = 1.0, (1.0, 1.0 + tol)
    elif not ap_finite(ap_cap):
        q_val, q_br = math.inf, (ap_cap, math.inf)
    else:
        lo, hi = 1.0 + tol, ap_cap
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if ap_finite(mid):
                hi = mid
            else:
                lo = mid
        q_val, q_br = 0.5 * (lo + hi), (lo, hi)

    if rh_finite(rh_cap):
        r_val, r_br = math.inf, (rh_cap, math.inf)
    elif not rh_finite(1.0 + tol):
        r_val, r_br = 1.0 + 0.5 * tol, (1.0, 1.0 + tol)
    else:
        lo, hi = 1.0 + tol, rh_cap
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if rh_finite(mid):
                lo = mid
            else:
                hi = mid
        r_val, r_br = 0.5 * (lo + hi), (lo, hi)

    return CriticalIndices(q_val, q_br, r_val, r_br, tol)


# ---------------------------------------------------------------------------
# Matrix compatibility and doubling diagnostics
# ---------------------------------------------------------------------------


def compatibility_sample(w, count: int = 256, extent: float = 8.0) -> np.ndarray:
    """Deterministic sample lattice avoiding the singular points of w."""
    n = w.dimension
    if n == 1:
        xs = np.linspace(-extent, extent, count)[:, None]
    else:
        side = max(4, int(math.isqrt(count)))
        g = np.linspace(-extent, extent, side)
        X, Y = np.meshgrid(g, g, indexing="ij")
        xs = np.column_stack([X.ravel(), Y.ravel()])
    keep = np.ones(xs.shape[0], dtype=bool)
    for c, _ in _singular_centers(w):
        keep &= np.linalg.norm(xs - c, axis=1) > 1e-6
    return xs[keep]


def check_matrix_compatibility(w, family: MatrixFamily, sample: np.ndarray | None = None) -> float:
    """max over matrices and sample points of w(A_j x) / w(x)."""
    if sample is None:
        sample = compatibility_sample(w)
    sample = np.atleast_2d(np.asarray(sample, dtype=float))
    base = eval_weight_batch(w, sample)
    worst = 0.0
    for j in range(family.m):
        mapped = sample @ family.matrices[j].T
        vals = eval_weight_batch(w, mapped)
        worst = max(worst, float(np.max(vals / base)))
    return worst


@dataclass
class DoublingReport:
    ok: bool
    worst_ratio: float          # max over B of w(lambda B) / w(B)
    worst_margin: float         # max over B of w(lambda B) / (lambda^{np} C w(B))
    ap_constant: float
    lam: float
    p: float

    def to_dict(self) -> dict:
        return {"ok": self.ok, "worst_ratio": self.worst_ratio,
                "worst_margin": self.worst_margin, "ap_constant": self.ap_constant,
                "lambda": self.lam, "p": self.p}


def doubling_check(w, p: float, lam: float, family: BallFamily,
                   scheme: QuadratureScheme | None = None) -> DoublingReport:
    """Verify w(lambda B) <= lambda^{np} [w]_{A_p} w(B) over the family."""
    if lam <= 1.0:
        raise ValueError("doubling factor must exceed 1")
    if scheme is None:
        scheme = default_scheme(w.dimension)
    if p == 1.0:
        rep = estimate_A1_constant(w, family, scheme)
    else:
        rep = estimate_Ap_constant(w, p, family, scheme)
    if rep.verdict != "finite":
        raise HypothesisFailed(f"A_p finiteness (p={p:g})",
                               "doubling bound needs a finite A_p estimate")
    n = w.dimension
    bound_factor = lam ** (n * p) * rep.constant
    worst_ratio = 0.0
    worst_margin = 0.0
    for ball in family:
        wb = weighted_measure(w, 1.0, ball, scheme)
        wlb = weighted_measure(w, 1.0, ball.scaled(lam), scheme)
        worst_ratio = max(worst_ratio, wlb / wb)
        worst_margin = max(worst_margin, wlb / (bound_factor * wb))
    return DoublingReport(worst_margin <= 1.0 + 1e-9, worst_ratio, worst_margin,
                          rep.constant, lam, p)


@dataclass
class MatrixDoublingReport:
    max_ratio: float
    series: list
    stable: bool
    m_factor: float

    def to_dict(self) -> dict:
        return {"max_ratio": self.max_ratio, "series": list(self.series),
                "stable": self.stable, "m_factor": self.m_factor}


def matrix_doubling_check(w, family: MatrixFamily, balls: BallFamily,
                          scheme: QuadratureScheme | None = None,
                          m_factor: float | None = None,
                          refine_steps: int = 2) -> MatrixDoublingReport:
    """max over balls and matrices of w(B(A_j x0, 2 M r)) / w(B(x0, r))."""
    if scheme is None:
        scheme = default_scheme(w.dimension)
    big_m = family.norm_bound if m_factor is None else float(m_factor)

    def value_at(s):
        worst = 0.0
        for ball in balls:
            base = weighted_measure(w, 1.0, ball, s)
            for j in range(family.m):
                moved = Ball(family.apply(j, ball.center), 2.0 * big_m * ball.radius)
                worst = max(worst, weighted_measure(w, 1.0, moved, s) / base)
        return worst

    series = refinement_series(value_at, scheme, steps=refine_steps,
                               factor=4 if w.dimension == 1 else 2)
    stable = _series_verdict(series) == "finite"
    return MatrixDoublingReport(series[0], series, stable, big_m)
