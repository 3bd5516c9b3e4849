"""Estimate-verification harness.

Each check samples one inequality from the theory on concrete inputs,
estimates the implied constant, and tracks its stability under refinement
and rescaling.  "Uniformly bounded" is operationalized as: the empirical
maximum over a seeded campaign is finite and drifts by less than a factor
of 4 across three dyadic scale octaves and a lattice refinement.  Checks
never assert sharp constants; hypothesis audits are mandatory, and a
campaign run on inputs violating an audited hypothesis raises
HypothesisFailed rather than reporting a pass.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .atoms import Atom, AtomParams, AtomSampler, sample_atom_campaign
from .errors import HypothesisFailed, MisclassifiedSample
from .geometry import Ball, BallFamily, MatrixFamily, as_point, classify, expanded_balls
from .operators import (ExponentProfile, MaximalPolicy, SampledFunction,
                        apply_T_batch, fractional_maximal_witness, indicator,
                        weighted_norm)
from .quadrature import (QuadratureScheme, default_scheme, graded_edges,
                         integrate_cells_1d)
from .weights import (critical_indices, check_matrix_compatibility,
                      estimate_A1_constant, estimate_Ap_constant,
                      estimate_Apq_constant, estimate_RH_constant,
                      eval_weight_batch, power_mean, weight_power,
                      weight_singularities, weight_to_dict, weighted_measure)

STABILITY_FACTOR = 4.0
RATIO_FLOOR = 1e-14
COMPATIBILITY_CAP = 1e6


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class AuditItem:
    name: str
    value: float | str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        v = self.value
        if isinstance(v, float) and not math.isfinite(v):
            v = "inf" if v > 0 else "-inf"
        return {"name": self.name, "value": v, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    check_id: str
    verdict: str                       # "pass" | "fail" | "skipped"
    worst: float
    hypotheses: list = field(default_factory=list)
    stability: dict = field(default_factory=dict)
    sample: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return "inf" if v > 0 else "-inf"
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            if isinstance(v, (np.floating, np.integer)):
                return clean(float(v))
            return v

        return {
            "check_id": self.check_id,
            "verdict": self.verdict,
            "worst": clean(self.worst),
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "stability": clean(self.stability),
            "sample": clean(self.sample),
            "witnesses": clean(self.witnesses),
            "extras": clean(self.extras),
            "provenance": clean(self.provenance),
        }

    def passed(self) -> bool:
        return self.verdict == "pass"


def config_hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()[:16]


def _drift(values) -> float:
    finite = [v for v in values if v > 0 and math.isfinite(v)]
    if not finite:
        return math.inf
    if any(not math.isfinite(v) for v in values):
        return math.inf
    return max(finite) / min(finite)


# ---------------------------------------------------------------------------
# Pointwise atom bound on the outer region
# ---------------------------------------------------------------------------


def outer_sample_points(ball: Ball, family: MatrixFamily, per_side: int = 6,
                        refine: int = 1):
    """Points in the outer region on dyadic shells around each transformed center."""
    big_r = 2.0 * family.norm_bound * ball.radius
    taus = np.geomspace(1.25, 16.0, per_side * refine)
    pts = []
    n = ball.dimension
    for k in range(family.m):
        ck = family.apply(k, ball.center)
        for t in taus:
            if n == 1:
                cands = [ck + np.array([big_r * t]), ck - np.array([big_r * t])]
            else:
                cands = [ck + big_r * t * np.array(u) for u in
                         ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0),
                          (0.7071067811865476, 0.7071067811865476))]
            for x in cands:
                if classify(x, ball, family).is_outer():
                    pts.append(x)
    return pts


def _pointwise_rhs(atom: Atom, x, profile: ExponentProfile, family: MatrixFamily,
                   w_ball: float):
    """Both right-hand sides of the outer-region bound at a sampled point.

    The closed decay form  w(B)^{-1/p} r^{n+d+1} |x - A_k x0|^{alpha-n-d-1}
    is always defined; the fractional-maximal form degenerates at alpha = 0
    and is returned as None there.
    """
    params = atom.params
    n, d = params.dimension, params.d
    label = classify(x, atom.ball, family)
    if not label.is_outer():
        raise MisclassifiedSample(f"sample {np.asarray(x).tolist()} lies in an expanded ball")
    k = label.index
    dist = float(np.linalg.norm(as_point(x, n) - family.apply(k, atom.ball.center)))
    wfac = w_ball ** (-1.0 / params.p)
    decay = wfac * atom.ball.radius ** (n + d + 1) * dist ** (profile.alpha - n - d - 1)
    maximal = None
    if profile.alpha > 0.0:
        beta = profile.alpha * n / (n + d + 1)
        z = family.apply_inverse(k, x)
        chi = indicator(atom.ball.center, atom.ball.radius)
        mval, _ = fractional_maximal_witness(chi, z, beta, MaximalPolicy(cells_per_unit=64))
        maximal = wfac * mval ** ((n + d + 1) / n)
    return k, decay, maximal


def check_pointwise_atom_bound(params: AtomParams, profile: ExponentProfile,
                               family: MatrixFamily, center,
                               radii=(0.25, 1.0, 4.0), seed: int = 0,
                               scheme: QuadratureScheme | None = None,
                               samples=None) -> VerificationReport:
    """Estimate the constant in the outer-region pointwise bound and test its
    stability across atom radii and a doubled sample set."""
    n = params.dimension
    if scheme is None:
        scheme = default_scheme(n)
    from .atoms import construct_atom

    audits = [AuditItem("order in [0, n)", profile.alpha,
                        0.0 <= profile.alpha < n)]
    idx = critical_indices(params.weight, _default_ball_family(params.weight))
    audits.append(AuditItem("weight in A_infinity (finite Muckenhoupt index)",
                            idx.q_critical, math.isfinite(idx.q_critical)))
    for a in audits:
        if not a.passed:
            raise HypothesisFailed(a.name, f"value {a.value}")

    witnesses = []
    cstar = {}
    agreement = []
    for r in radii:
        ball = Ball(center, r)
        atom = construct_atom(ball, params, seed, scheme)
        w_ball = weighted_measure(params.weight, 1.0, ball, scheme)
        fn = atom.function()
        for refine in (1, 2):
            pts = samples if samples is not None else outer_sample_points(
                ball, family, refine=refine)
            ratios = []
            for x in pts:
                lhs = abs(float(apply_T_batch(fn, as_point(x, n)[None, :], profile,
                                              family, scheme)[0]))
                k, decay, maximal = _pointwise_rhs(atom, x, profile, family, w_ball)
                rhs = maximal if maximal is not None else decay
                if lhs < RATIO_FLOOR and rhs < RATIO_FLOOR:
                    ratio = 0.0
                else:
                    ratio = lhs / rhs
                ratios.append(ratio)
                if maximal is not None and maximal > 0:
                    agreement.append(decay / maximal)
                if refine == 1:
                    witnesses.append({"radius": r, "x": np.asarray(x).tolist(),
                                      "region": k, "lhs": lhs, "rhs_decay": decay,
                                      "rhs_maximal": maximal, "ratio": ratio})
            cstar[(r, refine)] = max(ratios) if ratios else 0.0
            if samples is not None:
                break

    base = [cstar[(r, 1)] for r in radii]
    refined = [cstar.get((r, 2), cstar[(r, 1)]) for r in radii]
    drift_radii = _drift(base)
    drift_refine = _drift([max(base), max(refined)])
    verdict = "pass" if (drift_radii < STABILITY_FACTOR
                         and drift_refine < STABILITY_FACTOR
                         and all(math.isfinite(v) for v in base)) else "fail"
    extras = {}
    if agreement:
        extras["form_agreement"] = {"min": min(agreement), "max": max(agreement)}
    return VerificationReport(
        "pointwise-atom-bound", verdict, max(base), audits,
        stability={"by_radius": {str(r): cstar[(r, 1)] for r in radii},
                   "refined": {str(r): refined[i] for i, r in enumerate(radii)},
                   "drift_radii": drift_radii, "drift_refine": drift_refine},
        sample={"center": list(np.atleast_1d(center)), "radii": list(radii),
                "seed": seed},
        witnesses=witnesses, extras=extras,
        provenance={"seed": seed, "config_hash": config_hash(
            {"check": "pointwise", "params": params.to_dict(), "alpha": profile.alpha})})


def check_containment_step(ball: Ball, family: MatrixFamily, xi_samples,
                           x_samples) -> VerificationReport:
    """For outer x and xi in B, |x - A_i xi| must be at least half of
    |x - A_i x0|; reports the minimal slack factor."""
    worst = math.inf
    witnesses = []
    for x in x_samples:
        label = classify(x, ball, family)
        if not label.is_outer():
            raise MisclassifiedSample(f"sample {np.asarray(x).tolist()} is not outer")
        xp = as_point(x, ball.dimension)
        for xi in xi_samples:
            xip = as_point(xi, ball.dimension)
            if float(np.linalg.norm(xip - ball.center)) > ball.radius + 1e-12:
                raise ValueError("xi samples must lie in the ball")
            for i in range(family.m):
                num = float(np.linalg.norm(xp - family.apply(i, xip)))
                den = 0.5 * float(np.linalg.norm(xp - family.apply(i, ball.center)))
                slack = num / den
                if slack < worst:
                    worst = slack
                    witnesses = [{"x": xp.tolist(), "xi": xip.tolist(), "matrix": i,
                                  "lhs": num, "rhs": den, "ratio": slack}]
    verdict = "pass" if worst >= 1.0 - 1e-12 else "fail"
    return VerificationReport("containment-step", verdict, worst,
                              sample={"x_count": len(list(x_samples)),
                                      "xi_count": len(list(xi_samples))},
                              witnesses=witnesses,
                              provenance={"config_hash": config_hash(ball.to_dict())})


# ---------------------------------------------------------------------------
# Ball inequality from the reverse Holder condition
# ---------------------------------------------------------------------------


def check_rh_ball_inequality(w, p: float, alpha: float, family: BallFamily,
                             scheme: QuadratureScheme | None = None) -> VerificationReport:
    """[w^p(B)]^{-1/p} [w^q(B)]^{1/q} <= [w^p]_{RH_{q/p}}^{1/p} |B|^{-alpha/n}."""
    n = w.dimension
    if not (0.0 < p < n / alpha):
        raise ValueError("need 0 < p < n / alpha")
    q = 1.0 / (1.0 / p - alpha / n)
    if scheme is None:
        scheme = default_scheme(n)
    wp = weight_power(w, p)
    rh = estimate_RH_constant(wp, q / p, family, scheme)
    audits = [AuditItem(f"w^p in RH_{q / p:g}", rh.constant, rh.verdict == "finite")]
    if rh.verdict != "finite":
        return VerificationReport("rh-ball-inequality", "skipped", math.inf, audits,
                                  extras={"reason": "reverse Holder hypothesis failed"})
    worst_slack = math.inf
    slacks = []
    witnesses = []
    for ball in family:
        from .weights import ball_quad_volume

        vol = ball_quad_volume(ball, scheme)
        avg_p = power_mean(wp, 1.0, ball, scheme)          # average of w^p
        pmq = power_mean(wp, q / p, ball, scheme)          # (avg w^q)^{p/q}
        lhs = (avg_p * vol) ** (-1.0 / p) * (pmq ** (q / p) * vol) ** (1.0 / q)
        rhs = rh.constant ** (1.0 / p) * vol ** (-alpha / n)
        slack = (rhs - lhs) / rhs
        slacks.append(slack)
        if slack < worst_slack:
            worst_slack = slack
            witnesses = [{"ball": ball.to_dict(), "lhs": lhs, "rhs": rhs,
                          "ratio": lhs / rhs}]
    verdict = "pass" if worst_slack >= -1e-10 else "fail"
    return VerificationReport(
        "rh-ball-inequality", verdict, worst_slack, audits,
        sample={"p": p, "q": q, "alpha": alpha, "family_size": len(family)},
        witnesses=witnesses,
        extras={"mean_slack": float(np.mean(slacks)), "max_slack": float(np.max(slacks))},
        provenance={"config_hash": config_hash({"w": weight_to_dict(w), "p": p,
                                                "alpha": alpha})})


# ---------------------------------------------------------------------------
# Critical-index chains
# ---------------------------------------------------------------------------


def _chain_leq(a: float, b: float, slack: float) -> bool:
    if math.isinf(b):
        return True
    if math.isinf(a):
        return False
    return a <= b + slack


def check_critical_index_chains(w, p: float, q: float | None, family: BallFamily,
                                scheme: QuadratureScheme | None = None,
                                tol: float = 1e-2) -> VerificationReport:
    """Index chains relating the reverse Holder indices of w, w^p (and w^q).

    Without q:  p * r_{w^p} <= r_w <= r_{w^p}   (hypothesis: w^{1/p} in A_1).
    With q:     p * r_{w^p} <= q * r_{w^q}      (hypothesis: w^q in A_1).
    Infinite indices satisfy the chains vacuously.
    """
    if scheme is None:
        scheme = default_scheme(w.dimension)
    audits = []
    if q is None:
        if not (0.0 < p < 1.0):
            raise ValueError("the two-sided chain needs 0 < p < 1")
        hyp = estimate_A1_constant(weight_power(w, 1.0 / p), family, scheme)
        audits.append(AuditItem("w^{1/p} in A_1", hyp.constant, hyp.verdict == "finite"))
    else:
        if not (0.0 < p < q):
            raise ValueError("the comparison chain needs 0 < p < q")
        hyp = estimate_A1_constant(weight_power(w, q), family, scheme)
        audits.append(AuditItem("w^q in A_1", hyp.constant, hyp.verdict == "finite"))
    if not audits[-1].passed:
        return VerificationReport("critical-index-chain", "skipped", math.inf, audits,
                                  extras={"reason": "A_1 hypothesis failed"})

    r_w = critical_indices(w, family, scheme, tol=tol).rh_critical
    r_wp = critical_indices(weight_power(w, p), family, scheme, tol=tol).rh_critical
    slack = 4.0 * tol * max(1.0, p * (r_wp if math.isfinite(r_wp) else 1.0))
    values = {"r_w": r_w, "r_wp": r_wp}
    if q is None:
        ok = (_chain_leq(p * r_wp, r_w, slack) and _chain_leq(r_w, r_wp, slack))
        worst = 0.0 if ok else max(p * r_wp - r_w, r_w - r_wp)
    else:
        r_wq = critical_indices(weight_power(w, q), family, scheme, tol=tol).rh_critical
        values["r_wq"] = r_wq
        slack = 4.0 * tol * max(1.0, p * (r_wp if math.isfinite(r_wp) else 1.0),
                                q * (r_wq if math.isfinite(r_wq) else 1.0))
        ok = _chain_leq(p * r_wp, q * r_wq, slack)
        worst = 0.0 if ok else p * r_wp - q * r_wq
    return VerificationReport(
        "critical-index-chain", "pass" if ok else "fail", worst, audits,
        stability={}, sample={"p": p, "q": q, "tol": tol},
        extras={"indices": {k: (v if math.isfinite(v) else "inf") for k, v in values.items()},
                "slack": slack},
        provenance={"config_hash": config_hash({"w": weight_to_dict(w), "p": p, "q": q})})


# ---------------------------------------------------------------------------
# Maximal-operator norm inequalities
# ---------------------------------------------------------------------------


def _graded_domain(extent: float, per_unit: int, dense_halfwidth: float):
    """Symmetric graded mesh on [-extent, extent], dense near the origin."""
    dense = np.linspace(-dense_halfwidth, dense_halfwidth,
                        max(16, int(2 * dense_halfwidth * per_unit)) + 1)
    right = graded_edges(dense_halfwidth, extent, h0=1.0 / per_unit, block=max(8, per_unit))
    left = -right[::-1]
    return np.unique(np.concatenate([left, dense, right]))


def _sweep_maximal_1d(f: SampledFunction, xs: np.ndarray, beta: float,
                      per_unit: int) -> np.ndarray:
    """(Fractional) maximal function of a compactly supported f at many points.

    Interval masses depend only on endpoints clipped to the support, so one
    prefix integral on a dense support lattice serves every candidate; each
    point also contributes a geometric ladder of nearby endpoints so that the
    pinned-at-x optimum is representable.
    """
    from .operators import _prefix_integral

    lo = float(f.ball.center[0] - f.ball.radius)
    hi = float(f.ball.center[0] + f.ball.radius)
    lattice = np.linspace(lo, hi, max(64, int((hi - lo) * per_unit)) + 1)
    G = _prefix_integral(f, lattice)

    def gmass(pts):
        return np.interp(np.clip(pts, lo, hi), lattice, G)

    span = hi - lo
    out = np.empty(xs.size)
    for i, x in enumerate(xs):
        reach = max(abs(x - lo), abs(hi - x), span) + span
        ladder = np.geomspace(span / max(per_unit, 8), reach, 32)
        us = np.concatenate([lattice[lattice <= x], x - ladder, [x]])
        vs = np.concatenate([lattice[lattice >= x], x + ladder, [x]])
        us = np.unique(us[us <= x])
        vs = np.unique(vs[vs >= x])
        length = vs[None, :] - us[:, None]
        mass = gmass(vs)[None, :] - gmass(us)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(length > 0, length ** (beta - 1.0) * mass, 0.0)
        out[i] = float(np.max(vals))
    return out


def check_maximal_inequalities(w, p: float, test_balls, alpha: float | None = None,
                               scheme: QuadratureScheme | None = None,
                               base_extent: float = 32.0, per_unit: int = 16,
                               levels: int = 4) -> VerificationReport:
    """Operator-norm ratio of the (fractional) maximal operator on indicators.

    alpha None: sup_f ||Mf||_{L^p_w} / ||f||_{L^p_w} needs w in A_p.
    alpha set:  sup_f ||M_alpha f||_{L^q_{w^q}} / ||f||_{L^p_{w^p}} with
    1/q = 1/p - alpha/n needs w in A_{p,q}.

    Each refinement level doubles both the lattice density and the truncation
    domain, so unbounded configurations reveal themselves as monotone growth.
    """
    n = w.dimension
    if n != 1:
        raise ValueError("maximal-inequality sweeps are implemented on the line")
    if scheme is None:
        scheme = default_scheme(n)
    fam = _default_ball_family(w)
    audits = []
    if alpha is None:
        rep = (estimate_A1_constant(w, fam, scheme) if p == 1.0
               else estimate_Ap_constant(w, p, fam, scheme))
        audits.append(AuditItem(f"w in A_{p:g}", rep.constant, rep.verdict == "finite",
                                "required for the strong-type bound" if p > 1 else
                                "p = 1 has only the weak-type bound"))
        q = p
        s_norm = 1.0
    else:
        q = 1.0 / (1.0 / p - alpha / n)
        rep = estimate_Apq_constant(w, p, q, fam, scheme)
        audits.append(AuditItem(f"w in A_pq(p={p:g},q={q:g})", rep.constant,
                                rep.verdict == "finite"))
        s_norm = None  # weights w^p / w^q handled below

    fns = [indicator(b.center, b.radius) for b in test_balls]
    series = []
    for level in range(levels):
        extent = base_extent * 2.0**level
        dens = int(per_unit * 2.0**level)
        mesh = _graded_domain(extent, dens, dense_halfwidth=4.0)
        mids = 0.5 * (mesh[:-1] + mesh[1:])
        widths = np.diff(mesh)
        ratio = 0.0
        for f in fns:
            beta = 0.0 if alpha is None else alpha
            mvals = _sweep_maximal_1d(f, mids, beta, dens)
            if alpha is None:
                wv = eval_weight_batch(w, mids[:, None], extended=True)
                num = float(np.sum(mvals**p * wv * widths)) ** (1.0 / p)
                den = weighted_norm(f, p, w, 1.0, scheme)
            else:
                wq = eval_weight_batch(w, mids[:, None], extended=True) ** q
                num = float(np.sum(mvals**q * wq * widths)) ** (1.0 / q)
                den = weighted_norm(f, p, w, p, scheme)
            ratio = max(ratio, num / den)
        series.append(ratio)
    verdict_growth = _series_monotone_growth(series)
    verdict = "pass" if (not verdict_growth and _drift(series) < STABILITY_FACTOR) else "diverging"
    return VerificationReport(
        "maximal-inequality", "pass" if verdict == "pass" else "fail", series[-1],
        audits,
        stability={"levels": series, "drift": _drift(series),
                   "monotone_growth": verdict_growth},
        sample={"p": p, "alpha": alpha, "test_count": len(fns),
                "base_extent": base_extent},
        extras={"verdict": verdict},
        provenance={"config_hash": config_hash({"w": weight_to_dict(w), "p": p,
                                                "alpha": alpha})})


def _series_monotone_growth(series) -> bool:
    if len(series) < 2:
        return False
    monotone = all(series[i + 1] >= series[i] * (1 - 1e-9) for i in range(len(series) - 1))
    return monotone and series[-1] >= STABILITY_FACTOR * series[0]


def _default_ball_family(w) -> BallFamily:
    n = w.dimension
    if n == 1:
        centers = [[0.0], [0.5], [-0.5], [1.0], [-1.0], [2.0], [-2.0]]
    else:
        centers = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]
    from .geometry import dyadic_ball_family

    return dyadic_ball_family(centers, -8, 4)


# ---------------------------------------------------------------------------
# Quasi-norm assembly
# ---------------------------------------------------------------------------


def check_quasi_norm_assembly(lams, q: float, p: float | None = None) -> dict:
    """min(1, q)-quasi-norm assembly of atomic coefficients, and the comparison
    against the stronger p-sum when p <= min(1, q)."""
    lams = np.asarray(lams, dtype=float)
    t = min(1.0, q)
    assembly = float(np.sum(np.abs(lams) ** t) ** (1.0 / t))
    out = {"assembly": assembly, "t": t}
    if p is not None:
        if p > t + 1e-12:
            raise ValueError("comparison needs p <= min(1, q)")
        bound = float(np.sum(np.abs(lams) ** p) ** (1.0 / p))
        out["p_bound"] = bound
        out["holds"] = assembly <= bound * (1 + 1e-12)
    return out


# ---------------------------------------------------------------------------
# Theorem campaigns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CampaignSpec:
    """Atom sampling and integration lattice for a theorem campaign."""

    count: int = 50
    seed: int = 0
    centers: tuple = ((0.0,), (1.0,), (-2.0,))
    radii: tuple = (0.25, 1.0, 4.0)
    p: float = 1.0
    p0: float = 2.0
    s: float | None = None          # only for the positive-order theorem
    d: int | None = None            # None derives the minimal degree
    outer_octaves: int = 8
    inner_resolution: int = 256
    outer_resolution: int = 64

    def to_dict(self) -> dict:
        return {"count": self.count, "seed": self.seed,
                "centers": [list(c) for c in self.centers],
                "radii": list(self.radii), "p": self.p, "p0": self.p0, "s": self.s,
                "d": self.d, "outer_octaves": self.outer_octaves,
                "inner_resolution": self.inner_resolution,
                "outer_resolution": self.outer_resolution}


def _merge_intervals(intervals):
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return out


def _split_edges_at(edges: np.ndarray, points) -> np.ndarray:
    inside = [p for p in points if edges[0] < p < edges[-1]]
    if not inside:
        return edges
    return np.unique(np.concatenate([edges, np.asarray(inside, dtype=float)]))


def _atom_norm_split(atom: Atom, profile: ExponentProfile, family: MatrixFamily,
                     norm_weight, weight_exponent: float, norm_exponent: float,
                     spec: CampaignSpec, scheme: QuadratureScheme):
    """Inner (expanded balls) and outer contributions to the target norm.

    Returns (inner, outer, tail_bound) with inner + outer the quadrature value
    of the integral of |T a|^e w^s over the truncated plane; the tail beyond
    the truncation is estimated from the closed decay form and reported, not
    added.
    """
    ball = atom.ball
    n = ball.dimension
    if n != 1:
        raise ValueError("theorem campaigns are implemented on the line")
    fn = atom.function()
    e = norm_exponent
    sw = weight_exponent
    wsings = weight_singularities(norm_weight, sw)

    def integrand(xs):
        tvals = apply_T_batch(fn, xs[:, None], profile, family, scheme)
        wvals = eval_weight_batch(norm_weight, xs[:, None], extended=True) ** sw
        return np.abs(tvals) ** e * wvals

    stars = expanded_balls(ball, family)
    intervals = _merge_intervals(
        [[float(b.center[0] - b.radius), float(b.center[0] + b.radius)] for b in stars])
    breakpoints = [0.0] if profile.alpha == 0.0 else []
    breakpoints += [float(s.center_array()[0]) for s in wsings]

    inner = 0.0
    star_diameter = 4.0 * family.norm_bound * ball.radius
    for lo, hi in intervals:
        # inner_resolution cells per expanded-ball diameter
        cells = max(64, int(spec.inner_resolution * (hi - lo) / star_diameter))
        edges = _split_edges_at(np.linspace(lo, hi, cells + 1), breakpoints)
        inner += integrate_cells_1d(integrand, edges, wsings,
                                    scheme.patch_cells, scheme.patch_shells)

    scale = max(abs(lo) + abs(hi) for lo, hi in intervals)
    extent = (scale + 1.0) * 2.0**spec.outer_octaves
    h0 = 2.0 * family.norm_bound * ball.radius / spec.outer_resolution
    segments = []
    left_end = intervals[0][0]
    right_end = intervals[-1][1]
    segments.append(graded_edges(left_end, -extent, h0, block=spec.outer_resolution))
    segments.append(graded_edges(right_end, extent, h0, block=spec.outer_resolution))
    for (a_lo, a_hi), (b_lo, b_hi) in zip(intervals, intervals[1:]):
        midpt = 0.5 * (a_hi + b_lo)
        segments.append(graded_edges(a_hi, midpt, h0, block=spec.outer_resolution))
        segments.append(graded_edges(midpt, b_lo, h0, block=spec.outer_resolution))

    outer = 0.0
    for edges in segments:
        if edges[-1] - edges[0] <= 0:
            continue
        edges = _split_edges_at(edges, breakpoints)
        outer += integrate_cells_1d(integrand, edges, wsings,
                                    scheme.patch_cells, scheme.patch_shells)

    # decay-form tail estimate beyond the truncation
    d = atom.params.d
    decay = e * (n + d + 1 - profile.alpha)
    wexp = 0.0
    from .weights import PowerWeight, ProductPowerWeight

    if isinstance(norm_weight, PowerWeight):
        wexp = norm_weight.exponent * sw
    elif isinstance(norm_weight, ProductPowerWeight):
        wexp = sum(a for a, _ in norm_weight.factors) * sw
    tail_exp = -decay + wexp
    if tail_exp < -1.0:
        at_edge = float(np.abs(integrand(np.array([extent]))[0]))
        tail = 2.0 * at_edge * extent / (-tail_exp - 1.0)
    else:
        tail = math.inf
    return inner, outer, tail


def _thm_zero_audits(w, profile, family, spec, scheme):
    fam_balls = _default_ball_family(w)
    audits = []
    idx = critical_indices(w, fam_balls, scheme)
    audits.append(AuditItem("weight in A_infinity (finite Muckenhoupt index)",
                            idx.q_critical, math.isfinite(idx.q_critical)))
    comp = check_matrix_compatibility(w, family)
    audits.append(AuditItem("w(A_j x) <= C w(x) on the sample", comp,
                            comp < COMPATIBILITY_CAP))
    audits.append(AuditItem("at least two factors at order zero", profile.m,
                            profile.m >= 2))
    pairwise_ok = True
    detail = ""
    for i in range(family.m):
        for j in range(i + 1, family.m):
            diff = family.matrices[i] - family.matrices[j]
            cond = np.linalg.cond(diff)
            if not np.isfinite(cond) or cond > family.condition_cap:
                pairwise_ok = False
                detail = f"A_{i} - A_{j} has condition number {cond:.3e}"
    audits.append(AuditItem("pairwise differences invertible", pairwise_ok,
                            pairwise_ok, detail))
    audits.append(AuditItem("p in (0, 1]", spec.p, 0.0 < spec.p <= 1.0))
    ratio = 1.0 if math.isinf(idx.rh_critical) else idx.rh_critical / (idx.rh_critical - 1.0)
    thresh = max(1.0, spec.p * ratio)
    audits.append(AuditItem("p0 above the atomic threshold", spec.p0,
                            spec.p0 > thresh, f"threshold {thresh:.4g}"))
    d_min = max(0, math.floor(w.dimension * (idx.q_critical / spec.p - 1.0)))
    return audits, idx, d_min


def _thm_positive_audits(w, profile, family, spec, scheme):
    n = w.dimension
    fam_balls = _default_ball_family(w)
    audits = []
    if spec.s is None or not (0.0 < spec.s < 1.0):
        audits.append(AuditItem("s in (0, 1)", spec.s if spec.s is not None else "missing",
                                False))
        return audits, None, None
    audits.append(AuditItem("s in (0, 1)", spec.s, True))
    audits.append(AuditItem("p in [s, 1]", spec.p, spec.s <= spec.p <= 1.0))
    try:
        aux = weight_power(w, n / ((n - profile.alpha) * spec.s))
        a1 = estimate_A1_constant(aux, fam_balls, scheme)
        audits.append(AuditItem("w^{n/((n-alpha)s)} in A_1", a1.constant,
                                a1.verdict == "finite"))
    except ValueError as exc:
        audits.append(AuditItem("w^{n/((n-alpha)s)} in A_1", "not a weight", False,
                                str(exc)))
    idx = critical_indices(w, fam_balls, scheme)
    r_lo = idx.rh_bracket[0]
    ratio = 1.0 if math.isinf(idx.rh_critical) else r_lo / (r_lo - 1.0)
    audits.append(AuditItem("r_w/(r_w - 1) < n/alpha", ratio,
                            ratio < n / profile.alpha,
                            f"estimated reverse Holder index {idx.rh_critical:.4g}"))
    comp = check_matrix_compatibility(w, family)
    audits.append(AuditItem("w(A_j x) <= C w(x) on the sample", comp,
                            comp < COMPATIBILITY_CAP))
    audits.append(AuditItem("p0 inside (r_w/(r_w-1), n/alpha)", spec.p0,
                            ratio < spec.p0 < n / profile.alpha))
    d_min = max(0, math.floor(n * (1.0 / spec.p - 1.0)))
    return audits, idx, d_min


def run_theorem_campaign(kind: str, w, profile: ExponentProfile, family: MatrixFamily,
                         spec: CampaignSpec, scheme: QuadratureScheme | None = None,
                         jobs: int = 1) -> VerificationReport:
    """Uniform-atom-bound campaign for the zero-order and positive-order theorems.

    kind "thm-zero": atoms for w itself, target norm L^p_w.
    kind "thm-positive": atoms for w^p, target norm L^q_{w^q} with
    1/q = 1/p - alpha/n (the Riesz-potential corollary is the m = 1 identity
    case of the same pipeline).
    Raises HypothesisFailed when any audited hypothesis is violated.
    """
    n = w.dimension
    if scheme is None:
        scheme = default_scheme(n)
    if kind not in ("thm-zero", "thm-positive"):
        raise ValueError("kind must be 'thm-zero' or 'thm-positive'")

    if kind == "thm-zero":
        if profile.alpha != 0.0:
            raise ValueError("the zero-order campaign needs alpha = 0")
        audits, idx, d_min = _thm_zero_audits(w, profile, family, spec, scheme)
        atom_weight = w
        norm_weight, weight_exponent, norm_exponent = w, 1.0, spec.p
        q = spec.p
    else:
        if profile.alpha <= 0.0:
            raise ValueError("the positive-order campaign needs alpha > 0")
        audits, idx, d_min = _thm_positive_audits(w, profile, family, spec, scheme)
        atom_weight = weight_power(w, spec.p) if spec.p != 1.0 else w
        q = 1.0 / (1.0 / spec.p - profile.alpha / n)
        norm_weight, weight_exponent, norm_exponent = w, q, q

    for a in audits:
        if not a.passed:
            raise HypothesisFailed(a.name, str(a.detail or a.value))

    d = spec.d if spec.d is not None else d_min
    if d < d_min:
        raise HypothesisFailed("moment degree at least the minimal degree",
                               f"d = {d} < required {d_min}")
    params = AtomParams(spec.p, spec.p0, d, atom_weight, n)
    sampler = AtomSampler(tuple(np.asarray(c, dtype=float) for c in spec.centers),
                          tuple(spec.radii))
    atoms = sample_atom_campaign(params, sampler, spec.count, spec.seed, scheme)

    def work(atom):
        inner, outer, tail = _atom_norm_split(atom, profile, family, norm_weight,
                                              weight_exponent, norm_exponent, spec,
                                              scheme)
        total = (inner + outer) ** (1.0 / norm_exponent)
        return {"center": atom.ball.center.tolist(), "radius": atom.ball.radius,
                "seed": atom.seed, "norm": total, "inner": inner, "outer": outer,
                "tail_bound": tail}

    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_campaign_worker,
                               [(atom, profile, family, norm_weight, weight_exponent,
                                 norm_exponent, spec, scheme) for atom in atoms]))
    else:
        rows = [work(atom) for atom in atoms]

    by_radius = {}
    for row in rows:
        by_radius.setdefault(row["radius"], []).append(row["norm"])
    radius_max = {r: max(v) for r, v in by_radius.items()}
    drift = _drift(list(radius_max.values()))
    max_norm = max(r["norm"] for r in rows)
    finite = all(math.isfinite(r["norm"]) for r in rows)
    verdict = "pass" if (finite and drift < STABILITY_FACTOR) else "fail"

    extras = {"q": q, "d": d, "atom_weight": weight_to_dict(atom_weight),
              "inner_share": sum(r["inner"] for r in rows)
              / max(sum(r["inner"] + r["outer"] for r in rows), RATIO_FLOOR)}
    if kind == "thm-zero" and rows:
        # spot check: the zero-order operator maps the first atom into L^{p0}
        from .weights import PowerWeight

        flat = PowerWeight(0.0, n)
        i0, o0, _ = _atom_norm_split(atoms[0], profile, family, flat, 1.0, spec.p0,
                                     spec, scheme)
        extras["lp0_spot_check"] = (i0 + o0) ** (1.0 / spec.p0)

    return VerificationReport(
        f"theorem-{'thm1' if kind == 'thm-zero' else 'ta'}", verdict, max_norm, audits,
        stability={"max_by_radius": {str(k): v for k, v in radius_max.items()},
                   "drift": drift},
        sample=spec.to_dict(),
        witnesses=rows,
        extras=extras,
        provenance={"seed": spec.seed,
                    "config_hash": config_hash({"kind": kind, "w": weight_to_dict(w),
                                                "alpha": profile.alpha,
                                                "spec": spec.to_dict()})})


def _campaign_worker(args):
    atom, profile, family, norm_weight, weight_exponent, norm_exponent, spec, scheme = args
    inner, outer, tail = _atom_norm_split(atom, profile, family, norm_weight,
                                          weight_exponent, norm_exponent, spec, scheme)
    total = (inner + outer) ** (1.0 / norm_exponent)
    return {"center": atom.ball.center.tolist(), "radius": atom.ball.radius,
            "seed": atom.seed, "norm": total, "inner": inner, "outer": outer,
            "tail_bound": tail}
