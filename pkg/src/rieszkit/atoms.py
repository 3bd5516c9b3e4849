"""Construction, validation and sampling of weighted Hardy-space atoms.

An atom for the weight w with parameters (p, p0, d) is supported in a ball
B = B(x0, r), obeys the size bound ||a||_{p0} <= |B|^{1/p0} w(B)^{-1/p},
and has vanishing moments against every monomial of degree at most d.
Admissible (p0, d) come from the weight's critical indices.

Atoms are built from seeded random polynomials: the moment conditions are
enforced exactly by an orthogonal projection in the unweighted L^2 inner
product on B (the monomial Gram system in the centered, radius-scaled
variable, which keeps the system well conditioned at every scale), and the
size bound is then saturated by scaling.  Saturation is deliberate: the
verification campaigns stress the uniform operator bounds hardest at the
norm ceiling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product as _iterproduct

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateProfile
from .geometry import Ball
from .quadrature import QuadratureScheme, default_scheme, lebesgue_ball
from .weights import (critical_indices, weight_from_dict, weight_to_dict,
                      weighted_measure)
from .operators import PolynomialProfile, SampledFunction, weighted_norm
from .weights import PowerWeight

A2_REL_TOL = 1e-8
MOMENT_REL_TOL = 1e-10
DEGENERACY_TOL = 1e-12


# ---------------------------------------------------------------------------
# Exact monomial integrals over balls
# ---------------------------------------------------------------------------


def multiindices(dimension: int, max_degree: int):
    """All multi-indices in ``dimension`` variables of total degree <= max_degree."""
    out = []
    for combo in _iterproduct(range(max_degree + 1), repeat=dimension):
        if sum(combo) <= max_degree:
            out.append(tuple(combo))
    out.sort(key=lambda k: (sum(k), k))
    return out


def unit_ball_monomial_integral(gamma, dimension: int) -> float:
    """Exact integral of u^gamma over the unit ball (zero for odd indices)."""
    if any(g % 2 for g in gamma):
        return 0.0
    log_num = sum(gammaln((g + 1) / 2.0) for g in gamma)
    log_den = gammaln((sum(gamma) + dimension) / 2.0 + 1.0)
    return math.exp(log_num - log_den)


def _gram(indices, dimension: int) -> np.ndarray:
    k = len(indices)
    g = np.empty((k, k))
    for i, a in enumerate(indices):
        for j, b in enumerate(indices):
            g[i, j] = unit_ball_monomial_integral(
                tuple(x + y for x, y in zip(a, b)), dimension)
    return g


def _l2_norm_sq(coeffs: dict, dimension: int) -> float:
    keys = list(coeffs)
    total = 0.0
    for i, a in enumerate(keys):
        for b in keys:
            total += coeffs[a] * coeffs[b] * unit_ball_monomial_integral(
                tuple(x + y for x, y in zip(a, b)), dimension)
    return total


def project_away_moments(coeffs: dict, d: int, dimension: int) -> dict:
    """Subtract the L^2(B) projection onto polynomials of degree <= d.

    Works in the centered scaled variable, so the same unit-ball Gram system
    serves every ball.  The residual has exactly vanishing moments against
    all monomials of degree <= d.
    """
    low = multiindices(dimension, d)
    gram = _gram(low, dimension)
    rhs = np.zeros(len(low))
    for i, b in enumerate(low):
        rhs[i] = sum(c * unit_ball_monomial_integral(
            tuple(x + y for x, y in zip(b, k)), dimension)
            for k, c in coeffs.items())
    sol = np.linalg.solve(gram, rhs)
    out = dict(coeffs)
    for i, b in enumerate(low):
        out[b] = out.get(b, 0.0) - float(sol[i])
    return out


def profile_raw_moment(profile: PolynomialProfile, ball: Ball, beta) -> float:
    """Exact integral of y^beta * a(y) over the ball for a polynomial profile."""
    n = ball.dimension
    x0 = ball.center
    r = ball.radius
    total = 0.0
    ranges = [range(b + 1) for b in beta]
    for gamma in _iterproduct(*ranges):
        binom = 1.0
        for bd, gd, xd in zip(beta, gamma, x0):
            binom *= math.comb(bd, gd) * xd ** (bd - gd)
        if binom == 0.0:
            continue
        inner = sum(c * unit_ball_monomial_integral(
            tuple(g + k for g, k in zip(gamma, key)), n)
            for key, c in profile.coeffs.items())
        total += binom * r ** (sum(gamma)) * inner
    return total * r**n


# ---------------------------------------------------------------------------
# Parameters and admissibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AtomParams:
    """Exponents and weight defining one atom class."""

    p: float
    p0: float
    d: int
    weight: object
    dimension: int

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ValueError("atom exponent p must lie in (0, 1]")
        if not (self.p0 > 1.0 and math.isfinite(self.p0)):
            raise ValueError("atom exponent p0 must be finite and exceed 1")
        if self.d < 0:
            raise ValueError("moment degree d must be nonnegative")

    def to_dict(self) -> dict:
        return {"p": self.p, "p0": self.p0, "d": self.d,
                "weight": weight_to_dict(self.weight), "dimension": self.dimension}


@dataclass(frozen=True)
class AdmissibleRange:
    """Open lower endpoint for p0 and the minimal moment degree."""

    p0_lower: float
    d_min: int
    q_critical: float
    rh_critical: float

    def to_dict(self) -> dict:
        enc = lambda v: v if math.isfinite(v) else "inf"
        return {"p0_lower": self.p0_lower, "d_min": self.d_min,
                "q_critical": enc(self.q_critical), "rh_critical": enc(self.rh_critical)}


def admissible_params(w, p: float, family, scheme: QuadratureScheme | None = None,
                      tol: float = 1e-2) -> AdmissibleRange:
    """Admissible (p0, d) from the weight's critical indices.

    The p0 threshold is max(1, p * r / (r - 1)) with the convention
    r / (r - 1) = 1 when the reverse Holder index is infinite; the minimal
    degree is floor(n (q_critical / p - 1)).
    """
    idx = critical_indices(w, family, scheme, tol=tol)
    if math.isinf(idx.rh_critical):
        ratio = 1.0
    else:
        ratio = idx.rh_critical / (idx.rh_critical - 1.0)
    p0_lower = max(1.0, p * ratio)
    n = w.dimension
    if math.isinf(idx.q_critical):
        raise ValueError("weight has no finite Muckenhoupt index; no admissible atoms")
    d_min = max(0, math.floor(n * (idx.q_critical / p - 1.0)))
    return AdmissibleRange(p0_lower, d_min, idx.q_critical, idx.rh_critical)


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    ball: Ball
    profile: object
    params: AtomParams
    seed: int | None = None

    def function(self) -> SampledFunction:
        return SampledFunction(self.ball, self.profile)

    def to_record(self) -> dict:
        if not isinstance(self.profile, PolynomialProfile):
            raise TypeError("only polynomial atoms are serializable")
        return {"ball": self.ball.to_dict(), "profile": self.profile.to_dict(),
                "params": self.params.to_dict(), "seed": self.seed}


def atom_from_record(rec: dict) -> Atom:
    ball = Ball(rec["ball"]["center"], rec["ball"]["radius"])
    prof = PolynomialProfile({tuple(k): v for k, v in rec["profile"]["coeffs"]})
    pp = rec["params"]
    params = AtomParams(pp["p"], pp["p0"], pp["d"], weight_from_dict(pp["weight"]),
                        pp["dimension"])
    return Atom(ball, prof, params, rec.get("seed"))


def write_atom_manifest(atoms, path):
    with open(path, "w") as fh:
        for a in atoms:
            fh.write(json.dumps(a.to_record(), sort_keys=True) + "\n")


def read_atom_manifest(path):
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(atom_from_record(json.loads(line)))
    return out


def _norm_bound(ball: Ball, params: AtomParams, scheme: QuadratureScheme) -> float:
    vol = lebesgue_ball(ball.dimension, ball.radius)
    wb = weighted_measure(params.weight, 1.0, ball, scheme)
    return vol ** (1.0 / params.p0) * wb ** (-1.0 / params.p)


def _p0_norm(fn: SampledFunction, p0: float, scheme: QuadratureScheme) -> float:
    flat = PowerWeight(0.0, fn.dimension)
    return weighted_norm(fn, p0, flat, 1.0, scheme)


def construct_atom(ball: Ball, params: AtomParams, seed: int,
                   scheme: QuadratureScheme | None = None) -> Atom:
    """Seeded random polynomial of degree d+2, projected and saturated.

    The remaining degrees of freedom after the moment projection are the
    interesting ones; a residual below the degeneracy tolerance raises
    DegenerateProfile so the caller can resample.
    """
    n = params.dimension
    if scheme is None:
        scheme = default_scheme(n)
    rng = np.random.default_rng(seed)
    keys = multiindices(n, params.d + 2)
    raw = {k: float(rng.uniform(-1.0, 1.0)) for k in keys}
    resid = project_away_moments(raw, params.d, n)
    if _l2_norm_sq(resid, n) < (DEGENERACY_TOL ** 2) * _l2_norm_sq(raw, n):
        raise DegenerateProfile(f"projection annihilated the seed-{seed} profile")
    prof = PolynomialProfile(resid)
    norm = _p0_norm(SampledFunction(ball, prof), params.p0, scheme)
    if norm <= 0.0:
        raise DegenerateProfile(f"seed-{seed} profile has zero norm")
    target = _norm_bound(ball, params, scheme)
    return Atom(ball, prof.scaled(target / norm), params, seed)


@dataclass
class AtomValidation:
    passed: bool
    support_ok: bool
    size_ok: bool
    size_margin: float       # (bound - norm) / bound, >= -tolerance when ok
    moments_ok: bool
    moment_margins: dict     # beta -> |moment| / tolerance
    norm: float
    bound: float

    def to_dict(self) -> dict:
        return {"passed": self.passed, "support_ok": self.support_ok,
                "size_ok": self.size_ok, "size_margin": self.size_margin,
                "moments_ok": self.moments_ok,
                "moment_margins": {str(list(k)): v for k, v in self.moment_margins.items()},
                "norm": self.norm, "bound": self.bound}


def validate_atom(atom: Atom, scheme: QuadratureScheme | None = None) -> AtomValidation:
    """Check support, the size bound and the vanishing moments.

    Moments of polynomial profiles are integrated exactly; other profiles
    fall back to quadrature.  The moment tolerance is scaled by
    r^{|beta| + n (1 - 1/p0)} so validation is dilation stable.
    """
    params = atom.params
    n = params.dimension
    if scheme is None:
        scheme = default_scheme(n)
    fn = atom.function()
    norm = _p0_norm(fn, params.p0, scheme)
    bound = _norm_bound(atom.ball, params, scheme)
    size_ok = norm <= bound * (1.0 + A2_REL_TOL)

    r = atom.ball.radius
    margins = {}
    moments_ok = True
    for beta in multiindices(n, params.d):
        if isinstance(atom.profile, PolynomialProfile):
            mom = profile_raw_moment(atom.profile, atom.ball, beta)
        else:
            from .quadrature import integrate_ball

            def integrand(pts, _b=beta):
                out = fn.eval(pts)
                for dax, e in enumerate(_b):
                    if e:
                        out = out * pts[:, dax] ** e
                return out

            mom = integrate_ball(integrand, atom.ball, scheme)
        tol = MOMENT_REL_TOL * norm * r ** (sum(beta) + n * (1.0 - 1.0 / params.p0))
        margins[beta] = abs(mom) / tol if tol > 0 else math.inf
        if abs(mom) > tol:
            moments_ok = False
    return AtomValidation(size_ok and moments_ok, True, size_ok,
                          (bound - norm) / bound, moments_ok, margins, norm, bound)


@dataclass(frozen=True)
class AtomSampler:
    """Deterministic campaign lattice: centers crossed with dyadic radii."""

    centers: tuple
    radii: tuple

    def ball(self, i: int) -> Ball:
        c = self.centers[i % len(self.centers)]
        r = self.radii[(i // len(self.centers)) % len(self.radii)]
        return Ball(c, r)


def derive_seed(campaign_seed: int, index: int, retry: int = 0) -> int:
    return int(np.random.SeedSequence((campaign_seed, index, retry)).generate_state(1)[0])


def sample_atom_campaign(params: AtomParams, sampler: AtomSampler, count: int,
                         seed: int, scheme: QuadratureScheme | None = None,
                         max_retries: int = 8) -> list:
    """``count`` validated atoms on the sampler's lattice, reproducible by seed."""
    if count < 1:
        raise ValueError("campaign needs at least one atom")
    atoms = []
    for i in range(count):
        ball = sampler.ball(i)
        for retry in range(max_retries):
            try:
                atoms.append(construct_atom(ball, params, derive_seed(seed, i, retry),
                                            scheme))
                break
            except DegenerateProfile:
                continue
        else:
            raise DegenerateProfile(
                f"atom {i}: {max_retries} resampling attempts were all degenerate")
    return atoms
