"""Product-kernel fractional integral operators and maximal functions.

The central object is the operator with kernel
prod_j |x - A_j y|^{-alpha_j}, where the positive exponents alpha_j sum to
n - alpha and the A_j are invertible matrices.  For a single identity
matrix this is the classical Riesz potential of order alpha.  Values are
computed by midpoint quadrature over the support of f with the kernel's
radial singularities handled by the patch machinery in `quadrature`.

Maximal functions (Hardy-Littlewood, fractional, smooth-dilation) are
computed as maxima over finite, lattice-aligned candidate ball sets and are
therefore certified lower bounds of the true suprema; candidate lattices
refine under the policy's control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import QuadratureDiverged, Singular
from .geometry import Ball, MatrixFamily, as_point, identity_family
from .quadrature import (PowerProfile, QuadratureScheme, RadialSingularity,
                         default_scheme, integrate_ball, integrate_cells_1d,
                         lebesgue_ball)
from .weights import eval_weight_batch, weight_singularities

_SINGULAR_DIST = 1e-14
_COINCIDE_TOL = 1e-12


@dataclass(frozen=True)
class ExponentProfile:
    """Kernel exponents: alpha in [0, n), positive alpha_j summing to n - alpha.

    A zero-order kernel (alpha = 0) needs at least two factors.
    """

    alpha: float
    alphas: tuple
    dimension: int

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if not (0.0 <= self.alpha < self.dimension):
            raise ValueError("order alpha must lie in [0, dimension)")
        if any(a <= 0 for a in alphas):
            raise ValueError("all kernel exponents must be positive")
        if abs(sum(alphas) - (self.dimension - self.alpha)) > 1e-12:
            raise ValueError("kernel exponents must sum to dimension - alpha")
        if self.alpha == 0.0 and len(alphas) < 2:
            raise ValueError("a zero-order kernel needs at least two factors")
        object.__setattr__(self, "alphas", alphas)

    @property
    def m(self) -> int:
        return len(self.alphas)


def equal_split(alpha: float, m: int, dimension: int) -> ExponentProfile:
    return ExponentProfile(alpha, tuple((dimension - alpha) / m for _ in range(m)),
                           dimension)


# ---------------------------------------------------------------------------
# Compactly supported test functions
# ---------------------------------------------------------------------------


class IndicatorProfile:
    """Profile constantly one on the support ball."""

    def eval(self, ball: Ball, pts: np.ndarray) -> np.ndarray:
        return np.ones(pts.shape[0])

    def to_dict(self):
        return {"kind": "indicator"}


class PolynomialProfile:
    """Polynomial in the centered, radius-scaled variable u = (y - x0) / r.

    Coefficients are keyed by multi-index; evaluation and exact ball moments
    stay well conditioned at every scale because u is dimensionless.
    """

    def __init__(self, coeffs: dict):
        self.coeffs = {tuple(int(i) for i in k): float(v) for k, v in coeffs.items()
                       if float(v) != 0.0}
        if not self.coeffs:
            self.coeffs = {}

    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=0)

    def eval(self, ball: Ball, pts: np.ndarray) -> np.ndarray:
        u = (np.atleast_2d(pts) - ball.center) / ball.radius
        out = np.zeros(u.shape[0])
        for k, c in self.coeffs.items():
            term = np.full(u.shape[0], c)
            for d, e in enumerate(k):
                if e:
                    term = term * u[:, d] ** e
            out += term
        return out

    def scaled(self, factor: float) -> "PolynomialProfile":
        return PolynomialProfile({k: c * factor for k, c in self.coeffs.items()})

    def plus(self, other: "PolynomialProfile") -> "PolynomialProfile":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return PolynomialProfile(out)

    def to_dict(self):
        return {"kind": "polynomial",
                "coeffs": [[list(k), v] for k, v in sorted(self.coeffs.items())]}


class CallableProfile:
    """Arbitrary vectorized profile; used for diagnostics, not serializable."""

    def __init__(self, fn):
        self.fn = fn

    def eval(self, ball: Ball, pts: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.atleast_2d(pts)), dtype=float)


class GridProfile:
    """Piecewise-constant samples on the support ball's bounding box."""

    def __init__(self, values: np.ndarray):
        self.values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid profile values must be finite")

    def eval(self, ball: Ball, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        n = ball.dimension
        vals = self.values
        if n == 1:
            cells = vals.shape[0]
            h = 2.0 * ball.radius / cells
            idx = np.floor((pts[:, 0] - (ball.center[0] - ball.radius)) / h).astype(int)
            idx = np.clip(idx, 0, cells - 1)
            return vals[idx]
        cells = vals.shape[0]
        h = 2.0 * ball.radius / cells
        i = np.clip(np.floor((pts[:, 0] - (ball.center[0] - ball.radius)) / h).astype(int),
                    0, cells - 1)
        j = np.clip(np.floor((pts[:, 1] - (ball.center[1] - ball.radius)) / h).astype(int),
                    0, vals.shape[1] - 1)
        return vals[i, j]

    def to_dict(self):
        return {"kind": "grid", "shape": list(self.values.shape)}


@dataclass(frozen=True)
class SampledFunction:
    """A compactly supported function: profile restricted to a ball."""

    ball: Ball
    profile: object = field(default_factory=IndicatorProfile)

    @property
    def dimension(self) -> int:
        return self.ball.dimension

    def eval(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros(pts.shape[0])
        inside = self.ball.contains(pts)
        if np.any(inside):
            out[inside] = self.profile.eval(self.ball, pts[inside])
        return out

    def abs(self) -> "SampledFunction":
        return SampledFunction(self.ball,
                               CallableProfile(lambda q, _b=self.ball, _p=self.profile:
                                               np.abs(_p.eval(_b, q))))

    def scaled(self, factor: float) -> "SampledFunction":
        prof = self.profile
        if isinstance(prof, PolynomialProfile):
            return SampledFunction(self.ball, prof.scaled(factor))
        if isinstance(prof, GridProfile):
            return SampledFunction(self.ball, GridProfile(prof.values * factor))
        return SampledFunction(self.ball,
                               CallableProfile(lambda q, _b=self.ball, _p=prof, _f=factor:
                                               _f * _p.eval(_b, q)))


def indicator(center, radius: float) -> SampledFunction:
    return SampledFunction(Ball(center, radius), IndicatorProfile())


def sampled_from_csv(path, ball: Ball) -> SampledFunction:
    """Read (coordinates..., value) rows sampled on the ball's cell lattice."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    n = ball.dimension
    if data.shape[1] != n + 1:
        raise ValueError(f"expected {n + 1} columns (coordinates..., value)")
    count = data.shape[0]
    if n == 1:
        cells = count
        order = np.argsort(data[:, 0])
        return SampledFunction(ball, GridProfile(data[order, 1]))
    side = int(round(math.sqrt(count)))
    if side * side != count:
        raise ValueError("two-dimensional samples must form a square grid")
    vals = np.full((side, side), np.nan)
    h = 2.0 * ball.radius / side
    i = np.clip(np.floor((data[:, 0] - (ball.center[0] - ball.radius)) / h).astype(int), 0, side - 1)
    j = np.clip(np.floor((data[:, 1] - (ball.center[1] - ball.radius)) / h).astype(int), 0, side - 1)
    vals[i, j] = data[:, n]
    if np.any(np.isnan(vals)):
        raise ValueError("CSV rows do not cover the sample grid")
    return SampledFunction(ball, GridProfile(vals))


# ---------------------------------------------------------------------------
# Kernel and operator evaluation
# ---------------------------------------------------------------------------


def kernel_eval(x, y, profile: ExponentProfile, family: MatrixFamily) -> float:
    """prod_j |x - A_j y|^{-alpha_j}; raises Singular within 1e-14 of a pole."""
    x = as_point(x, profile.dimension)
    y = as_point(y, profile.dimension)
    out = 1.0
    for j, a in enumerate(profile.alphas):
        d = float(np.linalg.norm(x - family.apply(j, y)))
        if d < _SINGULAR_DIST:
            raise Singular(f"kernel factor {j} evaluated at distance {d:.3e}")
        out *= d ** (-a)
    return out


def _kernel_rows(xs: np.ndarray, ys: np.ndarray, profile: ExponentProfile,
                 family: MatrixFamily) -> np.ndarray:
    """Kernel matrix K[i, c] = k(xs[i], ys[c]) with distances clipped away from 0."""
    out = np.ones((xs.shape[0], ys.shape[0]))
    for j, a in enumerate(profile.alphas):
        mapped = ys @ family.matrices[j].T
        diff = xs[:, None, :] - mapped[None, :, :]
        d = np.maximum(np.linalg.norm(diff, axis=2), 1e-300)
        out *= d ** (-a)
    return out


def _kernel_singularities(x: np.ndarray, profile: ExponentProfile,
                          family: MatrixFamily, ball: Ball):
    """Radial singularities in y of the kernel at fixed x, merged when the
    preimages A_j^{-1} x coincide."""
    groups = []
    for j, a in enumerate(profile.alphas):
        c = family.apply_inverse(j, x)
        merged = False
        for g in groups:
            if np.linalg.norm(g[0] - c) <= _COINCIDE_TOL * max(1.0, float(np.linalg.norm(c))):
                g[1] += a
                merged = True
                break
        if not merged:
            groups.append([c, a])
    sings = []
    margin = ball.radius * 0.5 + 1.0
    for c, atot in groups:
        if np.linalg.norm(c - ball.center) <= ball.radius + margin:
            sings.append(RadialSingularity(tuple(c), PowerProfile(-atot)))
    return sings


def apply_T(f: SampledFunction, x, profile: ExponentProfile, family: MatrixFamily,
            scheme: QuadratureScheme | None = None, check_convergence: bool = True) -> float:
    """Quadrature value of the product-kernel integral at x.

    With ``check_convergence`` the value is recomputed at twice the
    resolution; a change above 8 * tol raises QuadratureDiverged and the
    refined value is returned otherwise.
    """
    x = as_point(x, profile.dimension)
    if scheme is None:
        scheme = default_scheme(profile.dimension)
    if profile.dimension != family.dimension or f.dimension != profile.dimension:
        raise ValueError("function, exponents and matrices must share one dimension")

    def value(s):
        return float(apply_T_batch(f, x[None, :], profile, family, s)[0])

    v = value(scheme)
    if not check_convergence:
        return v
    v2 = value(scheme.refined(2))
    if abs(v2 - v) > 8.0 * scheme.tol:
        raise QuadratureDiverged(
            f"refinement moved the value by {abs(v2 - v):.3e} (> 8 * tol = {8 * scheme.tol:.1e})")
    return v2


def apply_T_batch(f: SampledFunction, xs, profile: ExponentProfile,
                  family: MatrixFamily, scheme: QuadratureScheme | None = None) -> np.ndarray:
    """Vectorized apply_T over a batch of evaluation points (no refinement check)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if scheme is None:
        scheme = default_scheme(profile.dimension)
    ball = f.ball
    n = ball.dimension

    if n == 1:
        cells = 2 * scheme.resolution
        edges = np.linspace(ball.center[0] - ball.radius, ball.center[0] + ball.radius,
                            cells + 1)
        out = np.empty(xs.shape[0])
        add = scheme.policy == "analytic"
        for i in range(xs.shape[0]):
            xi = xs[i]
            sings = _kernel_singularities(xi, profile, family, ball)

            def fn(ys):
                pts = ys[:, None]
                return (_kernel_rows(xi[None, :], pts, profile, family)[0]
                        * f.eval(pts))

            out[i] = integrate_cells_1d(fn, edges, sings, scheme.patch_cells,
                                        scheme.patch_shells, add_patches=add)
        return out

    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        xi = xs[i]
        sings = _kernel_singularities(xi, profile, family, ball)

        def fn(pts):
            return _kernel_rows(xi[None, :], pts, profile, family)[0] * f.eval(pts)

        out[i] = integrate_ball(fn, ball, scheme, sings)
    return out


def riesz_potential(f: SampledFunction, x, alpha: float,
                    scheme: QuadratureScheme | None = None,
                    check_convergence: bool = True) -> float:
    """Riesz potential of order alpha: the single-factor identity-matrix kernel."""
    n = f.dimension
    if not (0.0 < alpha < n):
        raise ValueError("Riesz potential order must lie in (0, dimension)")
    profile = ExponentProfile(alpha, (n - alpha,), n)
    return apply_T(f, x, profile, identity_family(n), scheme, check_convergence)


def domination_check(f: SampledFunction, x, profile: ExponentProfile,
                     family: MatrixFamily, scheme: QuadratureScheme | None = None) -> float:
    """|T f(x)| divided by the sum of Riesz potentials of |f| at the points
    A_j^{-1} x; both sides zero gives ratio 0 by convention."""
    if not (0.0 < profile.alpha < profile.dimension):
        raise ValueError("domination requires order alpha in (0, dimension)")
    x = as_point(x, profile.dimension)
    num = abs(apply_T(f, x, profile, family, scheme, check_convergence=False))
    fa = f.abs()
    den = 0.0
    for j in range(family.m):
        den += riesz_potential(fa, family.apply_inverse(j, x), profile.alpha, scheme,
                               check_convergence=False)
    if num < 1e-14 and den < 1e-14:
        return 0.0
    return num / den


# ---------------------------------------------------------------------------
# Maximal functions over finite candidate ball sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaximalPolicy:
    """Candidate lattice for maximal functions.

    Candidates are intervals with endpoints on a lattice covering the hull
    of (support of f, x) plus a margin (dimension 1), or lattice centers with
    dyadic radii (dimension 2).  Values are certified lower bounds of the
    true supremum; ``refine()`` doubles the lattice density.
    """

    cells_per_unit: int = 128
    margin: float = 2.0
    radii_log2: tuple = tuple(range(-4, 5))
    centers_per_unit: int = 4

    def refine(self, factor: int = 2) -> "MaximalPolicy":
        return MaximalPolicy(self.cells_per_unit * factor, self.margin,
                             self.radii_log2, self.centers_per_unit * factor)


def _lattice_1d(f: SampledFunction, x: float, policy: MaximalPolicy) -> np.ndarray:
    lo = min(f.ball.center[0] - f.ball.radius, x) - policy.margin
    hi = max(f.ball.center[0] + f.ball.radius, x) + policy.margin
    count = max(8, int(round((hi - lo) * policy.cells_per_unit)))
    pts = np.linspace(lo, hi, count + 1)
    anchors = np.array([x, f.ball.center[0] - f.ball.radius, f.ball.center[0] + f.ball.radius])
    pts = np.unique(np.concatenate([pts, anchors]))
    return pts


def _prefix_integral(f: SampledFunction, pts: np.ndarray, sub: int = 16) -> np.ndarray:
    """Cumulative integral of |f| on the lattice cells (midpoint subrule)."""
    lefts = pts[:-1]
    widths = np.diff(pts)
    offs = (np.arange(sub) + 0.5) / sub
    samples = lefts[:, None] + widths[:, None] * offs[None, :]
    vals = np.abs(f.eval(samples.reshape(-1, 1))).reshape(len(lefts), sub)
    cell = widths * vals.mean(axis=1)
    return np.concatenate([[0.0], np.cumsum(cell)])


def _maximal_1d(f: SampledFunction, x: float, policy: MaximalPolicy, beta: float):
    pts = _lattice_1d(f, x, policy)
    G = _prefix_integral(f, pts)
    ix = int(np.searchsorted(pts, x))
    ix = min(max(ix, 0), len(pts) - 1)
    if abs(pts[ix] - x) > 1e-12:
        ix = int(np.argmin(np.abs(pts - x)))
    lefts = pts[:ix + 1]
    rights = pts[ix:]
    gl = G[:ix + 1]
    gr = G[ix:]
    length = rights[None, :] - lefts[:, None]
    mass = gr[None, :] - gl[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(length > 0, length ** (beta - 1.0) * mass, -np.inf)
    k = int(np.argmax(vals))
    i, j = divmod(k, rights.size)
    return float(vals[i, j]), (float(lefts[i]), float(rights[j]))


def _maximal_2d(f: SampledFunction, x: np.ndarray, policy: MaximalPolicy, beta: float):
    ball = f.ball
    lo = np.minimum(ball.center - ball.radius, x) - policy.margin
    hi = np.maximum(ball.center + ball.radius, x) + policy.margin
    per = policy.centers_per_unit
    g0 = np.linspace(lo[0], hi[0], max(4, int((hi[0] - lo[0]) * per)) + 1)
    g1 = np.linspace(lo[1], hi[1], max(4, int((hi[1] - lo[1]) * per)) + 1)
    X, Y = np.meshgrid(g0, g1, indexing="ij")
    centers = np.column_stack([X.ravel(), Y.ravel()])
    centers = np.vstack([centers, x[None, :], ball.center[None, :]])

    res = 48
    edges0 = np.linspace(ball.center[0] - ball.radius, ball.center[0] + ball.radius, 2 * res + 1)
    edges1 = np.linspace(ball.center[1] - ball.radius, ball.center[1] + ball.radius, 2 * res + 1)
    m0 = 0.5 * (edges0[:-1] + edges0[1:])
    m1 = 0.5 * (edges1[:-1] + edges1[1:])
    MX, MY = np.meshgrid(m0, m1, indexing="ij")
    cells = np.column_stack([MX.ravel(), MY.ravel()])
    h2 = (ball.radius / res) ** 2
    fv = np.abs(f.eval(cells)) * h2

    half_diag = math.sqrt(h2 / 2.0)
    best = 0.0
    witness = None
    for k in policy.radii_log2:
        r = 2.0 ** k
        ok = np.linalg.norm(centers - x, axis=1) <= r
        if not np.any(ok):
            continue
        vol = lebesgue_ball(2, r)
        factor = vol ** (beta / 2.0 - 1.0)
        for c in centers[ok]:
            # only cells fully inside the candidate ball contribute, so the
            # value is a certified lower bound of the true supremum
            mass = float(np.sum(fv[np.linalg.norm(cells - c, axis=1) <= r - half_diag]))
            v = factor * mass
            if v > best:
                best = v
                witness = (tuple(float(t) for t in c), r)
    return best, witness


def hl_maximal(f: SampledFunction, x, policy: MaximalPolicy | None = None) -> float:
    """Uncentered Hardy-Littlewood maximal function over the candidate set."""
    v, _ = hl_maximal_witness(f, x, policy)
    return v


def hl_maximal_witness(f: SampledFunction, x, policy: MaximalPolicy | None = None):
    policy = policy or MaximalPolicy()
    x = as_point(x, f.dimension)
    if f.dimension == 1:
        return _maximal_1d(f, float(x[0]), policy, beta=0.0)
    return _maximal_2d(f, x, policy, beta=0.0)


def fractional_maximal(f: SampledFunction, x, beta: float,
                       policy: MaximalPolicy | None = None) -> float:
    """sup over candidate balls of |B|^{beta/n - 1} * integral of |f| over B."""
    v, _ = fractional_maximal_witness(f, x, beta, policy)
    return v


def fractional_maximal_witness(f: SampledFunction, x, beta: float,
                               policy: MaximalPolicy | None = None):
    n = f.dimension
    if not (0.0 < beta < n):
        raise ValueError("fractional order must lie in (0, dimension)")
    policy = policy or MaximalPolicy()
    x = as_point(x, n)
    if n == 1:
        return _maximal_1d(f, float(x[0]), policy, beta=beta)
    return _maximal_2d(f, x, policy, beta=beta)


# ---------------------------------------------------------------------------
# Weighted norms and the smooth maximal lower bound
# ---------------------------------------------------------------------------


def weighted_norm(f: SampledFunction, p: float, w, s: float = 1.0,
                  scheme: QuadratureScheme | None = None) -> float:
    """(integral of |f|^p w^s over supp f)^(1/p)."""
    p = float(p)
    if p <= 0:
        raise ValueError("norm exponent must be positive")
    if scheme is None:
        scheme = default_scheme(f.dimension)

    def fn(pts):
        return np.abs(f.eval(pts)) ** p * eval_weight_batch(w, pts, extended=True) ** s

    val = integrate_ball(fn, f.ball, scheme, weight_singularities(w, s))
    return val ** (1.0 / p)


def _gaussian(pts: np.ndarray) -> np.ndarray:
    n = pts.shape[1]
    return (2.0 * math.pi) ** (-n / 2.0) * np.exp(-0.5 * np.sum(pts * pts, axis=1))


def default_dilation_grid() -> np.ndarray:
    return 2.0 ** np.arange(-6, 7)


def mphi_maximal_lower(terms, x, t_grid=None, scheme: QuadratureScheme | None = None) -> float:
    """Lower bound for the smooth maximal function of a finite atomic sum.

    ``terms`` is a SampledFunction or a list of (coefficient, SampledFunction);
    the dilation parameter runs over a finite dyadic grid, so the result is a
    certified lower bound of the true supremum over all dilations.
    """
    if isinstance(terms, SampledFunction):
        terms = [(1.0, terms)]
    if not terms:
        return 0.0
    n = terms[0][1].dimension
    x = as_point(x, n)
    if t_grid is None:
        t_grid = default_dilation_grid()
    if scheme is None:
        scheme = default_scheme(n)
    best = 0.0
    for t in np.asarray(t_grid, dtype=float):
        total = 0.0
        for coef, f in terms:
            def fn(pts, _t=t):
                return _gaussian((x[None, :] - pts) / _t) * f.eval(pts) / _t**n

            total += coef * integrate_ball(fn, f.ball, scheme)
        best = max(best, abs(total))
    return best
