"""Balls, matrix families, and the expanded-ball / outer-region decomposition.

Given a ball B(x0, r) and invertible matrices A_1..A_m with norm bound
M = max_j ||A_j||, the plane splits into the expanded balls
B_i* = B(A_i x0, 2 M r) and the outer region, which is itself partitioned
by nearest transformed center.  This decomposition is the geometric
skeleton of every pointwise estimate in the verification harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RieszkitError


def as_point(x, dimension: int | None = None) -> np.ndarray:
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if dimension is not None and p.shape != (dimension,):
        raise ValueError(f"expected a point in R^{dimension}, got shape {p.shape}")
    return p


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not math.isfinite(self.radius) or self.radius <= 0:
            raise ValueError("ball radius must be finite and positive")

    @property
    def dimension(self) -> int:
        return self.center.size

    def scaled(self, factor: float) -> "Ball":
        return Ball(self.center, self.radius * factor)

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.linalg.norm(pts - self.center, axis=1) <= self.radius

    def to_dict(self) -> dict:
        return {"center": [float(c) for c in self.center], "radius": self.radius}


@dataclass(frozen=True)
class BallFamily:
    balls: tuple

    def __post_init__(self):
        balls = tuple(self.balls)
        if not balls:
            raise ValueError("ball family must be nonempty")
        radii = [b.radius for b in balls]
        if math.log2(max(radii) / min(radii)) < 3.0 - 1e-9:
            raise ValueError("ball family radii must span at least 4 dyadic scales")
        object.__setattr__(self, "balls", balls)

    def __iter__(self):
        return iter(self.balls)

    def __len__(self):
        return len(self.balls)


def dyadic_ball_family(centers, k_min: int = -8, k_max: int = 4) -> BallFamily:
    """Lattice of centers crossed with dyadic radii 2^k, k in [k_min, k_max]."""
    balls = []
    for c in centers:
        for k in range(k_min, k_max + 1):
            balls.append(Ball(c, 2.0**k))
    return BallFamily(tuple(balls))


def operator_norm(matrix) -> float:
    """Spectral norm (largest singular value)."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("operator_norm expects a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return float(np.linalg.norm(a, 2))


@dataclass(frozen=True)
class MatrixFamily:
    """The matrices A_1..A_m with cached inverses, norms and differences.

    ``pairwise_invertible`` must be set when the family is used with a
    zero-order kernel (total kernel homogeneity -n), which requires every
    A_i - A_j to be invertible.
    """

    matrices: tuple
    pairwise_invertible: bool = False
    condition_cap: float = 1e8

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=float) for m in self.matrices)
        if not mats:
            raise ValueError("matrix family must be nonempty")
        n = mats[0].shape[0]
        inverses = []
        norms = []
        for j, a in enumerate(mats):
            if a.shape != (n, n):
                raise RieszkitError(f"matrix {j}: expected shape ({n}, {n}), got {a.shape}")
            cond = np.linalg.cond(a)
            if not np.isfinite(cond) or cond > self.condition_cap:
                raise RieszkitError(
                    f"matrix {j}: condition number {cond:.3e} exceeds cap {self.condition_cap:.1e}")
            inverses.append(np.linalg.inv(a))
            norms.append(operator_norm(a))
        if self.pairwise_invertible:
            for i in range(len(mats)):
                for j in range(i + 1, len(mats)):
                    d = mats[i] - mats[j]
                    cond = np.linalg.cond(d)
                    if not np.isfinite(cond) or cond > self.condition_cap:
                        raise RieszkitError(
                            f"matrices {i},{j}: difference not invertible "
                            f"(condition number {cond:.3e})")
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "_inverses", tuple(inverses))
        object.__setattr__(self, "_norms", tuple(norms))

    @property
    def m(self) -> int:
        return len(self.matrices)

    @property
    def dimension(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def inverses(self) -> tuple:
        return self._inverses

    @property
    def norm_bound(self) -> float:
        """M = max_j ||A_j|| in the spectral norm."""
        return max(self._norms)

    def apply(self, j: int, x) -> np.ndarray:
        return self.matrices[j] @ as_point(x, self.dimension)

    def apply_inverse(self, j: int, x) -> np.ndarray:
        return self._inverses[j] @ as_point(x, self.dimension)

    def to_dict(self) -> dict:
        return {"matrices": [m.tolist() for m in self.matrices],
                "pairwise_invertible": self.pairwise_invertible}


def identity_family(dimension: int, m: int = 1) -> MatrixFamily:
    return MatrixFamily(tuple(np.eye(dimension) for _ in range(m)))


def scalar_family(values, pairwise_invertible: bool = False) -> MatrixFamily:
    """One-dimensional family given by nonzero scalars."""
    return MatrixFamily(tuple(np.array([[float(v)]]) for v in values),
                        pairwise_invertible=pairwise_invertible)


@dataclass(frozen=True)
class RegionLabel:
    """Either inside the i-th expanded ball or in the k-th outer region.

    Indices are 0-based.  Ties are broken toward the smallest index so the
    outer regions partition the complement of the expanded balls.
    """

    kind: str  # "inside" | "outer"
    index: int

    def is_outer(self) -> bool:
        return self.kind == "outer"


def expanded_balls(ball: Ball, family: MatrixFamily) -> list:
    """The balls B(A_i x0, 2 M r) for i = 1..m."""
    big_r = 2.0 * family.norm_bound * ball.radius
    return [Ball(family.apply(i, ball.center), big_r) for i in range(family.m)]


def classify(x, ball: Ball, family: MatrixFamily) -> RegionLabel:
    """Label a point: first expanded ball covering it, else nearest transformed
    center (smallest index on ties; expanded-ball boundaries count as inside)."""
    x = as_point(x, ball.dimension)
    big_r = 2.0 * family.norm_bound * ball.radius
    dists = [float(np.linalg.norm(x - family.apply(i, ball.center)))
             for i in range(family.m)]
    for i, d in enumerate(dists):
        if d <= big_r:
            return RegionLabel("inside", i)
    return RegionLabel("outer", int(np.argmin(dists)))


def classify_batch(pts, ball: Ball, family: MatrixFamily):
    """Vectorized classify: returns (kinds bool array 'is outer', indices)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    big_r = 2.0 * family.norm_bound * ball.radius
    dists = np.stack(
        [np.linalg.norm(pts - family.apply(i, ball.center), axis=1)
         for i in range(family.m)], axis=1)
    inside_any = dists <= big_r
    is_outer = ~np.any(inside_any, axis=1)
    idx = np.where(is_outer, np.argmin(dists, axis=1),
                   np.argmax(inside_any, axis=1))
    return is_outer, idx
