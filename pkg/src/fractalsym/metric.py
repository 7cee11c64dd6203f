"""Truncated-set metric toolkit: Hausdorff distance, self-similarity profiles,
and similarity optimization between limit models.

Discrete clouds stand in for compact sets, so every distance carries a
resolution floor (the max nearest-neighbor spacing of the clouds involved);
report it next to the value.  Truncation follows A_r = (A n D_r) u dD_r:
the boundary circle stabilizes distances when a cloud nearly misses D_r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .cloud import PointCloud, as_points
from .errors import EmptyWindow, RadiusMismatch

DEFAULT_BOUNDARY_SAMPLES = 256
MIN_BOUNDARY_SAMPLES = 64


@dataclass(frozen=True)
class TruncatedSet:
    """(A n D_r) u dD_r with the circle held as equispaced samples."""

    interior_points: np.ndarray
    boundary_points: np.ndarray
    r: float

    @property
    def boundary_samples(self) -> int:
        return len(self.boundary_points)

    @property
    def all_points(self) -> np.ndarray:
        return np.concatenate([self.interior_points, self.boundary_points])


def circle_samples(r: float, n: int) -> np.ndarray:
    k = np.arange(n)
    return r * np.exp(2j * math.pi * k / n)


def truncate(A, r: float, boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES) -> TruncatedSet:
    """Keep points of A in the closed disk D_r and attach the sampled circle."""
    if r <= 0:
        raise ValueError("truncation radius must be positive")
    if boundary_samples < MIN_BOUNDARY_SAMPLES:
        raise ValueError(f"boundary_samples must be >= {MIN_BOUNDARY_SAMPLES}")
    pts = as_points(A)
    # slack keeps own boundary samples under re-truncation (makes it idempotent)
    inside = pts[np.abs(pts) <= r + 1e-12]
    return TruncatedSet(inside, circle_samples(r, boundary_samples), float(r))


def _xy(zs: np.ndarray) -> np.ndarray:
    return np.column_stack([zs.real, zs.imag])


def _directed_sq(query: np.ndarray, target: np.ndarray, tree: cKDTree | None = None) -> float:
    """max over query of squared distance to nearest target point.

    The tree only selects neighbor indices; the returned squared distances
    are recomputed with plain numpy arithmetic so the indexed path agrees
    bit-for-bit with a brute-force numpy oracle.
    """
    if len(query) == 0:
        return 0.0
    if tree is None:
        tree = cKDTree(_xy(target))
    _, idx = tree.query(_xy(query), workers=-1)
    dx = query.real - target.real[idx]
    dy = query.imag - target.imag[idx]
    return float(np.max(dx * dx + dy * dy))


def hausdorff(A: TruncatedSet, B: TruncatedSet) -> float:
    """max of the two directed sup-min distances over the discrete truncations."""
    if A.r != B.r:
        raise RadiusMismatch(f"truncation radii differ: {A.r} vs {B.r}")
    pa, pb = A.all_points, B.all_points
    d2 = max(_directed_sq(pa, pb), _directed_sq(pb, pa))
    return math.sqrt(d2)


def hausdorff_brute(A: TruncatedSet, B: TruncatedSet) -> float:
    """O(nm) reference implementation (oracle for the indexed path)."""
    if A.r != B.r:
        raise RadiusMismatch(f"truncation radii differ: {A.r} vs {B.r}")
    pa, pb = A.all_points, B.all_points
    dx = pa.real[:, None] - pb.real[None, :]
    dy = pa.imag[:, None] - pb.imag[None, :]
    sq = dx * dx + dy * dy
    d2 = max(float(np.max(np.min(sq, axis=1))), float(np.max(np.min(sq, axis=0))))
    return math.sqrt(d2)


def max_nn_spacing(points) -> float:
    """Max over the cloud of the distance to the nearest other point."""
    pts = as_points(points)
    if len(pts) < 2:
        return math.inf if len(pts) else 0.0
    tree = cKDTree(_xy(pts))
    d, _ = tree.query(_xy(pts), k=2, workers=-1)
    return float(np.max(d[:, 1]))


def resolution_floor(A: TruncatedSet, B: TruncatedSet) -> float:
    return max(max_nn_spacing(A.all_points), max_nn_spacing(B.all_points))


def rescale(points, center: complex, alpha: complex, n: int) -> np.ndarray:
    return (as_points(points) - center) * alpha**n


def selfsim_profile(B, center: complex, alpha: complex, model, r: float, n_range,
                    boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES) -> list[float]:
    """hausdorff(trunc(alpha^n (B - center)), trunc(model)) for each n in n_range."""
    model_t = truncate(model, r, boundary_samples)
    out = []
    for n in n_range:
        cloud_t = truncate(rescale(B, center, alpha, int(n)), r, boundary_samples)
        if len(cloud_t.interior_points) == 0 and len(model_t.interior_points) > 0:
            raise EmptyWindow(f"rescaled cloud at n={n} has no interior points in D_{r}")
        out.append(hausdorff(cloud_t, model_t))
    return out


@dataclass(frozen=True)
class SimilarityResult:
    lambda_star: complex
    dist_star: float
    resolution_floor: float


def best_similarity(A, B, rho_B: complex, r: float,
                    boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES,
                    coarse: tuple[int, int] = (32, 64),
                    refine_rounds: int = 3) -> SimilarityResult:
    """Approximate minimizer of d_H((lambda A)_r, B_r) over lambda in C*.

    |lambda| is searched over one rho-annulus [1, |rho_B|), justified by the
    rho-self-similarity of B; arg over [0, 2pi).  Coarse grid, then local
    refinement shrinking the grid 4x around the incumbent each round.
    """
    if abs(rho_B) <= 1:
        raise ValueError("best_similarity requires |rho_B| > 1")
    a_pts = as_points(A)
    b_t = truncate(B, r, boundary_samples)
    tree_b = cKDTree(_xy(b_t.all_points))
    circle = circle_samples(r, boundary_samples)

    def objective(lam: complex) -> float:
        scaled = a_pts * lam
        interior = scaled[np.abs(scaled) <= r]
        all_a = np.concatenate([interior, circle])
        d2 = max(_directed_sq(all_a, b_t.all_points, tree_b), _directed_sq(b_t.all_points, all_a))
        return math.sqrt(d2)

    log_rho = math.log(abs(rho_B))
    best = (math.inf, 1 + 0j)
    n_m, n_p = coarse
    logms = np.linspace(0.0, log_rho, n_m, endpoint=False)
    args = np.linspace(0.0, 2 * math.pi, n_p, endpoint=False)
    for lm in logms:
        for ph in args:
            lam = math.exp(lm) * complex(math.cos(ph), math.sin(ph))
            d = objective(lam)
            if d < best[0]:
                best = (d, lam)
    span_m = log_rho / n_m
    span_p = 2 * math.pi / n_p
    for _ in range(refine_rounds):
        span_m /= 4
        span_p /= 4
        center = best[1]
        lm0 = math.log(abs(center))
        ph0 = math.atan2(center.imag, center.real)
        for lm in np.linspace(lm0 - 2 * span_m, lm0 + 2 * span_m, 9):
            for ph in np.linspace(ph0 - 2 * span_p, ph0 + 2 * span_p, 9):
                lam = math.exp(lm) * complex(math.cos(ph), math.sin(ph))
                d = objective(lam)
                if d < best[0]:
                    best = (d, lam)
    a_t = truncate(a_pts * best[1], r, boundary_samples)
    floor = resolution_floor(a_t, b_t)
    return SimilarityResult(best[1], best[0], floor)
