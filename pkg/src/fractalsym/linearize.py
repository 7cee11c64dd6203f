"""Koenigs linearization at repelling periodic points and limit-model extraction.

The chart phi solves phi(f_c^p(z)) = rho * phi(z) with phi(x) = 0 and
phi'(x) = 1, built as the limit rho^n (g^n(z) - x) where g is the inverse
branch of f_c^p fixing x.  Inverse branches are chosen by nearest preimage
along the cycle with a continuity guard; the chart radius is auto-shrunk
until the branch contracts by at least 1.5 per step, which makes the
Koenigs limit geometrically Cauchy.

Limit models are phi-images of local Julia samples, saturated by exact
multiplication by rho in chart coordinates: self-similarity is exact in
the linear coordinate, so saturation amplifies no sampling noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cloud import PointCloud
from .dynamics import sample_julia
from .errors import BranchLost, NotRepelling
from .metric import circle_samples, truncate
from .misiurewicz import MisiurewiczPoint

PHI_INCREMENT_TOL = 1e-12
MAX_CHART_DEPTH = 160


@dataclass(frozen=True)
class KoenigsChart:
    """Linearizing coordinate at a repelling periodic point."""

    c: complex
    base_x: complex
    period_p: int
    rho: complex
    radius: float
    depth: int
    cycle: tuple[complex, ...] = field(repr=False)
    tubes: tuple[float, ...] = field(repr=False, default=())

    def pull_back(self, w, guard: bool = False) -> np.ndarray:
        """One application of the inverse branch of f^p fixing base_x.

        With guard=True a pick landing farther than the chart radius from
        its cycle target raises BranchLost (the selection left the tube
        around the cycle where the branch is single-valued).
        """
        w = np.asarray(w, dtype=complex)
        for j in range(self.period_p - 1, -1, -1):
            s = np.sqrt(w - self.c)
            target = self.cycle[j]
            pick_pos = np.abs(s - target) <= np.abs(-s - target)
            w = np.where(pick_pos, s, -s)
            if guard and np.any(np.abs(w - target) > self.tubes[j]):
                raise BranchLost("nearest-preimage selection jumped during chart evaluation")
        return w

    def phi(self, z) -> np.ndarray:
        """Evaluate the linearizer on points inside the chart disk.

        Works on the differences delta = g^n(z) - x directly, via
        delta' = delta / (s + cycle_j) with s the picked sqrt branch: the
        subtraction g^n(z) - x would round to zero once the pullbacks pass
        ulp(x), while the quotient form keeps full relative precision.
        """
        zs = np.asarray(z, dtype=complex).ravel()
        if len(zs) and np.max(np.abs(zs - self.base_x)) > self.radius * (1 + 1e-9):
            raise BranchLost("phi evaluated outside the chart radius")
        delta = zs - self.base_x
        w = zs
        val = delta.copy()
        rho_n = 1 + 0j
        for _ in range(self.depth):
            for j in range(self.period_p - 1, -1, -1):
                target = self.cycle[j]
                s = np.sqrt(w - self.c)
                s = np.where(np.abs(s - target) <= np.abs(-s - target), s, -s)
                if len(zs) and np.max(np.abs(s - target)) > self.tubes[j]:
                    raise BranchLost("nearest-preimage selection jumped during chart evaluation")
                delta = delta / (s + target)
                w = s
            rho_n *= self.rho
            new = rho_n * delta
            done = len(zs) == 0 or np.max(np.abs(new - val)) < PHI_INCREMENT_TOL
            val = new
            if done:
                break
        return val

    def phi_scalar(self, z: complex) -> complex:
        return complex(self.phi(np.array([z]))[0])


def koenigs(c: complex, x: complex, p: int, radius: float = 0.4) -> KoenigsChart:
    """Build the Koenigs chart at the repelling period-p point x of f_c.

    The starting radius is halved until the inverse branch contracts the
    chart circle by a factor >= 1.5, guaranteeing geometric convergence of
    the Koenigs limit.
    """
    cyc = [complex(x)]
    z = complex(x)
    for _ in range(p - 1):
        z = z * z + c
        cyc.append(z)
    z = z * z + c
    if abs(z - x) > 1e-8:
        raise NotRepelling(f"x is not period-{p} within 1e-8: |f^p(x) - x| = {abs(z - x):.3g}")
    rho = 1 + 0j
    for w in cyc:
        rho *= 2 * w
    if abs(rho) <= 1:
        raise NotRepelling(f"|rho| = {abs(rho):.6g} <= 1, not a repelling cycle")

    r = radius
    chart = None
    for _ in range(60):
        # per-step tube bounds: pulling a tube of points back through cycle
        # point x_j divides its size by about |2 x_j| (with a 1.5x margin);
        # the tube must stay clear of the opposite sqrt branch at -x_j
        tube = r
        tubes = [0.0] * p
        valid = True
        for j in range(p - 1, -1, -1):
            tube = 1.5 * tube / abs(2 * cyc[j])
            tubes[j] = tube
            if tube > 0.5 * abs(cyc[j]):
                valid = False
                break
        if not valid:
            r *= 0.5
            continue
        probe = KoenigsChart(c, complex(x), p, rho, r, MAX_CHART_DEPTH, tuple(cyc), tuple(tubes))
        ring = complex(x) + circle_samples(r, 32)
        try:
            back = probe.pull_back(ring, guard=True)
        except BranchLost:
            r *= 0.5
            continue
        if np.max(np.abs(back - x)) <= r / 1.5:
            chart = probe
            break
        r *= 0.5
    if chart is None:
        raise NotRepelling("no chart radius with contraction >= 1.5 found")
    return chart


def local_julia_cloud(chart: KoenigsChart, n_base: int = 20000, seed: int = 0,
                      max_pullbacks: int = 120) -> PointCloud:
    """Julia points inside the chart disk, dense across scales.

    A global backward-iteration cloud is transported into the chart by
    repeated application of the inverse branch; every snapshot along the way
    is kept (all stay on J), so the result covers dyadic scales around the
    base point down to the chart's double-precision floor.
    """
    base = sample_julia(chart.c, n_base, seed=seed).points
    x = chart.base_x
    keep: list[np.ndarray] = []
    w = base
    for _ in range(max_pullbacks):
        inside = np.abs(w - x) <= chart.radius
        if inside.any():
            keep.append(w[inside])
        w = chart.pull_back(w)
        if np.max(np.abs(w - x)) <= chart.radius * 1e-9:
            break
    pts = np.unique(np.concatenate(keep)) if keep else np.empty(0, dtype=complex)
    cap = 20 * n_base
    if len(pts) > cap:
        rng = np.random.default_rng(seed + 1)
        idx = np.sort(rng.choice(len(pts), cap, replace=False))
        pts = pts[idx]
    return PointCloud(pts, {
        "generator": "local_julia_cloud",
        "c": str(chart.c),
        "x": str(x),
        "radius": chart.radius,
        "seed": seed,
        "n_base": n_base,
    })


def multiscale_julia_cloud(chart: KoenigsChart, levels: int = 4, base: int = 15000,
                           growth: float = 1.7, seed: int = 0) -> PointCloud:
    """Julia cloud adapted for self-similarity profiles at the chart point.

    Level n receives about base * growth^n points transported into the disk
    of radius chart.radius * |rho|^-n around the base point, so after the
    n-th rescale by rho every window is sampled more finely than the one
    before: measured Hausdorff profiles decrease instead of flattening at a
    fixed sampling floor.  All points are exact backward orbits, hence on J.
    """
    x = chart.base_x
    out = []
    for n in range(levels + 1):
        target = chart.radius * abs(chart.rho) ** -n
        m = int(base * growth**n)
        w = sample_julia(chart.c, m, seed=seed + 101 * n, forward_close_tol=None).points
        collected = []
        for _ in range(80 + 2 * n):
            inside = np.abs(w - x) <= target
            if inside.any():
                collected.append(w[inside])
                w = w[~inside]
            if len(w) == 0:
                break
            w = chart.pull_back(w)
        if collected:
            out.append(np.concatenate(collected))
    pts = np.unique(np.concatenate(out)) if out else np.empty(0, dtype=complex)
    return PointCloud(pts, {
        "generator": "multiscale_julia_cloud",
        "c": str(chart.c),
        "x": str(x),
        "levels": levels,
        "base": base,
        "growth": growth,
        "seed": seed,
    })


def limit_model(M: MisiurewiczPoint, r: float, n_points: int, seed: int = 0,
                chart_radius: float = 0.4) -> PointCloud:
    """Tan Lei limit model: phi-image of J inside the chart, saturated by rho.

    The union of rho^k * phi(J within the chart) over k >= 0, intersected
    with the closed disk D_r.  Deterministic under fixed seed.
    """
    chart = koenigs(M.c, M.x_c, M.period_p, radius=chart_radius)
    local = local_julia_cloud(chart, n_base=max(n_points // 4, 4000), seed=seed)
    core = chart.phi(local.points)
    core = core[np.abs(core) > 0]
    if len(core) == 0:
        raise BranchLost("no Julia points found inside the chart")
    # keep only scales the sampling actually resolves: straggler core points
    # from the deepest pullbacks would otherwise saturate into isolated
    # macroscopic points (a sparse octave lifted by rho^k stays sparse)
    rho = chart.rho
    mods = np.abs(core)
    min_octave = max(64, len(core) // 2000)
    t = float(np.max(mods))
    s_min = t / abs(rho)
    while True:
        count = int(np.sum((mods >= s_min) & (mods < t)))
        if count < min_octave:
            break
        t = s_min
        s_min = t / abs(rho)
        if t < 1e-280:
            break
    core = core[mods >= t]
    # thin the core before saturating: the rho-multiplication layers stay
    # exactly nested, so self-similarity of the output is exact by construction
    if len(core) > n_points:
        rng = np.random.default_rng(seed + 2)
        idx = np.sort(rng.choice(len(core), n_points, replace=False))
        core = core[idx]
    min_mod = float(np.min(np.abs(core)))
    k_max = max(0, int(math.ceil(math.log(r / min_mod) / math.log(abs(rho)))) + 1)
    layers = []
    scale = 1 + 0j
    for _ in range(k_max + 1):
        pts = core * scale
        layers.append(pts[np.abs(pts) <= r])
        scale *= rho
    out = np.unique(np.concatenate(layers))
    return PointCloud(out, {
        "generator": "limit_model",
        "c": str(M.c),
        "l": M.preperiod_l,
        "p": M.period_p,
        "rho": str(chart.rho),
        "r": r,
        "seed": seed,
        "chart_radius": chart.radius,
    })


def rescaled_truncation(B, center: complex, alpha: complex, n: int, r: float,
                        boundary_samples: int = 256) -> PointCloud:
    """(alpha^n (B - center)) in the closed disk D_r, with dD_r attached
    following the truncation convention."""
    t = truncate((np.asarray(B.points if isinstance(B, PointCloud) else B, dtype=complex) - center) * alpha**n,
                 r, boundary_samples)
    return PointCloud(np.concatenate([t.interior_points, t.boundary_points]),
                      {"generator": "rescaled_truncation", "center": str(center),
                       "alpha": str(alpha), "n": n, "r": r})