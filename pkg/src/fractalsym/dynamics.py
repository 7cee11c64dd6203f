"""Plane dynamics for the quadratic family f_c(z) = z^2 + c.

Escape-time machinery, Green potential, external-ray tracing by Newton
continuation in both the dynamical and parameter planes, Julia and
Mandelbrot-boundary sampling, and deterministic grid rendering.

Numerics: membership uses the plain radius-2 dichotomy; potentials refine
the orbit out to |z| > 1e150 where log|z_n|/2^n is converged to double
precision.  Ray tracing halves the potential per level with a damped
Newton correction; landing is declared when the potential drops under the
target and the vertex increments go Cauchy below 1e-9.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .angles import Angle
from .cloud import PointCloud
from .errors import InvalidWindow, RayBroken

REFINE_MODULUS = 1e150
RAY_START_POTENTIAL = math.log(1e8)
LANDING_INCREMENT = 1e-9
DEFAULT_TARGET_POTENTIAL = 1e-12
MIN_WINDOW_EXTENT = 1e-12


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle in the plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_max - self.re_min >= MIN_WINDOW_EXTENT and self.im_max - self.im_min >= MIN_WINDOW_EXTENT):
            raise InvalidWindow(
                f"window [{self.re_min}, {self.re_max}] x [{self.im_min}, {self.im_max}] "
                f"is degenerate or narrower than {MIN_WINDOW_EXTENT}"
            )

    @classmethod
    def centered(cls, center: complex, half_width: float, half_height: float | None = None) -> "Window":
        hh = half_width if half_height is None else half_height
        return cls(center.real - half_width, center.real + half_width, center.imag - hh, center.imag + hh)

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z)
        return (z.real >= self.re_min) & (z.real <= self.re_max) & (z.imag >= self.im_min) & (z.imag <= self.im_max)

    def describe(self) -> str:
        return f"[{self.re_min:.17g},{self.re_max:.17g}]x[{self.im_min:.17g},{self.im_max:.17g}]"


@dataclass(frozen=True)
class EscapeResult:
    iterations: int | None  # None = stayed bounded within budget
    final_modulus: float
    potential: float

    @property
    def escaped(self) -> bool:
        return self.potential > 0


def escape_time(c: complex, z: complex, max_iter: int = 512, radius: float = 2.0) -> EscapeResult:
    """First n with |f_c^n(z)| > radius plus the smoothed Green potential.

    The potential is refined past the escape radius (out to 1e150) so that
    log|z_n| / 2^n is converged; interior points report potential 0.
    """
    if radius < 2:
        raise ValueError("escape radius must be >= 2 for the quadratic dichotomy")
    w = complex(z)
    n = None
    k = 0
    while k <= max_iter:
        if abs(w) > radius:
            n = k
            break
        w = w * w + c
        k += 1
    if n is None:
        return EscapeResult(None, abs(w), 0.0)
    final_modulus = abs(w)
    # refine: past 1e150 the tail correction is below double precision
    m = n
    while abs(w) < REFINE_MODULUS and m < n + 1200:
        w = w * w + c
        m += 1
    if abs(w) < REFINE_MODULUS:
        return EscapeResult(None, final_modulus, 0.0)
    return EscapeResult(n, final_modulus, math.log(abs(w)) / 2.0**m)


def green_potential(c: complex, z: complex, max_iter: int = 512) -> float:
    """G_c(z) = lim log|f_c^n(z)| / 2^n; zero on the filled Julia set."""
    w = complex(z)
    for m in range(max_iter):
        if abs(w) > REFINE_MODULUS:
            return math.log(abs(w)) / 2.0**m
        w = w * w + c
    if abs(w) > REFINE_MODULUS:
        return math.log(abs(w)) / 2.0**max_iter
    return 0.0


def _bounded(c_arr: np.ndarray, z_arr: np.ndarray, max_iter: int) -> np.ndarray:
    """Vectorized radius-2 membership dichotomy: True = stayed bounded.

    Active points are compacted out as they escape, so late iterations only
    touch the surviving (near-)bounded set.
    """
    shape = np.shape(z_arr)
    z = np.asarray(z_arr, dtype=complex).ravel().copy()
    c = np.broadcast_to(np.asarray(c_arr, dtype=complex), shape).ravel()
    n = z.size
    idx = np.arange(n)
    cc = c.copy()
    bounded = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        z = z * z + cc
        esc = np.abs(z) > 2.0
        if esc.any():
            bounded[idx[esc]] = False
            keep = ~esc
            z, cc, idx = z[keep], cc[keep], idx[keep]
            if idx.size == 0:
                break
    return bounded.reshape(shape) if shape else bounded.reshape(())


@dataclass(frozen=True)
class RayTrace:
    vertices: list[complex]
    potentials: list[float]
    theta: Angle
    landed: bool
    landing_estimate: complex
    meta: dict = field(default_factory=dict)


def _ray_trace(theta: Angle, evaluate_level, target_potential: float, steps: int,
               substeps: int = 8) -> RayTrace:
    """Shared Newton continuation along a geometric potential ladder.

    The vertex at potential g on the ray of angle theta solves
    f^k(z) = exp(2^k g + 2 pi i 2^k theta) for the k that lifts 2^k g into
    (G0/2, G0].  Each halving of the potential is taken in `substeps`
    geometric sub-levels so consecutive vertices stay inside each other's
    Newton basins; while g >= 4 the Boettcher coordinate is the identity to
    working precision and the far-field point seeds the level directly.
    """
    g0 = RAY_START_POTENTIAL
    num0, den = theta.numerator, theta.denominator
    unit = complex(math.cos(2 * math.pi * num0 / den), math.sin(2 * math.pi * num0 / den))
    vertices = [math.exp(g0) * unit]
    potentials = [g0]
    prev_step = abs(vertices[0])
    landed = False
    for j in range(1, steps * substeps + 1):
        g = g0 * 2.0 ** (-j / substeps)
        k = j // substeps
        lifted = g * 2.0**k
        a = (num0 * pow(2, k, den)) % den
        wk = math.exp(lifted) * complex(math.cos(2 * math.pi * a / den), math.sin(2 * math.pi * a / den))
        seed = math.exp(g) * unit if g >= 4.0 else vertices[-1]
        z = evaluate_level(k, seed, wk, prev_step)
        vertices.append(z)
        potentials.append(g)
        prev_step = max(abs(vertices[-1] - vertices[-2]), 1e-300)
        if g < target_potential and abs(vertices[-1] - vertices[-2]) < LANDING_INCREMENT:
            landed = True
            break
    return RayTrace(vertices, potentials, theta, landed, vertices[-1])


def _cfinite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


def _newton_level(fun_dfun, seed: complex, wk: complex, prev_step: float, max_newton: int = 8) -> complex:
    """Damped Newton for F(z) = wk; corrections larger than 4x the previous
    vertex increment are halved before being taken.

    Deep along a ray the derivative outgrows double range: the residual can
    never beat |dF| * ulp(z), and past that the iterate overflows outright.
    A level is accepted once the undamped correction (or the net movement)
    is at machine scale -- the vertex is then as converged as doubles allow.
    """
    z = seed
    raw = math.inf
    for _ in range(max_newton):
        F, dF = fun_dfun(z)
        if not (_cfinite(F) and _cfinite(dF)) or dF == 0:
            break
        delta = (wk - F) / dF
        if not _cfinite(delta):
            break
        raw = abs(delta)
        guard = 0
        while abs(delta) > 4.0 * prev_step and guard < 60:
            delta *= 0.5
            guard += 1
        z = z + delta
        if raw <= 1e-15 * max(1.0, abs(z)):
            break
    F, _ = fun_dfun(z)
    resid = abs(F - wk)
    scale = max(1.0, abs(z), abs(seed))
    if _cfinite(F) and resid <= 1e-6 * abs(wk):
        return z
    if abs(z - seed) <= 1e-12 * scale:  # saturated: no representable improvement
        return z
    if raw <= 1e-11 * scale:
        return z
    raise RayBroken(f"Newton residual {resid:.3g} at potential level; ray lost", z)


def trace_dynamic_ray(c: complex, theta: Angle, target_potential: float = DEFAULT_TARGET_POTENTIAL,
                      steps: int = 64) -> RayTrace:
    """External ray of angle theta in the dynamical plane of f_c."""

    def level(k, seed, wk, prev_step):
        def fun_dfun(z):
            w = z
            dw = 1.0 + 0j
            for _ in range(k):
                dw = 2 * w * dw
                w = w * w + c
            return w, dw

        return _newton_level(fun_dfun, seed, wk, prev_step)

    trace = _ray_trace(theta, level, target_potential, steps)
    trace.meta.update(plane="dynamic", c=c)
    return trace


def trace_parameter_ray(theta: Angle, target_potential: float = DEFAULT_TARGET_POTENTIAL,
                        steps: int = 64) -> RayTrace:
    """External ray of angle theta for the Mandelbrot set (Boettcher coordinate of c)."""

    def level(k, seed, wk, prev_step):
        def fun_dfun(cc):
            u = cc
            du = 1.0 + 0j
            for _ in range(k):
                du = 2 * u * du + 1
                u = u * u + cc
            return u, du

        return _newton_level(fun_dfun, seed, wk, prev_step)

    trace = _ray_trace(theta, level, target_potential, steps)
    trace.meta.update(plane="parameter")
    return trace


def critical_orbit_bounded(c: complex, max_iter: int = 1024) -> bool:
    """True if the critical orbit stays in the radius-2 disk (K_c connected proxy)."""
    z = 0j
    for _ in range(max_iter):
        z = z * z + c
        if abs(z) > 2:
            return False
    return True


def _forward_closure(pts: np.ndarray, c: complex, tol: float, max_rounds: int = 60) -> np.ndarray:
    """Insert forward images until f(cloud) is within tol of the cloud.

    Every inserted point is the exact image of a Julia point, so the cloud
    stays on J; this repairs the thin spots of harmonic-measure sampling
    (near the critical orbit) that backward iteration leaves behind.
    """
    from scipy.spatial import cKDTree

    for _ in range(max_rounds):
        tree = cKDTree(np.column_stack([pts.real, pts.imag]))
        img = pts * pts + c
        d, _ = tree.query(np.column_stack([img.real, img.imag]), workers=-1)
        far = img[d > tol]
        if len(far) == 0:
            break
        pts = np.concatenate([pts, np.unique(far)])
    return pts


def sample_julia(c: complex, n_points: int, method: str = "inverse_iteration",
                 window: Window | None = None, seed: int = 0, burn_in: int = 100,
                 max_batches: int = 200, forward_close_tol: float | None = 2e-4) -> PointCloud:
    """Sample the Julia set J_c.

    inverse_iteration: random-branch backward orbits from the beta fixed
    point, vectorized over the whole cloud, burn-in discarded; exact up to
    roundoff since J is backward invariant.  A forward-closure pass then
    tops up the cloud until it is forward-invariant at forward_close_tol
    (images of cloud points are themselves J points).  boundary_scan:
    escape-dichotomy flips on a grid, refined by bisection.  Deterministic
    under fixed seed.  May return slightly more than n_points.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    meta = {"generator": f"sample_julia[{method}]", "c": str(c), "seed": seed}
    if method == "inverse_iteration":
        rng = np.random.default_rng(seed)
        beta = (1 + np.sqrt(complex(1 - 4 * c))) / 2
        if window is None:
            z = np.full(n_points, beta, dtype=complex)
            for _ in range(burn_in):
                signs = rng.integers(0, 2, n_points) * 2 - 1
                z = signs * np.sqrt(z - c)
            if forward_close_tol is not None:
                z = _forward_closure(z, c, forward_close_tol)
            return PointCloud(z, dict(meta, n=len(z)))
        kept: list[np.ndarray] = []
        total = 0
        batch = max(n_points, 4096)
        z = np.full(batch, beta, dtype=complex)
        for _ in range(burn_in):
            signs = rng.integers(0, 2, batch) * 2 - 1
            z = signs * np.sqrt(z - c)
        for _ in range(max_batches):
            signs = rng.integers(0, 2, batch) * 2 - 1
            z = signs * np.sqrt(z - c)
            hits = z[window.contains(z)]
            if len(hits):
                kept.append(hits.copy())
                total += len(hits)
            if total >= n_points:
                break
        pts = np.concatenate(kept) if kept else np.empty(0, dtype=complex)
        return PointCloud(pts[:n_points], dict(meta, window=window.describe()))
    if method == "boundary_scan":
        if window is None:
            window = Window(-2.0, 2.0, -1.6, 1.6)
        res = max(int(math.isqrt(n_points)) * 2, 64)
        cell = max(window.width, window.height) / max(res - 1, 1)
        budget = _auto_budget(cell)
        pts = _boundary_scan(lambda zs: _bounded(np.asarray(c), zs, budget), window, res)
        return PointCloud(pts, dict(meta, window=window.describe(), resolution=res, max_iter=budget))
    raise ValueError(f"unknown sampling method {method!r}")


def _auto_budget(cell_size: float) -> int:
    """Escape budget matched to a grid scale: the bounded-at-budget band must
    be about one cell thick for dichotomy flips to register."""
    return max(16, int(math.ceil(math.log2(1.0 / max(cell_size, 1e-300)))) + 10)


def _boundary_scan(bounded_fn, window: Window, resolution: int, refine_to: float = 1e-6) -> np.ndarray:
    """Grid the window, find dichotomy flips between 4-neighbors, bisect each
    flipped edge down to refine_to, return the midpoints."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    xs = np.linspace(window.re_min, window.re_max, resolution)
    ys = np.linspace(window.im_min, window.im_max, resolution)
    grid = xs[None, :] + 1j * ys[:, None]
    inside = bounded_fn(grid.ravel()).reshape(grid.shape)
    pairs_a = []
    pairs_b = []
    flip_h = inside[:, :-1] != inside[:, 1:]
    ia, ja = np.nonzero(flip_h)
    a = grid[ia, ja]
    b = grid[ia, ja + 1]
    swap = ~inside[ia, ja]
    a2 = np.where(swap, b, a)
    b2 = np.where(swap, a, b)
    pairs_a.append(a2)
    pairs_b.append(b2)
    flip_v = inside[:-1, :] != inside[1:, :]
    ia, ja = np.nonzero(flip_v)
    a = grid[ia, ja]
    b = grid[ia + 1, ja]
    swap = ~inside[ia, ja]
    pairs_a.append(np.where(swap, b, a))
    pairs_b.append(np.where(swap, a, b))
    a = np.concatenate(pairs_a)  # bounded side
    b = np.concatenate(pairs_b)  # escaping side
    if len(a) == 0:
        return np.empty(0, dtype=complex)
    n_steps = max(1, int(math.ceil(math.log2(max(window.width, window.height) / max(resolution - 1, 1) / refine_to))))
    for _ in range(n_steps):
        mid = (a + b) / 2
        mid_in = bounded_fn(mid)
        a = np.where(mid_in, mid, a)
        b = np.where(mid_in, b, mid)
    return (a + b) / 2


def sample_mandelbrot_boundary(window: Window, resolution: int, max_iter: int | None = None,
                               refine_to: float = 1e-6) -> PointCloud:
    """Boundary-of-M sampler: escape dichotomy flips refined by bisection.

    max_iter sets which escape-time level stands in for the dichotomy; the
    level curve sits within roughly 2^-max_iter of M, so the default derives
    it from the grid cell so the band registers on the grid at all.  Pass a
    larger budget along with a finer grid to tighten the cloud onto dM.
    """
    if max_iter is None:
        cell = max(window.width, window.height) / max(resolution - 1, 1)
        max_iter = _auto_budget(cell)

    def bounded_fn(cs):
        return _bounded(cs, np.zeros_like(cs), max_iter)

    pts = _boundary_scan(bounded_fn, window, resolution, refine_to)
    return PointCloud(pts, {
        "generator": "sample_mandelbrot_boundary",
        "window": window.describe(),
        "resolution": resolution,
        "max_iter": max_iter,
    })


def _smooth_rows(c_arr: np.ndarray, z_arr: np.ndarray, max_iter: int, radius: float = 1000.0) -> np.ndarray:
    """Smoothed escape values: n - log2(log|z_n| / log(radius)); 0 for interior."""
    shape = np.shape(z_arr)
    z = np.asarray(z_arr, dtype=complex).ravel().copy()
    cc = np.broadcast_to(np.asarray(c_arr, dtype=complex), shape).ravel().copy()
    n_pts = z.size
    idx = np.arange(n_pts)
    out = np.zeros(n_pts, dtype=float)
    for n in range(1, max_iter + 1):
        z = z * z + cc
        mod = np.abs(z)
        esc = mod > radius
        if esc.any():
            out[idx[esc]] = n - np.log2(np.log(mod[esc]) / math.log(radius))
            keep = ~esc
            z, cc, idx = z[keep], cc[keep], idx[keep]
            if idx.size == 0:
                break
    return out.reshape(shape)


def render_grid(plane: str, window: Window, resolution: int, coloring: str = "smooth",
                c: complex | None = None, max_iter: int = 256, threads: int = 1) -> np.ndarray:
    """Row-major uint8 grayscale escape-time image; deterministic for fixed
    inputs regardless of the thread count (rows are independent)."""
    if resolution < 2 or resolution > 8192:
        raise InvalidWindow("resolution out of range [2, 8192]")
    if plane == "dynamic" and c is None:
        raise ValueError("dynamic plane render requires c")
    if coloring not in ("smooth", "binary"):
        raise ValueError(f"unknown coloring {coloring!r}")
    xs = np.linspace(window.re_min, window.re_max, resolution)
    ys = np.linspace(window.im_min, window.im_max, resolution)

    def do_rows(r0, r1):
        grid = xs[None, :] + 1j * ys[r0:r1, None]
        if plane == "parameter":
            vals = _smooth_rows(grid, np.zeros_like(grid), max_iter)
        else:
            vals = _smooth_rows(np.asarray(c), grid, max_iter)
        return vals

    threads = max(1, int(threads))
    if threads == 1:
        values = do_rows(0, resolution)
    else:
        chunk = (resolution + threads - 1) // threads
        bounds = [(i, min(i + chunk, resolution)) for i in range(0, resolution, chunk)]
        values = np.empty((resolution, resolution), dtype=float)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for (r0, r1), block in zip(bounds, pool.map(lambda b: do_rows(*b), bounds)):
                values[r0:r1] = block
    if coloring == "binary":
        return np.where(values > 0, 255, 0).astype(np.uint8)
    t = np.where(values > 0, np.minimum(values / max_iter, 1.0), 0.0)
    img = np.where(values > 0, 55 + 200 * (1 - t), 0.0)
    return img.astype(np.uint8)
