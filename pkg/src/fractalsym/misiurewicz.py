"""Locating and certifying Misiurewicz parameters of the quadratic family.

Conventions: the defining equation is indexed from the critical value,
f_c^p(f_c^l(c)) = f_c^l(c) with minimal l >= 1, p >= 1.  So c = -2 has
(l, p) = (1, 1) and c = i has (1, 2).  Measured from the critical point 0
the preperiod is one larger; classify_critical_orbit reports both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NewtonDiverged, NotMinimal, NotPeriodic, NotRepelling, PeriodicNotPreperiodic

NEWTON_TOL = 1e-12
MINIMALITY_TOL = 1e-8
CYCLE_TOL = 1e-9
GUARD_BAND = 1e-6


@dataclass(frozen=True)
class MisiurewiczPoint:
    """Certified strictly-preperiodic parameter with its orbit data."""

    c: complex
    preperiod_l: int
    period_p: int
    x_c: complex            # f_c^l(c), the landing point on the repelling cycle
    multiplier_rho: complex  # (f_c^p)'(x_c)
    scale_derivative: complex  # (f_c^l)'(c), rescales the M-plane limit model
    residual: float


def _critical_value_orbit(c: complex, n: int) -> list[complex]:
    """[c, f(c), ..., f^n(c)]."""
    out = [c]
    z = c
    for _ in range(n):
        z = z * z + c
        out.append(z)
    return out


def _orbit_and_derivative(c: complex, n: int) -> tuple[complex, complex]:
    """(f_c^n(c), d/dc f_c^n(c)) by forward-mode recurrence."""
    u = c
    du = 1 + 0j
    for _ in range(n):
        du = 2 * u * du + 1
        u = u * u + c
    return u, du


def multiplier(c: complex, x: complex, p: int) -> complex:
    """(f_c^p)'(x) = product of 2 f_c^j(x) over the cycle."""
    z = x
    for _ in range(p):
        z = z * z + c
    if abs(z - x) > 1e-8:
        raise NotPeriodic(f"|f^{p}(x) - x| = {abs(z - x):.3g} exceeds 1e-8")
    rho = 1 + 0j
    z = x
    for _ in range(p):
        rho *= 2 * z
        z = z * z + c
    return rho


def spatial_derivative_along_orbit(c: complex, steps: int) -> complex:
    """(f_c^steps)'(z) evaluated at z = c."""
    out = 1 + 0j
    z = c
    for _ in range(steps):
        out *= 2 * z
        z = z * z + c
    return out


def mandel_scale_factor(m: "MisiurewiczPoint") -> complex:
    """Transversality derivative q'(c0) with q(c) = f_c^l(c) - x(c).

    Here x(c) is the analytic continuation of the repelling periodic point,
    so x'(c0) = (d/dc f_c^p(x)) / (rho - 1) by the implicit function theorem.
    This is the parameter-to-dynamical similarity factor: the rescaled
    Mandelbrot set converges to (1/q') times the Julia-plane limit model.
    Verified at desk scale by similarity optimization; note it differs from
    the spatial derivative (f_c^l)'(c) stored in scale_derivative.
    """
    _, du_l = _orbit_and_derivative(m.c, m.preperiod_l)
    # d/dc f_c^p(x) holding x fixed, by forward mode along the cycle
    z = m.x_c
    dz = 0j
    for _ in range(m.period_p):
        dz = 2 * z * dz + 1
        z = z * z + m.c
    x_prime = -dz / (m.multiplier_rho - 1)
    return du_l - x_prime


def find_misiurewicz(l: int, p: int, seed: complex, max_steps: int = 200) -> MisiurewiczPoint:
    """Newton iteration on G(c) = f_c^{l+p}(c) - f_c^l(c) from the seed.

    Converged roots are certified: no smaller preperiod l' < l and no proper
    divisor period p' | p satisfies the equation within 1e-8, the cycle is
    repelling, and the critical orbit is strictly preperiodic (superattracting
    centers also solve G = 0 and are rejected).
    """
    if l < 1 or p < 1:
        raise ValueError("need l >= 1 and p >= 1")
    if l + p > 60:
        raise ValueError("l + p beyond desk scale (60)")
    c = complex(seed)
    polish = 2  # extra quadratic steps pin the root to the nearest double
    converged = False
    for _ in range(max_steps):
        ulp_, dulp = _orbit_and_derivative(c, l + p)
        ul, dul = _orbit_and_derivative(c, l)
        G = ulp_ - ul
        if abs(G) < NEWTON_TOL:
            converged = True
            if polish == 0:
                break
            polish -= 1
        dG = dulp - dul
        if dG == 0 or not (math.isfinite(dG.real) and math.isfinite(dG.imag)):
            if converged:
                break
            raise NewtonDiverged(f"derivative degenerate at c = {c}")
        step = G / dG
        c = c - step
        if not (math.isfinite(c.real) and math.isfinite(c.imag)) or abs(c) > 1e6:
            raise NewtonDiverged(f"iterate escaped to {c}")
        if step == 0:
            break
    ulp_, _ = _orbit_and_derivative(c, l + p)
    ul, _ = _orbit_and_derivative(c, l)
    resid = abs(ulp_ - ul)
    if resid >= NEWTON_TOL:
        raise NewtonDiverged(f"no convergence after {max_steps} steps, |G| = {resid:.3g}")

    orbit = _critical_value_orbit(c, l + p + 1)
    # minimality: smaller preperiod at the same period; l' = 0 means the
    # critical value itself is periodic, i.e. a superattracting center
    for l2 in range(0, l):
        if abs(orbit[l2 + p] - orbit[l2]) < MINIMALITY_TOL:
            if l2 == 0:
                raise PeriodicNotPreperiodic(f"critical orbit is periodic at c = {c}")
            raise NotMinimal(l2, p)
    # minimality: proper divisor periods at the same preperiod
    for p2 in range(1, p):
        if p % p2 == 0 and abs(orbit[l + p2] - orbit[l]) < MINIMALITY_TOL:
            raise NotMinimal(l, p2)
    # strictly preperiodic: the critical point must not be on the cycle
    cycle = orbit[l:l + p]
    if any(abs(z) < GUARD_BAND for z in cycle) or abs(c) < GUARD_BAND:
        raise PeriodicNotPreperiodic(f"critical orbit is periodic at c = {c}")
    x_c = orbit[l]
    rho = multiplier(c, x_c, p)
    if abs(rho) <= 1:
        raise NotRepelling(f"|rho| = {abs(rho):.6g} <= 1 at c = {c}")
    return MisiurewiczPoint(
        c=c,
        preperiod_l=l,
        period_p=p,
        x_c=x_c,
        multiplier_rho=rho,
        scale_derivative=spatial_derivative_along_orbit(c, l),
        residual=resid,
    )


@dataclass(frozen=True)
class OrbitClass:
    kind: str  # escaping | superattracting | misiurewicz | undecided
    preperiod_from_point: int | None = None
    preperiod_from_value: int | None = None
    period: int | None = None


def classify_critical_orbit(c: complex, max_iter: int = 200, tol: float = CYCLE_TOL) -> OrbitClass:
    """Classify the critical orbit: escape, periodic (superattracting),
    strictly preperiodic (Misiurewicz), or undecided at this budget.

    Near-misses inside the [tol, 1e-6] guard band come back undecided rather
    than risking a wrong call on a near-parabolic parameter.
    """
    # build the orbit to a safely larger radius first: parameters on dM
    # (c = -2) ride |z| = 2 exactly, and ulp-level input error drifts past
    # any sharp radius; recurrence is scanned before escape is declared
    orbit = [0j]
    z = 0j
    escaped = False
    for _ in range(max_iter):
        z = z * z + c
        if abs(z) > 4.0:
            escaped = True
            break
        orbit.append(z)
    n = len(orbit)
    best = None
    for i in range(n):
        for j in range(i + 1, n):
            if abs(orbit[j] - orbit[i]) < tol:
                best = (i, j - i)
                break
        if best:
            break
    if best is None:
        if escaped:
            return OrbitClass("escaping")
        # guard band: anything almost recurring is deliberately undecided
        for i in range(n):
            for j in range(i + 1, n):
                if abs(orbit[j] - orbit[i]) < GUARD_BAND:
                    return OrbitClass("undecided")
        return OrbitClass("undecided")
    l_pt, period = best
    # minimal period within the detected cycle
    for p2 in range(1, period):
        if period % p2 == 0 and abs(orbit[l_pt + p2] - orbit[l_pt]) < tol:
            period = p2
            break
    if l_pt == 0:
        return OrbitClass("superattracting", 0, None, period)
    # a mere asymptotic approach to an attracting cycle also recurs at tol;
    # only repelling cycles certify a genuinely preperiodic critical orbit
    mult = 1 + 0j
    z = orbit[l_pt]
    for _ in range(period):
        mult *= 2 * z
        z = z * z + c
    if abs(mult) <= 1:
        return OrbitClass("undecided")
    return OrbitClass("misiurewicz", l_pt, l_pt - 1, period)