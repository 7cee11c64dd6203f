"""Exact-coefficient complex polynomial algebra.

Coefficients are double-precision complex, index k = coefficient of z^k.
Composition blowup is bounded by a symbolic degree cap (default 4096);
trailing coefficients below 1e-14 in modulus are stripped when the degree
is determined, so composition noise cannot inflate the degree.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegreeCap, DegreeTooLow

DEGREE_CAP = 4096
STRIP_TOL = 1e-14
ESCAPE_BOUND = 1e100


def _strip(coeffs: Sequence[complex]) -> tuple[complex, ...]:
    cs = [complex(c) for c in coeffs]
    while len(cs) > 1 and abs(cs[-1]) < STRIP_TOL:
        cs.pop()
    if not cs:
        cs = [0j]
    return tuple(cs)


@dataclass(frozen=True)
class Polynomial:
    """Immutable dense polynomial; ``coeffs[k]`` multiplies z^k."""

    coeffs: tuple[complex, ...]

    def __init__(self, coeffs: Sequence[complex]):
        object.__setattr__(self, "coeffs", _strip(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self, tol: float = STRIP_TOL) -> bool:
        return self.degree == 0 and abs(self.coeffs[0]) < tol

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c != 0 or self.degree == 0:
                terms.append(f"({c.real:g}{c.imag:+g}j)z^{k}")
        return "Poly[" + " + ".join(terms) + "]"


def poly(*coeffs: complex) -> Polynomial:
    """Convenience constructor: poly(c0, c1, ...)."""
    return Polynomial(coeffs)


# canonical small builders
X = Polynomial((0, 1))


def quadratic(c: complex) -> Polynomial:
    """The quadratic family member z^2 + c."""
    return Polynomial((c, 0, 1))


def monomial(d: int) -> Polynomial:
    return Polynomial((0,) * d + (1,))


@dataclass(frozen=True)
class AffineMap:
    """Invertible plane map A(z) = a z + b, a != 0."""

    a: complex
    b: complex = 0j

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("affine map requires a != 0")

    def __call__(self, z: complex) -> complex:
        return self.a * z + self.b

    def inverse(self) -> "AffineMap":
        return AffineMap(1 / self.a, -self.b / self.a)

    def after(self, other: "AffineMap") -> "AffineMap":
        """self o other."""
        return AffineMap(self.a * other.a, self.a * other.b + self.b)

    def as_poly(self) -> Polynomial:
        return Polynomial((self.b, self.a))


IDENTITY_MAP = AffineMap(1, 0)


def evaluate(p: Polynomial, z: complex) -> complex:
    """Horner evaluation of p at z."""
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def evaluate_many(p: Polynomial, zs: np.ndarray) -> np.ndarray:
    """Vectorized Horner over a numpy array of points."""
    acc = np.zeros_like(zs, dtype=complex)
    for c in reversed(p.coeffs):
        acc = acc * zs + c
    return acc


def derivative(p: Polynomial) -> Polynomial:
    if p.degree == 0:
        return Polynomial((0j,))
    return Polynomial(tuple(k * c for k, c in enumerate(p.coeffs) if k > 0))


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    n = max(len(p.coeffs), len(q.coeffs))
    cs = [0j] * n
    for k, c in enumerate(p.coeffs):
        cs[k] += c
    for k, c in enumerate(q.coeffs):
        cs[k] += c
    return Polynomial(cs)


def scale(p: Polynomial, s: complex) -> Polynomial:
    return Polynomial(tuple(s * c for c in p.coeffs))


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    a = np.asarray(p.coeffs, dtype=complex)
    b = np.asarray(q.coeffs, dtype=complex)
    return Polynomial(tuple(np.convolve(a, b)))


def compose(p: Polynomial, q: Polynomial, cap: int = DEGREE_CAP) -> Polynomial:
    """Coefficients of p o q; raises DegreeCap above the symbolic cap."""
    if p.degree * q.degree > cap:
        raise DegreeCap(f"composition degree {p.degree * q.degree} exceeds cap {cap}")
    qa = np.asarray(q.coeffs, dtype=complex)
    acc = np.array([p.coeffs[-1]], dtype=complex)
    for c in reversed(p.coeffs[:-1]):
        acc = np.convolve(acc, qa)
        acc[0] += c
    return Polynomial(tuple(acc))


def iterate(p: Polynomial, n: int, cap: int = DEGREE_CAP) -> Polynomial:
    """n-fold composition p o p o ... o p, n >= 1."""
    if n < 1:
        raise ValueError("iterate requires n >= 1")
    if p.degree >= 2 and p.degree**n > cap:
        raise DegreeCap(f"degree {p.degree}^{n} exceeds cap {cap}")
    out = p
    for _ in range(n - 1):
        out = compose(out, p, cap=cap)
    return out


class OrbitResult(NamedTuple):
    points: list[complex]
    overflowed: bool


def orbit(p: Polynomial, z0: complex, n: int, escape_bound: float = ESCAPE_BOUND) -> OrbitResult:
    """Forward orbit [z0, p(z0), ..., p^n(z0)].

    Sets the overflow flag (not fatal) once any |z| exceeds escape_bound;
    iteration stops there to avoid inf/nan propagation.
    """
    pts = [complex(z0)]
    overflow = False
    z = complex(z0)
    for _ in range(n):
        if abs(z) > escape_bound:
            overflow = True
            break
        z = evaluate(p, z)
        pts.append(z)
    return OrbitResult(pts, overflow or abs(pts[-1]) > escape_bound)


def conjugate(p: Polynomial, A: AffineMap, cap: int = DEGREE_CAP) -> Polynomial:
    """A^{-1} o p o A."""
    inner = compose(p, A.as_poly(), cap=cap)
    inv = A.inverse()
    return add(scale(inner, inv.a), Polynomial((inv.b,)))


def normalize_monic_centered(p: Polynomial) -> tuple[Polynomial, AffineMap]:
    """Conjugate p (deg >= 2) to monic centered form; returns (q, A) with q = A^{-1} o p o A.

    Among the d-1 valid scale choices the canonical one has argument in
    [0, 2pi/(d-1)), which makes round-trips deterministic.
    """
    d = p.degree
    if d < 2:
        raise DegreeTooLow(f"normalize_monic_centered requires degree >= 2, got {d}")
    lead = p.coeffs[-1]
    sub = p.coeffs[-2] if len(p.coeffs) >= 2 else 0j
    b = -sub / (d * lead)
    # a^(d-1) = 1/lead; pick the root with argument in [0, 2pi/(d-1))
    target = 1 / lead
    r = abs(target) ** (1.0 / (d - 1))
    theta = cmath.phase(target) / (d - 1)
    sector = 2 * math.pi / (d - 1)
    theta %= sector
    a = r * cmath.exp(1j * theta)
    A = AffineMap(a, b)
    q = conjugate(p, A)
    # clean the enforced coefficients exactly
    cs = list(q.coeffs)
    cs[-1] = 1.0 + 0j
    if len(cs) >= 2:
        cs[-2] = 0j
    return Polynomial(cs), A


def chebyshev_monic(d: int) -> Polynomial:
    """Monic degree-d polynomial P_d with P_d(z + 1/z) = z^d + z^-d."""
    if d < 1:
        raise ValueError("chebyshev_monic requires d >= 1")
    if d == 1:
        return X
    prev = Polynomial((2,))  # P_0 = 2
    cur = X  # P_1 = z
    for _ in range(d - 1):
        prev, cur = cur, add(multiply(X, cur), scale(prev, -1))
    return cur


def equal_upto(p: Polynomial, q: Polynomial, tol: float) -> bool:
    """True iff same degree and all coefficient differences have modulus <= tol."""
    if p.degree != q.degree:
        return False
    return all(abs(a - b) <= tol for a, b in zip(p.coeffs, q.coeffs))


def max_coeff(p: Polynomial) -> float:
    return max(abs(c) for c in p.coeffs)


def rel_close(p: Polynomial, q: Polynomial, rtol: float) -> bool:
    """Coefficient comparison at tolerance rtol scaled by the largest coefficient modulus."""
    scale_ = max(max_coeff(p), max_coeff(q), 1.0)
    n = max(len(p.coeffs), len(q.coeffs))
    pa = list(p.coeffs) + [0j] * (n - len(p.coeffs))
    qa = list(q.coeffs) + [0j] * (n - len(q.coeffs))
    return all(abs(a - b) <= rtol * scale_ for a, b in zip(pa, qa))
