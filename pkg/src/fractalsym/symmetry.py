"""Linear symmetry groups of polynomials and commuting-identity verification.

A monic centered polynomial admits a nontrivial rotation symmetry commuting
with some iterate exactly when it has the form z^s R(z^n) with n > 1 and
gcd(s, n) = 1.  Detection works on the exponent support with an explicit
zero threshold, since this is exact combinatorics on an inexact object.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DegreeCap, DegreeMismatch, NotNormalized
from . import poly as P
from .poly import AffineMap, Polynomial

SUPPORT_TOL = 1e-12
IDENTITY_RTOL = 1e-8


@dataclass(frozen=True)
class SymmetryGroup:
    """Cyclic rotation group acting on a monic centered polynomial.

    order n and residue s satisfy: all support exponents are congruent to
    s mod n, with gcd(s, n) = 1.  order == 1 means the group is trivial.
    """

    order: int
    residue_s: int
    generator_rotation: complex

    @property
    def trivial(self) -> bool:
        return self.order == 1


def _support(f: Polynomial, tol: float = SUPPORT_TOL) -> list[int]:
    return [k for k, c in enumerate(f.coeffs) if abs(c) > tol]


def _is_monic_centered(f: Polynomial, tol: float = 1e-12) -> bool:
    if f.degree < 1:
        return False
    if abs(f.coeffs[-1] - 1) > tol:
        return False
    return f.degree < 1 or abs(f.coeffs[-2]) <= tol


def _divisors_desc(n: int) -> list[int]:
    ds = [d for d in range(1, n + 1) if n % d == 0]
    return ds[::-1]


def linear_symmetry_group(f: Polynomial) -> SymmetryGroup:
    """Largest n with support(f) in a single residue class s mod n, gcd(s,n)=1.

    Pure monomials z^d are degenerate: every rotation of order coprime to d
    commutes with some iterate, so the group is infinite.  We report the
    order-(d-1) subgroup commuting with f itself, the canonical finite
    representative (note gcd(d-1, d) = 1 keeps the contract intact).
    """
    if f.degree < 2:
        raise NotNormalized("linear_symmetry_group requires degree >= 2")
    if not _is_monic_centered(f):
        raise NotNormalized("polynomial must be monic and centered within 1e-12")
    support = _support(f)
    if len(support) == 1:
        n = f.degree - 1
        if n < 1:
            n = 1
        return SymmetryGroup(n, f.degree % n if n > 1 else 0, cmath.exp(2j * math.pi / n))
    n0 = 0
    base = support[0]
    for k in support[1:]:
        n0 = math.gcd(n0, k - base)
    for n in _divisors_desc(n0):
        s = support[0] % n
        if math.gcd(s, n) == 1:
            return SymmetryGroup(n, s, cmath.exp(2j * math.pi / n))
    return SymmetryGroup(1, 0, 1 + 0j)


def commutes_with_iterate(g: Polynomial, f: Polynomial, n_max: int, rtol: float = IDENTITY_RTOL):
    """Smallest n <= n_max with g o f^n = f^n o g (relative coefficient tolerance), else None."""
    fn = f
    for n in range(1, n_max + 1):
        if P.rel_close(P.compose(g, fn), P.compose(fn, g), rtol):
            return n
        if n < n_max:
            fn = P.compose(fn, f)
    return None


@dataclass(frozen=True)
class ExceptionalClass:
    """Result of smooth-Julia-set recognition.

    kind is 'monomial', 'chebyshev' or 'neither'; sign distinguishes the
    +/- Chebyshev forms (always +1 for even degree, where both coincide);
    to_template conjugates the input onto the exact template polynomial.
    """

    kind: str
    sign: int = 0
    to_template: AffineMap | None = None


def _rotations(d: int, negative: bool):
    """Scales a with a^(d-1) = 1 (template-preserving) or a^(d-1) = -1."""
    m = d - 1
    out = []
    for j in range(m):
        ang = (2 * j + (1 if negative else 0)) * math.pi / m
        out.append(cmath.exp(1j * ang))
    return out


def recognize_exceptional(f: Polynomial, tol: float = 1e-10) -> ExceptionalClass:
    """Classify f as affinely conjugate to z^d, +-Chebyshev, or neither."""
    d = f.degree
    q, A = P.normalize_monic_centered(f)
    if P.equal_upto(q, P.monomial(d), tol):
        return ExceptionalClass("monomial", 0, A)
    cheb = P.chebyshev_monic(d)
    # q = R^{-1} o template o R with R(z) = a z means the map sending f onto
    # the exact template is B = A o R^{-1} (then conjugate(f, B) == template)
    for a in _rotations(d, negative=False):
        cand = P.conjugate(cheb, AffineMap(a))
        if P.equal_upto(q, cand, tol):
            return ExceptionalClass("chebyshev", +1, A.after(AffineMap(1 / a)))
    for a in _rotations(d, negative=True):
        cand = P.conjugate(P.scale(cheb, -1), AffineMap(a))
        if P.equal_upto(q, cand, tol):
            sign = +1 if d % 2 == 0 else -1
            return ExceptionalClass("chebyshev", sign, A.after(AffineMap(1 / a)))
    return ExceptionalClass("neither")


def verify_intertwining(S: Polynomial, f1: Polynomial, f2: Polynomial, p: int, rtol: float = IDENTITY_RTOL) -> bool:
    """True iff S o f1^p = f2^p o S within relative coefficient tolerance."""
    f1p = P.iterate(f1, p)
    f2p = P.iterate(f2, p)
    return P.rel_close(P.compose(S, f1p), P.compose(f2p, S), rtol)


def verify_decomposition_pair(Pp: Polynomial, Q: Polynomial, f1: Polynomial, f2: Polynomial, rtol: float = IDENTITY_RTOL) -> bool:
    """True iff f1 = Q o P and f2 = P o Q within relative coefficient tolerance."""
    if Pp.degree * Q.degree != f1.degree or f1.degree != f2.degree:
        raise DegreeMismatch(
            f"deg(P)*deg(Q) = {Pp.degree * Q.degree} must equal deg(f1) = {f1.degree} = deg(f2) = {f2.degree}"
        )
    return P.rel_close(P.compose(Q, Pp), f1, rtol) and P.rel_close(P.compose(Pp, Q), f2, rtol)
