"""Exact rational angle dynamics under t -> d t and affine circle-map algebra.

Angles are big-integer rationals reduced mod 1; periodicity classification
is exact combinatorics, so no floating point enters this module.  Affine
maps s(t) = a t + b with a non-integer slope are not well defined on the
circle; all algebra here is on representatives in [0, 1), matching how the
maps arise as locally-defined boundary maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple

from .errors import BranchUndefined, NoNormalForm

NORMAL_FORM_BOUND = 64


@dataclass(frozen=True, order=True)
class Angle:
    """Exact point of R/Z held as a Fraction in [0, 1)."""

    value: Fraction

    def __init__(self, value, denominator=None):
        if denominator is not None:
            value = Fraction(value, denominator)
        elif not isinstance(value, (Fraction, int)):
            raise TypeError("Angle requires exact rational input")
        v = Fraction(value)
        object.__setattr__(self, "value", v - (v.numerator // v.denominator))

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"

    @staticmethod
    def parse(text: str) -> "Angle":
        parts = text.strip().split("/")
        if len(parts) == 1:
            return Angle(Fraction(int(parts[0]), 1))
        if len(parts) != 2:
            raise ValueError(f"cannot parse angle {text!r}")
        return Angle(Fraction(int(parts[0]), int(parts[1])))

    def float(self) -> float:
        return float(self.value)


def times_d(theta: Angle, d: int) -> Angle:
    """The multiplying-by-d map, exact mod 1."""
    if d < 2:
        raise ValueError("times_d requires d >= 2")
    return Angle(d * theta.value)


class AngleClass(NamedTuple):
    preperiod: int  # 0 means periodic
    period: int

    @property
    def periodic(self) -> bool:
        return self.preperiod == 0


def classify_angle(theta: Angle, d: int) -> AngleClass:
    """Exact preperiod and period of theta under t -> d t via orbit hashing.

    Works on numerators modulo the fixed denominator, so the orbit never
    allocates new rationals.
    """
    if d < 2:
        raise ValueError("classify_angle requires d >= 2")
    q = theta.denominator
    seen: dict[int, int] = {}
    n = theta.numerator % q
    k = 0
    while n not in seen:
        seen[n] = k
        n = (n * d) % q
        k += 1
    first = seen[n]
    return AngleClass(first, k - first)


@dataclass(frozen=True)
class CircleAffine:
    """Exact affine map on circle representatives: t -> a t + b mod 1, a != 0."""

    a: Fraction
    b: Fraction

    def __init__(self, a, b=0):
        a = Fraction(a) if isinstance(a, (Fraction, int)) else _reject(a)
        b = Fraction(b) if isinstance(b, (Fraction, int)) else _reject(b)
        if a == 0:
            raise ValueError("slope must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b - (b.numerator // b.denominator))

    def __call__(self, theta: Angle) -> Angle:
        return Angle(self.a * theta.value + self.b)


def _reject(x):
    raise TypeError("CircleAffine requires exact rational slope/offset")


def apply_cm(s: CircleAffine, theta: Angle) -> Angle:
    return s(theta)


def compose_cm(s2: CircleAffine, s1: CircleAffine) -> CircleAffine:
    """s2 o s1 on representatives."""
    return CircleAffine(s2.a * s1.a, s2.a * s1.b + s2.b)


def invert_cm(s: CircleAffine, anchor: Angle | None = None) -> CircleAffine:
    """A branch of the inverse: t -> (t - b + k)/a.

    Default branch has k = 0 (the branch through 0's representative
    interval).  With an anchor, k is chosen so the branch sends s(anchor)
    back to anchor exactly.
    """
    base = CircleAffine(1 / s.a, -s.b / s.a)
    if anchor is None:
        return base
    img = s(anchor)
    # solve (img.value - s.b + k)/s.a = anchor.value mod 1 for rational k
    k = s.a * anchor.value - (img.value - s.b)
    return CircleAffine(1 / s.a, (-s.b + k) / s.a)


def m_d(d: int) -> CircleAffine:
    return CircleAffine(Fraction(d), Fraction(0))


def _d_part(n: int, d: int) -> int:
    """Largest divisor of n composed of primes dividing d."""
    n = abs(n)
    g = gcd(n, d)
    part = 1
    while g > 1:
        while n % g == 0:
            n //= g
            part *= g
        g = gcd(n, d)
    return part


def _slope_is_normal(a: Fraction, d: int) -> bool:
    """Slope of the form (u*l)/v with gcd(u, d) = gcd(v, d) = 1 and l | d."""
    if gcd(a.denominator, d) != 1:
        return False
    return d % _d_part(a.numerator, d) == 0


class NormalFormResult(NamedTuple):
    map: CircleAffine
    pre_compositions: int
    post_compositions: int


def normal_form(s: CircleAffine, d: int, test_angle: Angle | None = None, bound: int = NORMAL_FORM_BOUND) -> NormalFormResult:
    """Compose s with the dynamics until the slope is (u*l)/v, gcd(u,d)=gcd(v,d)=1, l|d,
    and the test periodic angle maps to a periodic angle.

    Minimal total composition count, post-compositions preferred (the offset
    can only be repaired from the post side).  Raises NoNormalForm past the
    bound; the existence guarantee only covers genuine symmetry maps.
    """
    if test_angle is None:
        test_angle = Angle(0)
    if not classify_angle(test_angle, d).periodic:
        raise ValueError("test angle must be periodic")
    md = m_d(d)
    for total in range(bound + 1):
        for post in range(total, -1, -1):
            pre = total - post
            cand = s
            for _ in range(pre):
                cand = compose_cm(cand, md)
            for _ in range(post):
                cand = compose_cm(md, cand)
            if _slope_is_normal(cand.a, d) and classify_angle(cand(test_angle), d).periodic:
                return NormalFormResult(cand, pre, post)
    raise NoNormalForm(f"no composition up to {bound} normalizes slope {s.a} offset {s.b} for d = {d}")


def commutator(s: CircleAffine, d: int, q: int, branch_anchor: Angle) -> CircleAffine:
    """[m_d^q, s] = m_d^{-q} o s^{-1} o m_d^q o s, exact on representatives.

    The inverse branch of m_d^q is the one fixing the anchor (anchor must be
    periodic with period dividing q); s^{-1} is the branch through the anchor.
    The result always has slope exactly 1.
    """
    cls = classify_angle(branch_anchor, d)
    if not cls.periodic or q % cls.period != 0:
        raise BranchUndefined(f"anchor {branch_anchor} is not periodic of period dividing {q}")
    x = branch_anchor.value
    dq = Fraction(d) ** q
    # branch of m_d^{-q} fixing x: t -> (t + j)/d^q with (x + j)/d^q = x
    j = x * (dq - 1)
    md_q_inv = CircleAffine(1 / dq, j / dq)
    s_inv = invert_cm(s, anchor=branch_anchor)
    md_q = CircleAffine(dq, Fraction(0))
    out = compose_cm(md_q_inv, compose_cm(s_inv, compose_cm(md_q, s)))
    assert out.a == 1
    return out


def check_ratder_conclusion(s: CircleAffine, d: int, samples: int) -> bool:
    """Executable witness: images of periodic angles stay (pre)periodic.

    True for every exact-rational map; classify_angle terminating with a
    finite (preperiod, period) for each sample is the checked content.
    """
    count = 0
    q = 1
    while count < samples:
        q += 1
        if gcd(q, d) != 1:
            continue
        for p in range(1, q):
            if gcd(p, q) != 1:
                continue
            theta = Angle(Fraction(p, q))
            assert classify_angle(theta, d).periodic
            img = s(theta)
            cls = classify_angle(img, d)
            if cls.period < 1:
                return False
            count += 1
            if count >= samples:
                break
    return True
