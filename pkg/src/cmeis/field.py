"""Exact arithmetic in the real quadratic field F = Q(sqrt(D)), D = d1*d2.

A ``Setup`` fixes two coprime negative fundamental discriminants d1, d2;
then D = d1*d2 is a positive fundamental discriminant, F = Q(sqrt(D)) has
ring of integers Z[(D+sqrt(D))/2], and the different of F/Q is the
principal ideal (sqrt(D)).

Elements are pairs (u, v) of rationals meaning u + v*sqrt(D).  Prime
ideals carry their splitting data; fractional ideals are kept in factored
form throughout, so no class-group machinery is ever needed.

Trace-slice parametrization.  The dual lattice of the integers under the
trace form is (1/sqrt(D)) * O_F, so its elements with trace m and both
real embeddings positive are exactly

    alpha = m/2 + (x/(2D)) * sqrt(D),   x = m*D (mod 2),  x^2 < m^2*D:

writing sqrt(D)*alpha = (x + m*sqrt(D))/2, integrality forces x integral
of the displayed parity, trace(alpha) = m, and total positivity is
|x| < m*sqrt(D).  The attached integral ideal is (sqrt(D)*alpha), of
absolute norm (m^2*D - x^2)/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import (
    OO,
    factor,
    hasse_invariant,
    hilbert_symbol,
    kronecker,
    padic_val,
    sqrt_mod_prime_power,
)

__all__ = [
    "FElem",
    "FIdealFactored",
    "FPrimeIdeal",
    "Setup",
    "SetupError",
    "TraceSliceElement",
    "different_ideal",
    "element_valuation",
    "enumerate_trace_slice",
    "local_invariant",
    "prime_ideals_above",
    "principal_ideal",
    "support",
]


class SetupError(ValueError):
    """Invalid discriminant pair."""


def _is_fundamental_discriminant(d: int) -> bool:
    if d == 0 or d == 1:
        return False
    if d % 4 == 1:
        return all(e == 1 for _, e in factor(d))
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and all(e == 1 for _, e in factor(m))
    return False


def _unit_count(d: int) -> int:
    if d == -3:
        return 6
    if d == -4:
        return 4
    return 2


@dataclass(frozen=True)
class Setup:
    """A coprime pair of negative fundamental discriminants."""

    d1: int
    d2: int

    def __post_init__(self):
        for d in (self.d1, self.d2):
            if d >= 0:
                raise SetupError(f"discriminant {d} is not negative")
            if not _is_fundamental_discriminant(d):
                raise SetupError(f"{d} is not a fundamental discriminant")
        if math.gcd(self.d1, self.d2) != 1:
            raise SetupError(f"gcd({self.d1}, {self.d2}) != 1")
        D = self.d1 * self.d2
        if math.isqrt(D) ** 2 == D:
            raise SetupError(f"D = {D} is a perfect square")

    @property
    def D(self) -> int:
        return self.d1 * self.d2

    @property
    def w1(self) -> int:
        return _unit_count(self.d1)

    @property
    def w2(self) -> int:
        return _unit_count(self.d2)


@dataclass(frozen=True)
class FElem:
    """u + v*sqrt(D) with exact rational u, v."""

    u: Fraction
    v: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u", Fraction(self.u))
        object.__setattr__(self, "v", Fraction(self.v))

    @property
    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def trace(self) -> Fraction:
        return 2 * self.u

    def norm(self, D: int) -> Fraction:
        return self.u * self.u - D * self.v * self.v

    def conjugate(self) -> "FElem":
        return FElem(self.u, -self.v)

    def times_sqrtD(self, D: int) -> "FElem":
        return FElem(self.v * D, self.u)

    def embedding_sign(self, D: int, l: int) -> int:
        """Exact sign of sigma_l, l in {1, 2}, sigma_1 = u + v*sqrt(D)."""
        v = self.v if l == 1 else -self.v
        u = self.u
        if v == 0:
            return (u > 0) - (u < 0)
        if u == 0:
            return 1 if v > 0 else -1
        if u > 0 and v > 0:
            return 1
        if u < 0 and v < 0:
            return -1
        big = u * u > D * v * v  # |u| dominates |v*sqrt(D)|
        if u > 0:
            return 1 if big else -1
        return -1 if big else 1

    def is_totally_positive(self, D: int) -> bool:
        return self.embedding_sign(D, 1) > 0 and self.embedding_sign(D, 2) > 0

    def is_integral(self, D: int) -> bool:
        a = 2 * self.u
        b = 2 * self.v
        if a.denominator != 1 or b.denominator != 1:
            return False
        return (int(a) - int(b) * D) % 2 == 0

    def embedding(self, D: int, l: int, precision: int = 53):
        """sigma_l as an mpmath float at the requested bit precision."""
        import mpmath

        with mpmath.mp.workprec(precision):
            s = mpmath.sqrt(D)
            u = mpmath.mpf(self.u.numerator) / self.u.denominator
            v = mpmath.mpf(self.v.numerator) / self.v.denominator
            return +(u + v * s) if l == 1 else +(u - v * s)


_KIND_ORDER = {"split_plus": 0, "split_minus": 1, "inert": 2, "ramified": 3}


@dataclass(frozen=True)
class FPrimeIdeal:
    """Prime of F above p, with splitting kind and canonical root data.

    For split p the two primes are (p, sqrt(D) - r) and (p, sqrt(D) + r)
    where r is the canonical square root of D mod p; the labels are
    deterministic because r is.
    """

    p: int
    kind: str
    root: int | None = None

    @property
    def norm(self) -> int:
        return self.p * self.p if self.kind == "inert" else self.p

    @property
    def residue_degree(self) -> int:
        return 2 if self.kind == "inert" else 1

    @property
    def ramification(self) -> int:
        return 2 if self.kind == "ramified" else 1

    def sort_key(self):
        return (self.p, _KIND_ORDER[self.kind])

    def __repr__(self) -> str:
        tag = {"split_plus": "+", "split_minus": "-", "inert": "", "ramified": "r"}
        return f"P{self.p}{tag[self.kind]}"


@lru_cache(maxsize=1 << 14)
def prime_ideals_above(setup: Setup, p: int) -> tuple[FPrimeIdeal, ...]:
    """Dedekind splitting of a rational prime in F, driven by (D|p)."""
    sym = kronecker(setup.D, p)
    if sym == 1:
        r = sqrt_mod_prime_power(setup.D, p, 1)
        return (
            FPrimeIdeal(p, "split_plus", r),
            FPrimeIdeal(p, "split_minus", r),
        )
    if sym == -1:
        return (FPrimeIdeal(p, "inert"),)
    return (FPrimeIdeal(p, "ramified"),)


@dataclass(frozen=True)
class FIdealFactored:
    """Fractional ideal in factored form; empty factorization is O_F."""

    entries: tuple[tuple[FPrimeIdeal, int], ...] = ()

    @staticmethod
    def from_pairs(pairs) -> "FIdealFactored":
        merged: dict[FPrimeIdeal, int] = {}
        for prm, e in pairs:
            merged[prm] = merged.get(prm, 0) + e
        cleaned = tuple(
            sorted(
                ((prm, e) for prm, e in merged.items() if e != 0),
                key=lambda t: t[0].sort_key(),
            )
        )
        return FIdealFactored(cleaned)

    def ord_at(self, prm: FPrimeIdeal) -> int:
        for q, e in self.entries:
            if q == prm:
                return e
        return 0

    def __mul__(self, other: "FIdealFactored") -> "FIdealFactored":
        return FIdealFactored.from_pairs(self.entries + other.entries)

    def times(self, prm: FPrimeIdeal, e: int = 1) -> "FIdealFactored":
        return FIdealFactored.from_pairs(self.entries + ((prm, e),))

    @property
    def is_integral(self) -> bool:
        return all(e >= 0 for _, e in self.entries)

    @property
    def is_unit_ideal(self) -> bool:
        return not self.entries

    def norm(self) -> Fraction:
        out = Fraction(1)
        for prm, e in self.entries:
            out *= Fraction(prm.norm) ** e
        return out

    def primes(self) -> tuple[FPrimeIdeal, ...]:
        return tuple(prm for prm, _ in self.entries)

    def rational_primes(self) -> tuple[int, ...]:
        return tuple(sorted({prm.p for prm, _ in self.entries}))

    def __repr__(self) -> str:
        if not self.entries:
            return "(1)"
        return " * ".join(f"{prm!r}^{e}" if e != 1 else f"{prm!r}" for prm, e in self.entries)


@lru_cache(maxsize=1 << 16)
def element_valuation(setup: Setup, beta: FElem, prm: FPrimeIdeal) -> int:
    """ord of beta at a prime of F.

    Inert and ramified primes read the valuation off the norm.  At a split
    prime the element is cleared to a + b*sqrt(D) with integer a, b, the
    canonical root is lifted to p^(t+2) where t = ord_p(norm) of the
    cleared element (one guard digit beyond need), and the valuation is
    min(ord_p(a +/- b*r), t); the cap t is exact because the two split
    valuations are nonnegative and sum to t.
    """
    if beta.is_zero:
        raise ValueError("valuation of 0")
    p = prm.p
    if prm.kind == "inert":
        t = padic_val(beta.norm(setup.D), p)
        assert t % 2 == 0, "odd norm valuation at an inert prime"
        return t // 2
    if prm.kind == "ramified":
        return padic_val(beta.norm(setup.D), p)
    den = math.lcm(beta.u.denominator, beta.v.denominator)
    a = int(beta.u * den)
    b = int(beta.v * den)
    nrm = a * a - setup.D * b * b  # nonzero: D is not a square
    t = padic_val(nrm, p)
    if t == 0:
        val = 0
    else:
        k = t + 2
        r = sqrt_mod_prime_power(setup.D, p, k)
        pk = p**k
        res = (a + b * r) % pk if prm.kind == "split_plus" else (a - b * r) % pk
        val = t if res == 0 else min(padic_val(res, p), t)
    return val - padic_val(den, p) if den > 1 else val


@lru_cache(maxsize=1 << 15)
def principal_ideal(setup: Setup, beta: FElem) -> FIdealFactored:
    """Factor the principal fractional ideal (beta)."""
    if beta.is_zero:
        raise ValueError("(0) is not a fractional ideal")
    nrm = beta.norm(setup.D)
    ps = set(factor(abs(nrm.numerator)).primes()) | set(factor(nrm.denominator).primes())
    pairs = []
    for p in sorted(ps):
        checksum = 0
        for prm in prime_ideals_above(setup, p):
            e = element_valuation(setup, beta, prm)
            checksum += e * prm.residue_degree
            if e:
                pairs.append((prm, e))
        assert checksum == padic_val(nrm, p), "valuations disagree with the norm"
    return FIdealFactored.from_pairs(pairs)


def different_ideal(setup: Setup) -> FIdealFactored:
    """The different of F/Q, i.e. the principal ideal (sqrt(D))."""
    return principal_ideal(setup, FElem(Fraction(0), Fraction(1)))


@dataclass(frozen=True)
class TraceSliceElement:
    """One term of the trace-m slice of the dual lattice."""

    alpha: FElem
    x: int
    n: int
    ideal: FIdealFactored  # (sqrt(D) * alpha), integral of norm n


def enumerate_trace_slice(setup: Setup, m: int) -> list[TraceSliceElement]:
    """All totally positive alpha in the trace dual with trace m, by x."""
    if m < 1:
        raise ValueError("trace must be a positive integer")
    D = setup.D
    xmax = math.isqrt(m * m * D - 1)
    parity = (m * D) % 2
    out = []
    for x in range(-xmax, xmax + 1):
        if x % 2 != parity:
            continue
        alpha = FElem(Fraction(m, 2), Fraction(x, 2 * D))
        gen = alpha.times_sqrtD(D)  # (x + m*sqrt(D)) / 2
        n = (m * m * D - x * x) // 4
        out.append(TraceSliceElement(alpha, x, n, principal_ideal(setup, gen)))
    return out


def _binary_trace_form(setup: Setup, beta: FElem) -> tuple[Fraction, Fraction]:
    """Rational diagonalization of t -> Tr(beta * t^2) on F.

    In the basis {1, sqrt(D)} the Gram matrix is
    [[2*b0, 2*b1*D], [2*b1*D, 2*b0*D]]; congruence diagonalizes it to
    (2*b0, 2*D*N(beta)/b0) as long as the trace of beta is nonzero, which
    holds for the totally positive inputs this is used on.
    """
    b0 = beta.u
    if b0 == 0:
        raise ValueError("trace-zero binary form is not handled")
    return 2 * b0, 2 * setup.D * beta.norm(setup.D) / b0


@lru_cache(maxsize=1 << 14)
def _invariant_diagonal(setup: Setup, alpha: FElem) -> tuple[int, ...]:
    if alpha.is_zero or not alpha.is_totally_positive(setup.D):
        raise ValueError("local invariants need a totally positive element")
    first = _binary_trace_form(setup, alpha)
    scaled = FElem(-setup.d1 * alpha.u, -setup.d1 * alpha.v)
    second = _binary_trace_form(setup, scaled)
    # integer square-class representatives keep the symbol arithmetic fast
    return tuple(f.numerator * f.denominator for f in (*first, *second))


def local_invariant(setup: Setup, alpha: FElem, place) -> int:
    """Obstruction sign at one place for representing alpha.

    The four-dimensional rational form Tr(alpha * x * xbar) on the
    biquadratic algebra splits as Tr(alpha t^2) + Tr(-alpha d1 t^2); the
    invariant is the Hasse invariant of that diagonal times (-1,-1) at the
    place.  The product over all places (OO included) is +1.
    """
    diag = _invariant_diagonal(setup, alpha)
    return hasse_invariant(diag, place) * hilbert_symbol(-1, -1, place)


def support(setup: Setup, alpha: FElem) -> set[int]:
    """Finite places where the local obstruction sign is -1.

    The defining sign carries an extra flip at OO, but for totally
    positive alpha the archimedean invariant is -1 so OO never enters;
    the set is finite and of odd cardinality by the product formula.
    """
    diag = _invariant_diagonal(setup, alpha)
    places = {2}
    for entry in diag:
        places.update(factor(abs(entry)).primes())
    return {p for p in places if local_invariant(setup, alpha, p) == -1}
