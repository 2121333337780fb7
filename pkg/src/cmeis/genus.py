"""Genus character of the biquadratic extension and ideal-counting data.

K = Q(sqrt(d1), sqrt(d2)) is quadratic over F = Q(sqrt(d1*d2)) and
unramified at every finite prime because gcd(d1, d2) = 1.  The attached
quadratic character chi of F is evaluated through base change:
chi(P) = kronecker(d_i, N(P)) for either i with residue characteristic
not dividing d_i; when both choices are legal they agree, and the code
asserts that for free.

rho(b) counts integral ideals of K with relative norm b: the local factor
at P is e+1 when chi(P) = +1 and (1 if e even else 0) when chi(P) = -1,
and 0 whenever b has a pole.  The same local factors appear as values of
the finite Whittaker functions, so the local series is kept symbolically
as ``LocalNormSeries``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import LogLinear, kronecker
from .field import (
    FElem,
    FIdealFactored,
    FPrimeIdeal,
    Setup,
    prime_ideals_above,
    principal_ideal,
)

__all__ = [
    "LocalNormSeries",
    "diff_set",
    "genus_char_ideal",
    "genus_char_prime",
    "local_norm_count",
    "local_norm_series",
    "norm_ideal_count",
    "orbital_value",
    "prime_multiplicity",
]


@lru_cache(maxsize=1 << 14)
def genus_char_prime(setup: Setup, prm: FPrimeIdeal) -> int:
    """chi at a prime of F: +1 if it splits in K, -1 if inert."""
    vals = {
        kronecker(d, prm.norm)
        for d in (setup.d1, setup.d2)
        if d % prm.p != 0
    }
    assert len(vals) == 1, "base-change character values disagree"
    return vals.pop()


def genus_char_ideal(setup: Setup, ideal: FIdealFactored) -> int:
    out = 1
    for prm, e in ideal.entries:
        if e % 2:
            out *= genus_char_prime(setup, prm)
    return out


def diff_set(setup: Setup, alpha: FElem) -> list[FPrimeIdeal]:
    """Primes of F where the local space fails to represent alpha.

    These are the primes with chi = -1 at which alpha * (different) has
    odd valuation; the list always has odd length.  alpha need not lie in
    the inverse different: the character is evaluated on the factored
    fractional ideal either way.
    """
    if alpha.is_zero or not alpha.is_totally_positive(setup.D):
        raise ValueError("diff_set needs a totally positive element")
    ideal = principal_ideal(setup, alpha.times_sqrtD(setup.D))
    out = [
        prm
        for prm, e in ideal.entries
        if e % 2 and genus_char_prime(setup, prm) == -1
    ]
    return sorted(out, key=lambda q: q.sort_key())


def local_norm_count(setup: Setup, ideal: FIdealFactored, prm: FPrimeIdeal) -> int:
    """Local factor of rho at one prime (0 on a negative exponent)."""
    e = ideal.ord_at(prm)
    if e < 0:
        return 0
    if genus_char_prime(setup, prm) == 1:
        return e + 1
    return 1 if e % 2 == 0 else 0


def norm_ideal_count(setup: Setup, ideal: FIdealFactored) -> int:
    """Number of integral ideals of K with relative norm the given ideal."""
    if not ideal.is_integral:
        return 0
    out = 1
    for prm, _ in ideal.entries:
        out *= local_norm_count(setup, ideal, prm)
        if out == 0:
            return 0
    return out


@dataclass(frozen=True)
class LocalNormSeries:
    """The finite local series sum_{r=0..t} (eps * N^-s)^r at one prime.

    Stored as (p, f, eps, t) with N = p^f; the only consumers are the
    value and the derivative at s = 0, both exact.
    """

    p: int
    f: int
    eps: int
    t: int

    @property
    def norm(self) -> int:
        return self.p**self.f

    def value_at_zero(self) -> int:
        return sum(self.eps**r for r in range(self.t + 1))

    def deriv_at_zero(self) -> LogLinear:
        """Term-by-term derivative: -log(N) * sum r * eps^r."""
        coeff = -Fraction(self.f) * sum(r * self.eps**r for r in range(self.t + 1))
        return LogLinear({self.p: coeff})

    def weighted_sum(self) -> int:
        return sum(r * self.eps**r for r in range(self.t + 1))


def local_norm_series(
    setup: Setup, ideal: FIdealFactored, prm: FPrimeIdeal
) -> LocalNormSeries:
    t = ideal.ord_at(prm)
    if t < 0:
        raise ValueError("local series needs a nonnegative exponent")
    return LocalNormSeries(prm.p, prm.residue_degree, genus_char_prime(setup, prm), t)


def _is_valid_reflex(setup: Setup, prm: FPrimeIdeal) -> bool:
    # residue characteristic nonsplit in both imaginary fields, equivalently
    # the prime of F is inert in K
    p = prm.p
    return (
        kronecker(setup.d1, p) != 1
        and kronecker(setup.d2, p) != 1
        and genus_char_prime(setup, prm) == -1
    )


def orbital_value(
    setup: Setup, alpha: FElem, ell: int, reflex: FPrimeIdeal
) -> int:
    """Local lattice-point count for alpha at the rational prime ell.

    Away from the residue characteristic of the reflex prime this is the
    local rho factor of alpha*(different); at the residue characteristic
    the reflex prime is divided out first.  The product over all ell is
    rho(alpha * different / reflex).
    """
    if not _is_valid_reflex(setup, reflex):
        raise ValueError(f"{reflex!r} is not a valid reflex prime")
    ideal = principal_ideal(setup, alpha.times_sqrtD(setup.D))
    if ell == reflex.p:
        ideal = ideal.times(reflex, -1)
    out = 1
    for prm in prime_ideals_above(setup, ell):
        e = ideal.ord_at(prm)
        if e < 0:
            return 0
        if genus_char_prime(setup, prm) == 1:
            out *= e + 1
        elif e % 2:
            return 0
    return out


def prime_multiplicity(setup: Setup, ideal: FIdealFactored, p: int) -> int:
    """sum over primes P above p of ord_P(ideal * P) * rho(ideal / P).

    Zero when p splits in either imaginary field, and zero unless the
    ideal is integral.
    """
    if kronecker(setup.d1, p) == 1 or kronecker(setup.d2, p) == 1:
        return 0
    if not ideal.is_integral:
        return 0
    total = 0
    for prm in prime_ideals_above(setup, p):
        total += (ideal.ord_at(prm) + 1) * norm_ideal_count(setup, ideal.times(prm, -1))
    return total
