"""Local Whittaker data and the coefficient/degree identities.

The object of interest is the weight-1 Hilbert Eisenstein series attached
to the genus character; its value at the symmetry center vanishes, and
the derivative there has an exact Fourier expansion.  Every coefficient
indexed by a totally positive element is a rational multiple of log p for
a single prime p and is represented exactly as a ``LogLinear``.

Coefficients are computed through two deliberately disjoint paths:

* the closed form 2 * ord * rho * log p attached to the unique
  obstruction prime (``holomorphic_coefficient``), and
* a product-rule assembly of local Whittaker values and the one local
  derivative (``assemble_derivative``), whose per-prime factors are the
  literal finite sums, not the evaluated closed forms.

The matching Arakelov degree of the zero-dimensional CM locus is one
quarter of the coefficient; ``trace_degree`` sums a trace slice and also
recomputes it through the per-prime multiplicity sums as a cross-check.

Derivative convention: the finite Whittaker derivative at s = 0 is taken
in the variable for which the coefficient identities above hold, i.e.

    deriv0 = (1/2) ord_P(D) log N(P) * value0  +  log N(P) * sum r*eps^r.

When chi(alpha * different) = -1 this collapses to
-(1/2) * ord_P(alpha * P * different) * log N(P), which is the value the
product rule needs: times the archimedean constant (-2i)^2 = -4 it makes
every holomorphic coefficient nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .exact import GaussianRational, LogLinear, padic_val
from .field import (
    FElem,
    FPrimeIdeal,
    Setup,
    element_valuation,
    principal_ideal,
)
from .genus import (
    LocalNormSeries,
    genus_char_prime,
    norm_ideal_count,
    prime_multiplicity,
)
from .oracle import e1, lambda_at_zero

__all__ = [
    "DegreeReport",
    "WhittakerData",
    "arakelov_degree",
    "assemble_derivative",
    "coherent_coefficient",
    "coherent_ratio_check",
    "constant_term",
    "fourier_coefficient",
    "holomorphic_coefficient",
    "mixed_coefficient",
    "trace_degree",
    "whittaker_arch",
    "whittaker_finite",
]

_MINUS_I = GaussianRational(0, -1)
_MINUS_2I = GaussianRational(0, -2)


@dataclass(frozen=True)
class WhittakerData:
    """Value and derivative at the center of one local Whittaker factor.

    ``value0`` is exact; for finite places ``deriv0`` is an exact
    LogLinear, for an archimedean place with negative embedding the
    derivative is the tagged numeric ``deriv0_numeric``.  The oscillating
    q-factor of archimedean values is tracked formally via
    ``has_q_factor`` and never evaluated.
    """

    place: object
    value0: GaussianRational
    deriv0: LogLinear | None = None
    deriv0_numeric: object | None = None
    has_q_factor: bool = False


def _different_order(setup: Setup, prm: FPrimeIdeal) -> int:
    # ord_P(D) as an F-valuation; nonzero only at ramified primes
    return 2 * padic_val(setup.D, prm.p) if prm.kind == "ramified" else 0


def whittaker_finite(
    setup: Setup,
    alpha: FElem,
    prm: FPrimeIdeal,
    section: str = "incoherent_plus",
) -> WhittakerData:
    """Normalized local Whittaker value/derivative at a finite prime.

    ``incoherent_plus`` is the standard lattice section: the value at the
    center is the local norm-count sum, the derivative follows the module
    convention above.  ``coherent_swap`` is the section for the quadratic
    space twisted at this prime; it is only meaningful where the standard
    value vanishes, and its center value is exactly -1.
    """
    gen = alpha.times_sqrtD(setup.D)
    t = element_valuation(setup, gen, prm)
    if t < 0:
        raise ValueError("alpha has a pole against the inverse different here")
    eps = genus_char_prime(setup, prm)
    if section == "coherent_swap":
        if not (eps == -1 and t % 2 == 1):
            raise ValueError("coherent section is only defined at an obstruction prime")
        return WhittakerData(place=prm, value0=GaussianRational(Fraction(-1)))
    if section != "incoherent_plus":
        raise ValueError(f"unknown section {section!r}")
    series = LocalNormSeries(prm.p, prm.residue_degree, eps, t)
    value = series.value_at_zero()
    coeff = Fraction(prm.residue_degree) * (
        Fraction(_different_order(setup, prm), 2) * value + series.weighted_sum()
    )
    return WhittakerData(
        place=prm,
        value0=GaussianRational(Fraction(value)),
        deriv0=LogLinear({prm.p: coeff}),
    )


def whittaker_arch(
    setup: Setup, alpha: FElem, l: int, v_l, precision: int = 53
) -> WhittakerData:
    """Archimedean Whittaker value at embedding l, imaginary part v_l."""
    if l not in (1, 2):
        raise ValueError("embedding index must be 1 or 2")
    if not v_l > 0:
        raise ValueError("imaginary part must be positive")
    if alpha.is_zero:
        return WhittakerData(place=l, value0=_MINUS_I)
    sgn = alpha.embedding_sign(setup.D, l)
    if sgn > 0:
        return WhittakerData(place=l, value0=_MINUS_2I, has_q_factor=True)
    with mpmath.mp.workprec(precision + 16):
        mag = abs(alpha.embedding(setup.D, l, precision + 16))
        deriv = -1j * e1(4 * mpmath.pi * mag * mpmath.mpf(v_l), precision)
    return WhittakerData(
        place=l,
        value0=GaussianRational(Fraction(0)),
        deriv0_numeric=deriv,
        has_q_factor=True,
    )


def _obstruction_data(setup: Setup, alpha: FElem):
    """(ideal alpha*different, obstruction primes) for totally positive alpha."""
    if alpha.is_zero or not alpha.is_totally_positive(setup.D):
        raise ValueError("expected a nonzero totally positive element")
    ideal = principal_ideal(setup, alpha.times_sqrtD(setup.D))
    diff = [
        prm
        for prm, e in ideal.entries
        if e % 2 and genus_char_prime(setup, prm) == -1
    ]
    return ideal, sorted(diff, key=lambda q: q.sort_key())


def holomorphic_coefficient(setup: Setup, alpha: FElem) -> LogLinear:
    """Coefficient of a totally positive index, via the closed form.

    Zero unless sqrt(D)*alpha is integral and the obstruction set is a
    single prime P; then 2 * ord_P(alpha*P*D) * rho(alpha*D/P) * log p.
    Independent of the imaginary parts by construction: no v enters.
    """
    if not alpha.times_sqrtD(setup.D).is_integral(setup.D):
        if alpha.is_zero or not alpha.is_totally_positive(setup.D):
            raise ValueError("expected a nonzero totally positive element")
        return LogLinear.zero()
    ideal, diff = _obstruction_data(setup, alpha)
    if len(diff) != 1:
        return LogLinear.zero()
    prm = diff[0]
    assert prm.residue_degree == 1, "obstruction primes have residue degree 1"
    rho_rest = norm_ideal_count(setup, ideal.times(prm, -1))
    return LogLinear({prm.p: 2 * (ideal.ord_at(prm) + 1) * rho_rest})


def mixed_coefficient(setup: Setup, alpha: FElem, v1, v2, precision: int = 53):
    """Coefficient of a mixed-signature index: 2 rho * e1(4 pi |sigma_l| v_l).

    l is the embedding where alpha is negative; decays to 0 as v_l grows.
    """
    s1 = alpha.embedding_sign(setup.D, 1)
    s2 = alpha.embedding_sign(setup.D, 2)
    if s1 * s2 >= 0:
        raise ValueError("expected a mixed-signature element")
    gen = alpha.times_sqrtD(setup.D)
    if not gen.is_integral(setup.D):
        return mpmath.mpf(0)
    rho = norm_ideal_count(setup, principal_ideal(setup, gen))
    if rho == 0:
        return mpmath.mpf(0)
    l, v_l = (1, v1) if s1 < 0 else (2, v2)
    if not v_l > 0:
        raise ValueError("imaginary parts must be positive")
    with mpmath.mp.workprec(precision + 16):
        mag = abs(alpha.embedding(setup.D, l, precision + 16))
        return +(2 * rho * e1(4 * mpmath.pi * mag * mpmath.mpf(v_l), precision))


def constant_term(setup: Setup, v1, v2, precision: int = 128):
    """Constant coefficient: -2 Lambda'(0) + Lambda(0) log(v1 v2).

    Lambda is the product of the two completed odd Dirichlet L-functions;
    values and derivatives come from the analytic oracle.
    """
    if not (v1 > 0 and v2 > 0):
        raise ValueError("imaginary parts must be positive")
    L1 = lambda_at_zero(setup.d1, precision)
    L2 = lambda_at_zero(setup.d2, precision)
    with mpmath.mp.workprec(precision + 16):
        lam = L1.completed_value * L2.completed_value
        lam_prime = (
            L1.completed_derivative * L2.completed_value
            + L1.completed_value * L2.completed_derivative
        )
        return +(-2 * lam_prime + lam * mpmath.log(mpmath.mpf(v1) * mpmath.mpf(v2)))


def fourier_coefficient(setup: Setup, alpha: FElem, v1=None, v2=None, precision: int = 128):
    """Coefficient of q^alpha in the center derivative, any signature.

    Totally positive indices give the exact LogLinear (no imaginary parts
    needed); mixed signatures give a numeric value depending on the
    imaginary part at the negative embedding; totally negative indices
    vanish identically; alpha = 0 gives the numeric constant term.
    """
    if alpha.is_zero:
        if v1 is None or v2 is None:
            raise ValueError("the constant term needs both imaginary parts")
        return constant_term(setup, v1, v2, precision)
    s1 = alpha.embedding_sign(setup.D, 1)
    s2 = alpha.embedding_sign(setup.D, 2)
    if s1 > 0 and s2 > 0:
        return holomorphic_coefficient(setup, alpha)
    if s1 < 0 and s2 < 0:
        return LogLinear.zero()
    if v1 is None or v2 is None:
        raise ValueError("mixed-signature coefficients need both imaginary parts")
    return mixed_coefficient(setup, alpha, v1, v2, precision)


@dataclass(frozen=True)
class DegreeReport:
    """Degree of the CM locus at one index, with the matching coefficient.

    Exactly 4 * degree = coefficient when the locus is nonempty; both
    are zero otherwise.  ``nu`` is the common length of the local rings,
    ``reflex`` the unique obstruction prime (None for the empty locus).
    """

    alpha: FElem
    diff: tuple[FPrimeIdeal, ...]
    coefficient: LogLinear
    degree: LogLinear
    reflex: FPrimeIdeal | None
    nu: Fraction


def arakelov_degree(setup: Setup, alpha: FElem) -> DegreeReport:
    """Length- and automorphism-weighted point count, as a LogLinear.

    Nonempty only for alpha in the inverse different with a single
    obstruction prime P; then the locus lives entirely in characteristic
    p with every local ring of length nu = (1/2) ord_P(alpha*P*D), and

        degree = nu * rho(alpha*D/P) * log p.
    """
    ideal, diff = _obstruction_data(setup, alpha)
    integral = alpha.times_sqrtD(setup.D).is_integral(setup.D)
    if not integral or len(diff) != 1:
        coeff = holomorphic_coefficient(setup, alpha)
        assert coeff.is_zero
        return DegreeReport(alpha, tuple(diff), coeff, LogLinear.zero(), None, Fraction(0))
    prm = diff[0]
    nu = Fraction(ideal.ord_at(prm) + 1, 2)
    rho_rest = norm_ideal_count(setup, ideal.times(prm, -1))
    degree = LogLinear({prm.p: nu * rho_rest})
    return DegreeReport(
        alpha,
        tuple(diff),
        holomorphic_coefficient(setup, alpha),
        degree,
        prm,
        nu,
    )


def trace_degree(setup: Setup, m: int) -> LogLinear:
    """Degree of the trace-m CM locus, computed two ways and compared.

    (a) sum of per-index degrees over the trace slice;
    (b) one half of the double sum of per-prime multiplicities.
    The two must agree exactly; the common value is returned.
    """
    from .field import enumerate_trace_slice

    slice_elements = enumerate_trace_slice(setup, m)
    total_a = LogLinear.zero()
    for elt in slice_elements:
        total_a = total_a + arakelov_degree(setup, elt.alpha).degree
    total_b = LogLinear.zero()
    for elt in slice_elements:
        for p in elt.ideal.rational_primes():
            fp = prime_multiplicity(setup, elt.ideal, p)
            if fp:
                total_b = total_b + LogLinear({p: Fraction(fp, 2)})
    assert total_a == total_b, "slice decomposition disagrees with multiplicity sums"
    return total_a


def _scalar_product_of_values(setup: Setup, alpha: FElem, skip: FPrimeIdeal) -> GaussianRational:
    ideal = principal_ideal(setup, alpha.times_sqrtD(setup.D))
    out = GaussianRational(Fraction(1))
    for prm, _ in ideal.entries:
        if prm == skip:
            continue
        out = out * whittaker_finite(setup, alpha, prm).value0
    # both archimedean values of a totally positive index
    out = out * _MINUS_2I * _MINUS_2I
    return out


def assemble_derivative(setup: Setup, alpha: FElem) -> LogLinear:
    """Center derivative of one coefficient by the product rule.

    Requires a single obstruction prime P: only the term with the
    derivative at P survives, so the result is the local derivative at P
    times all the other center values (finite and archimedean).  The code
    path shares nothing with the closed form: every factor is the literal
    finite sum.
    """
    if not alpha.times_sqrtD(setup.D).is_integral(setup.D):
        raise ValueError("index is outside the inverse different")
    _, diff = _obstruction_data(setup, alpha)
    if len(diff) != 1:
        raise ValueError("assembly needs a single obstruction prime")
    prm = diff[0]
    scalar = _scalar_product_of_values(setup, alpha, prm)
    assert scalar.is_real, "archimedean constants must square to a real number"
    result = whittaker_finite(setup, alpha, prm).deriv0.scale(scalar.re)
    assert all(c >= 0 for c in result.terms().values()), "coefficient must be nonnegative"
    return result


def coherent_coefficient(setup: Setup, alpha: FElem, prm: FPrimeIdeal) -> Fraction:
    """Center value of the coefficient for the twisted quadratic space.

    Assembled as (-1) * prod of untouched center values * (-2i)^2 and
    asserted against the closed form 4 * rho(alpha*D/P).
    """
    ideal, diff = _obstruction_data(setup, alpha)
    if len(diff) != 1 or diff[0] != prm:
        raise ValueError("the twisted section needs the unique obstruction prime")
    swapped = whittaker_finite(setup, alpha, prm, section="coherent_swap")
    scalar = swapped.value0 * _scalar_product_of_values(setup, alpha, prm)
    assert scalar.is_real
    value = scalar.re
    assert value == 4 * norm_ideal_count(setup, ideal.times(prm, -1))
    return value


def coherent_ratio_check(setup: Setup, alpha: FElem) -> bool:
    """Exact identity: derivative = nu * log p * coherent center value.

    All three ingredients (assembled derivative, nu from the ideal, the
    coherent value) come from separate code paths; the closed-form
    coefficient is compared as well.
    """
    ideal, diff = _obstruction_data(setup, alpha)
    if len(diff) != 1:
        raise ValueError("identity needs a single obstruction prime")
    prm = diff[0]
    nu = Fraction(ideal.ord_at(prm) + 1, 2)
    coherent = coherent_coefficient(setup, alpha, prm)
    expected = LogLinear({prm.p: nu * coherent})
    return (
        assemble_derivative(setup, alpha) == expected
        and holomorphic_coefficient(setup, alpha) == expected
    )
