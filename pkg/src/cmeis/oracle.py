"""Independent floating-point verification layer.

Reduced binary quadratic forms and class numbers, modular j-values by two
distinct q-series routes, integer class polynomials with a rounding
certificate, exact integer resultants, the exponential integral, and
central values/derivatives of odd Dirichlet L-functions.

Nothing in here touches the exact ideal-theoretic pipeline except through
the single reconciliation ``singular_moduli_check``, which compares the
factored resultant of two class polynomials against the trace-1 degree.
Floats are mpmath reals under explicit working-precision contexts; every
rounding step that matters carries a certificate (two-method agreement
for j, distance < 1/4 for class-polynomial coefficients) and raises
``PrecisionError`` instead of degrading silently.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .exact import LogLinear, factor, kronecker
from .field import Setup, _is_fundamental_discriminant

__all__ = [
    "LFunctionCenter",
    "PrecisionError",
    "ReducedForm",
    "SingularModuliReport",
    "class_number",
    "class_poly_start_precision",
    "class_reps",
    "e1",
    "hilbert_class_poly",
    "j_value",
    "lambda_at_zero",
    "log_gamma",
    "poly_eval",
    "resultant",
    "singular_moduli_check",
]


class PrecisionError(ArithmeticError):
    """A certified rounding or agreement check failed; retry with more bits."""


# ---------------------------------------------------------------------------
# binary quadratic forms


@dataclass(frozen=True, order=True)
class ReducedForm:
    """Primitive reduced form a x^2 + b xy + c y^2 of negative discriminant."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c


def class_reps(d: int) -> list[ReducedForm]:
    """One reduced form per class of discriminant d (d < 0 fundamental)."""
    if d >= 0 or not _is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a negative fundamental discriminant")
    forms = []
    bmax = math.isqrt(-d // 3)
    for b in range(d % 2, bmax + 1, 2):
        m = (b * b - d) // 4
        for a in range(max(b, 1), math.isqrt(m) + 1):
            if m % a:
                continue
            c = m // a
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append(ReducedForm(a, b, c))
            if 0 < b < a < c:
                forms.append(ReducedForm(a, -b, c))
    return sorted(forms)


def class_number(d: int) -> int:
    return len(class_reps(d))


# ---------------------------------------------------------------------------
# q-series with integer coefficients

_CHUNK = 32  # series lengths are rounded up so the coefficient caches get reused


def _poly_mul_trunc(a, b, N):
    out = [0] * (N + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > N:
            continue
        lim = min(len(b), N - i + 1)
        for j in range(lim):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return out


@lru_cache(maxsize=8)
def _eta24_coeffs(N: int) -> tuple[int, ...]:
    """Coefficients of prod_{n>=1} (1 - q^n)^24 up to q^N.

    The single product is sparse by the pentagonal number theorem; the
    24th power is four squarings and one multiply.
    """
    base = [0] * (N + 1)
    base[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 <= N:
        sign = -1 if k % 2 else 1
        g = k * (3 * k - 1) // 2
        base[g] += sign
        g = k * (3 * k + 1) // 2
        if g <= N:
            base[g] += sign
        k += 1
    p2 = _poly_mul_trunc(base, base, N)
    p4 = _poly_mul_trunc(p2, p2, N)
    p8 = _poly_mul_trunc(p4, p4, N)
    p16 = _poly_mul_trunc(p8, p8, N)
    return tuple(_poly_mul_trunc(p16, p8, N))


@lru_cache(maxsize=8)
def _e4_coeffs(N: int) -> tuple[int, ...]:
    s3 = [0] * (N + 1)
    for dd in range(1, N + 1):
        cube = dd * dd * dd
        for mult in range(dd, N + 1, dd):
            s3[mult] += cube
    return tuple([1] + [240 * s3[n] for n in range(1, N + 1)])


@lru_cache(maxsize=8)
def _j_coeffs(N: int) -> tuple[int, ...]:
    """cs[i] = integer coefficient of q^(i-1) of the modular j-function.

    Solved from j * Delta = E4^3 by the division recurrence; the Delta
    series is monic in q so everything stays over Z.  (Spot values
    c_0 = 744, c_1 = 196884 are pinned in the tests.)
    """
    e4 = _e4_coeffs(N)
    a = _poly_mul_trunc(_poly_mul_trunc(e4, e4, N), e4, N)
    tau = _eta24_coeffs(N)  # Delta = sum_m tau[m-1] q^m
    cs = [0] * (N + 1)
    for n in range(N + 1):
        acc = a[n]
        for k in range(-1, n - 1):
            acc -= cs[k + 1] * tau[n - k - 1]
        cs[n] = acc
    return tuple(cs)


def _series_length(log_inv_q: float, bits: int) -> int:
    # smallest usable N with e^(4 pi sqrt(n)) * |q|^n below the target;
    # the j-series coefficients grow like e^(4 pi sqrt(n))
    target = -(bits + 24) * math.log(2)
    n = 16
    while 4 * math.pi * math.sqrt(n) - n * log_inv_q > target:
        n += 4
    return ((n + _CHUNK) // _CHUNK) * _CHUNK


def _horner(coeffs, q):
    total = mpmath.mpc(0)
    for c in reversed(coeffs):
        total = total * q + c
    return total


def j_value(form: ReducedForm, precision: int):
    """j at the CM point of the form, with a two-route agreement check.

    Route one: E4(q)^3 over the eta-product (1 - q^n) taken literally to
    the 24th power.  Route two: the integer q-series of j itself obtained
    by series division.  The two must agree to 2^(16 - precision)
    relatively, else ``PrecisionError``.
    """
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    d = form.discriminant
    if d >= 0:
        raise ValueError("form must have negative discriminant")
    work = precision + 48
    with mpmath.mp.workprec(work):
        rtd = mpmath.sqrt(-d)
        log_inv_q = float(mpmath.pi * rtd / form.a)
        N = _series_length(log_inv_q, work)
        q = mpmath.exp(
            mpmath.mpc(-mpmath.pi * rtd / form.a, -mpmath.pi * form.b / form.a)
        )
        e4 = _horner(_e4_coeffs(N), q)
        eta = mpmath.mpc(1)
        qn = mpmath.mpc(1)
        for _ in range(N):
            qn *= q
            eta *= 1 - qn
        j_quotient = e4**3 / (q * eta**24)
        j_series = _horner(_j_coeffs(N), q) / q
        tol = mpmath.mpf(2) ** (16 - precision)
        if abs(j_quotient - j_series) > tol * max(1, abs(j_quotient)):
            raise PrecisionError(
                f"j-value routes disagree for {form} at {precision} bits"
            )
        return +j_quotient


def class_poly_start_precision(d: int) -> int:
    """Initial working precision for the class polynomial of d.

    Height bound with a generous guard; CMEIS_PRECISION_BITS overrides
    the start, and the retry loop doubles on any certificate failure, so
    the constant is not critical.
    """
    env = os.environ.get("CMEIS_PRECISION_BITS")
    if env:
        return max(int(env), 64)
    weight = sum(1.0 / f.a for f in class_reps(d))
    est = 3.5 * math.pi * math.sqrt(-d) * weight / math.log(2)
    return max(128, math.ceil(est) + 64)


def hilbert_class_poly(d: int, precision: int) -> list[int]:
    """Monic integer class polynomial of d, ascending coefficients.

    Every coefficient must round to an integer from within 1/4 (real and
    imaginary distance), else ``PrecisionError`` -- the caller retries at
    doubled precision.
    """
    forms = class_reps(d)
    with mpmath.mp.workprec(precision + 48):
        coeffs = [mpmath.mpc(1)]
        for form in forms:
            j = j_value(form, precision)
            shifted = [mpmath.mpc(0)] + coeffs
            coeffs = [
                shifted[i] - (j * coeffs[i] if i < len(coeffs) else 0)
                for i in range(len(shifted))
            ]
        out = []
        for c in coeffs:
            nearest = mpmath.nint(c.real)
            if abs(c.imag) >= 0.25 or abs(c.real - nearest) >= 0.25:
                raise PrecisionError(
                    f"class polynomial coefficient for d={d} failed to round"
                )
            out.append(int(nearest))
    assert out[-1] == 1 and len(out) == len(forms) + 1
    return out


def poly_eval(coeffs, x):
    total = 0
    for c in reversed(list(coeffs)):
        total = total * x + c
    return total


# ---------------------------------------------------------------------------
# resultants over Z


def _strip(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _pseudo_rem(A: list[int], B: list[int]) -> list[int]:
    """lc(B)^(degA - degB + 1) * A mod B, all over Z (ascending lists)."""
    A = list(A)
    dB = len(B) - 1
    lb = B[-1]
    e = len(A) - len(B) + 1
    while True:
        _strip(A)
        dA = len(A) - 1
        if not A or dA < dB:
            break
        top = A[-1]
        A = [lb * c for c in A]
        shift = dA - dB
        for j, bj in enumerate(B):
            A[shift + j] -= top * bj
        e -= 1
    _strip(A)
    return [c * lb**e for c in A] if e > 0 else A


def resultant(P, Q) -> int:
    """Exact resultant of integer polynomials (subresultant sequence).

    Convention: Res(P, Q) = lc(P)^deg(Q) * prod Q(alpha) over the roots
    alpha of P, so Res(X, X + c) = c.  Swapping arguments costs
    (-1)^(deg P * deg Q).
    """
    A = _strip([int(c) for c in P])
    B = _strip([int(c) for c in Q])
    if not A or not B:
        raise ValueError("resultant of the zero polynomial")
    if len(A) == 1 and len(B) == 1:
        return 1
    if len(A) == 1:
        return A[0] ** (len(B) - 1)
    if len(B) == 1:
        return B[0] ** (len(A) - 1)
    s = 1
    if len(A) < len(B):
        if (len(A) - 1) % 2 and (len(B) - 1) % 2:
            s = -s
        A, B = B, A
    g, h = 1, 1
    while True:
        dA, dB = len(A) - 1, len(B) - 1
        delta = dA - dB
        if dA % 2 and dB % 2:
            s = -s
        R = _pseudo_rem(A, B)
        if not R:
            return 0
        A = B
        denom = g * h**delta
        B = [c // denom for c in R]
        g = A[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = g**delta // h ** (delta - 1)
        if len(B) - 1 == 0:
            dA = len(A) - 1
            return s * (B[0] ** dA // h ** (dA - 1))


# ---------------------------------------------------------------------------
# special functions


def _e1_series(x, bits):
    # -gamma - log x + sum (-1)^(k+1) x^k / (k k!), fine for x <= 4
    total = -mpmath.euler - mpmath.log(x)
    term = mpmath.mpf(1)
    k = 1
    eps = mpmath.mpf(2) ** (-(bits + 16))
    while True:
        term *= x / k
        piece = term / k
        total += piece if k % 2 else -piece
        if piece < eps:
            return total
        k += 1


def _e1_cf_depth(x, depth):
    # e^-x / (x + 1/(1 + 1/(x + 2/(1 + 2/(x + ...))))), evaluated backward
    tail = mpmath.mpf(0)
    for k in range(depth, 0, -1):
        tail = k / (1 + k / (x + tail))
    return mpmath.exp(-x) / (x + tail)


def _e1_cf(x, bits):
    eps = mpmath.mpf(2) ** (-(bits + 8))
    depth = 32
    prev = _e1_cf_depth(x, depth)
    while depth < (1 << 16):
        depth *= 2
        cur = _e1_cf_depth(x, depth)
        if abs(cur - prev) <= eps * abs(cur):
            return cur
        prev = cur
    raise PrecisionError("continued fraction for E1 failed to settle")


def e1(x, precision: int = 53):
    """Exponential integral E1(x) = integral_1^inf e^(-u x) du/u, x > 0.

    Alternating series up to the crossover x = 4, classical ascending
    continued fraction beyond it.
    """
    with mpmath.mp.workprec(precision + 32):
        x = mpmath.mpf(x)
        if x <= 0:
            raise ValueError("E1 needs a positive argument")
        val = _e1_series(x, precision) if x <= 4 else _e1_cf(x, precision)
    with mpmath.mp.workprec(precision):
        return +val


def log_gamma(x, precision: int = 128):
    """log Gamma(x) for real x > 0: asymptotic series after promotion.

    The argument is shifted up by integers until it clears the stability
    threshold, then the Bernoulli-coefficient series is summed until the
    terms pass below the target (they keep shrinking well past it at
    these argument sizes).
    """
    with mpmath.mp.workprec(precision + 32):
        x = mpmath.mpf(x)
        if x <= 0:
            raise ValueError("log_gamma needs a positive argument")
        threshold = max(16, precision // 4)
        shift = mpmath.mpf(0)
        while x < threshold:
            shift += mpmath.log(x)
            x += 1
        total = (x - mpmath.mpf(1) / 2) * mpmath.log(x) - x + mpmath.log(2 * mpmath.pi) / 2
        x2 = x * x
        xpow = x
        eps = mpmath.mpf(2) ** (-(precision + 24))
        n = 1
        prev = mpmath.inf
        while True:
            term = mpmath.bernoulli(2 * n) / ((2 * n) * (2 * n - 1) * xpow)
            if abs(term) >= prev:
                raise PrecisionError("Stirling series hit its asymptotic floor")
            total += term
            if abs(term) < eps:
                break
            prev = abs(term)
            xpow *= x2
            n += 1
        val = total - shift
    with mpmath.mp.workprec(precision):
        return +val


# ---------------------------------------------------------------------------
# L-function center values


@dataclass(frozen=True)
class LFunctionCenter:
    """L(0), L'(0) and the completed Lambda(0), Lambda'(0) for one odd chi."""

    discriminant: int
    l_value_exact: Fraction
    l_value: object
    l_derivative: object
    completed_value: object
    completed_derivative: object


def lambda_at_zero(d: int, precision: int = 128) -> LFunctionCenter:
    """Center values of the odd quadratic L-function of discriminant d.

    L(0) is the exact rational sum of chi(a) (1/2 - a/|d|), equal to
    2h/w by the class number formula.  L'(0) comes from the Hurwitz
    expansion: sum of chi(a) (log Gamma(a/|d|) - log(2 pi)/2
    - log|d| (1/2 - a/|d|)).  The completed function is
    |d|^(s/2) Gamma_R(s+1) L(s), whence

        Lambda(0)  = L(0),
        Lambda'(0) = L'(0) + L(0) (log|d| - log pi - gamma)/2 - L(0) log 2.
    """
    if d >= 0 or not _is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a negative fundamental discriminant")
    fd = -d
    chi = [kronecker(d, a) for a in range(fd)]
    l0 = sum(
        (Fraction(1, 2) - Fraction(a, fd)) * chi[a] for a in range(1, fd) if chi[a]
    )
    with mpmath.mp.workprec(precision + 32):
        half_log_2pi = mpmath.log(2 * mpmath.pi) / 2
        log_fd = mpmath.log(fd)
        l1 = mpmath.mpf(0)
        for a in range(1, fd):
            if not chi[a]:
                continue
            piece = (
                log_gamma(mpmath.mpf(a) / fd, precision + 32)
                - half_log_2pi
                - log_fd * (mpmath.mpf(1) / 2 - mpmath.mpf(a) / fd)
            )
            l1 += chi[a] * piece
        l0f = mpmath.mpf(l0.numerator) / l0.denominator
        lam0 = l0f
        lam1 = l1 + l0f * (
            (log_fd - mpmath.log(mpmath.pi) - mpmath.euler) / 2 - mpmath.log(2)
        )
        return LFunctionCenter(d, l0, +l0f, +l1, +lam0, +lam1)


# ---------------------------------------------------------------------------
# the reconciliation report


@dataclass(frozen=True)
class SingularModuliReport:
    """Both sides of the resultant/trace-degree identity, never silently asserted."""

    d1: int
    d2: int
    h1: int
    h2: int
    resultant_abs: int
    factorization: tuple[tuple[int, int], ...]
    scale: Fraction
    degree_side: LogLinear
    resultant_side: LogLinear
    ok: bool
    precision_used: int


def singular_moduli_check(setup: Setup, precision: int | None = None) -> SingularModuliReport:
    """Compare the trace-1 degree against the scaled factored resultant.

    The classical statement: the norm of the difference of the two CM
    j-values, raised to 8/(w1 w2), has the same prime-log vector as the
    trace-1 Arakelov degree.  The scale 8/(w1 w2) was calibrated on the
    two hand-checkable pairs and is frozen here; the report carries both
    sides so a mismatch is visible rather than fatal.
    """
    from .eisenstein import trace_degree

    prec = precision or max(
        class_poly_start_precision(setup.d1), class_poly_start_precision(setup.d2)
    )
    for _ in range(12):
        try:
            h_poly_1 = hilbert_class_poly(setup.d1, prec)
            h_poly_2 = hilbert_class_poly(setup.d2, prec)
            break
        except PrecisionError:
            prec *= 2
    else:
        raise PrecisionError("class polynomials failed at every precision tried")
    res = resultant(h_poly_1, h_poly_2)
    assert res != 0, "class polynomials of distinct fields share a root"
    fac = factor(abs(res))
    scale = Fraction(8, setup.w1 * setup.w2)
    resultant_side = LogLinear({p: scale * e for p, e in fac})
    degree_side = trace_degree(setup, 1)
    return SingularModuliReport(
        d1=setup.d1,
        d2=setup.d2,
        h1=len(h_poly_1) - 1,
        h2=len(h_poly_2) - 1,
        resultant_abs=abs(res),
        factorization=tuple(fac),
        scale=scale,
        degree_side=degree_side,
        resultant_side=resultant_side,
        ok=degree_side == resultant_side,
        precision_used=prec,
    )
