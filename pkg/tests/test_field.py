import random
from fractions import Fraction

import pytest

from cmeis.exact import factor, padic_val
from cmeis.field import (
    FElem,
    FIdealFactored,
    Setup,
    SetupError,
    different_ideal,
    element_valuation,
    enumerate_trace_slice,
    local_invariant,
    prime_ideals_above,
    principal_ideal,
    support,
)
from cmeis.exact import OO

MATRIX = [(-3, -7), (-3, -4), (-4, -7), (-3, -8), (-7, -8), (-3, -11), (-4, -11), (-8, -11), (-7, -23)]


# ---------------------------------------------------------------------------
# setup validation


def test_setup_accepts_matrix():
    for d1, d2 in MATRIX:
        s = Setup(d1, d2)
        assert s.D == d1 * d2 > 0


def test_setup_unit_counts():
    assert Setup(-3, -7).w1 == 6
    assert Setup(-4, -7).w1 == 4
    assert Setup(-7, -8).w1 == 2
    assert Setup(-3, -4).w2 == 4


@pytest.mark.parametrize(
    "d1,d2",
    [
        (-3, -9),  # -9 not fundamental
        (-3, -12),  # -12 not fundamental (-12/4 = -3 = 1 mod 4)
        (-3, -21),  # gcd 3
        (-4, -8),  # gcd 4
        (3, -7),  # positive
        (-3, 5),
        (-5, -7),  # -5 = 3 mod 4, not a discriminant
    ],
)
def test_setup_rejects(d1, d2):
    with pytest.raises(SetupError):
        Setup(d1, d2)


# ---------------------------------------------------------------------------
# splitting


def test_prime_splitting_examples():
    s = Setup(-3, -7)
    plus, minus = prime_ideals_above(s, 5)
    assert plus.kind == "split_plus" and minus.kind == "split_minus"
    assert plus.root == 1  # least root of 21 mod 5
    (ram,) = prime_ideals_above(s, 3)
    assert ram.kind == "ramified" and ram.norm == 3
    (inert,) = prime_ideals_above(s, 2)  # 21 = 5 mod 8
    assert inert.kind == "inert" and inert.norm == 4


def test_splitting_degree_sum():
    for d1, d2 in MATRIX[:4]:
        s = Setup(d1, d2)
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 101, 499):
            total = sum(
                prm.ramification * prm.residue_degree for prm in prime_ideals_above(s, p)
            )
            assert total == 2


# ---------------------------------------------------------------------------
# valuations and principal ideals


def test_valuation_examples():
    s = Setup(-3, -7)
    beta = FElem(Fraction(1, 2), Fraction(1, 2))  # (1 + sqrt(21))/2, norm -5
    plus, minus = prime_ideals_above(s, 5)
    assert element_valuation(s, beta, plus) == 0
    assert element_valuation(s, beta, minus) == 1
    (ram3,) = prime_ideals_above(s, 3)
    assert element_valuation(s, FElem(0, 1), ram3) == 1  # sqrt(21)
    one = FElem(1, 0)
    for p in (2, 3, 5, 7):
        for prm in prime_ideals_above(s, p):
            assert element_valuation(s, one, prm) == 0


def test_valuation_rejects_zero():
    s = Setup(-3, -7)
    (prm,) = prime_ideals_above(s, 3)
    with pytest.raises(ValueError):
        element_valuation(s, FElem(0, 0), prm)


def test_principal_ideal_examples():
    s = Setup(-3, -7)
    beta = FElem(Fraction(1, 2), Fraction(1, 2))
    ideal = principal_ideal(s, beta)
    assert len(ideal.entries) == 1
    prm, e = ideal.entries[0]
    assert (prm.p, prm.kind, e) == (5, "split_minus", 1)
    assert principal_ideal(s, FElem(1, 0)).is_unit_ideal
    sqrt21 = principal_ideal(s, FElem(0, 1))
    assert {(q.p, q.kind, e) for q, e in sqrt21.entries} == {
        (3, "ramified", 1),
        (7, "ramified", 1),
    }


def test_principal_ideal_norms_random():
    rng = random.Random(7)
    for d1, d2 in MATRIX:
        s = Setup(d1, d2)
        for _ in range(40):
            u = Fraction(rng.randint(-30, 30), rng.randint(1, 20))
            v = Fraction(rng.randint(-30, 30), rng.randint(1, 20))
            beta = FElem(u, v)
            if beta.is_zero:
                continue
            assert principal_ideal(s, beta).norm() == abs(beta.norm(s.D))


def test_different_ideal():
    s = Setup(-3, -7)
    d = different_ideal(s)
    assert {(q.p, e) for q, e in d.entries} == {(3, 1), (7, 1)}
    s34 = Setup(-3, -4)
    d34 = different_ideal(s34)
    assert {(q.p, e) for q, e in d34.entries} == {(2, 2), (3, 1)}
    for d1, d2 in MATRIX:
        s = Setup(d1, d2)
        assert different_ideal(s).norm() == s.D


# ---------------------------------------------------------------------------
# trace slices


def test_trace_slice_examples():
    s = Setup(-3, -7)
    elems = enumerate_trace_slice(s, 1)
    assert [e.x for e in elems] == [-3, -1, 1, 3]
    assert [e.n for e in elems] == [3, 5, 5, 3]
    s34 = Setup(-3, -4)
    elems34 = enumerate_trace_slice(s34, 1)
    assert [e.x for e in elems34] == [-2, 0, 2]
    assert [e.n for e in elems34] == [2, 3, 2]


def test_trace_slice_invariants():
    for d1, d2 in MATRIX[:5]:
        s = Setup(d1, d2)
        for m in (1, 2, 3, 7):
            elems = enumerate_trace_slice(s, m)
            xs = [e.x for e in elems]
            assert xs == sorted(xs)
            assert xs == [-x for x in reversed(xs)]  # Galois-stable
            for e in elems:
                assert e.alpha.trace() == m
                assert e.alpha.is_totally_positive(s.D)
                gen = e.alpha.times_sqrtD(s.D)
                assert gen.is_integral(s.D)
                assert (e.x - m * s.D) % 2 == 0
                assert e.ideal.norm() == e.n == abs(gen.norm(s.D))


def test_trace_slice_rejects_bad_m():
    with pytest.raises(ValueError):
        enumerate_trace_slice(Setup(-3, -7), 0)


# ---------------------------------------------------------------------------
# local invariants


def test_support_example():
    s = Setup(-3, -7)
    alpha = FElem(Fraction(1, 2), Fraction(1, 42))
    assert support(s, alpha) == {5}


def test_support_odd_and_product_formula():
    from cmeis.field import _invariant_diagonal

    for d1, d2 in MATRIX[:4]:
        s = Setup(d1, d2)
        for m in (1, 2, 3):
            for e in enumerate_trace_slice(s, m):
                spt = support(s, e.alpha)
                assert len(spt) % 2 == 1
                # all invariants away from the diagonal's primes are +1, so
                # the product over these places is the full product formula
                places = {2, OO}
                for entry in _invariant_diagonal(s, e.alpha):
                    places.update(factor(abs(entry)).primes())
                assert spt <= places
                prod = 1
                for pl in places:
                    prod *= local_invariant(s, e.alpha, pl)
                assert prod == 1


def test_local_invariant_rejects_mixed():
    s = Setup(-3, -7)
    with pytest.raises(ValueError):
        support(s, FElem(Fraction(1, 2), Fraction(-5, 42)))


# ---------------------------------------------------------------------------
# factored ideals


def test_ideal_algebra():
    s = Setup(-3, -7)
    plus, minus = prime_ideals_above(s, 5)
    a = FIdealFactored.from_pairs([(plus, 2), (minus, 1)])
    b = FIdealFactored.from_pairs([(minus, -1)])
    assert (a * b).ord_at(minus) == 0
    assert (a * b).ord_at(plus) == 2
    assert a.norm() == 125
    assert not b.is_integral
    assert a.times(plus, -2).ord_at(plus) == 0


def _felem_mul(a: FElem, b: FElem, D: int) -> FElem:
    return FElem(a.u * b.u + a.v * b.v * D, a.u * b.v + a.v * b.u)


def test_split_valuation_powers_and_conjugation():
    s = Setup(-3, -7)
    plus, minus = prime_ideals_above(s, 5)
    base = FElem(Fraction(1), Fraction(1))  # 1 + sqrt(21), above 5: (0, 1)
    assert element_valuation(s, base, plus) == 0
    assert element_valuation(s, base, minus) == 1
    beta = base
    for k in range(1, 6):
        assert element_valuation(s, beta, minus) == k
        assert element_valuation(s, beta, plus) == 0
        # conjugation swaps the two primes above a split rational prime
        conj = beta.conjugate()
        assert element_valuation(s, conj, plus) == k
        assert element_valuation(s, conj, minus) == 0
        # rational scaling shifts both valuations together
        scaled = FElem(beta.u * 25, beta.v * 25)
        assert element_valuation(s, scaled, plus) == 2
        assert element_valuation(s, scaled, minus) == k + 2
        beta = _felem_mul(beta, base, s.D)


def test_valuations_recover_norm_order():
    rng = random.Random(3)
    for d1, d2 in MATRIX:
        s = Setup(d1, d2)
        for _ in range(60):
            beta = FElem(
                Fraction(rng.randint(-40, 40), rng.randint(1, 25)),
                Fraction(rng.randint(-40, 40), rng.randint(1, 25)),
            )
            if beta.is_zero:
                continue
            nrm = beta.norm(s.D)
            ps = set(factor(abs(nrm.numerator)).primes())
            ps |= set(factor(nrm.denominator).primes())
            for p in ps:
                got = sum(
                    prm.residue_degree * element_valuation(s, beta, prm)
                    for prm in prime_ideals_above(s, p)
                )
                assert got == padic_val(nrm, p)
