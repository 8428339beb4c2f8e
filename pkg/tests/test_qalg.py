"""Tests for the exact q/x arithmetic layer."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fkseries.qalg import (
    CycElem,
    HL_ONE,
    HalfLaurent,
    XSeries,
    cyclotomic_poly,
    expand_at_one,
    expand_at_root,
    poch_divide,
    poch_multiply,
    qbinom_balanced,
    quantum_brace,
    quantum_int,
    substitute_q_inverse,
)


def q(e2: int, c=1) -> HalfLaurent:
    return HalfLaurent.monomial(c, e2)


# ---------------------------------------------------------------- quantum_int

def test_quantum_int_zero():
    assert quantum_int(0).is_zero()


def test_quantum_int_two():
    assert quantum_int(2) == HalfLaurent({1: 1, -1: 1})


def test_quantum_int_minus_one():
    # oracle: (q^{-1/2}-q^{1/2})/(q^{1/2}-q^{-1/2}) = -1
    assert quantum_int(-1) == HalfLaurent.const(-1)


def test_quantum_int_negation_rule():
    for n in range(-6, 7):
        assert quantum_int(-n) == -quantum_int(n)


def test_quantum_brace_matches_int_times_brace_one():
    for n in range(-5, 6):
        assert quantum_brace(n) == quantum_int(n) * quantum_brace(1)


# ------------------------------------------------------------ qbinom_balanced

def test_qbinom_k_zero():
    for n in (-3, -1, 0, 2, 7):
        assert qbinom_balanced(n, 0) == HL_ONE


def test_qbinom_2_1():
    assert qbinom_balanced(2, 1) == HalfLaurent({2: 1, 0: 1})


def test_qbinom_neg1_2():
    assert qbinom_balanced(-1, 2) == HalfLaurent({-6: 1})


def test_qbinom_pochhammer_route():
    # [n k]_q = (q^n;q^{-1})_k / (q;q)_k
    for n in range(-8, 9):
        for k in range(0, 9):
            num = HL_ONE
            for t in range(k):
                num = num * (HL_ONE - q(2 * (n - t)))
            den = HL_ONE
            for t in range(k):
                den = den * (HL_ONE - q(2 * (1 + t)))
            assert qbinom_balanced(n, k) == num.divexact(den), (n, k)


def test_qbinom_balanced_times_shift_is_symmetric():
    # the undoubled binomial [n k] is invariant under q -> q^{-1}
    for n in range(0, 7):
        for k in range(0, n + 1):
            bal = qbinom_balanced(n, k).shift(-(n - k) * k)
            assert bal == bal.q_inverse(), (n, k)


# ------------------------------------------------------------------ divexact

def test_divexact_roundtrip():
    a = HalfLaurent({3: 2, 0: -1, -4: 5})
    b = HalfLaurent({2: 1, -1: 3})
    assert (a * b).divexact(b) == a


def test_divexact_rejects_inexact():
    with pytest.raises(ValueError):
        HalfLaurent({2: 1, 0: 1}).divexact(HalfLaurent({1: 1, 0: 1}))


# ------------------------------------------------------------ poch operations

def xs(d, order2=None):
    return XSeries({k: (v if isinstance(v, HalfLaurent) else HalfLaurent.const(v))
                    for k, v in d.items()}, order2)


def test_poch_multiply_empty():
    s = xs({0: 1, 2: 7}, order2=10)
    assert poch_multiply(s, (2, 2), 1, 0) == s


def test_poch_multiply_two_factors():
    # (1-qx)(1-q^2x) = 1 - (q+q^2)x + q^3x^2
    out = poch_multiply(xs({0: 1}), (2, 2), 1, 2)
    assert out == xs({0: 1, 2: HalfLaurent({2: -1, 4: -1}), 4: q(6)})


def test_poch_multiply_negative_x_power():
    out = poch_multiply(xs({0: 1}), (-2, -2), -1, 1)
    assert out == xs({0: 1, -2: q(-2, -1)})


def test_poch_divide_empty():
    s = xs({0: 1}, order2=6)
    assert poch_divide(s, (2, 2), 1, 0) == s


def test_poch_divide_geometric():
    # 1/(1-qx) = 1 + qx + q^2x^2 + O(x^3)
    out = poch_divide(xs({0: 1}, order2=6), (2, 2), 1, 1)
    assert out == xs({0: 1, 2: q(2), 4: q(4)}, order2=6)


def test_poch_divide_two_factors():
    # 1/((1-qx)(1-x)) = 1 + (q+1)x + O(x^2)
    out = poch_divide(xs({0: 1}, order2=4), (2, 2), -1, 2)
    assert out == xs({0: 1, 2: HalfLaurent({2: 1, 0: 1})}, order2=4)


def test_poch_divide_rejects_nonpositive_x():
    with pytest.raises(ValueError):
        poch_divide(xs({0: 1}, order2=4), (2, 0), 1, 1)
    with pytest.raises(ValueError):
        poch_divide(xs({0: 1}, order2=4), (2, -2), 1, 1)


# --------------------------------------------------------- substitution q^-1

def test_substitute_simple():
    s = xs({0: HalfLaurent({2: 1, 0: 1})})
    assert substitute_q_inverse(s) == xs({0: HalfLaurent({-2: 1, 0: 1})})


def test_substitute_zero():
    assert substitute_q_inverse(XSeries()).is_zero()


# --------------------------------------------------------------- expansions

def test_expand_at_one_square():
    assert expand_at_one(q(4), 2) == [1, 2, 1]


def test_expand_at_one_inverse():
    assert expand_at_one(q(-2), 2) == [1, -1, 1]


def test_expand_at_one_negative_powers():
    # coefficients of (1+h)^{-m} are (-1)^k binom(m+k-1, k)
    from math import comb
    for m in (1, 2, 5):
        got = expand_at_one(q(-2 * m), 4)
        want = [Fraction((-1) ** k * comb(m + k - 1, k)) for k in range(5)]
        assert got == want


def test_expand_at_one_half_power():
    # (1+h)^{1/2} = 1 + h/2 - h^2/8 + ...
    assert expand_at_one(q(1), 2) == [1, Fraction(1, 2), Fraction(-1, 8)]


def test_expand_at_one_finite_differences():
    import random

    rng = random.Random(7)
    for _ in range(12):
        c = HalfLaurent({2 * rng.randint(-4, 4): rng.randint(-5, 5) for _ in range(3)})
        if c.is_zero():
            continue
        coeffs = expand_at_one(c, 2)
        eps = Fraction(1, 10 ** 4)
        val = c.evaluate(1 + eps)
        approx = coeffs[0] + coeffs[1] * eps + coeffs[2] * eps ** 2
        scale = max(1, abs(val))
        assert abs(val - approx) / scale < Fraction(1, 10 ** 6)


def test_expand_at_root_linear():
    z = CycElem.root_power(3, 1)
    assert expand_at_root(q(2), 3, 1) == [z, CycElem.one(3)]


def test_expand_at_root_square():
    z = CycElem.root_power(3, 1)
    z2 = CycElem.root_power(3, 2)
    assert expand_at_root(q(4), 3, 1) == [z2, z * 2]


def test_expand_at_root_inverse_convolves_to_one():
    a = expand_at_root(q(2), 5, 3)
    b = expand_at_root(q(-2), 5, 3)
    for k in range(4):
        conv = CycElem.zero(5)
        for i in range(k + 1):
            conv = conv + a[i] * b[k - i]
        assert conv == (CycElem.one(5) if k == 0 else CycElem.zero(5))


def test_expand_at_root_rejects_half_powers():
    with pytest.raises(ValueError):
        expand_at_root(q(1), 3, 1)


# --------------------------------------------------------------- cyclotomics

def test_cyclotomic_polys():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(2) == (1, 1)
    assert cyclotomic_poly(3) == (1, 1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)


def test_cyc_relation_p3():
    z = CycElem.root_power(3, 1)
    assert z * z * z == CycElem.one(3)
    assert CycElem.one(3) + z + z * z == CycElem.zero(3)


def test_cyc_relation_p4():
    i = CycElem.root_power(4, 1)
    assert i * i == -CycElem.one(4)


def test_cyc_relation_p6():
    z = CycElem.root_power(6, 1)
    assert z * z * z == -CycElem.one(6)


# ---------------------------------------------------------------- properties

small_coeff = st.integers(min_value=-6, max_value=6)
small_exp = st.integers(min_value=-8, max_value=8)


@st.composite
def halflaurents(draw):
    n = draw(st.integers(min_value=0, max_value=4))
    return HalfLaurent({draw(small_exp): draw(small_coeff) for _ in range(n)})


@st.composite
def xseries(draw):
    n = draw(st.integers(min_value=0, max_value=3))
    coeffs = {draw(st.integers(min_value=-4, max_value=8)): draw(halflaurents())
              for _ in range(n)}
    return XSeries(coeffs, order2=12)


@given(halflaurents(), halflaurents(), halflaurents())
@settings(max_examples=60)
def test_hl_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


@given(xseries(), xseries(), xseries())
@settings(max_examples=40)
def test_xs_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert ((a * b) * c).truncate(8) == (a * (b * c)).truncate(8)
    assert (a * (b + c)).truncate(8) == (a * b + a * c).truncate(8)


@given(halflaurents())
@settings(max_examples=60)
def test_q_inverse_involution(a):
    assert a.q_inverse().q_inverse() == a


@given(xseries(), st.integers(min_value=0, max_value=4), st.integers(min_value=1, max_value=3))
@settings(max_examples=40)
def test_poch_roundtrip(s, qe, length):
    out = poch_divide(poch_multiply(s, (2 * qe, 2), 1, length), (2 * qe, 2), 1, length)
    assert out == s.truncate(out.order2)
