import cmath
import math
from fractions import Fraction

import pytest

from knotqm.poly import (
    LOOP,
    ONE,
    ZERO,
    A,
    LaurentPoly,
    NumericParams,
    RationalFunc,
    format_jones,
    format_poly,
    jones_json,
    quantum_integer,
)


def test_arithmetic_basics():
    p = A ** 3 - LaurentPoly({-1: 2})
    assert p.terms == {3: 1, -1: -2}
    assert (p + (-p)).is_zero()
    assert p * ONE == p
    assert p * ZERO == ZERO
    assert (A ** -2) * (A ** 2) == ONE


def test_loop_value():
    assert LOOP == -(A ** 2) - A ** -2
    assert LOOP.mirror() == LOOP


def test_negative_power_of_nonmonomial_rejected():
    with pytest.raises(ValueError):
        LOOP ** -1


def test_exact_div():
    q = A ** 5 - LaurentPoly.constant(3)
    assert (LOOP * q).exact_div(LOOP) == q
    with pytest.raises(ArithmeticError):
        (A + ONE).exact_div(LOOP)


def test_mirror_and_shift():
    p = LaurentPoly({-3: 2, 5: -1})
    assert p.mirror() == LaurentPoly({3: 2, -5: -1})
    assert p.shift(2) == LaurentPoly({-1: 2, 7: -1})


def test_evaluate_at_phase():
    params = NumericParams.from_k(10)
    assert abs(LOOP.evaluate(params) - params.d_value) < 1e-12
    z = cmath.exp(0.3j)
    assert abs((A ** 2 + A ** -1).evaluate(z) - (z ** 2 + 1 / z)) < 1e-12


def test_params_from_k_and_theta_agree():
    p = NumericParams.from_k(7.5)
    q = NumericParams.from_theta(p.theta)
    assert abs(p.k - q.k) < 1e-9 and abs(p.d_value - q.d_value) < 1e-12
    assert abs(abs(p.A_value) - 1) < 1e-15
    assert abs(p.d_value + 2 * math.cos(math.pi / 9.5)) < 1e-12


def test_quantum_integers():
    assert quantum_integer(0) == ONE
    assert quantum_integer(1) == LOOP
    for n in range(1, 6):
        assert quantum_integer(n + 1) == LOOP * quantum_integer(n) - quantum_integer(n - 1)


def test_rational_canonical_form():
    r = RationalFunc(LOOP * (A ** 2 + ONE), LOOP * A ** 3)
    assert r == RationalFunc(A ** 2 + ONE, A ** 3)
    assert r.is_polynomial()
    assert r.as_poly() == A ** -1 + A ** -3
    s = RationalFunc(ONE, LOOP)
    assert not s.is_polynomial()
    assert (s * LOOP).as_poly() == ONE
    assert RationalFunc(ONE, LOOP) + RationalFunc(ONE, LOOP) == RationalFunc(ONE + ONE, LOOP)


def test_rational_equality_ignores_representation():
    assert RationalFunc(-ONE, -LOOP) == RationalFunc(ONE, LOOP)
    assert hash(RationalFunc(-ONE, -LOOP)) == hash(RationalFunc(ONE, LOOP))


def test_json_roundtrip():
    p = LaurentPoly({-7: 1, -3: 1, 1: 1, 9: -1})
    assert LaurentPoly.from_json(p.to_json()) == p
    r = RationalFunc(A + ONE, LOOP)
    assert RationalFunc.from_json(r.to_json()) == r


def test_format():
    assert format_poly(LOOP) == "-A^-2 - A^2"
    trefoil = LaurentPoly({-4: 1, -12: 1, -16: -1})
    assert format_jones(trefoil) == "q + q^3 - q^4"
    obj = jones_json(trefoil)
    assert obj["variable"] == "q"
    assert obj["terms"] == [[1, "1"], [3, "1"], [4, "-1"]]


def test_fractional_jones_variable():
    obj = jones_json(LaurentPoly({2: 1}))
    assert obj["variable"] == "q^(1/4)"
    assert obj["terms"] == [[-2, "1"]]
    assert format_poly(LaurentPoly({-2: 1}), "q", Fraction(1, 4)).startswith("q^")
