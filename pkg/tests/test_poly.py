from fractions import Fraction

import pytest
from hypothesis import given, settings

from flagpde import (
    GaussianRational,
    IMAG,
    Polynomial,
    TrigPolynomial,
    constant,
    variable,
)
from flagpde.poly import NonIntegrableTermError

from strategies import polynomials


x, y = variable("x"), variable("y")


def test_difference_of_squares():
    assert (x + y) * (x - y) == x**2 - y**2


def test_multiplication_by_zero_gives_empty_term_map():
    p = x**2 * y + 3 * x
    assert (p * Polynomial.zero()).terms == {}


def test_laurent_exponent_addition():
    xl = variable("x", laurent=True)
    p = (xl**2 * y) * Polynomial(("x",), {(-1,): Fraction(1)}, ("x",))
    assert p == xl * y


def test_negative_exponent_requires_laurent_flag():
    with pytest.raises(ValueError):
        Polynomial(("x",), {(-1,): Fraction(1)})


@given(
    polynomials(max_terms=20),
    polynomials(max_terms=20),
    polynomials(max_terms=20),
)
def test_add_associative(p, q, r):
    assert (p + q) + r == p + (q + r)


@given(
    polynomials(max_terms=20),
    polynomials(max_terms=20),
    polynomials(max_terms=20),
)
@settings(max_examples=60, deadline=None)
def test_mul_distributes(p, q, r):
    assert p * (q + r) == p * q + p * r


@given(polynomials(), polynomials())
def test_mul_commutative(p, q):
    assert p * q == q * p


def test_partial_derivative_examples():
    assert (x**2 * y).diff("x") == 2 * x * y
    assert x.diff("x", 2).is_zero()
    tl = variable("t", laurent=True)
    tm2 = Polynomial(("t",), {(-2,): Fraction(1)}, ("t",))
    assert tm2.diff("t") == Polynomial(("t",), {(-3,): Fraction(-2)}, ("t",))


def test_integration_examples():
    assert (x**2).integrate("x") == Fraction(1, 3) * x**3
    assert constant(1).integrate("x") == x
    tm1 = Polynomial(("t",), {(-1,): Fraction(1)}, ("t",))
    with pytest.raises(NonIntegrableTermError):
        tm1.integrate("t")


@given(polynomials())
def test_derivative_is_right_inverse_of_integration(p):
    assert p.integrate("x").diff("x") == p


def test_integrate_then_differentiate_loses_constant_term():
    p = x + 3
    assert p.diff("x").integrate("x") != p
    assert p.diff("x").integrate("x") == x


@given(polynomials(), polynomials())
def test_derivative_linear(p, q):
    assert (p + q).diff("x") == p.diff("x") + q.diff("x")


def test_canonical_order_is_graded_lex_descending():
    p = x + y**2 + x * y + 1
    keys = [term["exp"] for term in p.to_json_terms()]
    assert keys == [{"x": 1, "y": 1}, {"y": 2}, {"x": 1}, {}]


@given(polynomials(max_terms=8))
@settings(max_examples=60)
def test_json_round_trip_identity(p):
    data = p.to_json_terms()
    back = Polynomial.from_json_terms(data, p.vars)
    assert back == p
    assert back.to_json_terms() == data


def test_json_rationals_are_strings():
    p = Fraction(2, 3) * x + IMAG * y
    for term in p.to_json_terms():
        assert isinstance(term["re"], str) and isinstance(term["im"], str)


def test_gaussian_field_axioms():
    a = GaussianRational(Fraction(1, 2), Fraction(-3))
    b = GaussianRational(2, Fraction(1, 5))
    assert (a * b) * a.inverse() == b * (a * a.inverse())
    assert a * a.inverse() == 1
    assert a.conjugate() * a == a.abs2()
    assert (IMAG * IMAG) == -1


def test_gaussian_collapse_to_fraction_in_polynomial():
    p = (IMAG * x) * (IMAG * x)
    assert p == -(x**2)
    assert all(isinstance(c, Fraction) for c in p.terms.values())


def test_real_imag_split():
    p = x + IMAG * y
    assert p.real_part() == x
    assert p.imag_part() == y


def test_substitute_polynomial():
    p = x**2 + y
    z = variable("z")
    assert p.substitute("x", z + 1) == z**2 + 2 * z + 1 + y


def test_evaluate_numeric():
    p = x**2 * y - Fraction(1, 2)
    assert p.evaluate({"x": 2.0, "y": 3.0}) == pytest.approx(11.5)


def test_variable_order_does_not_affect_equality():
    p = Polynomial(("x", "y"), {(1, 2): Fraction(1)})
    q = Polynomial(("y", "x"), {(2, 1): Fraction(1)})
    assert p == q


# -- the trig ring -------------------------------------------------------------

def test_trig_time_derivative_of_cos():
    u = TrigPolynomial(constant(1), Polynomial.zero(), Fraction(3))
    du = u.diff_time()
    assert du.cos_part.is_zero()
    assert du.sin_part == constant(-3)


def test_trig_second_derivative_of_constant_cos_part():
    a = Fraction(2)
    u = TrigPolynomial(constant(5), Polynomial.zero(), a)
    ddu = u.diff_time().diff_time()
    assert ddu.cos_part == constant(-20)
    assert ddu.sin_part.is_zero()


def test_trig_harmonic_oscillator_kernel():
    a = Fraction(3, 2)
    u = TrigPolynomial(constant(2), constant(-7), a)
    ddu = u.diff_time().diff_time()
    result = TrigPolynomial(
        ddu.cos_part + a * a * u.cos_part, ddu.sin_part + a * a * u.sin_part, a
    )
    assert result.is_zero()


def test_trig_spatial_operators_act_componentwise():
    from flagpde import Derivative, Integrate, MultiplyBy

    u = TrigPolynomial(x**2, x * y, Fraction(1))
    out = Derivative("x").apply_trig(u)
    assert out.cos_part == 2 * x and out.sin_part == y
    out = MultiplyBy(y).apply_trig(u)
    assert out.cos_part == x**2 * y and out.sin_part == x * y**2
    with pytest.raises(TypeError):
        Integrate("x").apply_trig(u)
