from fractions import Fraction

import pytest
from hypothesis import given, settings

from flagpde import (
    Compose,
    DampedIntegration,
    Derivative,
    GaussianRational,
    Integrate,
    MultiplyBy,
    NestedRightInverse,
    Polynomial,
    Scale,
    SeriesConfig,
    Sum,
    constant,
    right_inverse_series,
    solve_by_series,
    variable,
)
from flagpde.operators import (
    KernelPreconditionError,
    NotAFlagSystemError,
    OperatorHypothesisError,
    SeriesTerminationError,
    op_from_json,
    op_to_json,
)

from strategies import polynomials

x, y = variable("x"), variable("y")


def test_compose_multiply_after_derivative():
    op = Compose(MultiplyBy(x), Derivative("y", 2))
    assert op(y**2) == 2 * x


def test_sum_is_laplacian_on_radius_squared():
    op = Sum((Derivative("x", 2), Derivative("y", 2)))
    assert op(x**2 + y**2) == constant(4)


def test_chain_tricomi_on_monomial():
    x1, x2, x3 = variable("x1"), variable("x2"), variable("x3")
    op = Sum(
        (
            Derivative("x1", 2),
            Compose(MultiplyBy(x1), Derivative("x2", 2)),
            Compose(MultiplyBy(x2), Derivative("x3", 2)),
        )
    )
    assert op(x3**2) == 2 * x2


def test_compose_applies_right_to_left():
    op = Compose(Derivative("x"), MultiplyBy(x))
    # d/dx (x * p): on p = x it gives 2x, not 1
    assert op(x) == 2 * x


@given(polynomials(), polynomials())
@settings(max_examples=40)
def test_application_is_linear(p, q):
    op = Sum((Derivative("x", 2), Compose(MultiplyBy(y), Derivative("y"))))
    assert op(p + q) == op(p) + op(q)
    assert op(p * Fraction(3, 7)) == op(p) * Fraction(3, 7)


def test_scale_node():
    assert Scale(GaussianRational(0, 1))(x) == Polynomial(("x",), {(1,): GaussianRational(0, 1)})


def test_operator_json_round_trip():
    op = Sum(
        (
            Derivative("x", 2),
            Compose(MultiplyBy(x * y - 1), Integrate("y")),
            Scale(Fraction(1, 2)),
        )
    )
    data = op_to_json(op)
    back = op_from_json(data)
    p = x**2 * y + y**3
    assert back(p) == op(p)


# -- the series engine -----------------------------------------------------------


def _laplace_config(**kw):
    return SeriesConfig(Derivative("x", 2), Integrate("x", 2), Derivative("y", 2), **kw)


def test_series_solve_one_step():
    u = solve_by_series(_laplace_config(), x, y**2)
    assert u == x * y**2 - x**3 / Fraction(3)


def test_series_solve_empty_perturbation():
    cfg = SeriesConfig(Derivative("x", 2), Integrate("x", 2), Sum(()))
    assert solve_by_series(cfg, x, y**3) == x * y**3


def test_series_solve_two_steps_matches_quartic_kernel():
    u = solve_by_series(_laplace_config(), constant(1).with_variables(("x",)), y**4)
    assert u == y**4 - 6 * x**2 * y**2 + x**4
    # cross-check: brute-force kernel of the Laplacian on homogeneous quartics
    from flagpde.linalg import kernel_on_slice, monomials_of_degree, polys_in_span

    kernel = kernel_on_slice(
        Sum((Derivative("x", 2), Derivative("y", 2))), monomials_of_degree(("x", "y"), 4)
    )
    assert polys_in_span(kernel, [u])


def test_series_solve_rejects_bad_seed():
    with pytest.raises(KernelPreconditionError):
        solve_by_series(_laplace_config(), x**2, y**2)


def test_series_termination_guard():
    # a perturbation that never lowers the filtration: multiplication by y
    cfg = SeriesConfig(Derivative("x", 2), Integrate("x", 2), MultiplyBy(y))
    with pytest.raises(SeriesTerminationError, match="did not nilpotate"):
        solve_by_series(cfg, x, y)


def test_right_inverse_series_zero():
    assert right_inverse_series(_laplace_config(), Polynomial.zero(("x", "y"))).is_zero()


def test_right_inverse_series_constant():
    assert right_inverse_series(_laplace_config(), constant(1).with_variables(("x", "y"))) == x**2 / Fraction(2)


def test_right_inverse_series_quadratic():
    r = right_inverse_series(_laplace_config(), y**2)
    assert r == x**2 * y**2 / Fraction(2) - x**4 / Fraction(12)


@given(polynomials(max_terms=4, max_exp=3))
@settings(max_examples=25, deadline=None)
def test_right_inverse_series_property(f):
    cfg = _laplace_config()
    r = right_inverse_series(cfg, f)
    assert cfg.t1(r) + cfg.t2(r) == f


def test_config_validation_catches_wrong_inverse():
    with pytest.raises(OperatorHypothesisError):
        SeriesConfig(Derivative("x", 2), Integrate("x", 1), Derivative("y", 2))


# -- nested right inverses ---------------------------------------------------------


def test_single_block_is_iterated_integration():
    inv = NestedRightInverse([(1, Derivative("x", 3))])
    p = x**2 * y
    assert inv.apply(p) == p.integrate("x").integrate("x").integrate("x")


def test_nested_inverse_on_zero():
    inv = NestedRightInverse([(1, Derivative("x", 2)), (x, Derivative("y", 2))])
    assert inv.apply(Polynomial.zero(("x", "y"))).is_zero()


def test_nested_inverse_defining_identity():
    inv = NestedRightInverse([(1, Derivative("x", 2)), (x, Derivative("y", 2))])
    op = inv.as_operator()
    one = constant(1).with_variables(("x", "y"))
    r = inv.apply(one)
    assert r == x**2 / Fraction(2)
    assert op(r) == one
    for probe in (y**4, x * y**2 + y**3, (x + y) ** 3):
        assert op(inv.apply(probe)) == probe


def test_nested_inverse_rejects_non_flag_coefficients():
    with pytest.raises(NotAFlagSystemError):
        NestedRightInverse([(1, Derivative("x", 2)), (y, Derivative("y", 2))])


# -- damped integration -------------------------------------------------------------


def test_damped_integration_is_right_inverse():
    for a in (Fraction(1), Fraction(-2, 3), GaussianRational(0, 2)):
        inv = DampedIntegration(a, "t")
        d = Sum((Compose(Scale(a), Derivative("t")), Derivative("t", 2)))
        for p in (constant(1).with_variables(("t",)), variable("t") ** 3, variable("t") ** 5 - variable("t")):
            assert d(inv(p)) == p


def test_damped_integration_rejects_zero():
    with pytest.raises(ValueError):
        DampedIntegration(0, "t")
