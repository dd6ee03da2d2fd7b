"""Composable linear operators on the exact polynomial ring.

Operators are immutable expression trees over six generators: Derivative,
Integrate, MultiplyBy, Scale (scalar multiple of the identity), Sum and
Compose (applied right to left).  Application is exact and linear.  Two
extra lazily-evaluated nodes live here as well:

* ``DampedIntegration(a, t)``: the right inverse of a*d/dt + d^2/dt^2
  obtained by integrating the geometric expansion sum_r a^(-r-1) (-d/dt)^r.
* ``NestedRightInverse(entries)``: the right inverse of a triangular
  operator c1*D1^m1 + c2*D2^m2 + ... in which each coefficient may only
  involve variables of the earlier blocks; it evaluates the standard
  perturbation series per input rather than expanding an operator formula.

The module also hosts the series engine: given T1 with right inverse T1inv
and a perturbation T2 that is locally nilpotent relative to a filtration,
``solve_by_series`` produces the kernel element sum_i (-T1inv T2)^i (h*g)
and ``right_inverse_series`` the preimage sum_i (-T1inv T2)^i T1inv (f).
Both assert their defining identity exactly before returning.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .poly import (
    GaussianRational,
    NonIntegrableTermError,
    Polynomial,
    TrigPolynomial,
    coeff_imag,
    coeff_real,
)

__all__ = [
    "Compose",
    "DampedIntegration",
    "Derivative",
    "Integrate",
    "KernelPreconditionError",
    "MultiplyBy",
    "NestedRightInverse",
    "NotAFlagSystemError",
    "OperatorHypothesisError",
    "Scale",
    "SeriesConfig",
    "SeriesTerminationError",
    "Sum",
    "VerificationError",
    "ZERO_OPERATOR",
    "apply_operator",
    "identity",
    "op_from_json",
    "op_to_json",
    "operator_variables",
    "operators_agree_on_sample",
    "random_polynomial",
    "right_inverse_series",
    "solve_by_series",
]


class SeriesTerminationError(RuntimeError):
    """The perturbation series failed to reach zero within the safety bound."""


class KernelPreconditionError(ValueError):
    """The seed h is not annihilated by the unperturbed operator."""


class NotAFlagSystemError(ValueError):
    """A coefficient depends on variables of a later block."""


class OperatorHypothesisError(ValueError):
    """A sampled commutation hypothesis failed."""


class VerificationError(RuntimeError):
    """An exact post-condition of a solver did not hold."""


class LinearOperator:
    def apply(self, p: Polynomial) -> Polynomial:
        raise NotImplementedError

    def apply_trig(self, u: TrigPolynomial) -> TrigPolynomial:
        raise NotImplementedError

    def __call__(self, p):
        if isinstance(p, TrigPolynomial):
            return self.apply_trig(p)
        return self.apply(p)


@dataclass(frozen=True, eq=True)
class Derivative(LinearOperator):
    var: str
    order: int = 1

    def apply(self, p):
        return p.diff(self.var, self.order)

    def apply_trig(self, u):
        if self.var == u.time_var:
            out = u
            for _ in range(self.order):
                out = out.diff_time()
            return out
        return u.map_parts(lambda q: q.diff(self.var, self.order))


@dataclass(frozen=True, eq=True)
class Integrate(LinearOperator):
    var: str
    order: int = 1

    def apply(self, p):
        return p.integrate_n(self.var, self.order)

    def apply_trig(self, u):
        raise TypeError("integration is not defined on the trig-polynomial ring")


class MultiplyBy(LinearOperator):
    __slots__ = ("poly",)

    def __init__(self, poly: Polynomial):
        self.poly = poly

    def apply(self, p):
        return self.poly * p

    def apply_trig(self, u):
        return u.map_parts(lambda q: self.poly * q)

    def __eq__(self, other):
        return isinstance(other, MultiplyBy) and self.poly == other.poly

    def __repr__(self):
        return f"MultiplyBy({self.poly})"


class Scale(LinearOperator):
    """Scalar multiple of the identity operator."""

    __slots__ = ("scalar",)

    def __init__(self, scalar):
        self.scalar = scalar

    def apply(self, p):
        return p * self.scalar

    def apply_trig(self, u):
        return u.map_parts(lambda q: q * self.scalar)

    def __eq__(self, other):
        return isinstance(other, Scale) and self.scalar == other.scalar

    def __repr__(self):
        return f"Scale({self.scalar})"


class Sum(LinearOperator):
    __slots__ = ("ops",)

    def __init__(self, ops):
        self.ops = tuple(ops)

    def apply(self, p):
        out = Polynomial.zero(p.vars, p.laurent)
        for op in self.ops:
            out = out + op.apply(p)
        return out

    def apply_trig(self, u):
        out = None
        for op in self.ops:
            piece = op.apply_trig(u)
            out = piece if out is None else out + piece
        if out is None:
            return u.map_parts(lambda q: Polynomial.zero(q.vars, q.laurent))
        return out

    def __eq__(self, other):
        return isinstance(other, Sum) and self.ops == other.ops

    def __repr__(self):
        return f"Sum({list(self.ops)})"


class Compose(LinearOperator):
    """Composition, applied right to left: Compose(A, B)(p) = A(B(p))."""

    __slots__ = ("ops",)

    def __init__(self, *ops):
        if len(ops) == 1 and isinstance(ops[0], (list, tuple)):
            ops = tuple(ops[0])
        self.ops = tuple(ops)

    def apply(self, p):
        for op in reversed(self.ops):
            p = op.apply(p)
        return p

    def apply_trig(self, u):
        for op in reversed(self.ops):
            u = op.apply_trig(u)
        return u

    def __eq__(self, other):
        return isinstance(other, Compose) and self.ops == other.ops

    def __repr__(self):
        return f"Compose({list(self.ops)})"


ZERO_OPERATOR = Sum(())


def identity() -> LinearOperator:
    return Compose()


class DampedIntegration(LinearOperator):
    """Right inverse of a*d/dt + (d/dt)^2 for a nonzero exact scalar a.

    Applies the finite expansion sum_r a^(-r-1) (-d/dt)^r (the input is a
    polynomial, so the sum stops at its t-degree) and then integrates once.
    """

    __slots__ = ("a", "tvar")

    def __init__(self, a, tvar: str = "t"):
        if not a:
            raise ValueError("degenerate dissipation")
        if isinstance(a, int):
            a = Fraction(a)
        self.a = a
        self.tvar = tvar

    def apply(self, p):
        from .poly import coeff_inverse

        ainv = coeff_inverse(self.a)
        acc = Polynomial.zero(p.vars, p.laurent)
        term = p
        factor = ainv
        while not term.is_zero():
            acc = acc + term * factor
            term = -term.diff(self.tvar)
            factor = factor * ainv
        return acc.integrate(self.tvar)

    def __eq__(self, other):
        return (
            isinstance(other, DampedIntegration)
            and self.a == other.a
            and self.tvar == other.tvar
        )

    def __repr__(self):
        return f"DampedIntegration({self.a}, {self.tvar!r})"


class NestedRightInverse(LinearOperator):
    """Right inverse of c1*Dv1^m1 + c2*Dv2^m2 + ... built block by block.

    Entry k is a pair (coefficient, Derivative(vk, mk)).  The first
    coefficient must be a nonzero constant and the k-th coefficient may only
    involve the variables v1..v(k-1); this triangular shape guarantees the
    perturbation series terminates on every polynomial input.
    """

    __slots__ = ("coeffs", "vars_", "orders")

    def __init__(self, entries):
        coeffs, vars_, orders = [], [], []
        for coeff, deriv in entries:
            if not isinstance(deriv, Derivative):
                raise TypeError("each entry needs a Derivative as its second item")
            if isinstance(coeff, (int, Fraction, GaussianRational)):
                coeff = Polynomial.const(coeff)
            coeffs.append(coeff)
            vars_.append(deriv.var)
            orders.append(deriv.order)
        if len(set(vars_)) != len(vars_):
            raise NotAFlagSystemError("not a flag system: repeated block variable")
        if not coeffs:
            raise ValueError("at least one block is required")
        if coeffs[0].support_vars():
            raise NotAFlagSystemError("not a flag system: leading coefficient must be constant")
        if coeffs[0].is_zero():
            raise NotAFlagSystemError("not a flag system: leading coefficient is zero")
        for k, c in enumerate(coeffs[1:], start=2):
            allowed = set(vars_[: k - 1])
            extra = c.support_vars() - allowed
            if extra:
                raise NotAFlagSystemError(
                    f"not a flag system: coefficient {k} depends on {sorted(extra)}"
                )
        self.coeffs = tuple(coeffs)
        self.vars_ = tuple(vars_)
        self.orders = tuple(orders)

    def as_operator(self) -> LinearOperator:
        """The triangular operator this object inverts."""
        return Sum(
            Compose(MultiplyBy(c), Derivative(v, m))
            for c, v, m in zip(self.coeffs, self.vars_, self.orders)
        )

    def apply(self, p):
        return self._stage(len(self.coeffs), p)

    def _stage(self, s: int, q: Polynomial) -> Polynomial:
        if s == 1:
            lead = self.coeffs[0].constant_term()
            from .poly import coeff_inverse

            return q.integrate_n(self.vars_[0], self.orders[0]) * coeff_inverse(lead)
        v, m = self.vars_[s - 1], self.orders[s - 1]
        f = self.coeffs[s - 1]
        total = Polynomial.zero(q.vars, q.laurent)
        w = q
        i = 0
        while not w.is_zero():
            u = self._stage(s - 1, w)
            for _ in range(i):
                u = -self._stage(s - 1, f * u)
            total = total + u
            w = w.diff(v, m)
            i += 1
        return total

    def __repr__(self):
        blocks = ", ".join(
            f"({c})*d{v}^{m}" for c, v, m in zip(self.coeffs, self.vars_, self.orders)
        )
        return f"NestedRightInverse[{blocks}]"


def apply_operator(op: LinearOperator, p):
    """Apply an operator to a Polynomial or TrigPolynomial."""
    return op(p)


def operator_variables(op: LinearOperator) -> frozenset:
    if isinstance(op, (Derivative, Integrate)):
        return frozenset((op.var,))
    if isinstance(op, MultiplyBy):
        return frozenset(op.poly.vars)
    if isinstance(op, Scale):
        return frozenset()
    if isinstance(op, (Sum, Compose)):
        out = frozenset()
        for sub in op.ops:
            out |= operator_variables(sub)
        return out
    if isinstance(op, DampedIntegration):
        return frozenset((op.tvar,))
    if isinstance(op, NestedRightInverse):
        out = frozenset(op.vars_)
        for c in op.coeffs:
            out |= frozenset(c.vars)
        return out
    raise TypeError(f"unknown operator node {type(op)!r}")


def max_derivative_order(op: LinearOperator) -> int:
    if isinstance(op, Derivative):
        return op.order
    if isinstance(op, (Sum, Compose)):
        return max((max_derivative_order(sub) for sub in op.ops), default=0)
    return 0


def random_polynomial(rng: random.Random, vars, max_terms=5, max_degree=3, laurent=()):
    """A small random exact polynomial, used for sampled operator identities."""
    vars = tuple(vars)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exp = tuple(rng.randint(0, max_degree) for _ in vars)
        c = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        if not c:
            c = Fraction(1)
        terms[exp] = terms.get(exp, Fraction(0)) + c
    terms = {e: c for e, c in terms.items() if c}
    return Polynomial(vars, terms, laurent)


def operators_agree_on_sample(op_a, op_b, vars, seed=0, samples=5) -> bool:
    rng = random.Random(seed)
    vars = tuple(vars) or ("x",)
    for _ in range(samples):
        p = random_polynomial(rng, vars)
        if op_a(p) != op_b(p):
            return False
    return True


@dataclass
class SeriesConfig:
    """Hypotheses for the perturbation series: T1 with right inverse, plus T2.

    On construction (unless validate=False) the right-inverse law
    T1(T1inv(p)) = p is checked on a seeded random polynomial sample.
    max_iterations is only a safety valve; termination is detected by the
    series hitting the exact zero polynomial.
    """

    t1: LinearOperator
    t1_inverse: LinearOperator
    t2: LinearOperator
    max_iterations: int | None = None
    seed: int = 0
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.validate:
            vars = operator_variables(self.t1) | operator_variables(self.t1_inverse)
            composed = Compose(self.t1, self.t1_inverse)
            if not operators_agree_on_sample(composed, identity(), vars, seed=self.seed):
                raise OperatorHypothesisError(
                    "t1_inverse is not a right inverse of t1 on the sampled polynomials"
                )

    def iteration_bound(self, seed_poly: Polynomial) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return 2 + seed_poly.total_degree() * max(1, max_derivative_order(self.t2))


def solve_by_series(cfg: SeriesConfig, h: Polynomial, g: Polynomial) -> Polynomial:
    """Kernel element sum_i (-T1inv T2)^i (h*g) of T1 + T2, verified exactly."""
    if not cfg.t1(h).is_zero():
        raise KernelPreconditionError("kernel precondition violated")
    seed = h * g
    total = seed
    term = seed
    bound = cfg.iteration_bound(seed)
    for _ in range(bound):
        if term.is_zero():
            break
        term = -cfg.t1_inverse(cfg.t2(term))
        total = total + term
    else:
        if not term.is_zero():
            raise SeriesTerminationError("series did not nilpotate")
    residual = cfg.t1(total) + cfg.t2(total)
    if not residual.is_zero():
        raise VerificationError(f"series output is not annihilated; residual {residual}")
    return total


def right_inverse_series(cfg: SeriesConfig, f: Polynomial) -> Polynomial:
    """Preimage of f under T1 + T2 via sum_i (-T1inv T2)^i T1inv, verified exactly."""
    term = cfg.t1_inverse(f)
    total = term
    bound = cfg.iteration_bound(term)
    for _ in range(bound):
        if term.is_zero():
            break
        term = -cfg.t1_inverse(cfg.t2(term))
        total = total + term
    else:
        if not term.is_zero():
            raise SeriesTerminationError("series did not nilpotate")
    residual = cfg.t1(total) + cfg.t2(total) - f
    if not residual.is_zero():
        raise VerificationError(f"right inverse output mismatch; residual {residual}")
    return total


# -- JSON form ----------------------------------------------------------------

def op_to_json(op: LinearOperator):
    if isinstance(op, Derivative):
        return {"op": "derivative", "var": op.var, "order": op.order}
    if isinstance(op, Integrate):
        return {"op": "integrate", "var": op.var, "order": op.order}
    if isinstance(op, MultiplyBy):
        return {
            "op": "mulpoly",
            "variables": list(op.poly.vars),
            "laurent": sorted(op.poly.laurent),
            "terms": op.poly.to_json_terms(),
        }
    if isinstance(op, Scale):
        return {
            "op": "scale",
            "re": str(coeff_real(op.scalar)),
            "im": str(coeff_imag(op.scalar)),
        }
    if isinstance(op, Sum):
        return {"op": "sum", "terms": [op_to_json(sub) for sub in op.ops]}
    if isinstance(op, Compose):
        return {"op": "compose", "factors": [op_to_json(sub) for sub in op.ops]}
    if isinstance(op, DampedIntegration):
        return {
            "op": "damped_integration",
            "var": op.tvar,
            "re": str(coeff_real(op.a)),
            "im": str(coeff_imag(op.a)),
        }
    raise TypeError(f"operator {type(op)!r} has no JSON form")


def op_from_json(data) -> LinearOperator:
    kind = data["op"]
    if kind == "derivative":
        return Derivative(data["var"], data.get("order", 1))
    if kind == "integrate":
        return Integrate(data["var"], data.get("order", 1))
    if kind == "mulpoly":
        poly = Polynomial.from_json_terms(
            data["terms"], data.get("variables"), data.get("laurent", ())
        )
        return MultiplyBy(poly)
    if kind == "scale":
        c = GaussianRational(Fraction(data["re"]), Fraction(data.get("im", "0")))
        return Scale(c.re if not c.im else c)
    if kind == "sum":
        return Sum(op_from_json(t) for t in data["terms"])
    if kind == "compose":
        return Compose([op_from_json(t) for t in data["factors"]])
    if kind == "damped_integration":
        c = GaussianRational(Fraction(data["re"]), Fraction(data.get("im", "0")))
        return DampedIntegration(c.re if not c.im else c, data["var"])
    raise ValueError(f"unknown operator tag {kind!r}")
