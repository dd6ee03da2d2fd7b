"""Polynomial solution families for triangular (flag) equations.

Every generator in this module produces a BasisFamily: an indexed list of
exact polynomial solutions together with the operator they are solutions
of.  Annihilation is asserted at generation time, so a returned family is
already verified; linear independence and desk-scale completeness checks
live in ``verify_independence`` and the test suite's kernel oracles.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .combinatorics import multinomial, falling, tuples_with_sum_at_most
from .linalg import polys_rank
from .operators import (
    Compose,
    Derivative,
    Integrate,
    LinearOperator,
    MultiplyBy,
    NestedRightInverse,
    OperatorHypothesisError,
    Scale,
    SeriesConfig,
    Sum,
    VerificationError,
    operator_variables,
    operators_agree_on_sample,
    random_polynomial,
    solve_by_series,
)
from .poly import Polynomial, variable

__all__ = [
    "BasisElement",
    "BasisFamily",
    "ChainError",
    "FlagEquationSpec",
    "constant_coefficient_basis",
    "flag_basis",
    "harmonic_basis",
    "harmonic_element",
    "power_perturbation_solve",
    "riemannian_to_tx",
    "riemannian_wave_solution",
    "twisted_flag_solve",
]


class ChainError(ValueError):
    """The supplied sigma-chain does not satisfy its defining recursion."""


class BasisElement(NamedTuple):
    index: dict
    solution: Polynomial


@dataclass
class BasisFamily:
    elements: list[BasisElement]
    annihilator: LinearOperator
    truncation: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.elements)

    def solutions(self):
        return [e.solution for e in self.elements]

    def verify_annihilation(self) -> bool:
        for e in self.elements:
            if not self.annihilator(e.solution).is_zero():
                raise VerificationError(
                    f"family element {e.index} is not annihilated exactly"
                )
        return True

    def verify_independence(self) -> bool:
        sols = self.solutions()
        if polys_rank(sols) != len(sols):
            raise VerificationError("family elements are linearly dependent")
        return True

    def to_json(self):
        from .operators import op_to_json

        return {
            "elements": [
                {"indexMeta": {k: _json_scalar(v) for k, v in e.index.items()},
                 "solution": e.solution.to_json_terms()}
                for e in self.elements
            ],
            "annihilator": op_to_json(self.annihilator),
            "truncation": self.truncation,
            "verified": True,
        }


def _json_scalar(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, tuple):
        return list(v)
    return v


def _checked(elements, annihilator, truncation) -> BasisFamily:
    fam = BasisFamily(elements, annihilator, truncation)
    fam.verify_annihilation()
    return fam


def _default_vars(n: int):
    return tuple(f"x{i}" for i in range(1, n + 1))


# -- constant-coefficient equations -------------------------------------------

def constant_coefficient_basis(orders, cap: int) -> BasisFamily:
    """Solution basis of sum_i d^(m_i)/dx_i^(m_i) u = 0, truncated by index cap.

    Elements are indexed by (l1 in 0..m1-1, l2.., ln) with l2 + ... + ln <= cap.
    """
    orders = tuple(int(m) for m in orders)
    n = len(orders)
    if n < 2:
        raise ValueError("need at least two variables")
    if any(m < 1 for m in orders):
        raise ValueError("orders must be positive")
    vars_ = _default_vars(n)
    annihilator = Sum(Derivative(v, m) for v, m in zip(vars_, orders))
    elements = []
    for l1 in range(orders[0]):
        for rest in tuples_with_sum_at_most(n - 1, cap):
            sol = _constant_element(orders, (l1,) + rest, vars_)
            elements.append(BasisElement({"ell": (l1,) + rest}, sol))
    return _checked(elements, annihilator, {"cap": cap, "orders": list(orders)})


def _constant_element(orders, ell, vars_) -> Polynomial:
    n = len(orders)
    m1 = orders[0]
    ranges = [range(ell[i] // orders[i] + 1) for i in range(1, n)]
    terms = {}
    for ks in itertools.product(*ranges):
        big_k = sum(ks)
        coeff = Fraction((-1) ** big_k * multinomial(ks))
        coeff *= Fraction(math.factorial(ell[0]), math.factorial(ell[0] + big_k * m1))
        exp = [ell[0] + big_k * m1]
        for i, k in enumerate(ks, start=1):
            coeff *= falling(ell[i], k * orders[i])
            exp.append(ell[i] - k * orders[i])
        if coeff:
            key = tuple(exp)
            terms[key] = terms.get(key, Fraction(0)) + coeff
    return Polynomial(vars_, {e: c for e, c in terms.items() if c})


# -- harmonic polynomials ------------------------------------------------------

def harmonic_element(n: int, eps: int, ells, vars_=None) -> Polynomial:
    """One solution of the Laplace equation, indexed by eps in {0,1} and l2..ln.

    Alternating even-derivative reduction of the seed monomial x2^l2...xn^ln,
    with the x1 powers supplied by iterated double integration.
    """
    if vars_ is None:
        vars_ = _default_vars(n)
    ells = tuple(ells)
    terms = {}
    ranges = [range(l // 2 + 1) for l in ells]
    for rs in itertools.product(*ranges):
        big_r = sum(rs)
        num = Fraction((-1) ** big_r * multinomial(rs))
        for l, r in zip(ells, rs):
            num *= math.comb(l, 2 * r)
        den = (1 + 2 * eps * big_r) * multinomial([2 * r for r in rs])
        coeff = num / den
        if not coeff:
            continue
        exp = (eps + 2 * big_r,) + tuple(l - 2 * r for l, r in zip(ells, rs))
        terms[exp] = terms.get(exp, Fraction(0)) + coeff
    return Polynomial(vars_, {e: c for e, c in terms.items() if c})


def harmonic_basis(n: int, cap: int) -> BasisFamily:
    """Basis of the harmonic polynomials in n variables up to total degree cap."""
    if n < 2:
        raise ValueError("need at least two variables")
    vars_ = _default_vars(n)
    annihilator = Sum(Derivative(v, 2) for v in vars_)
    elements = []
    for eps in (0, 1):
        for ells in tuples_with_sum_at_most(n - 1, cap - eps):
            sol = harmonic_element(n, eps, ells, vars_)
            elements.append(BasisElement({"eps": eps, "ell": ells}, sol))
    return _checked(elements, annihilator, {"cap": cap, "n": n})


# -- general flag equations ------------------------------------------------------

@dataclass
class FlagEquationSpec:
    """Orders m1..mn and coefficients f1..f(n-1) of a triangular equation.

    The equation is d^(m1)/dx1 + f1 d^(m2)/dx2 + ... with f_i a polynomial in
    x1..xi only (checked on construction).
    """

    orders: tuple
    coefficients: tuple
    variables: tuple = ()

    def __post_init__(self):
        self.orders = tuple(int(m) for m in self.orders)
        n = len(self.orders)
        if not self.variables:
            self.variables = _default_vars(n)
        coeffs = []
        for c in self.coefficients:
            if isinstance(c, (int, Fraction)):
                c = Polynomial.const(c)
            coeffs.append(c)
        self.coefficients = tuple(coeffs)
        if len(self.coefficients) != n - 1:
            raise ValueError("need exactly n-1 coefficients")
        for i, c in enumerate(self.coefficients, start=1):
            allowed = set(self.variables[:i])
            extra = c.support_vars() - allowed
            if extra:
                from .operators import NotAFlagSystemError

                raise NotAFlagSystemError(
                    f"not a flag system: coefficient {i} depends on {sorted(extra)}"
                )

    def operator(self) -> LinearOperator:
        parts = [Derivative(self.variables[0], self.orders[0])]
        for i, c in enumerate(self.coefficients, start=1):
            parts.append(Compose(MultiplyBy(c), Derivative(self.variables[i], self.orders[i])))
        return Sum(parts)

    def nested_inverse(self, upto: int) -> NestedRightInverse:
        entries = [(Polynomial.const(1), Derivative(self.variables[0], self.orders[0]))]
        for i in range(1, upto):
            entries.append(
                (self.coefficients[i - 1], Derivative(self.variables[i], self.orders[i]))
            )
        return NestedRightInverse(entries)


def _sigma_step(spec: FlagEquationSpec, stage: int, h: Polynomial, ell: int) -> Polynomial:
    """Extend a solution in the first `stage` variables by seed x_(stage+1)^ell."""
    inv = spec.nested_inverse(stage)
    f = spec.coefficients[stage - 1]
    v = spec.variables[stage]
    m = spec.orders[stage]
    seed = variable(v) ** ell
    total = Polynomial.zero()
    i = 0
    dpart = seed
    while not dpart.is_zero():
        hpart = h
        for _ in range(i):
            hpart = -inv.apply(f * hpart)
        total = total + hpart * dpart
        dpart = dpart.diff(v, m)
        i += 1
    return total


def flag_basis(spec: FlagEquationSpec, cap: int) -> BasisFamily:
    """Solution basis of a triangular equation, built stage by stage.

    Elements carry index (l1 in 0..m1-1, l2.., ln) with l2 + ... + ln <= cap.
    """
    n = len(spec.orders)
    annihilator = spec.operator()
    elements = []
    for l1 in range(spec.orders[0]):
        for rest in tuples_with_sum_at_most(n - 1, cap):
            sol = variable(spec.variables[0]) ** l1
            for stage in range(1, n):
                sol = _sigma_step(spec, stage, sol, rest[stage - 1])
            elements.append(BasisElement({"ell": (l1,) + rest}, sol))
    return _checked(elements, annihilator, {"cap": cap, "orders": list(spec.orders)})


# -- wave equation in a Riemannian background ------------------------------------

def riemannian_wave_solution(g, n: int, f0: Polynomial, f1: Polynomial,
                             g0: Polynomial, g1: Polynomial) -> Polynomial:
    """Series solution in light-cone variables z0, z1 of the curved wave equation.

    `g` maps index pairs (i, j), 2 <= i, j <= n, to one-variable polynomial
    coefficients in z1.  f0 lives in z0, f1 in z1, g0 and g1 in the spatial
    variables x2..xn.  The result solves
    2 d/dz0 d/dz1 u + sum g_ij d/dxi d/dxj u = 0 exactly.
    """
    for (i, j), coeff in g.items():
        if not (2 <= i <= n and 2 <= j <= n):
            raise ValueError(f"coefficient index {(i, j)} out of range")
        bad = coeff.support_vars() - {"z1"}
        if bad:
            raise ValueError("coefficient not flag-compatible")
    for name, p, allowed in (
        ("f0", f0, {"z0"}),
        ("f1", f1, {"z1"}),
    ):
        if p.support_vars() - allowed:
            raise ValueError(f"{name} may only involve {sorted(allowed)}")
    spatial = {f"x{i}" for i in range(2, n + 1)}
    for name, p in (("g0", g0), ("g1", g1)):
        if p.support_vars() - spatial:
            raise ValueError(f"{name} may only involve the spatial variables")

    t1 = Compose(Scale(Fraction(2)), Derivative("z0"), Derivative("z1"))
    t1_inv = Compose(Scale(Fraction(1, 2)), Integrate("z0"), Integrate("z1"))
    t2 = Sum(
        Compose(MultiplyBy(coeff), Derivative(f"x{i}"), Derivative(f"x{j}"))
        for (i, j), coeff in sorted(g.items())
    )
    cfg = SeriesConfig(t1, t1_inv, t2)
    return solve_by_series(cfg, f0, g0) + solve_by_series(cfg, f1, g1)


def riemannian_to_tx(p: Polynomial) -> Polynomial:
    """Rewrite a light-cone solution via z0 = x1 + t, z1 = x1 - t."""
    t, x1 = variable("t"), variable("x1")
    return p.substitute("z0", x1 + t).substitute("z1", x1 - t)


# -- commuting power perturbations -----------------------------------------------

def power_perturbation_solve(t0, t0_inverse, perturbations, m: int,
                             h: Polynomial, g: Polynomial, seed: int = 0,
                             max_level: int | None = None) -> Polynomial:
    """Kernel element of T0^m - sum_p T0^(m-p) T_p from seeds h, g.

    T0 must commute with each perturbation and the perturbations with each
    other (checked on a random sample); T0^m must annihilate h.  The output
    is the multinomial series over tuples (i_1..i_m) weighting
    (T0inv)^(sum p*i_p)(h) with prod T_p^(i_p)(g), verified exactly.
    """
    perturbations = list(perturbations)
    if len(perturbations) != m:
        raise ValueError("need exactly m perturbation operators")
    vars_ = operator_variables(t0) | {v for op in perturbations for v in operator_variables(op)}
    vars_ |= set(h.vars) | set(g.vars)
    rng_seed = seed
    for idx, op in enumerate(perturbations):
        if not operators_agree_on_sample(Compose(t0, op), Compose(op, t0), vars_, seed=rng_seed):
            raise OperatorHypothesisError(
                f"power-perturbation hypotheses violated: T0 does not commute with T{idx + 1}"
            )
    for a in range(m):
        for b in range(a + 1, m):
            lhs = Compose(perturbations[a], perturbations[b])
            rhs = Compose(perturbations[b], perturbations[a])
            if not operators_agree_on_sample(lhs, rhs, vars_, seed=rng_seed):
                raise OperatorHypothesisError(
                    f"power-perturbation hypotheses violated: T{a + 1} and T{b + 1} do not commute"
                )
    hk = h
    for _ in range(m):
        hk = t0(hk)
    if not hk.is_zero():
        from .operators import KernelPreconditionError

        raise KernelPreconditionError("kernel precondition violated")

    if max_level is None:
        max_level = 2 + g.total_degree() * max(1, m)
    g_parts: dict[tuple, Polynomial] = {(0,) * m: g}

    def g_part(tup):
        if tup in g_parts:
            return g_parts[tup]
        for r in range(m):
            if tup[r]:
                prev = tup[:r] + (tup[r] - 1,) + tup[r + 1 :]
                out = perturbations[r](g_part(prev))
                break
        g_parts[tup] = out
        return out

    h_powers = [h]

    def h_part(w):
        while len(h_powers) <= w:
            h_powers.append(t0_inverse(h_powers[-1]))
        return h_powers[w]

    total = Polynomial.zero()
    level = 0
    while level <= max_level:
        alive = False
        for tup in _tuples_of_sum(m, level):
            gp = g_part(tup)
            if gp.is_zero():
                continue
            alive = True
            weight = sum((p + 1) * i for p, i in enumerate(tup))
            total = total + multinomial(tup) * h_part(weight) * gp
        if not alive and level > 0:
            break
        level += 1
    else:
        raise VerificationError("power-perturbation series did not terminate")

    # residual of T0^m - sum_p T0^(m-p) T_p
    res = total
    for _ in range(m):
        res = t0(res)
    for p, op in enumerate(perturbations, start=1):
        piece = op(total)
        for _ in range(m - p):
            piece = t0(piece)
        res = res - piece
    if not res.is_zero():
        raise VerificationError("power-perturbation output not annihilated exactly")
    return total


def _tuples_of_sum(length, total):
    from .combinatorics import tuples_with_sum

    return tuples_with_sum(length, total)


# -- twisted two-block equations ---------------------------------------------------

def twisted_flag_solve(d1, h: Polynomial, d2, f: Polynomial,
                       sigma_chain, psi: Polynomial) -> Polynomial:
    """Solution sum_s sigma_s * d2^s(psi) of (d1 - h*d2) u = 0.

    sigma_chain lists sigma_1..sigma_i; together with sigma_0 = f it must
    satisfy d1(sigma_1) = h*f and d1(sigma_s) = h*sigma_(s-1), and d2 must
    kill psi after i+1 applications.
    """
    chain = [f] + list(sigma_chain)
    if not d1(f).is_zero():
        raise ChainError("sigma-chain inconsistent with the defining recursion: d1(f) != 0")
    for s in range(1, len(chain)):
        if d1(chain[s]) != h * chain[s - 1]:
            raise ChainError(
                f"sigma-chain inconsistent with the defining recursion at step {s}"
            )
    depth = len(sigma_chain)
    probe = psi
    for _ in range(depth + 1):
        probe = d2(probe)
    if not probe.is_zero():
        raise ChainError("perturbation does not terminate on the seed within the chain length")

    total = Polynomial.zero()
    dpsi = psi
    for s in range(depth + 1):
        total = total + chain[s] * dpsi
        dpsi = d2(dpsi)
    residual = d1(total) - h * d2(total)
    if not residual.is_zero():
        raise VerificationError("twisted-flag output not annihilated exactly")
    return total
