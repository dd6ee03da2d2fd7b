"""Polynomial representations: orthogonal, special linear, and the rank-two
exceptional algebra acting on seven variables.

Generators act as first-order operators sum c * x_i d/dx_j.  The orthogonal
family acts on F[x1..xn], the special linear family on F[x.., y..] with the
contragredient twist on the y block, and the exceptional family through
explicit seven-by-seven matrices over the quadratic field Q(sqrt(2)).
Module bases are produced by the same perturbation-series shapes as the
flag solvers; a brute-force kernel oracle over graded monomial slices
supplies ground truth for dimensions and spans.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .bases import BasisElement, BasisFamily, _checked, harmonic_element
from .combinatorics import multinomial, tuples_with_sum
from .linalg import (
    kernel_on_slice,
    matrix_rank,
    monomials_of_degree,
    polys_rank,
    polys_to_matrix,
)
from .operators import (
    Compose,
    Derivative,
    LinearOperator,
    MultiplyBy,
    Scale,
    Sum,
    VerificationError,
)
from .poly import IMAG, Polynomial, variable

__all__ = [
    "PairOperator",
    "QuadExt",
    "SingularConfig",
    "commutation_checks",
    "g2_bracket_report",
    "g2_invariant",
    "g2_laplacian",
    "g2_matrices",
    "g2_module_basis",
    "g2_polynomial_action",
    "harmonic_module_basis",
    "kernel_oracle",
    "select_g2_laplacian_reading",
    "sl_cartan",
    "sl_generator",
    "sl_invariant",
    "sl_laplacian",
    "sl_module_basis",
    "so_generator",
    "so_highest_harmonic",
    "so_singular_config",
    "verify_singular",
]


# -- small exact quadratic extension -------------------------------------------

class QuadExt:
    """p + q*sqrt(2) with rational p, q; exact field arithmetic."""

    __slots__ = ("p", "q")

    def __init__(self, p=0, q=0):
        object.__setattr__(self, "p", Fraction(p))
        object.__setattr__(self, "q", Fraction(q))

    def __setattr__(self, *_):
        raise AttributeError("QuadExt is immutable")

    def __add__(self, other):
        other = _as_quad(other)
        return QuadExt(self.p + other.p, self.q + other.q)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_quad(other)
        return QuadExt(self.p - other.p, self.q - other.q)

    def __rsub__(self, other):
        return _as_quad(other) - self

    def __mul__(self, other):
        other = _as_quad(other)
        return QuadExt(
            self.p * other.p + 2 * self.q * other.q,
            self.p * other.q + self.q * other.p,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return QuadExt(-self.p, -self.q)

    def __eq__(self, other):
        other = _as_quad(other)
        return self.p == other.p and self.q == other.q

    def __bool__(self):
        return bool(self.p) or bool(self.q)

    def __repr__(self):
        return f"QuadExt({self.p}, {self.q})"


def _as_quad(v):
    if isinstance(v, QuadExt):
        return v
    return QuadExt(v)


SQRT2 = QuadExt(0, 1)


def _mat_zero(n=7):
    return [[QuadExt() for _ in range(n)] for _ in range(n)]


def _unit(i, j, scale=1, n=7):
    m = _mat_zero(n)
    m[i - 1][j - 1] = _as_quad(scale)
    return m


def _mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mat_scale(a, s):
    s = _as_quad(s)
    return [[x * s for x in row] for row in a]


def _mat_mul(a, b):
    n = len(a)
    out = _mat_zero(n)
    for i in range(n):
        for k in range(n):
            if not a[i][k]:
                continue
            aik = a[i][k]
            for j in range(n):
                if b[k][j]:
                    out[i][j] = out[i][j] + aik * b[k][j]
    return out


def mat_bracket(a, b):
    return _mat_add(_mat_mul(a, b), _mat_scale(_mat_mul(b, a), -1))


def _mat_eq(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _mat_combine(*pieces):
    out = _mat_zero()
    for scale, i, j in pieces:
        out = _mat_add(out, _unit(i, j, scale))
    return out


def g2_matrices():
    """The fourteen generators inside sl(7), with exact sqrt(2) entries."""
    s2 = SQRT2
    mats = {
        "h1": _mat_combine((-2, 2, 2), (1, 3, 3), (1, 4, 4), (2, 5, 5), (-1, 6, 6), (-1, 7, 7)),
        "h2": _mat_combine((1, 2, 2), (-1, 3, 3), (-1, 5, 5), (1, 6, 6)),
        "E1": _mat_combine((s2, 1, 2), (-s2, 5, 1), (-1, 3, 7), (1, 4, 6)),
        "E2": _mat_combine((1, 2, 3), (-1, 6, 5)),
        "E3": _mat_combine((s2, 1, 3), (-s2, 6, 1), (1, 2, 7), (-1, 4, 5)),
        "E4": _mat_combine((s2, 1, 7), (-s2, 4, 1), (1, 6, 2), (-1, 5, 3)),
        "E5": _mat_combine((1, 4, 2), (-1, 5, 7)),
        "E6": _mat_combine((1, 4, 3), (-1, 6, 7)),
        "F1": _mat_combine((s2, 2, 1), (-s2, 1, 5), (-1, 7, 3), (1, 6, 4)),
        "F2": _mat_combine((1, 3, 2), (-1, 5, 6)),
        "F3": _mat_combine((s2, 3, 1), (-s2, 1, 6), (1, 7, 2), (-1, 5, 4)),
        "F4": _mat_combine((s2, 7, 1), (-s2, 1, 4), (1, 2, 6), (-1, 3, 5)),
        "F5": _mat_combine((1, 2, 4), (-1, 7, 5)),
        "F6": _mat_combine((1, 3, 4), (-1, 7, 6)),
    }
    return mats


def _mat_to_vector(m):
    out = []
    for row in m:
        for entry in row:
            out.append(entry.p)
            out.append(entry.q)
    return out


def g2_bracket_report():
    """Exact structure checks: defining brackets, tracelessness, closure."""
    mats = g2_matrices()
    checks = {}
    checks["E3 = [E1,E2]"] = _mat_eq(mat_bracket(mats["E1"], mats["E2"]), mats["E3"])
    checks["[E1,E3] = 2 E4"] = _mat_eq(
        mat_bracket(mats["E1"], mats["E3"]), _mat_scale(mats["E4"], 2)
    )
    checks["[E1,E4] = 3 E5"] = _mat_eq(
        mat_bracket(mats["E1"], mats["E4"]), _mat_scale(mats["E5"], 3)
    )
    checks["E6 = [E5,E2]"] = _mat_eq(mat_bracket(mats["E5"], mats["E2"]), mats["E6"])
    checks["traceless"] = all(
        sum((m[i][i] for i in range(7)), QuadExt()) == QuadExt() for m in mats.values()
    )
    names = sorted(mats)
    basis_rows = [_mat_to_vector(mats[n]) for n in names]
    base_rank = matrix_rank(basis_rows)
    closed = base_rank == 14
    for a, b in itertools.combinations(names, 2):
        v = _mat_to_vector(mat_bracket(mats[a], mats[b]))
        if matrix_rank(basis_rows + [v]) != base_rank:
            closed = False
            break
    checks["closure"] = closed
    return checks


# -- polynomial actions -----------------------------------------------------------

def _first_order(coeff_pairs) -> LinearOperator:
    """sum c * x_i d/dx_j from a list of (c, i, j); c is an exact scalar."""
    parts = []
    for c, i, j in coeff_pairs:
        if not c:
            continue
        parts.append(
            Compose(MultiplyBy(variable(f"x{i}") * c), Derivative(f"x{j}", 1))
        )
    return Sum(parts)


def so_generator(n: int, i: int, j: int) -> LinearOperator:
    """Rotation generator x_i d/dx_j - x_j d/dx_i."""
    if not (1 <= i < j <= n):
        raise ValueError("need 1 <= i < j <= n")
    return _first_order([(Fraction(1), i, j), (Fraction(-1), j, i)])


def sl_generator(n: int, i: int, j: int) -> LinearOperator:
    """x_i d/dx_j - y_j d/dy_i on the doubled variable set."""
    parts = [
        Compose(MultiplyBy(variable(f"x{i}")), Derivative(f"x{j}", 1)),
        Compose(MultiplyBy(-variable(f"y{j}")), Derivative(f"y{i}", 1)),
    ]
    return Sum(parts)


def sl_cartan(n: int):
    """Diagonal differences h_i = E_ii - E_(i+1)(i+1), i = 1..n-1."""
    return [
        Sum((sl_generator(n, i, i), Compose(Scale(Fraction(-1)), sl_generator(n, i + 1, i + 1))))
        for i in range(1, n)
    ]


def sl_invariant(n: int) -> Polynomial:
    out = Polynomial.zero()
    for i in range(1, n + 1):
        out = out + variable(f"x{i}") * variable(f"y{i}")
    return out


def sl_laplacian(n: int) -> LinearOperator:
    return Sum(
        Compose(Derivative(f"x{i}", 1), Derivative(f"y{i}", 1)) for i in range(1, n + 1)
    )


@dataclass
class PairOperator:
    """rational + sqrt(2) * radical, acting on rational-coefficient polynomials."""

    name: str
    rational: LinearOperator
    radical: LinearOperator

    def apply(self, p: Polynomial):
        return self.rational(p), self.radical(p)

    def annihilates(self, p: Polynomial) -> bool:
        a, b = self.apply(p)
        return a.is_zero() and b.is_zero()


def g2_polynomial_action():
    """The fourteen generators as first-order operators on F[x1..x7]."""
    mats = g2_matrices()
    out = {}
    for name, m in mats.items():
        rat = [(m[i][j].p, i + 1, j + 1) for i in range(7) for j in range(7) if m[i][j].p]
        rad = [(m[i][j].q, i + 1, j + 1) for i in range(7) for j in range(7) if m[i][j].q]
        out[name] = PairOperator(name, _first_order(rat), _first_order(rad))
    return out


def g2_invariant() -> Polynomial:
    x = [variable(f"x{i}") for i in range(1, 8)]
    return x[0] * x[0] + 2 * x[1] * x[4] + 2 * x[2] * x[5] + 2 * x[3] * x[6]


def g2_laplacian(first_var: int = 1) -> LinearOperator:
    """The invariant second-order operator; first_var selects which variable
    carries the pure square term (the commutation suite fixes the choice)."""
    parts = [Derivative(f"x{first_var}", 2)]
    for a, b in ((2, 5), (3, 6), (4, 7)):
        parts.append(
            Compose(Scale(Fraction(2)), Derivative(f"x{a}", 1), Derivative(f"x{b}", 1))
        )
    return Sum(parts)


def select_g2_laplacian_reading(max_degree: int = 3):
    """Pick the reading of the invariant Laplacian that commutes with the action.

    Both candidate leading terms are tested against the generators and the
    eta-multiplication identity on monomials up to max_degree; exactly one
    survives and is returned as (first_var, report).
    """
    eta = g2_invariant()
    action = g2_polynomial_action()
    x_vars = tuple(f"x{i}" for i in range(1, 8))
    results = {}
    for first_var in (1, 2):
        lap = g2_laplacian(first_var)
        ok = True
        for d in range(max_degree + 1):
            for mono in monomials_of_degree(x_vars, d):
                lhs = lap(eta * mono)
                rhs = eta * lap(mono) + 14 * mono + 4 * _euler_operator(x_vars)(mono)
                if lhs != rhs:
                    ok = False
                    break
                for gen in action.values():
                    a, b = gen.apply(mono)
                    ra, rb = gen.apply(lap(mono))
                    if lap(a) != ra or lap(b) != rb:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        results[first_var] = ok
    chosen = [fv for fv, ok in results.items() if ok]
    if len(chosen) != 1:
        raise VerificationError(f"laplacian reading not uniquely selected: {results}")
    return chosen[0], results


def _euler_operator(vars_) -> LinearOperator:
    return Sum(
        Compose(MultiplyBy(variable(v)), Derivative(v, 1)) for v in vars_
    )


# -- module bases ------------------------------------------------------------------

def harmonic_module_basis(n: int, k: int) -> BasisFamily:
    """Basis of the degree-k harmonic polynomials in n variables."""
    if n < 2 or k < 0:
        raise ValueError("need n >= 2 and k >= 0")
    vars_ = tuple(f"x{i}" for i in range(1, n + 1))
    annihilator = Sum(Derivative(v, 2) for v in vars_)
    elements = []
    for eps in (0, 1):
        if eps > k:
            continue
        for ells in tuples_with_sum(n - 1, k - eps):
            sol = harmonic_element(n, eps, ells, vars_)
            elements.append(BasisElement({"eps": eps, "ell": ells}, sol))
    return _checked(elements, annihilator, {"n": n, "k": k})


def _sl_branch_element(n, lead, pairs, swap: bool) -> Polynomial:
    """One alternating contraction series element for the doubled variables.

    lead is the power of x1 (or y1 when swap), pairs lists (m_r, l_r) for
    r = 2..n; index r contracts x_r against y_r and pumps the contracted
    degree into the x1 y1 corner.
    """
    x_name = "y1" if swap else "x1"
    y_name = "x1" if swap else "y1"
    terms = {}
    vars_ = tuple(f"x{i}" for i in range(1, n + 1)) + tuple(f"y{i}" for i in range(1, n + 1))
    index = {v: i for i, v in enumerate(vars_)}
    ranges = [range(min(m, l) + 1) for m, l in pairs]
    for tup in itertools.product(*ranges):
        big = sum(tup)
        coeff = Fraction((-1) ** big * math.factorial(lead), math.factorial(lead + big))
        exp = [0] * (2 * n)
        for r, (i_r, (m_r, l_r)) in enumerate(zip(tup, pairs), start=2):
            coeff *= math.comb(m_r, i_r) * math.comb(l_r, i_r) * math.factorial(i_r)
            exp[index[f"x{r}"]] = m_r - i_r
            exp[index[f"y{r}"]] = l_r - i_r
        exp[index[x_name]] = lead + big
        exp[index[y_name]] = big
        key = tuple(exp)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return Polynomial(vars_, {e: c for e, c in terms.items() if c})


def sl_module_basis(n: int, l1: int, l2: int, check: bool = False) -> BasisFamily:
    """Basis of the contraction-free bidegree (l1, l2) module on x.., y..

    Two branches: the first pumps surplus x1 powers (lead m with
    m + sum m_r = l1, sum l_r = l2), the second symmetrically pumps y1
    (lead m' >= 1 with sum m'_r = l1, m' + sum l'_r = l2); every element is
    killed by the contraction operator sum d/dx_i d/dy_i.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    annihilator = sl_laplacian(n)
    elements = []
    for m in range(l1 + 1):
        for ms in tuples_with_sum(n - 1, l1 - m):
            for ls in tuples_with_sum(n - 1, l2):
                sol = _sl_branch_element(n, m, list(zip(ms, ls)), swap=False)
                elements.append(
                    BasisElement({"branch": 1, "m": m, "mr": ms, "lr": ls}, sol)
                )
    for mp in range(1, l2 + 1):
        for ms in tuples_with_sum(n - 1, l1):
            for ls in tuples_with_sum(n - 1, l2 - mp):
                sol = _sl_branch_element(n, mp, list(zip(ms, ls)), swap=True)
                elements.append(
                    BasisElement({"branch": 2, "m": mp, "mr": ms, "lr": ls}, sol)
                )
    fam = _checked(elements, annihilator, {"n": n, "l1": l1, "l2": l2})
    if check:
        fam.verify_independence()
        from .linalg import bidegree_monomials

        x_vars = tuple(f"x{i}" for i in range(1, n + 1))
        y_vars = tuple(f"y{i}" for i in range(1, n + 1))
        slice_ = bidegree_monomials(x_vars, y_vars, l1, l2)
        kernel = kernel_on_slice(annihilator, slice_)
        if len(kernel) != len(fam.elements):
            raise VerificationError(
                f"family size {len(fam.elements)} differs from kernel dimension {len(kernel)}"
            )
    return fam


def g2_module_basis(k: int) -> BasisFamily:
    """Basis of the degree-k module of the seven-variable exceptional action.

    Elements are indexed by (eps, m2..m7) with eps + sum m = k, pairing the
    variables (2,5), (3,6), (4,7); the alternating contraction series sits
    in the kernel of the invariant Laplacian exactly.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    vars_ = tuple(f"x{i}" for i in range(1, 8))
    annihilator = g2_laplacian(1)
    elements = []
    for eps in (0, 1):
        if eps > k:
            continue
        for ms in tuples_with_sum(6, k - eps):
            sol = _g2_element(eps, ms, vars_)
            elements.append(BasisElement({"eps": eps, "m": ms}, sol))
    return _checked(elements, annihilator, {"k": k})


def _g2_element(eps: int, ms, vars_) -> Polynomial:
    # ms lists (m2..m7); contraction index i_s couples m_(s) with m_(s+3).
    pairs = [(ms[0], ms[3]), (ms[1], ms[4]), (ms[2], ms[5])]
    terms = {}
    ranges = [range(min(a, b) + 1) for a, b in pairs]
    for tup in itertools.product(*ranges):
        big = sum(tup)
        coeff = Fraction((-1) ** big * 2**big * multinomial(tup))
        coeff *= Fraction(math.factorial(eps), math.factorial(eps + 2 * big))
        for (a, b), i in zip(pairs, tup):
            coeff *= math.comb(a, i) * math.comb(b, i) * math.factorial(i) ** 2
        exp = [0] * 7
        exp[0] = eps + 2 * big
        for s, i in enumerate(tup):
            exp[1 + s] = pairs[s][0] - i
            exp[4 + s] = pairs[s][1] - i
        key = tuple(exp)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return Polynomial(vars_, {e: c for e, c in terms.items() if c})


# -- singular vectors ------------------------------------------------------------

@dataclass
class SingularConfig:
    """Named positive generators plus Cartan operators for weight extraction."""

    positives: list  # (name, LinearOperator or PairOperator)
    cartans: list    # (name, LinearOperator)


@dataclass
class SingularCheck:
    ok: bool
    weight: list | None
    failures: list


def verify_singular(config: SingularConfig, f: Polynomial) -> SingularCheck:
    """Check annihilation by the positive generators and extract the weight."""
    if f.is_zero():
        raise ValueError("the zero polynomial is not singular")
    failures = []
    for name, op in config.positives:
        if isinstance(op, PairOperator):
            a, b = op.apply(f)
            if not (a.is_zero() and b.is_zero()):
                bad = a if not a.is_zero() else b
                failures.append((name, bad))
        else:
            residual = op(f)
            if not residual.is_zero():
                failures.append((name, residual))
    if failures:
        return SingularCheck(False, None, failures)
    weight = []
    for name, h in config.cartans:
        image = h(f)
        if image.is_zero():
            weight.append(Fraction(0))
            continue
        exp, lead = f.sorted_terms()[0]
        lam = image.coefficient({v: e for v, e in zip(f.vars, exp)}) / lead
        if image != f * lam:
            failures.append((name, image - f * lam))
            return SingularCheck(False, None, failures)
        weight.append(lam)
    return SingularCheck(True, weight, [])


def so_highest_harmonic(n: int, k: int) -> Polynomial:
    """(x1 + i x2)^k, the weight vector generating the degree-k harmonics."""
    z = variable("x1") + IMAG * variable("x2")
    out = z**k
    vars_ = tuple(f"x{i}" for i in range(1, n + 1))
    return out.with_variables(vars_)


def so_singular_config(n: int) -> SingularConfig:
    """Complexified raising operators for the small orthogonal algebras."""
    if n == 3:
        e = Sum((so_generator(3, 1, 3), Compose(Scale(IMAG), so_generator(3, 2, 3))))
        h = Compose(Scale(-IMAG), so_generator(3, 1, 2))
        return SingularConfig([("E", e)], [("h1", h)])
    if n == 4:
        def raising(t):
            base = Sum((so_generator(4, 1, 3), Compose(Scale(IMAG), so_generator(4, 2, 3))))
            tail = Sum((so_generator(4, 1, 4), Compose(Scale(IMAG), so_generator(4, 2, 4))))
            return Sum((base, Compose(Scale(IMAG * t), tail)))

        h1 = Compose(Scale(-IMAG), so_generator(4, 1, 2))
        h2 = Compose(Scale(-IMAG), so_generator(4, 3, 4))
        return SingularConfig(
            [("E(+)", raising(1)), ("E(-)", raising(-1))], [("h1", h1), ("h2", h2)]
        )
    raise ValueError("configurations are recorded for n = 3 and n = 4 only")


def g2_singular_config() -> SingularConfig:
    action = g2_polynomial_action()
    positives = [(f"E{i}", action[f"E{i}"]) for i in range(1, 7)]
    cartans = [("h1", action["h1"].rational), ("h2", action["h2"].rational)]
    return SingularConfig(positives, cartans)


# -- kernel oracle ------------------------------------------------------------------

def kernel_oracle(op, slice_monomials):
    """Exact kernel basis of op on the span of the given monomials."""
    return kernel_on_slice(op, slice_monomials)


# -- commutation suite ----------------------------------------------------------------

def commutation_checks(n_sl: int = 2, max_degree: int = 3) -> dict:
    """Operator identities verified on all monomials up to max_degree.

    Covers invariance of the contraction form and the seven-variable
    quadratic form, commutation of both Laplacians with their actions, the
    eta and zeta multiplication laws, and the exact matrix brackets.
    """
    report = {}

    zeta = sl_invariant(n_sl)
    delta = sl_laplacian(n_sl)
    sl_gens = [
        (f"E{i}{j}", sl_generator(n_sl, i, j))
        for i in range(1, n_sl + 1)
        for j in range(1, n_sl + 1)
        if i != j
    ] + [(f"h{i}", h) for i, h in enumerate(sl_cartan(n_sl), start=1)]

    ok = all(op(zeta).is_zero() for _, op in sl_gens)
    report["zeta invariant"] = ok

    vars_sl = tuple(f"x{i}" for i in range(1, n_sl + 1)) + tuple(
        f"y{i}" for i in range(1, n_sl + 1)
    )
    euler = _euler_operator(vars_sl)
    ok_comm = True
    ok_mult = True
    for d in range(max_degree + 1):
        for mono in monomials_of_degree(vars_sl, d):
            for _, op in sl_gens:
                if delta(op(mono)) != op(delta(mono)):
                    ok_comm = False
            if delta(zeta * mono) != n_sl * mono + zeta * delta(mono) + euler(mono):
                ok_mult = False
    report["contraction commutes with action"] = ok_comm
    report["zeta multiplication law"] = ok_mult

    eta = g2_invariant()
    action = g2_polynomial_action()
    report["eta invariant"] = all(gen.annihilates(eta) for gen in action.values())

    reading, _ = select_g2_laplacian_reading(max_degree=2)
    report["laplacian reading"] = reading
    lap = g2_laplacian(reading)
    vars_g2 = tuple(f"x{i}" for i in range(1, 8))
    euler7 = _euler_operator(vars_g2)
    ok_comm = True
    ok_mult = True
    for d in range(max_degree + 1):
        for mono in monomials_of_degree(vars_g2, d):
            for gen in action.values():
                a, b = gen.apply(mono)
                ra, rb = gen.apply(lap(mono))
                if lap(a) != ra or lap(b) != rb:
                    ok_comm = False
            if lap(eta * mono) != eta * lap(mono) + 14 * mono + 4 * euler7(mono):
                ok_mult = False
    report["g2 laplacian commutes with action"] = ok_comm
    report["eta multiplication law"] = ok_mult

    report.update(g2_bracket_report())
    return report
