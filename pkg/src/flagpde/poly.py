"""Exact sparse polynomial arithmetic over the rationals and Gaussian rationals.

A polynomial is stored as a dictionary mapping exponent tuples to exact
coefficients.  Coefficients are ``fractions.Fraction`` values, promoted to
``GaussianRational`` (re + im*sqrt(-1) with rational parts) only when an
imaginary part actually appears; a Gaussian coefficient whose imaginary
part cancels collapses back to a plain Fraction.

Exponents are non-negative unless the variable was declared Laurent at
construction time, in which case negative powers are allowed everywhere
except under integration across the -1 exponent.

The zero polynomial has an empty term map.  All values are immutable by
convention: operations never mutate their operands and always return
canonical results (no stored zero coefficients).  Canonical term order is
graded lexicographic, descending, with respect to the polynomial's declared
variable order; serialization uses that order so equal polynomials print
and dump identically.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

__all__ = [
    "Fraction",
    "GaussianRational",
    "IMAG",
    "NonIntegrableTermError",
    "Polynomial",
    "TrigPolynomial",
    "constant",
    "variable",
]


class NonIntegrableTermError(ValueError):
    """Raised when integration meets an exponent of -1 in the target variable."""


class GaussianRational:
    """An exact element re + im*sqrt(-1) of the Gaussian rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __add__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        out = GaussianRational(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __eq__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        norm = self.abs2()
        if not norm:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / norm, -self.im / norm)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


IMAG = GaussianRational(0, 1)

Coefficient = Union[int, Fraction, GaussianRational]


def _as_gaussian(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value)
    return None


def _norm_coeff(value: Coefficient):
    """Collapse to the smallest exact type: Fraction unless truly complex."""
    if isinstance(value, GaussianRational):
        return value.re if not value.im else value
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"not an exact coefficient: {value!r}")


def coeff_real(value) -> Fraction:
    return value.re if isinstance(value, GaussianRational) else value


def coeff_imag(value) -> Fraction:
    return value.im if isinstance(value, GaussianRational) else Fraction(0)


def coeff_inverse(value):
    if isinstance(value, GaussianRational):
        return value.inverse()
    return Fraction(1) / value


def coeff_complex(value) -> complex:
    if isinstance(value, GaussianRational):
        return complex(value)
    return complex(float(value), 0.0)


class Polynomial:
    __slots__ = ("vars", "laurent", "terms")

    def __init__(
        self,
        vars: Iterable[str] = (),
        terms: Mapping[tuple, Coefficient] | None = None,
        laurent: Iterable[str] = (),
    ):
        vs = tuple(vars)
        if len(set(vs)) != len(vs):
            raise ValueError(f"duplicate variables in {vs}")
        lr = frozenset(laurent)
        tm = {}
        if terms:
            for exp, c in terms.items():
                c = _norm_coeff(c)
                if not c:
                    continue
                exp = tuple(exp)
                if len(exp) != len(vs):
                    raise ValueError(f"exponent {exp} does not match variables {vs}")
                for v, e in zip(vs, exp):
                    if e < 0 and v not in lr:
                        raise ValueError(f"negative exponent for non-Laurent variable {v}")
                tm[exp] = c
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "laurent", lr)
        object.__setattr__(self, "terms", tm)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def zero(vars: Iterable[str] = (), laurent: Iterable[str] = ()) -> "Polynomial":
        return Polynomial(vars, {}, laurent)

    @staticmethod
    def const(value: Coefficient, vars: Iterable[str] = (), laurent=()) -> "Polynomial":
        vs = tuple(vars)
        return Polynomial(vs, {(0,) * len(vs): value}, laurent)

    # -- basic queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Maximum term degree (0 for the zero polynomial)."""
        if not self.terms:
            return 0
        return max(sum(exp) for exp in self.terms)

    def degree_in(self, var: str) -> int:
        if var not in self.vars or not self.terms:
            return 0
        i = self.vars.index(var)
        return max(exp[i] for exp in self.terms)

    def support_vars(self) -> frozenset:
        """Variables that occur with a nonzero exponent in some term."""
        used = set()
        for exp in self.terms:
            for v, e in zip(self.vars, exp):
                if e:
                    used.add(v)
        return frozenset(used)

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def coefficient(self, exponents: Mapping[str, int]):
        """Coefficient of the monomial given as a {var: exponent} mapping."""
        key = tuple(exponents.get(v, 0) for v in self.vars)
        for v, e in exponents.items():
            if e and v not in self.vars:
                return Fraction(0)
        return self.terms.get(key, Fraction(0))

    # -- alignment ------------------------------------------------------------

    def _aligned_with(self, other: "Polynomial"):
        if self.vars == other.vars:
            lr = self.laurent | other.laurent
            return self.vars, lr, self.terms, other.terms
        vs = self.vars + tuple(v for v in other.vars if v not in self.vars)
        lr = self.laurent | other.laurent
        return vs, lr, _remap(self, vs), _remap(other, vs)

    def with_variables(self, vars: Iterable[str], laurent=()) -> "Polynomial":
        """Re-express over a superset of variables (order taken from `vars`)."""
        vs = tuple(vars)
        missing = [v for v in self.vars if v not in vs]
        if missing:
            raise ValueError(f"target variable set misses {missing}")
        return Polynomial(vs, _remap(self, vs), self.laurent | frozenset(laurent))

    def with_laurent(self, *names: str) -> "Polynomial":
        return Polynomial(self.vars, self.terms, self.laurent | set(names))

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, Fraction, GaussianRational)):
                other = Polynomial.const(other, self.vars, self.laurent)
            else:
                return NotImplemented
        vs, lr, ta, tb = self._aligned_with(other)
        out = dict(ta)
        for exp, c in tb.items():
            s = _norm_coeff(out.get(exp, Fraction(0)) + c)
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return _make(vs, lr, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -_norm_coeff(other))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return _make(self.vars, self.laurent, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, Fraction, GaussianRational)):
                c = _norm_coeff(other)
                if not c:
                    return Polynomial.zero(self.vars, self.laurent)
                return _make(
                    self.vars, self.laurent, {e: _norm_coeff(k * c) for e, k in self.terms.items()}
                )
            return NotImplemented
        vs, lr, ta, tb = self._aligned_with(other)
        out = {}
        for ea, ca in ta.items():
            for eb, cb in tb.items():
                exp = tuple(x + y for x, y in zip(ea, eb))
                s = _norm_coeff(out.get(exp, Fraction(0)) + ca * cb)
                if s:
                    out[exp] = s
                else:
                    out.pop(exp, None)
        return _make(vs, lr, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self * coeff_inverse(_norm_coeff(other))
        return NotImplemented

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative polynomial powers are not defined")
        out = Polynomial.const(1, self.vars, self.laurent)
        for _ in range(exponent):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = Polynomial.const(other, self.vars, self.laurent)
        if not isinstance(other, Polynomial):
            return NotImplemented
        _, _, ta, tb = self._aligned_with(other)
        return ta == tb

    def __hash__(self):
        raise TypeError("Polynomial is not hashable")

    # -- calculus -------------------------------------------------------------

    def diff(self, var: str, order: int = 1) -> "Polynomial":
        """Exact formal partial derivative; Laurent exponents follow the power rule."""
        if order < 0:
            raise ValueError("derivative order must be non-negative")
        if order == 0:
            return self
        if var not in self.vars:
            return Polynomial.zero(self.vars, self.laurent)
        i = self.vars.index(var)
        out = {}
        for exp, c in self.terms.items():
            e = exp[i]
            k = c
            for j in range(order):
                k = k * (e - j)
            k = _norm_coeff(k)
            if not k:
                continue
            nexp = exp[:i] + (e - order,) + exp[i + 1 :]
            out[nexp] = k
        return _make(self.vars, self.laurent, out)

    def integrate(self, var: str) -> "Polynomial":
        """Definite-style antiderivative in `var` with zero constant of integration.

        Each monomial x^a maps to x^(a+1)/(a+1); an exponent of -1 in `var`
        has no polynomial antiderivative and raises NonIntegrableTermError.
        """
        p = self if var in self.vars else self.with_variables(self.vars + (var,))
        i = p.vars.index(var)
        out = {}
        for exp, c in p.terms.items():
            e = exp[i]
            if e == -1:
                raise NonIntegrableTermError("non-integrable Laurent term")
            nexp = exp[:i] + (e + 1,) + exp[i + 1 :]
            out[nexp] = _norm_coeff(c * Fraction(1, e + 1))
        return _make(p.vars, p.laurent, out)

    def integrate_n(self, var: str, order: int) -> "Polynomial":
        out = self
        for _ in range(order):
            out = out.integrate(var)
        return out

    # -- substitution and evaluation -------------------------------------------

    def substitute(self, var: str, value) -> "Polynomial":
        """Replace `var` by an exact scalar or another Polynomial."""
        if var not in self.vars:
            return self
        i = self.vars.index(var)
        rest_vars = self.vars[:i] + self.vars[i + 1 :]
        if isinstance(value, (int, Fraction, GaussianRational)):
            value = _norm_coeff(value)
            out = {}
            for exp, c in self.terms.items():
                e = exp[i]
                if e < 0:
                    if not value:
                        raise ZeroDivisionError("substituting zero into a negative power")
                    factor = coeff_inverse(value) ** (-e)
                else:
                    factor = value**e
                nexp = exp[:i] + exp[i + 1 :]
                s = _norm_coeff(out.get(nexp, Fraction(0)) + c * factor)
                if s:
                    out[nexp] = s
                else:
                    out.pop(nexp, None)
            return _make(rest_vars, self.laurent - {var}, out)
        if isinstance(value, Polynomial):
            acc = Polynomial.zero(rest_vars, self.laurent - {var})
            powers = {0: Polynomial.const(1, value.vars, value.laurent)}
            for exp, c in self.terms.items():
                e = exp[i]
                if e < 0:
                    raise ValueError("cannot substitute a polynomial into a negative power")
                if e not in powers:
                    powers[e] = value**e
                mono = _make(rest_vars, self.laurent - {var}, {exp[:i] + exp[i + 1 :]: c})
                acc = acc + mono * powers[e]
            return acc
        raise TypeError(f"cannot substitute value of type {type(value)!r}")

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        """Numeric evaluation; every variable must be assigned."""
        point = []
        for v in self.vars:
            if v not in values:
                raise KeyError(f"no value for variable {v}")
            point.append(complex(values[v]))
        total = 0j
        for exp, c in self.terms.items():
            term = coeff_complex(c)
            for val, e in zip(point, exp):
                if e:
                    term *= val**e
            total += term
        return total

    def real_part(self) -> "Polynomial":
        out = {e: coeff_real(c) for e, c in self.terms.items()}
        return _make(self.vars, self.laurent, {e: c for e, c in out.items() if c})

    def imag_part(self) -> "Polynomial":
        out = {e: coeff_imag(c) for e, c in self.terms.items()}
        return _make(self.vars, self.laurent, {e: c for e, c in out.items() if c})

    # -- canonical form and serialization ---------------------------------------

    def sorted_terms(self):
        """Terms in canonical graded-lexicographic descending order."""
        return sorted(
            self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0]))
        )

    def to_json_terms(self):
        out = []
        for exp, c in self.sorted_terms():
            entry = {
                "exp": {v: e for v, e in zip(self.vars, exp) if e},
                "re": str(coeff_real(c)),
                "im": str(coeff_imag(c)),
            }
            out.append(entry)
        return out

    @staticmethod
    def from_json_terms(data, variables=None, laurent=()) -> "Polynomial":
        names = set()
        for entry in data:
            names.update(entry.get("exp", {}))
        if variables is None:
            variables = tuple(sorted(names))
        else:
            variables = tuple(variables)
            extra = names - set(variables)
            if extra:
                raise ValueError(f"terms use undeclared variables {sorted(extra)}")
        terms = {}
        for entry in data:
            exp = tuple(entry.get("exp", {}).get(v, 0) for v in variables)
            c = GaussianRational(Fraction(entry["re"]), Fraction(entry.get("im", "0")))
            c = _norm_coeff(_norm_coeff(terms.get(exp, Fraction(0))) + c)
            if c:
                terms[exp] = c
            else:
                terms.pop(exp, None)
        return Polynomial(variables, terms, laurent)

    def __str__(self):
        if not self.terms:
            return "0"
        rendered = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                f"{v}^{e}" if e != 1 else v for v, e in zip(self.vars, exp) if e
            )
            if isinstance(c, Fraction):
                sign = "-" if c < 0 else "+"
                mag = str(abs(c))
                body = mono if mag == "1" and mono else (f"{mag}*{mono}" if mono else mag)
            else:
                sign = "+"
                body = f"{c}*{mono}" if mono else str(c)
            rendered.append((sign, body))
        head_sign, head = rendered[0]
        out = head if head_sign == "+" else f"-{head}"
        for sign, body in rendered[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"<Polynomial {self}>"


def _make(vars, laurent, terms) -> Polynomial:
    """Internal fast constructor; terms are assumed canonical already."""
    p = object.__new__(Polynomial)
    object.__setattr__(p, "vars", vars)
    object.__setattr__(p, "laurent", laurent)
    object.__setattr__(p, "terms", terms)
    return p


def _remap(p: Polynomial, vars: tuple) -> dict:
    idx = [vars.index(v) for v in p.vars]
    width = len(vars)
    out = {}
    for exp, c in p.terms.items():
        nexp = [0] * width
        for pos, e in zip(idx, exp):
            nexp[pos] = e
        out[tuple(nexp)] = c
    return out


def variable(name: str, laurent: bool = False) -> Polynomial:
    return Polynomial((name,), {(1,): Fraction(1)}, (name,) if laurent else ())


def constant(value: Coefficient) -> Polynomial:
    return Polynomial.const(value)


class TrigPolynomial:
    """A function cos_part*cos(a*t) + sin_part*sin(a*t) with polynomial parts.

    The frequency a is a fixed rational; the ring is closed under d/dt
    (which mixes the two parts with a frequency factor) and under every
    purely spatial polynomial-coefficient operator applied componentwise.
    """

    __slots__ = ("cos_part", "sin_part", "frequency", "time_var")

    def __init__(self, cos_part: Polynomial, sin_part: Polynomial, frequency, time_var: str = "t"):
        object.__setattr__(self, "cos_part", cos_part)
        object.__setattr__(self, "sin_part", sin_part)
        object.__setattr__(self, "frequency", Fraction(frequency))
        object.__setattr__(self, "time_var", time_var)

    def __setattr__(self, name, value):
        raise AttributeError("TrigPolynomial is immutable")

    def is_zero(self) -> bool:
        return self.cos_part.is_zero() and self.sin_part.is_zero()

    def diff_time(self) -> "TrigPolynomial":
        # d/dt [P cos(at) + Q sin(at)] = (P' + aQ) cos(at) + (Q' - aP) sin(at)
        a = self.frequency
        t = self.time_var
        return TrigPolynomial(
            self.cos_part.diff(t) + a * self.sin_part,
            self.sin_part.diff(t) - a * self.cos_part,
            a,
            t,
        )

    def map_parts(self, f) -> "TrigPolynomial":
        return TrigPolynomial(f(self.cos_part), f(self.sin_part), self.frequency, self.time_var)

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        if self.frequency != other.frequency or self.time_var != other.time_var:
            raise ValueError("mismatched trig frequency or time variable")
        return TrigPolynomial(
            self.cos_part + other.cos_part,
            self.sin_part + other.sin_part,
            self.frequency,
            self.time_var,
        )

    def __neg__(self):
        return self.map_parts(lambda p: -p)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        return (
            self.frequency == other.frequency
            and self.time_var == other.time_var
            and self.cos_part == other.cos_part
            and self.sin_part == other.sin_part
        )

    def __hash__(self):
        raise TypeError("TrigPolynomial is not hashable")

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        import cmath

        t = complex(values[self.time_var])
        a = float(self.frequency)
        return self.cos_part.evaluate(values) * cmath.cos(a * t) + self.sin_part.evaluate(
            values
        ) * cmath.sin(a * t)

    def __str__(self):
        a = self.frequency
        return f"({self.cos_part})*cos({a}*{self.time_var}) + ({self.sin_part})*sin({a}*{self.time_var})"

    def __repr__(self):
        return f"<TrigPolynomial {self}>"
