"""Shared hypothesis strategies for exact polynomial tests."""

from hypothesis import strategies as st

from flagpde import Polynomial


def coefficients():
    return st.fractions(min_value=-5, max_value=5, max_denominator=6).filter(bool)


@st.composite
def polynomials(draw, vars=("x", "y"), max_terms=6, max_exp=4, laurent=()):
    n = len(vars)
    lo = -max_exp if laurent else 0
    exps = st.tuples(*(
        st.integers(lo if v in laurent else 0, max_exp) for v in vars
    ))
    terms = draw(st.dictionaries(exps, coefficients(), max_size=max_terms))
    return Polynomial(vars, terms, laurent)
