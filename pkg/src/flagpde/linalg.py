"""Exact linear algebra over the rationals and Gaussian rationals.

Plain Gaussian elimination with exact field arithmetic: every pivot step is
an exact division, so ranks, nullspaces and span comparisons are certain.
Matrices are lists of lists whose entries are Fraction or GaussianRational.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Polynomial, coeff_inverse

__all__ = [
    "bidegree_monomials",
    "kernel_on_slice",
    "matrix_rank",
    "monomials_of_degree",
    "monomials_up_to_degree",
    "nullspace",
    "polys_in_span",
    "polys_rank",
    "polys_to_matrix",
]


def _row_reduce(rows):
    """In-place forward elimination; returns the list of pivot columns."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = coeff_inverse(rows[r][c])
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def matrix_rank(rows) -> int:
    work = [list(r) for r in rows]
    return len(_row_reduce(work))


def nullspace(rows, ncols: int):
    """Basis of {v : A v = 0} for A given as a list of rows of width ncols."""
    work = [list(r) for r in rows]
    pivots = _row_reduce(work)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for prow, pcol in enumerate(pivots):
            v[pcol] = -work[prow][fc]
        basis.append(v)
    return basis


def polys_to_matrix(polys):
    """Coefficient matrix of the polynomials over the union of their supports.

    Returns (rows, monomial_keys, variables); row i lists the coefficients of
    polys[i] on each monomial key, keys sorted in canonical graded-lex order.
    """
    vars_ = ()
    for p in polys:
        for v in p.vars:
            if v not in vars_:
                vars_ = vars_ + (v,)
    aligned = [p.with_variables(vars_, p.laurent) if p.vars != vars_ else p for p in polys]
    support = set()
    for p in aligned:
        support.update(p.terms)
    keys = sorted(support, key=lambda e: (-sum(e), tuple(-x for x in e)))
    rows = [[p.terms.get(k, Fraction(0)) for k in keys] for p in aligned]
    return rows, keys, vars_


def polys_rank(polys) -> int:
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return 0
    rows, _, _ = polys_to_matrix(polys)
    return matrix_rank(rows)


def polys_in_span(basis, candidates) -> bool:
    """True when every candidate lies in the exact span of the basis."""
    base = [p for p in basis if not p.is_zero()]
    cands = [p for p in candidates if not p.is_zero()]
    if not cands:
        return True
    if not base:
        return False
    r = polys_rank(base)
    return polys_rank(base + cands) == r


def monomials_of_degree(vars, degree: int):
    """All monomials of exact total degree `degree` as Polynomials."""
    from .combinatorics import tuples_with_sum

    vars = tuple(vars)
    return [Polynomial(vars, {exp: Fraction(1)}) for exp in tuples_with_sum(len(vars), degree)]


def monomials_up_to_degree(vars, degree: int):
    from .combinatorics import tuples_with_sum_at_most

    vars = tuple(vars)
    return [
        Polynomial(vars, {exp: Fraction(1)})
        for exp in tuples_with_sum_at_most(len(vars), degree)
    ]


def bidegree_monomials(x_vars, y_vars, deg_x: int, deg_y: int):
    """Monomials homogeneous of degree deg_x in x_vars and deg_y in y_vars."""
    from .combinatorics import tuples_with_sum

    x_vars, y_vars = tuple(x_vars), tuple(y_vars)
    vars_ = x_vars + y_vars
    out = []
    for ex in tuples_with_sum(len(x_vars), deg_x):
        for ey in tuples_with_sum(len(y_vars), deg_y):
            out.append(Polynomial(vars_, {ex + ey: Fraction(1)}))
    return out


def kernel_on_slice(op, slice_monomials):
    """Exact kernel of a linear operator restricted to a monomial slice.

    Returns a list of Polynomials spanning {p in span(slice) : op(p) = 0}.
    """
    if not slice_monomials:
        return []
    images = [op(m) for m in slice_monomials]
    rows, keys, _ = polys_to_matrix(images)
    # Columns index the slice monomials, rows index the support of the images.
    ncols = len(slice_monomials)
    matrix = [[rows[j][i] for j in range(ncols)] for i in range(len(keys))]
    out = []
    for coeffs in nullspace(matrix, ncols):
        p = Polynomial.zero()
        for c, m in zip(coeffs, slice_monomials):
            if c:
                p = p + m * c
        out.append(p)
    return out
