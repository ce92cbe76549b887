"""Small exact linear programs over Fractions.

Positive-independence and cone-membership questions at rank <= 8 are decided
by Fourier-Motzkin elimination.  Float inputs are converted exactly (every
binary64 value is rational) and equalities are relaxed to a +-tol band, so a
single code path serves both exact rational data and irrational data rounded
to binary64.
"""

from __future__ import annotations

from fractions import Fraction

#: Relaxation band for equality constraints built from float data.
DEFAULT_TOL = Fraction(1, 10**9)


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def _normalize_constraint(coeffs, bound):
    return tuple(_frac(c) for c in coeffs), _frac(bound)


def fm_feasible(constraints, nvars):
    """Solve {x : a.x <= b for all (a, b)} by Fourier-Motzkin elimination.

    Returns an assignment list of Fractions when the system is feasible,
    None otherwise.
    """
    constraints = [_normalize_constraint(a, b) for a, b in constraints]
    stages = []
    for var in range(nvars - 1, -1, -1):
        lowers, uppers, rest = [], [], []
        for a, b in constraints:
            c = a[var]
            head = a[:var]
            if c > 0:
                uppers.append((tuple(x / c for x in head), b / c))
            elif c < 0:
                lowers.append((tuple(x / c for x in head), b / c))
            else:
                rest.append((head, b))
        stages.append((var, lowers, uppers))
        new = rest
        for la, lb in lowers:
            for ua, ub in uppers:
                # lb - la.x' <= x_var <= ub - ua.x'
                coeffs = tuple(u - l for l, u in zip(la, ua))
                new.append((coeffs, ub - lb))
        constraints = _dedupe(new)
    for a, b in constraints:
        if b < 0:
            return None
    assignment = [Fraction(0)] * nvars
    for var, lowers, uppers in reversed(stages):
        lo = None
        for a, b in lowers:
            val = b - sum(c * assignment[i] for i, c in enumerate(a))
            if lo is None or val > lo:
                lo = val
        hi = None
        for a, b in uppers:
            val = b - sum(c * assignment[i] for i, c in enumerate(a))
            if hi is None or val < hi:
                hi = val
        if lo is None and hi is None:
            assignment[var] = Fraction(0)
        elif lo is None:
            assignment[var] = min(Fraction(0), hi)
        elif hi is None:
            assignment[var] = max(Fraction(0), lo)
        else:
            if lo > hi:
                return None
            assignment[var] = (lo + hi) / 2
    return assignment


def _dedupe(constraints):
    seen = {}
    for a, b in constraints:
        prev = seen.get(a)
        if prev is None or b < prev:
            seen[a] = b
    return [(a, b) for a, b in seen.items()]


def _band_constraints(vectors, target, tol):
    """|sum_i c_i v_i - target| <= tol coordinatewise, as <= constraints."""
    dim = len(target)
    out = []
    for coord in range(dim):
        row = tuple(_frac(v[coord]) for v in vectors)
        t = _frac(target[coord])
        out.append((row, t + tol))
        out.append((tuple(-x for x in row), tol - t))
    return out


def nonnegative_combination(vectors, target, tol=DEFAULT_TOL):
    """Coefficients c >= 0 with sum c_i v_i = target (within tol), or None."""
    if not vectors:
        return None
    n = len(vectors)
    cons = _band_constraints(vectors, target, _frac(tol))
    for i in range(n):
        row = tuple(Fraction(-1) if j == i else Fraction(0) for j in range(n))
        cons.append((row, Fraction(0)))
    return fm_feasible(cons, n)


def positive_dependence(vectors, tol=DEFAULT_TOL):
    """A nonzero c >= 0 with sum c_i v_i = 0, normalized to sum c_i = 1.

    Returns the witness coefficients, or None when the vectors are
    positively independent.
    """
    if not vectors:
        return None
    n = len(vectors)
    zero = [0] * len(vectors[0])
    cons = _band_constraints(vectors, zero, _frac(tol))
    ones = tuple(Fraction(1) for _ in range(n))
    cons.append((ones, Fraction(1)))
    cons.append((tuple(-x for x in ones), Fraction(-1)))
    for i in range(n):
        row = tuple(Fraction(-1) if j == i else Fraction(0) for j in range(n))
        cons.append((row, Fraction(0)))
    return fm_feasible(cons, n)


def positively_independent(vectors, tol=DEFAULT_TOL):
    return positive_dependence(vectors, tol=tol) is None
