"""Based root data from possibly non-integral generalized Cartan matrices.

A based root datum pairs simple roots in V with simple coroots in V' through
a bilinear pairing (realized here as the dot product on coordinate vectors).
Roots are generated by a breadth-first closure of the simple roots under the
simple pseudoreflections; root/coroot pairs are deduplicated on a 1e-9
coordinate grid, so non-reduced data keep proportional roots distinct.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import geometry
from .coxeter import (
    DEFAULT_ELEMENT_CAP,
    DEFAULT_TOL,
    INF,
    CoxeterGroup,
    CoxeterMatrix,
    _veckey,
)
from .errors import CapExceeded, GapError, InputError

#: Largest finite order recognized when matching c = 4cos^2(pi/m).
MAX_FINITE_ORDER = 1000


def product_to_order(c, tol=DEFAULT_TOL):
    """Invert c = 4cos^2(pi/m): the order m in {2,3,...} u {oo}, else None.

    None signals that c falls in a gap of P = {4cos^2(pi/m)} u [4, oo).
    """
    if c < -tol:
        return None
    if c >= 4 - tol:
        return INF
    best, best_err = None, None
    for m in range(2, MAX_FINITE_ORDER + 1):
        val = 4 * math.cos(math.pi / m) ** 2
        err = abs(val - c)
        if best_err is None or err < best_err:
            best, best_err = m, err
    return best if best_err is not None and best_err <= tol else None


@dataclass(frozen=True)
class NGCM:
    """Pairing matrix A with A[i][j] = <alpha_i, alpha_j-check>."""

    labels: tuple
    entries: tuple

    @property
    def rank(self):
        return len(self.labels)

    def validate(self, tol=DEFAULT_TOL):
        issues = []
        n = self.rank
        if len(set(self.labels)) != n:
            issues.append("labels are not unique")
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            issues.append("matrix is not square of rank %d" % n)
            return issues
        for i in range(n):
            if abs(self.entries[i][i] - 2) > tol:
                issues.append("diagonal entry %s is not 2" % (self.labels[i],))
        for i in range(n):
            for j in range(i + 1, n):
                a, b = self.entries[i][j], self.entries[j][i]
                if a > tol or b > tol:
                    issues.append(
                        "off-diagonal entry (%s,%s) is positive"
                        % (self.labels[i], self.labels[j])
                    )
                    continue
                if (abs(a) <= tol) != (abs(b) <= tol):
                    issues.append(
                        "entry (%s,%s) vanishes on one side only"
                        % (self.labels[i], self.labels[j])
                    )
                    continue
                if product_to_order(a * b, tol) is None:
                    issues.append(
                        "product %.12g at (%s,%s) not in P"
                        % (a * b, self.labels[i], self.labels[j])
                    )
        return issues

    def is_valid(self, tol=DEFAULT_TOL):
        return not self.validate(tol)

    @classmethod
    def standard(cls, matrix: CoxeterMatrix):
        """Entries -2cos(pi/m) from a Coxeter matrix (the standard datum)."""
        n = matrix.rank
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if i == j:
                    row.append(2.0)
                else:
                    m = matrix.orders[i][j]
                    row.append(-2.0 if m == INF else -2.0 * math.cos(math.pi / m))
            rows.append(tuple(row))
        return cls(tuple(matrix.generators), tuple(rows))


def coxeter_matrix_of(ngcm: NGCM, tol=DEFAULT_TOL):
    """Coxeter matrix with m = 2,3,... from c = 4cos^2(pi/m), oo for c >= 4."""
    issues = ngcm.validate(tol)
    if issues:
        raise InputError("invalid NGCM: " + "; ".join(issues))
    n = ngcm.rank
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(1)
                continue
            c = ngcm.entries[i][j] * ngcm.entries[j][i]
            m = product_to_order(c, tol)
            if m is None:
                raise GapError(
                    "product %.12g at (%s,%s) lies in a gap of P"
                    % (c, ngcm.labels[i], ngcm.labels[j]),
                    entry=(i, j),
                )
            row.append(m)
        rows.append(tuple(row))
    return CoxeterMatrix(tuple(ngcm.labels), tuple(rows))


@dataclass(frozen=True)
class RootPair:
    """A root with its transported coroot, BFS depth, and sign."""

    root: tuple
    coroot: tuple
    depth: int
    positive: bool
    reflection_word: tuple

    @property
    def key(self):
        return (_veckey(self.root), _veckey(self.coroot))

    def vec(self):
        return np.array(self.root)

    def covec(self):
        return np.array(self.coroot)

    def negated(self):
        return RootPair(
            tuple(-x for x in self.root),
            tuple(-x for x in self.coroot),
            self.depth,
            not self.positive,
            self.reflection_word,
        )


def reflect(v, pair, datum=None):
    """v - <v, coroot> root; an involution on V."""
    v = np.asarray(v, dtype=float)
    cr = np.asarray(pair.coroot, dtype=float)
    rt = np.asarray(pair.root, dtype=float)
    if datum is not None:
        return v - datum.pairing(v, cr) * rt
    return v - float(v @ cr) * rt


class BasedRootDatum:
    """Simple roots in V = R^d, simple coroots in V' = R^d'.

    The bilinear pairing is <v, v'> = v . P v' for a d x d' matrix P, the
    identity by default.  A degenerate symmetric form (needed e.g. for
    affine standard data with coroots equal to roots) is expressed by
    passing that form as P.
    """

    def __init__(self, labels, roots, coroots, pairing=None, tol=DEFAULT_TOL):
        self.labels = tuple(labels)
        self.roots = np.array(roots, dtype=float)
        self.coroots = np.array(coroots, dtype=float)
        self.tol = tol
        if self.roots.shape[0] != len(self.labels) or self.coroots.shape[
            0
        ] != len(self.labels):
            raise InputError("need one root and one coroot per label")
        if pairing is None:
            if self.roots.shape[1] != self.coroots.shape[1]:
                raise InputError(
                    "roots and coroots must share a coordinate dim "
                    "when no pairing matrix is given"
                )
            pairing = np.eye(self.roots.shape[1])
        self.pairing_matrix = np.array(pairing, dtype=float)
        if self.pairing_matrix.shape != (
            self.roots.shape[1],
            self.coroots.shape[1],
        ):
            raise InputError("pairing matrix shape must be dim(V) x dim(V')")
        self._group = None
        self._cox = None

    @classmethod
    def from_ngcm(cls, ngcm: NGCM, tol=DEFAULT_TOL):
        """Standard realization: alpha_i = e_i, coroot_j = column j of A."""
        a = np.array(ngcm.entries, dtype=float)
        n = ngcm.rank
        return cls(ngcm.labels, np.eye(n), a.T.copy(), tol=tol)

    @classmethod
    def standard(cls, matrix: CoxeterMatrix, tol=DEFAULT_TOL):
        return cls.from_ngcm(NGCM.standard(matrix), tol=tol)

    @property
    def rank(self):
        return len(self.labels)

    @property
    def dim(self):
        return self.roots.shape[1]

    def pairing(self, v, cv):
        return float(np.asarray(v) @ self.pairing_matrix @ np.asarray(cv))

    def ngcm(self):
        entries = tuple(
            tuple(
                self.pairing(self.roots[i], self.coroots[j])
                for j in range(self.rank)
            )
            for i in range(self.rank)
        )
        return NGCM(self.labels, entries)

    def coxeter_matrix(self):
        if self._cox is None:
            self._cox = coxeter_matrix_of(self.ngcm(), tol=self.tol)
        return self._cox

    def group(self):
        if self._group is None:
            self._group = CoxeterGroup(self.coxeter_matrix(), tol=self.tol)
        return self._group

    def simple_pair(self, i):
        return RootPair(
            tuple(self.roots[i]), tuple(self.coroots[i]), 0, True, (i,)
        )

    def rescale(self, scalars):
        """Replace alpha by c alpha and alpha-check by c^-1 alpha-check."""
        scalars = list(scalars)
        if len(scalars) != self.rank:
            raise InputError("need one scalar per simple root")
        if any(c <= 0 for c in scalars):
            raise InputError("rescaling scalars must be positive")
        roots = np.array(
            [c * self.roots[i] for i, c in enumerate(scalars)]
        )
        coroots = np.array(
            [self.coroots[i] / c for i, c in enumerate(scalars)]
        )
        return BasedRootDatum(
            self.labels, roots, coroots, pairing=self.pairing_matrix, tol=self.tol
        )


@dataclass
class DatumReport:
    valid: bool
    issues: list = field(default_factory=list)
    dependence_witness: object = None


def validate_datum(datum: BasedRootDatum, tol=None):
    """Check the based-root-datum invariants, reporting every violation."""
    tol = datum.tol if tol is None else tol
    issues = list(datum.ngcm().validate(tol))
    ftol = Fraction(1, 10**9)
    witness = geometry.positive_dependence(
        [tuple(r) for r in datum.roots], tol=ftol
    )
    if witness is not None:
        issues.append("simple roots not positively independent")
    cowitness = geometry.positive_dependence(
        [tuple(r) for r in datum.coroots], tol=ftol
    )
    if cowitness is not None:
        issues.append("simple coroots not positively independent")
    return DatumReport(not issues, issues, witness or cowitness)


def datum_properties(datum: BasedRootDatum):
    """Reducedness and symmetrizability, with a rescaling witness.

    Reduced: for odd finite m the two pairing entries agree.  Symmetrizable:
    multipliers propagated over a spanning forest of the Coxeter graph make
    the matrix symmetric and every non-tree edge is consistent.
    """
    tol = datum.tol
    a = datum.ngcm().entries
    cox = datum.coxeter_matrix()
    n = datum.rank
    reduced = True
    for i in range(n):
        for j in range(i + 1, n):
            m = cox.orders[i][j]
            if m != INF and m % 2 == 1 and abs(a[i][j] - a[j][i]) > tol:
                reduced = False
    scalars = [None] * n
    symmetrizable = True
    for start in range(n):
        if scalars[start] is not None:
            continue
        scalars[start] = 1.0
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if i == j or abs(a[i][j]) <= tol:
                    continue
                ratio = math.sqrt(a[i][j] / a[j][i])
                want = scalars[i] * ratio
                if scalars[j] is None:
                    scalars[j] = want
                    stack.append(j)
                elif abs(scalars[j] - want) > 1e-6 * max(1.0, abs(want)):
                    symmetrizable = False
    if symmetrizable:
        check = datum.rescale(scalars).ngcm().entries
        for i in range(n):
            for j in range(n):
                if abs(check[i][j] - check[j][i]) > 1e-6:
                    symmetrizable = False
    return {
        "reduced": reduced,
        "symmetrizable": symmetrizable,
        "rescaling": scalars if symmetrizable else None,
    }


class RootSlice:
    """All roots of depth <= bound, with lookups by key and by reflection."""

    def __init__(self, datum, depth_bound, pairs, complete):
        self.datum = datum
        self.depth_bound = depth_bound
        self.pairs = pairs
        self.complete = complete
        self.by_key = {p.key: p for p in pairs}
        self.by_reflection = {}
        for p in pairs:
            if p.positive:
                self.by_reflection.setdefault(p.reflection_word, []).append(p)

    def positives(self):
        return [p for p in self.pairs if p.positive]

    def negatives(self):
        return [p for p in self.pairs if not p.positive]

    def positive_for(self, reflection_word):
        hits = self.by_reflection.get(tuple(reflection_word))
        return hits[0] if hits else None

    def reflection_words(self):
        return sorted(self.by_reflection, key=lambda w: (len(w), w))

    def __len__(self):
        return len(self.pairs)


def _classify_sign(datum, vec, solver):
    """+1 / -1 for membership of the cone over Pi or its negative."""
    coeffs = solver(vec)
    if coeffs is not None:
        return 1
    if solver(-vec) is not None:
        return -1
    return 0


def _make_cone_solver(datum):
    roots = datum.roots
    n, d = roots.shape
    mat = roots.T  # columns are simple roots
    if np.linalg.matrix_rank(mat, tol=1e-9) == n:
        pinv = np.linalg.pinv(mat)

        def solve(vec):
            coeffs = pinv @ vec
            if np.abs(mat @ coeffs - vec).max() > 1e-7:
                return None
            if coeffs.min() < -datum.tol * 10:
                return None
            return coeffs

        return solve

    gens = [tuple(r) for r in roots]

    def solve(vec):
        out = geometry.nonnegative_combination(gens, tuple(vec))
        return None if out is None else np.array([float(x) for x in out])

    return solve


def generate_roots(datum: BasedRootDatum, depth_bound, cap=DEFAULT_ELEMENT_CAP):
    """BFS closure of the simple roots under simple reflections.

    Coroots are transported alongside roots, so w(alpha) = c beta comes with
    w(alpha-check) = c^-1 beta-check by construction.  Every root is
    classified as +- a nonnegative combination of the simple roots.
    """
    if depth_bound < 0:
        raise InputError("depth bound must be >= 0")
    group = datum.group()
    solver = _make_cone_solver(datum)
    level = []
    seen = {}
    for i in range(datum.rank):
        p = datum.simple_pair(i)
        if p.key not in seen:
            seen[p.key] = p
            level.append(p)
    depth = 0
    complete = False
    while level and depth < depth_bound:
        nxt = []
        for p in level:
            for i in range(datum.rank):
                sp = datum.simple_pair(i)
                root = reflect(p.vec(), sp, datum)
                coroot = np.asarray(p.coroot) - float(
                    datum.pairing(sp.root, p.coroot)
                ) * np.asarray(sp.coroot)
                sign = _classify_sign(datum, root, solver)
                if sign == 0:
                    raise ArithmeticError(
                        "generated vector is neither positive nor negative; "
                        "datum invariants likely violated"
                    )
                refl = group.conjugate(
                    group.generator(i), group.element(p.reflection_word)
                )
                q = RootPair(
                    tuple(root), tuple(coroot), depth + 1, sign > 0, refl.word
                )
                if q.key not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded("root cap %d exceeded" % cap)
                    seen[q.key] = q
                    nxt.append(q)
        level = nxt
        depth += 1
    if not level:
        complete = True
    pairs = sorted(
        seen.values(), key=lambda p: (p.depth, not p.positive, p.key)
    )
    return RootSlice(datum, depth_bound, pairs, complete)


def is_between_real(gamma, alpha, beta, tol=DEFAULT_TOL):
    """gamma in R>=0 alpha + R>=0 beta, by a two-variable nonnegative solve."""
    g = np.asarray(gamma, dtype=float)
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    scale = max(np.abs(g).max(), 1.0)
    mat = np.stack([a, b], axis=1)
    if np.linalg.matrix_rank(mat, tol=1e-9) == 2:
        coeffs, *_ = np.linalg.lstsq(mat, g, rcond=None)
        residual = np.abs(mat @ coeffs - g).max()
        return residual <= 1e-7 * scale and coeffs.min() >= -tol * 10
    # parallel generators: gamma must sit on one of the rays
    for gen in (a, b):
        denom = float(gen @ gen)
        if denom <= tol:
            continue
        c = float(g @ gen) / denom
        if c >= -tol and np.abs(c * gen - g).max() <= 1e-7 * scale:
            return True
    return False


def _pair_ok(datum, p, q, tol):
    """The Lemma-4.3(iii) conditions for a canonical pair."""
    a = datum.pairing(p.root, q.coroot)
    b = datum.pairing(q.root, p.coroot)
    if a > tol or b > tol:
        return False
    if (abs(a) <= tol) != (abs(b) <= tol):
        return False
    return product_to_order(a * b, tol) is not None


def reflection_subgroup_basis(datum, pairs, max_iter=1000):
    """Canonical simple system for the reflection subgroup generated by pairs.

    Pair-reduction loop: while two roots pair positively, the deeper one is
    replaced by the positive form of its reflection in the other.  On exit
    every pair satisfies the canonical-pair criterion.
    """
    tol = datum.tol
    group = datum.group()
    solver = _make_cone_solver(datum)
    current = {p.key: p for p in pairs}
    for _ in range(max_iter):
        items = sorted(
            current.values(),
            key=lambda p: (len(p.reflection_word), p.reflection_word, p.key),
        )
        offender = None
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                p, q = items[i], items[j]
                if datum.pairing(p.root, q.coroot) > tol:
                    offender = (p, q)
                    break
            if offender:
                break
        if offender is None:
            result = sorted(
                current.values(),
                key=lambda p: (len(p.reflection_word), p.reflection_word, p.key),
            )
            for i in range(len(result)):
                for j in range(i + 1, len(result)):
                    if not _pair_ok(datum, result[i], result[j], tol):
                        raise ArithmeticError(
                            "pair reduction ended on a non-canonical pair"
                        )
            return result
        p, q = offender
        # replace the deeper root (longer reflection word; q on ties)
        keep, drop = (
            (p, q)
            if len(q.reflection_word) >= len(p.reflection_word)
            else (q, p)
        )
        root = reflect(drop.vec(), keep, datum)
        coroot = np.asarray(drop.coroot) - float(
            datum.pairing(keep.root, drop.coroot)
        ) * np.asarray(keep.coroot)
        refl = group.conjugate(
            group.element(keep.reflection_word),
            group.element(drop.reflection_word),
        )
        sign = _classify_sign(datum, root, solver)
        if sign == 0:
            raise ArithmeticError("reflected root has indeterminate sign")
        new = RootPair(tuple(root), tuple(coroot), -1, sign > 0, refl.word)
        if not new.positive:
            new = new.negated()
        del current[drop.key]
        current[new.key] = new
    raise CapExceeded("pair reduction exceeded %d iterations" % max_iter)
