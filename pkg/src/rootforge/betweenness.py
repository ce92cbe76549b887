"""Betweenness, biclosed sets, and root-basis certification.

Intervals [alpha, beta] are computed through the real realization: gamma is
between alpha and beta iff its lift lies in the nonnegative cone of their
lifts (the two notions agree for the standard datum).  The purely
combinatorial dihedral description is implemented alongside as a
cross-check and as the engine for reconstructing s_beta(alpha) from interval
cardinalities alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abstract import (
    EXACT,
    WINDOW_ONLY,
    AbstractRoot,
    QuasiPositiveSystem,
    Window,
    act,
    generated_system,
    is_generative,
    reflection,
    simple_roots_of,
)
from .coxeter import CoxeterGroup, subgroup_closure
from .datum import BasedRootDatum, generate_roots, is_between_real
from .errors import (
    CapExceeded,
    InputError,
    PreconditionError,
    WindowExhausted,
)


class StandardLift:
    """Positive-root vectors of the standard datum, deepened on demand."""

    def __init__(self, group: CoxeterGroup, depth=8, max_depth=64):
        self.group = group
        self.datum = BasedRootDatum.standard(group.matrix, tol=group.tol)
        self.depth = depth
        self.max_depth = max_depth
        self.slice = generate_roots(self.datum, depth)

    def positive_vector(self, t):
        hit = self.slice.positive_for(t.word)
        while hit is None:
            if self.slice.complete or self.depth >= self.max_depth:
                raise WindowExhausted(
                    "no positive root for %r within depth %d" % (t, self.depth)
                )
            self.depth = min(2 * self.depth, self.max_depth)
            self.slice = generate_roots(self.datum, self.depth)
            hit = self.slice.positive_for(t.word)
        return hit.vec()

    def vector(self, alpha: AbstractRoot):
        return alpha.sign * self.positive_vector(alpha.refl)


def standard_lift(group: CoxeterGroup, depth=8) -> StandardLift:
    lift = getattr(group, "_standard_lift", None)
    if lift is None:
        lift = StandardLift(group, depth=depth)
        group._standard_lift = lift
    return lift


def interval(alpha, beta, window: Window, lift: StandardLift = None):
    """[alpha, beta] within the window's roots, via real cones."""
    if lift is None:
        lift = standard_lift(window.group)
    if alpha.refl == beta.refl:
        return frozenset({alpha, beta})
    cache = getattr(window, "_interval_cache", None)
    if cache is None:
        cache = {}
        window._interval_cache = cache
    key = (alpha, beta) if alpha <= beta else (beta, alpha)
    hit = cache.get(key)
    if hit is not None:
        return hit
    va, vb = lift.vector(alpha), lift.vector(beta)
    out = set()
    for t in window.reflections:
        vp = lift.positive_vector(t)
        for gamma in (AbstractRoot(t, 1), AbstractRoot(t, -1)):
            if is_between_real(gamma.sign * vp, va, vb, tol=window.group.tol):
                out.add(gamma)
    result = frozenset(out)
    cache[key] = result
    return result


def is_closed(roots, window: Window, lift: StandardLift = None):
    roots = frozenset(roots)
    items = sorted(roots)
    for i, alpha in enumerate(items):
        for beta in items[i:]:
            if not interval(alpha, beta, window, lift) <= roots:
                return False
    return True


def is_biclosed(roots, window: Window, lift: StandardLift = None):
    """roots and its complement in the window are both closed."""
    roots = frozenset(roots)
    universe = frozenset(window.roots())
    if not roots <= universe:
        raise InputError("roots outside the window")
    return is_closed(roots, window, lift) and is_closed(
        universe - roots, window, lift
    )


# -- dihedral fans ---------------------------------------------------------


@dataclass
class DihedralFan:
    """Roots of the dihedral reflection subgroup spanning a 2-plane.

    Holds both signs of every fan reflection with plane angles, the
    enumerated subgroup elements, and whether the enumeration closed.
    """

    group: CoxeterGroup
    reflections: tuple
    elements: tuple
    closed: bool
    _angles: dict

    def roots(self):
        out = [AbstractRoot(t, 1) for t in self.reflections]
        out.extend(AbstractRoot(t, -1) for t in self.reflections)
        return out

    def positive_words(self):
        return frozenset(t.word for t in self.reflections)


def dihedral_fan(group, t1, t2, lift=None, max_length=None, cap=5000):
    """The maximal dihedral reflection subgroup containing t1 and t2.

    Fan reflections are found by intersecting the standard root slice with
    the plane spanned by the two lifted roots; for infinite groups the slice
    depth (hence the fan radius) follows the lift's current depth.
    """
    if lift is None:
        lift = standard_lift(group)
    if t1 == t2:
        raise InputError("a dihedral fan needs two distinct reflections")
    v1, v2 = lift.positive_vector(t1), lift.positive_vector(t2)
    basis = np.stack([v1, v2], axis=1)
    if np.linalg.matrix_rank(basis, tol=1e-9) != 2:
        raise InputError("proportional roots do not span a plane")
    fan_refl = []
    angles = {}
    q, _ = np.linalg.qr(basis)
    for p in lift.slice.positives():
        vec = p.vec()
        coeffs, *_ = np.linalg.lstsq(basis, vec, rcond=None)
        if np.abs(basis @ coeffs - vec).max() > 1e-7 * max(
            1.0, np.abs(vec).max()
        ):
            continue
        t = reflection(group.element(p.reflection_word))
        fan_refl.append(t)
        x, y = float(q[:, 0] @ vec), float(q[:, 1] @ vec)
        angles[(t.word, 1)] = np.arctan2(y, x)
        angles[(t.word, -1)] = np.arctan2(-y, -x)
    fan_refl = sorted(set(fan_refl))
    # Subgroup elements from an adjacent pair of rays (they generate W').
    ordered = sorted(fan_refl, key=lambda t: angles[(t.word, 1)] % np.pi)
    if len(ordered) >= 2:
        a, b = ordered[0].element, ordered[1].element
    else:
        a = b = ordered[0].element
    try:
        elements, closed = subgroup_closure(group, [a, b], cap=cap)
    except CapExceeded:
        elements, closed = subgroup_closure(
            group, [a, b], max_length=max_length or 4 * lift.depth, cap=cap
        )
    return DihedralFan(group, tuple(fan_refl), tuple(sorted(elements)), closed, angles)


def combinatorial_interval(alpha, beta, fan: DihedralFan):
    """[alpha, beta] straight from the definition: gamma survives every frame
    (w, eps) of the fan subgroup that sends both alpha and beta into
    T' x {1}."""
    if alpha.refl == beta.refl:
        return frozenset({alpha, beta})
    words = fan.positive_words()

    def positive_in_frame(w, eps, gamma):
        image = act(w, gamma)
        if image.refl.word not in words:
            return None
        return image.sign * eps == 1

    out = set()
    for gamma in fan.roots():
        keep = True
        for w in fan.elements:
            for eps in (1, -1):
                pa = positive_in_frame(w, eps, alpha)
                pb = positive_in_frame(w, eps, beta)
                if pa is None or pb is None or not (pa and pb):
                    continue
                pg = positive_in_frame(w, eps, gamma)
                if pg is None or not pg:
                    keep = False
                    break
            if not keep:
                break
        if keep:
            out.add(gamma)
    return frozenset(out)


def _fan_interval(fan, lift, alpha, beta):
    if alpha.refl == beta.refl:
        return frozenset({alpha, beta})
    va, vb = lift.vector(alpha), lift.vector(beta)
    out = set()
    for gamma in fan.roots():
        if is_between_real(lift.vector(gamma), va, vb, tol=fan.group.tol):
            out.add(gamma)
    return frozenset(out)


def reflect_from_betweenness(alpha, beta, fan=None, lift=None):
    """s_beta(alpha) recovered from interval cardinalities alone.

    Implements the determination lemma: with gamma the partner of beta
    (alpha in [beta, gamma] and [gamma, -beta] = {gamma, -beta}),
    m = |[beta, alpha]| and n = |[alpha, gamma]| decide where the image
    sits.  Must equal act(s_beta, alpha); callers may assert that.
    """
    group = alpha.refl.group
    if lift is None:
        lift = standard_lift(group)
    if alpha.refl == beta.refl:
        return -alpha
    if fan is None:
        fan = dihedral_fan(group, alpha.refl, beta.refl, lift)
    roots = fan.roots()
    inter = lambda x, y: _fan_interval(fan, lift, x, y)
    gamma = None
    for cand in roots:
        if cand == -beta or cand.refl == beta.refl:
            continue
        if alpha not in inter(beta, cand):
            continue
        if inter(cand, -beta) == frozenset({cand, -beta}):
            if gamma is not None:
                raise ArithmeticError("two opposite partners found")
            gamma = cand
    if gamma is None:
        raise WindowExhausted("no opposite partner of beta in the fan")
    m = len(inter(beta, alpha))
    n = len(inter(alpha, gamma))
    if m == n + 1:
        return beta
    side = inter(beta, gamma)
    if m < n + 1:
        hits = [d for d in side if len(inter(gamma, d)) == m - 1]
    else:
        hits = [d for d in side if len(inter(beta, d)) == n + 1]
    if len(hits) != 1:
        raise WindowExhausted(
            "interval cardinalities did not pin the image (fan too small?)"
        )
    return hits[0]


# -- root basis certification ----------------------------------------------


def dihedral_basis_check(alpha, beta, max_length=None, cap=5000):
    """Is {alpha, beta} of the form w(chi(W') x {eps}) inside W' = <s_a, s_b>?

    Enumerates the dihedral subgroup (bounded for infinite order) and
    searches all frames.  A hit is exact; a miss is exact only when the
    subgroup enumeration closed.
    """
    if alpha.refl == beta.refl:
        return False
    group = alpha.refl.group
    a, b = alpha.refl.element, beta.refl.element
    try:
        elements, closed = subgroup_closure(group, [a, b], cap=cap)
    except CapExceeded:
        bound = max_length or (4 * (a.length + b.length) + 8)
        elements, closed = subgroup_closure(
            group, [a, b], max_length=bound, cap=cap
        )
    words = {e.word for e in elements}
    refl = [
        e
        for e in elements
        if e.length % 2 == 1 and group.is_reflection(e)
    ]
    canon = []
    for t in refl:
        inside = {u for u in group.cocycle(t) if u.word in words}
        if inside == {t}:
            canon.append(t)
    if len(canon) != 2:
        if closed:
            raise ArithmeticError("dihedral subgroup without canonical pair")
        raise WindowExhausted("canonical pair not found within the window")
    c1, c2 = (reflection(t) for t in sorted(canon))
    target = frozenset({alpha, beta})
    for w in elements:
        for eps in (1, -1):
            pair = frozenset(
                {act(w, AbstractRoot(c1, eps)), act(w, AbstractRoot(c2, eps))}
            )
            if pair == target:
                return True
    if not closed:
        raise WindowExhausted("dihedral frame search exhausted the window")
    return False


@dataclass
class BasisReport:
    basis: bool
    certainty: str
    reason: str = ""
    positive_system: QuasiPositiveSystem = None


def is_abstract_root_basis(delta, window: Window, lift=None):
    """Certify an abstract root basis at finite rank.

    basis <=> the reflections generate W, every pair passes the dihedral
    basis check, and |delta| = |S|.  On success the unique positive system
    with delta as simple roots is returned (window-only for infinite W).
    """
    delta = sorted(set(delta))
    group = window.group
    certainty = EXACT if window.exact else WINDOW_ONLY
    refls = [alpha.refl for alpha in delta]
    if len(set(refls)) != len(refls):
        return BasisReport(False, EXACT, "two roots share a reflection")
    if len(delta) != group.rank:
        return BasisReport(
            False, EXACT, "|delta| = %d differs from |S| = %d" % (len(delta), group.rank)
        )
    for i in range(len(delta)):
        for j in range(i + 1, len(delta)):
            try:
                ok = dihedral_basis_check(delta[i], delta[j])
            except WindowExhausted:
                return BasisReport(
                    False, WINDOW_ONLY, "pair %r,%r undecided" % (delta[i], delta[j])
                )
            if not ok:
                # a miss with closed subgroup enumeration is exact evidence
                return BasisReport(
                    False,
                    EXACT,
                    "pair %r,%r fails the dihedral basis check"
                    % (delta[i], delta[j]),
                )
    gens = [t.element for t in refls]
    if window.exact:
        elements, _ = subgroup_closure(group, gens)
        generates = len(elements) == len(group.try_full_enumeration())
    else:
        from .coxeter import generates_whole_group

        bound = 2 * (window.length_bound or 8)
        generates, _ = generates_whole_group(group, gens, max_length=bound)
    if not generates:
        return BasisReport(
            False, certainty, "reflections do not generate the group"
        )
    bound = None if window.exact else (window.length_bound or 8) + 2
    signs = generated_system(delta, length_bound=bound)
    missing = [t for t in window.reflections if t not in signs]
    system = None
    if not missing:
        system = QuasiPositiveSystem(
            window,
            {t: signs[t] for t in window.reflections},
            kind="from-basis",
        )
        if window.exact and not is_biclosed(system.as_set(), window, lift):
            raise ArithmeticError(
                "certified basis produced a non-biclosed system"
            )
    return BasisReport(True, certainty, "", system)


def find_conjugator(qps: QuasiPositiveSystem, lift=None, check=True):
    """(w, eps) with Psi+ = eps * w(T^+), by greedy descent.

    Preconditions (verified when check=True): the system is biclosed and
    generative.  eps is normalized to +1 for finite W; for infinite windows
    it is chosen so that eps * Psi+ meets -T^+ in the smaller set.
    """
    window = qps.window
    group = window.group
    if check:
        if not is_biclosed(qps.as_set(), window, lift):
            raise PreconditionError("system is not biclosed")
        gen = is_generative(qps)
        if not gen.generative:
            raise PreconditionError("system is not generative")
    if window.exact:
        eps = 1
    else:
        negatives = sum(1 for t in window.reflections if qps.signs[t] == -1)
        eps = 1 if 2 * negatives <= len(window.reflections) else -1
    cur = qps if eps == 1 else qps.negate()
    word = []
    budget = len(window.reflections) + 1
    for _ in range(budget):
        pick = None
        for i in range(group.rank):
            t = reflection(group.generator(i))
            if t in cur.signs and cur.signs[t] == -1:
                pick = i
                break
        if pick is None:
            break
        cur = cur.act_by(group.generator(pick))
        word.append(pick)
    if any(sign == -1 for sign in cur.signs.values()):
        raise PreconditionError(
            "system is not a conjugate of the standard positive system"
        )
    return group.element(tuple(word)), eps
