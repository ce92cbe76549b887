"""The abstract root system T x {+-1} of a Coxeter system.

Reflections are certified conjugates of generators; abstract roots are
(reflection, sign) pairs.  W acts by w(t, eps) = (w t w^-1, eta(w, t) eps)
where eta(w, t) = -1 exactly when t lies in N(w^-1), N being the reflection
cocycle.  Quasi-positive systems are stored as explicit sign maps over a
window of reflections; rule-backed systems (standard, conjugates, class
signs) materialize lazily.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .coxeter import CoxeterGroup, GroupElement, subgroup_closure
from .errors import (
    CapExceeded,
    InputError,
    PreconditionError,
    WindowExhausted,
)

EXACT = "EXACT"
WINDOW_ONLY = "WINDOW_ONLY"


@functools.total_ordering
class Reflection:
    """A certified element of T = union of w S w^-1.

    Construction verifies membership by exhibiting (w, s) with t = w s w^-1;
    the witness is kept on the instance.
    """

    __slots__ = ("element", "witness_conjugator", "witness_generator")

    def __init__(self, element: GroupElement):
        strip = element.group._strip_reflection(element)
        if strip is None:
            raise InputError("%r is not a reflection" % (element,))
        self.element = element
        self.witness_conjugator, self.witness_generator = strip

    @property
    def group(self):
        return self.element.group

    @property
    def length(self):
        return self.element.length

    @property
    def word(self):
        return self.element.word

    def __eq__(self, other):
        if not isinstance(other, Reflection):
            return NotImplemented
        return self.element == other.element

    def __hash__(self):
        return hash(("refl", self.element.word))

    def __lt__(self, other):
        if not isinstance(other, Reflection):
            return NotImplemented
        return self.element < other.element

    def __repr__(self):
        return "t[%s]" % (self.group.word_str(self.word) or "e")


def _refl_cache(group):
    cache = getattr(group, "_reflection_objects", None)
    if cache is None:
        cache = {}
        group._reflection_objects = cache
    return cache


def reflection(element: GroupElement) -> Reflection:
    cache = _refl_cache(element.group)
    t = cache.get(element.word)
    if t is None:
        t = Reflection(element)
        cache[element.word] = t
    return t


@dataclass(frozen=True, order=True)
class AbstractRoot:
    refl: Reflection
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InputError("sign must be +-1")

    def __neg__(self):
        return AbstractRoot(self.refl, -self.sign)

    def __repr__(self):
        return "(%s,%+d)" % (
            self.refl.group.word_str(self.refl.word) or "e",
            self.sign,
        )


def root(element_or_refl, sign=1) -> AbstractRoot:
    if isinstance(element_or_refl, Reflection):
        return AbstractRoot(element_or_refl, sign)
    return AbstractRoot(reflection(element_or_refl), sign)


class Window:
    """A finite set of reflections: all of T for finite W, or T_L = {l(t) <= L}."""

    def __init__(self, group, reflections, length_bound, exact):
        self.group = group
        self.reflections = tuple(sorted(reflections))
        self.length_bound = length_bound
        self.exact = exact
        self._words = frozenset(t.word for t in self.reflections)

    @classmethod
    def full(cls, group: CoxeterGroup):
        elements = group.try_full_enumeration()
        if elements is None:
            raise CapExceeded(
                "group did not close; use Window.up_to for infinite groups"
            )
        refl = [reflection(w) for w in group.all_reflections()]
        return cls(group, refl, None, True)

    @classmethod
    def up_to(cls, group: CoxeterGroup, length_bound):
        refl = [reflection(w) for w in group.reflections_up_to(length_bound)]
        exact = group.try_full_enumeration() is not None
        return cls(group, refl, length_bound, exact)

    @classmethod
    def auto(cls, group: CoxeterGroup, length_bound=12):
        full = group.try_full_enumeration()
        if full is not None:
            return cls.full(group)
        return cls.up_to(group, length_bound)

    def __contains__(self, t):
        if isinstance(t, Reflection):
            return t.word in self._words
        if isinstance(t, GroupElement):
            return t.word in self._words
        return False

    def __len__(self):
        return len(self.reflections)

    def require(self, t: Reflection, context=""):
        if t.word not in self._words:
            raise WindowExhausted(
                "reflection %r escapes the window%s"
                % (t, " (%s)" % context if context else "")
            )
        return t

    def roots(self):
        """All abstract roots over the window, positive signs first."""
        out = [AbstractRoot(t, 1) for t in self.reflections]
        out.extend(AbstractRoot(t, -1) for t in self.reflections)
        return out


# -- cocycles and the W-action -------------------------------------------


def cocycle(group: CoxeterGroup, w: GroupElement):
    """Standard reflection cocycle N(w) as a frozenset of Reflections."""
    return frozenset(reflection(t) for t in group.cocycle(w))


def act(w: GroupElement, alpha: AbstractRoot) -> AbstractRoot:
    group = w.group
    t = alpha.refl.element
    conj = group.conjugate(w, t)
    return AbstractRoot(reflection(conj), group.eta(w, t) * alpha.sign)


class QuasiPositiveSystem:
    """One sign per reflection over a window."""

    def __init__(self, window: Window, signs, kind="explicit", data=None):
        self.window = window
        self.signs = dict(signs)
        self.kind = kind
        self.data = data
        missing = [t for t in window.reflections if t not in self.signs]
        if missing:
            raise InputError("sign map misses reflections: %r" % (missing[:3],))
        for t, eps in self.signs.items():
            if eps not in (1, -1):
                raise InputError("sign for %r must be +-1" % (t,))

    # -- constructors ------------------------------------------------------

    @classmethod
    def standard(cls, window: Window):
        return cls(window, {t: 1 for t in window.reflections}, kind="standard")

    @classmethod
    def from_rule(cls, window: Window, sign_fn, kind="rule", data=None):
        return cls(
            window,
            {t: sign_fn(t) for t in window.reflections},
            kind=kind,
            data=data,
        )

    @classmethod
    def from_roots(cls, window: Window, roots):
        signs = {}
        for alpha in roots:
            window.require(alpha.refl, "explicit system")
            if signs.setdefault(alpha.refl, alpha.sign) != alpha.sign:
                raise InputError("both signs given for %r" % (alpha.refl,))
        return cls(window, signs)

    @classmethod
    def conjugate_standard(cls, window: Window, w: GroupElement, eps=1):
        """eps * w(T^+), materialized through the action."""
        group = window.group
        signs = {}
        for t in window.reflections:
            pre = group.conjugate(group.inverse(w), t.element)
            image = act(w, AbstractRoot(reflection(pre), 1))
            signs[image.refl] = eps * image.sign
        missing = [t for t in window.reflections if t not in signs]
        if missing:
            raise WindowExhausted(
                "conjugating the standard system leaves the window"
            )
        return cls(window, signs, kind="conjugate", data=(w, eps))

    @classmethod
    def class_signs(cls, window: Window, class_assignment):
        """One sign per reflection conjugacy class (Example-style systems)."""
        classes = reflection_classes(window)
        signs = {}
        for cls_set, eps in zip(classes, class_assignment):
            for t in cls_set:
                signs[t] = eps
        return cls(window, signs, kind="class-signs", data=tuple(class_assignment))

    # -- queries -----------------------------------------------------------

    def sign_of(self, t: Reflection):
        eps = self.signs.get(t)
        if eps is None:
            raise WindowExhausted("reflection %r outside the system" % (t,))
        return eps

    def __contains__(self, alpha: AbstractRoot):
        return self.sign_of(alpha.refl) == alpha.sign

    def roots(self):
        return tuple(
            AbstractRoot(t, self.signs[t]) for t in self.window.reflections
        )

    def as_set(self):
        return frozenset(self.roots())

    def negate(self):
        return QuasiPositiveSystem(
            self.window,
            {t: -e for t, e in self.signs.items()},
            kind="negated " + self.kind,
        )

    def act_by(self, w: GroupElement):
        signs = {}
        for t, eps in self.signs.items():
            image = act(w, AbstractRoot(t, eps))
            self.window.require(image.refl, "acting on the system")
            signs[image.refl] = image.sign
        return QuasiPositiveSystem(self.window, signs, kind="acted")

    def __eq__(self, other):
        if not isinstance(other, QuasiPositiveSystem):
            return NotImplemented
        return self.window is other.window and self.signs == other.signs

    def __hash__(self):
        return hash(frozenset(self.signs.items()))


def cocycle_of_qps(qps: QuasiPositiveSystem, w: GroupElement):
    """N_Psi(w) = {s_alpha : alpha in Psi+ and w^-1(alpha) in -Psi+}."""
    group = qps.window.group
    winv = group.inverse(w)
    out = set()
    for t in qps.window.reflections:
        alpha = AbstractRoot(t, qps.signs[t])
        image = act(winv, alpha)
        qps.window.require(image.refl, "cocycle of quasi-positive system")
        if image.sign != qps.signs[image.refl]:
            out.add(t)
    return frozenset(out)


@dataclass
class CompatibilityReport:
    compatible: bool
    witness: frozenset
    identity_checked: bool


def compatibility(qps1, qps2, sample=None):
    """Compatibility witness A = {s_alpha : alpha in Psi+ and -alpha in Psi'+}.

    On the standard abstract root system the sign group acts simply
    transitively on fibers, so any two quasi-positive systems over the same
    window are compatible; the cocycle identity
    N_1(w) + w A w^-1 = N_2(w) + A is verified on sample elements.
    """
    if qps1.window is not qps2.window:
        raise InputError("systems live over different windows")
    window = qps1.window
    group = window.group
    a = frozenset(
        t for t in window.reflections if qps1.signs[t] != qps2.signs[t]
    )
    if sample is None:
        sample = group.generators()
        if len(window.reflections) > 0:
            sample = sample + [
                group.multiply(x, y)
                for x in group.generators()
                for y in group.generators()
            ]
    checked = True
    for w in sample:
        try:
            n1 = cocycle_of_qps(qps1, w)
            n2 = cocycle_of_qps(qps2, w)
            conj = frozenset(
                reflection(group.conjugate(w, t.element)) for t in a
            )
        except WindowExhausted:
            checked = False
            continue
        if n1 ^ conj != n2 ^ a:
            return CompatibilityReport(False, a, True)
    return CompatibilityReport(True, a, checked)


# -- simple roots, generativity, chi -------------------------------------


def simple_roots_of(qps: QuasiPositiveSystem):
    """Roots alpha with s_alpha(Psi+ \\ {alpha}) inside Psi+, over the window.

    Returns (roots, certainty); certainty is EXACT when the window is all of
    T for a finite group, WINDOW_ONLY otherwise.
    """
    window = qps.window
    out = []
    for t in window.reflections:
        alpha = AbstractRoot(t, qps.signs[t])
        good = True
        for u in window.reflections:
            if u is t:
                continue
            beta = AbstractRoot(u, qps.signs[u])
            image = act(t.element, beta)
            if image.refl.word not in window._words:
                continue  # outside the window: unknown, tolerated
            if image.sign != qps.signs[image.refl]:
                good = False
                break
        if good:
            out.append(alpha)
    certainty = EXACT if window.exact else WINDOW_ONLY
    return frozenset(out), certainty


def simple_reflections_of(qps: QuasiPositiveSystem):
    roots_, certainty = simple_roots_of(qps)
    return frozenset(alpha.refl for alpha in roots_), certainty


@dataclass
class GenerativityReport:
    generative: bool
    certainty: str
    simple_reflections: frozenset


def is_generative(qps: QuasiPositiveSystem, closure_length=None):
    """Whether the simple reflections generate W.

    For finite W the subgroup closure is exhaustive, so the answer is exact.
    Otherwise the closure is pruned to the window length; a positive answer
    is still witnessed by explicit products, a negative one is window-only.
    """
    window = qps.window
    group = window.group
    simples, certainty = simple_reflections_of(qps)
    gens = [t.element for t in simples]
    if window.exact:
        elements, _ = subgroup_closure(group, gens)
        generative = len(elements) == len(group.try_full_enumeration())
        return GenerativityReport(generative, certainty, simples)
    bound = closure_length
    if bound is None:
        bound = 2 * (window.length_bound or 8)
    ok, found_exact = generates_whole(group, gens, bound)
    cert = EXACT if (ok and certainty == EXACT) else WINDOW_ONLY
    return GenerativityReport(ok, cert, simples)


def generates_whole(group, gens, bound):
    from .coxeter import generates_whole_group

    return generates_whole_group(group, gens, max_length=bound)


def chi(group: CoxeterGroup, generators, window: Window = None):
    """Canonical Coxeter generators of the reflection subgroup <generators>.

    chi(W') = {t in T meet W' : N(t) meet W' = {t}}.  The subgroup closure
    must complete (finite W', or finite W), else WindowExhausted is raised.
    """
    gens = [t.element if isinstance(t, Reflection) else t for t in generators]
    for g in gens:
        if not group.is_reflection(g):
            raise InputError("chi needs reflections, got %r" % (g,))
    try:
        elements, closed = subgroup_closure(group, gens)
    except CapExceeded:
        raise WindowExhausted("subgroup closure exceeded the element cap")
    words = {e.word for e in elements}
    out = []
    for e in elements:
        if e.length % 2 == 0 or not group.is_reflection(e):
            continue
        n_in = [u for u in group.cocycle(e) if u.word in words]
        if len(n_in) == 1:
            out.append(reflection(e))
    result = frozenset(out)
    if len(result) > len(gens):
        raise ArithmeticError("chi produced more generators than supplied")
    return result


def reflection_classes(window: Window):
    """Conjugacy classes of reflections, as orbits under the generators.

    Orbits are computed inside the window; exact for a full window, and
    flagged by the window otherwise (rank-2 chains realize conjugacy, so a
    wide enough window gives the true classes).
    """
    group = window.group
    words = dict((t.word, t) for t in window.reflections)
    unseen = set(words)
    classes = []
    while unseen:
        start = min(unseen, key=lambda w: (len(w), w))
        unseen.discard(start)
        orbit = {start}
        frontier = [words[start].element]
        while frontier:
            nxt = []
            for t in frontier:
                for i in range(group.rank):
                    conj = group.conjugate(group.generator(i), t)
                    if conj.word in words and conj.word not in orbit:
                        orbit.add(conj.word)
                        unseen.discard(conj.word)
                        nxt.append(conj)
            frontier = nxt
        classes.append(frozenset(words[w] for w in orbit))
    classes.sort(key=lambda c: min((t.length, t.word) for t in c))
    return classes


# -- subgroup transport and induced systems ------------------------------


@dataclass
class TransportResult:
    y: GroupElement
    chi_source: frozenset
    chi_target: frozenset

    def carry(self, alpha: AbstractRoot) -> AbstractRoot:
        return act(self.y, alpha)


def transport_subgroup(group, subgroup_generators, w, window: Window = None):
    """The unique y in wW' with N(y^-1) meet W' empty, plus chi on both sides.

    y is the minimal-length element of the coset wW'; conjugation by y (not
    by w, which may differ by a right W'-factor) carries the abstract root
    system of W' onto that of wW'w^-1, matching positives and simples.
    """
    gens = [
        t.element if isinstance(t, Reflection) else t
        for t in subgroup_generators
    ]
    try:
        elements, closed = subgroup_closure(group, gens)
    except CapExceeded:
        raise WindowExhausted("subgroup closure exceeded the element cap")
    if not closed:
        raise WindowExhausted("subgroup closure incomplete")
    words = {e.word for e in elements}
    best = None
    for u in elements:
        cand = group.multiply(w, u)
        if best is None or cand.length < best.length:
            best = cand
    n_inv = group.cocycle(group.inverse(best))
    if any(t.word in words for t in n_inv):
        raise ArithmeticError("minimal coset element fails its cocycle test")
    chi_src = chi(group, gens)
    chi_tgt = frozenset(
        reflection(group.conjugate(best, t.element)) for t in chi_src
    )
    direct = chi(group, [group.conjugate(w, g) for g in gens])
    if direct != chi_tgt:
        raise ArithmeticError("transported chi disagrees with direct chi")
    return TransportResult(best, chi_src, chi_tgt)


def induced_subsystem(qps: QuasiPositiveSystem, subgroup_generators):
    """Psi+ restricted to T' = T meet W', with its simple reflections.

    The simple reflections of the restriction equal the canonical generators
    of W' computed relative to (W, S_Psi) -- i.e. with the cocycle of Psi+.
    """
    window = qps.window
    group = window.group
    gens = [
        t.element if isinstance(t, Reflection) else t
        for t in subgroup_generators
    ]
    elements, closed = subgroup_closure(group, gens)
    if not closed:
        raise WindowExhausted("subgroup closure incomplete")
    words = {e.word for e in elements}
    sub_refl = [t for t in window.reflections if t.word in words]
    sub_window = Window(group, sub_refl, window.length_bound, window.exact)
    restricted = QuasiPositiveSystem(
        sub_window,
        {t: qps.signs[t] for t in sub_refl},
        kind="induced",
    )
    # chi of W' relative to (W, S_Psi): cocycle taken with respect to Psi+.
    rel_chi = set()
    for t in sub_refl:
        n_psi = cocycle_of_qps(qps, t.element)
        inside = {u for u in n_psi if u.word in words}
        if inside == {t}:
            rel_chi.add(t)
    simples, _ = simple_reflections_of(restricted)
    if frozenset(rel_chi) != simples:
        raise ArithmeticError(
            "induced simple reflections disagree with relative chi"
        )
    return restricted


def verify_simple_family(family):
    """Check the odd-order compatibility rule for a candidate simple family.

    family is a set of roots alpha_r, one per reflection r in S'.  It is the
    simple system of some quasi-positive system iff
    (rt)^m(alpha_r) = alpha_t whenever the order of rt is the odd number
    2m + 1.  Even and infinite orders impose nothing.
    """
    items = list(family)
    if not items:
        return True
    group = items[0].refl.group
    for alpha in items:
        for beta in items:
            if alpha.refl == beta.refl:
                continue
            r = alpha.refl.element
            t = beta.refl.element
            rt = group.multiply(r, t)
            order = _element_order(group, rt, cap=200)
            if order is None or order % 2 == 0:
                continue
            m = (order - 1) // 2
            power = group.identity
            for _ in range(m):
                power = group.multiply(power, rt)
            if act(power, alpha) != beta:
                return False
    return True


def _element_order(group, x, cap=200, length_cap=96):
    """Order of x by powering; None means infinite (length blow-up or cap)."""
    cur = x
    for n in range(1, cap + 1):
        if cur.is_identity():
            return n
        if cur.length > length_cap:
            return None
        cur = group.multiply(cur, x)
    return None


def generated_system(family, length_bound=None):
    """The quasi-positive system {w(alpha_r) : l'(w s_r) > l'(w)} of a family.

    Requires the family to pass verify_simple_family.  l' is the length
    function of (W, S') computed by a Cayley-graph BFS over S'; for infinite
    W the BFS is truncated at length_bound and the result is window-only.
    """
    items = sorted(family)
    if not items:
        raise InputError("empty family")
    group = items[0].refl.group
    if not verify_simple_family(items):
        raise PreconditionError("family fails the odd-order rule")
    gens = [alpha.refl.element for alpha in items]
    signs = {}
    frontier = [(group.identity, 0)]
    lengths = {group.identity.word: 0}
    while frontier:
        nxt = []
        for w, lw in frontier:
            for alpha, g in zip(items, gens):
                ws = group.multiply(w, g)
                known = lengths.get(ws.word)
                if known is None:
                    if length_bound is not None and lw + 1 > length_bound:
                        continue
                    lengths[ws.word] = lw + 1
                    nxt.append((ws, lw + 1))
                    known = lw + 1
                if known > lw:
                    image = act(w, alpha)
                    prev = signs.setdefault(image.refl, image.sign)
                    if prev != image.sign:
                        raise ArithmeticError(
                            "generated system assigns both signs to %r"
                            % (image.refl,)
                        )
        frontier = nxt
    return signs
