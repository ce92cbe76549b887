"""Coxeter matrices and group elements in ShortLex normal form.

The word problem is solved geometrically: every group carries the standard
reflection representation on R^rank built from the pairing entries
-2cos(pi/m_rs) (=-2 for m=oo), whose simple roots are the coordinate basis
and hence linearly independent.  An element is reduced by greedily peeling
its least left descent, where `s` is a left descent of `w` exactly when
w^-1(alpha_s) is a negative root.  The greedy peel yields the
lexicographically least reduced word, so within a fixed length the normal
form is the ShortLex one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CapExceeded, InputError, PreconditionError

INF = math.inf

#: Absolute tolerance for sign/zero tests of root coordinates.
DEFAULT_TOL = 1e-9

#: Default ceiling on the number of elements any enumeration may produce.
DEFAULT_ELEMENT_CAP = 200_000

_KEY_SCALE = 1e9


def _veckey(vec):
    """Round a float vector onto the 1e-9 grid for use as a dict key."""
    return tuple(int(round(x * _KEY_SCALE)) or 0 for x in vec)


def _matkey(mat):
    return tuple(_veckey(row) for row in mat)


@dataclass(frozen=True)
class CoxeterMatrix:
    """Symmetric matrix of pairwise orders m_rs with 1 on the diagonal.

    Entries are ints >= 2 off the diagonal, or math.inf.  In JSON files an
    infinite entry is encoded as 0 to stay integer-typed.
    """

    generators: tuple
    orders: tuple

    def __post_init__(self):
        n = len(self.generators)
        if len(set(self.generators)) != n:
            raise InputError("generator names must be unique")
        if len(self.orders) != n or any(len(row) != n for row in self.orders):
            raise InputError("order matrix must be square of rank %d" % n)
        for i in range(n):
            if self.orders[i][i] != 1:
                raise InputError("diagonal entries must all be 1")
            for j in range(n):
                m = self.orders[i][j]
                if m != self.orders[j][i]:
                    raise InputError("order matrix must be symmetric")
                if i != j and m != INF and (int(m) != m or m < 2):
                    raise InputError(
                        "off-diagonal orders must be integers >= 2 or infinite"
                    )

    @property
    def rank(self):
        return len(self.generators)

    def order(self, i, j):
        return self.orders[i][j]

    def index_of(self, name):
        try:
            return self.generators.index(name)
        except ValueError:
            raise InputError("unknown generator %r" % (name,)) from None

    def irreducible_components(self):
        """Connected components of the Coxeter graph (edges where m >= 3)."""
        n = self.rank
        seen = [False] * n
        components = []
        for start in range(n):
            if seen[start]:
                continue
            stack, comp = [start], []
            seen[start] = True
            while stack:
                i = stack.pop()
                comp.append(i)
                for j in range(n):
                    if not seen[j] and i != j and self.orders[i][j] >= 3:
                        seen[j] = True
                        stack.append(j)
            components.append(tuple(sorted(comp)))
        return components

    def submatrix(self, indices):
        indices = tuple(indices)
        gens = tuple(self.generators[i] for i in indices)
        rows = tuple(
            tuple(self.orders[i][j] for j in indices) for i in indices
        )
        return CoxeterMatrix(gens, rows)


def coxeter_matrix(generators, orders):
    """Build a CoxeterMatrix from lists, mapping 0 entries to infinity."""
    rows = tuple(
        tuple(INF if m == 0 else m for m in row) for row in orders
    )
    return CoxeterMatrix(tuple(generators), rows)


def named_matrix(name):
    """Classical types by name: A2, B2/C2, G2, I2(m), A3, B3, H3, It2 (infinite)."""
    name = name.strip()
    two = {"A2": 3, "B2": 4, "C2": 4, "G2": 6, "H2": 5}
    if name in two:
        return coxeter_matrix(("r", "s"), [[1, two[name]], [two[name], 1]])
    if name.startswith("I2(") and name.endswith(")"):
        inner = name[3:-1]
        m = 0 if inner in ("oo", "inf") else int(inner)
        return coxeter_matrix(("r", "s"), [[1, m], [m, 1]])
    if name == "A3":
        return coxeter_matrix(
            ("r", "s", "t"), [[1, 3, 2], [3, 1, 3], [2, 3, 1]]
        )
    if name in ("B3", "C3"):
        return coxeter_matrix(
            ("r", "s", "t"), [[1, 4, 2], [4, 1, 3], [2, 3, 1]]
        )
    if name == "H3":
        return coxeter_matrix(
            ("r", "s", "t"), [[1, 5, 2], [5, 1, 3], [2, 3, 1]]
        )
    if name in ("Bt2", "Ct2"):  # affine, graph r =4= s =4= t
        return coxeter_matrix(
            ("r", "s", "t"), [[1, 4, 2], [4, 1, 4], [2, 4, 1]]
        )
    if name == "At2":  # affine triangle
        return coxeter_matrix(
            ("r", "s", "t"), [[1, 3, 3], [3, 1, 3], [3, 3, 1]]
        )
    if name == "At1":
        return coxeter_matrix(("r", "s"), [[1, 0], [0, 1]])
    raise InputError("unknown named Coxeter matrix %r" % (name,))


class GroupElement:
    """A group element stored as its ShortLex-reduced word of generator indices.

    Equality and hashing go through the word, which is a complete invariant
    because the normal form is unique.  Instances are interned per group, so
    identity comparison usually works too; never construct one directly, use
    CoxeterGroup.element / multiply / inverse.
    """

    __slots__ = ("group", "word", "_mat", "_inv_mat")

    def __init__(self, group, word, mat):
        self.group = group
        self.word = word
        self._mat = mat
        self._inv_mat = None

    @property
    def length(self):
        return len(self.word)

    @property
    def mat(self):
        return self._mat

    @property
    def inv_mat(self):
        if self._inv_mat is None:
            self._inv_mat = self.group._word_matrix(tuple(reversed(self.word)))
        return self._inv_mat

    def is_identity(self):
        return not self.word

    def inverse(self):
        return self.group.inverse(self)

    def __mul__(self, other):
        return self.group.multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group is other.group and self.word == other.word

    def __hash__(self):
        return hash(self.word)

    def __lt__(self, other):
        return (self.length, self.word) < (other.length, other.word)

    def __repr__(self):
        return "<%s>" % (self.group.word_str(self.word) or "e")


class CoxeterGroup:
    """A Coxeter system (W, S) with cached normal-form machinery."""

    def __init__(self, matrix, tol=DEFAULT_TOL, element_cap=DEFAULT_ELEMENT_CAP):
        self.matrix = matrix
        self.tol = tol
        self.element_cap = element_cap
        n = matrix.rank
        # Standard based root datum: <alpha_i, alpha_j-check> = -2cos(pi/m_ij).
        pairing = np.full((n, n), 2.0)
        for i in range(n):
            for j in range(n):
                if i != j:
                    m = matrix.orders[i][j]
                    pairing[i][j] = -2.0 if m == INF else -2.0 * math.cos(math.pi / m)
        self.standard_pairing = pairing
        self._gen_mats = []
        eye = np.eye(n)
        for i in range(n):
            self._gen_mats.append(eye - np.outer(eye[i], pairing[:, i]))
        self._elements = {}
        self.identity = self._intern(())
        self._cocycle_cache = {}
        self._key_index = None  # matrix key -> element, once fully enumerated
        self._full_list = None
        self._reflection_flags = {}

    # -- basic bookkeeping -------------------------------------------------

    @property
    def rank(self):
        return self.matrix.rank

    def generator(self, i):
        return self.element((i,))

    def generators(self):
        return [self.generator(i) for i in range(self.rank)]

    def word_str(self, word):
        names = self.matrix.generators
        if all(len(str(nm)) == 1 for nm in names):
            return "".join(str(names[i]) for i in word)
        return " ".join(str(names[i]) for i in word)

    def parse_word(self, text):
        """Parse a word string; characters when all names are single letters,
        whitespace-separated names otherwise.  '' and 'e' denote the identity."""
        text = text.strip()
        if text in ("", "e"):
            return ()
        names = [str(nm) for nm in self.matrix.generators]
        if any(ch.isspace() for ch in text) or any(len(nm) > 1 for nm in names):
            tokens = text.split()
        else:
            tokens = list(text)
        return tuple(self.matrix.index_of(tok) for tok in tokens)

    def _word_matrix(self, word):
        n = self.rank
        mat = np.eye(n)
        for i in word:
            mat = mat @ self._gen_mats[i]
        return mat

    def _is_negative_vec(self, vec):
        return vec.min() < -self.tol

    def _intern(self, word):
        elt = self._elements.get(word)
        if elt is None:
            elt = GroupElement(self, word, self._word_matrix(word))
            self._elements[word] = elt
        return elt

    # -- normal form -------------------------------------------------------

    def _greedy_word(self, inv_mat):
        """Recover the ShortLex word of v from the matrix of v^-1.

        Column s of the matrix is v^-1(alpha_s); s is a left descent of v
        exactly when that column is a negative root.
        """
        n = self.rank
        word = []
        mat = inv_mat
        while True:
            for s in range(n):
                if self._is_negative_vec(mat[:, s]):
                    word.append(s)
                    mat = mat @ self._gen_mats[s]
                    break
            else:
                break
        if np.abs(mat - np.eye(n)).max() > 1e-6:
            raise ArithmeticError(
                "normal form drifted away from the identity; "
                "increase tolerance or reduce word length"
            )
        return tuple(word)

    def element(self, word):
        """ShortLex normal form of an arbitrary word of generator indices."""
        word = tuple(word)
        for i in word:
            if not (0 <= i < self.rank):
                raise InputError("generator index %r out of range" % (i,))
        if word in self._elements:
            return self._elements[word]
        inv = self._word_matrix(tuple(reversed(word)))
        return self._intern(self._greedy_word(inv))

    def element_from_str(self, text):
        return self.element(self.parse_word(text))

    def normalize(self, word):
        return self.element(word)

    def multiply(self, x, y):
        if x.group is not self or y.group is not self:
            raise InputError("elements belong to different groups")
        if not x.word:
            return y
        if not y.word:
            return x
        if self._key_index is not None:
            elt = self._key_index.get(_matkey(x.mat @ y.mat))
            if elt is not None:
                return elt
        return self._intern(self._greedy_word(y.inv_mat @ x.inv_mat))

    def inverse(self, x):
        if x.group is not self:
            raise InputError("element belongs to a different group")
        word = x.word
        if word in self._elements and len(word) <= 1:
            return x
        if self._key_index is not None:
            elt = self._key_index.get(_matkey(x.inv_mat))
            if elt is not None:
                return elt
        return self._intern(self._greedy_word(x.mat))

    def conjugate(self, w, t):
        """w t w^-1."""
        return self.multiply(self.multiply(w, t), self.inverse(w))

    def product(self, elements):
        out = self.identity
        for e in elements:
            out = self.multiply(out, e)
        return out

    # -- descents and length ----------------------------------------------

    def left_descents(self, w):
        """{s in S : l(sw) < l(w)}; empty exactly for the identity."""
        inv = w.inv_mat
        return frozenset(
            s for s in range(self.rank) if self._is_negative_vec(inv[:, s])
        )

    def right_descents(self, w):
        mat = w.mat
        return frozenset(
            s for s in range(self.rank) if self._is_negative_vec(mat[:, s])
        )

    # -- enumeration -------------------------------------------------------

    def enumerate_elements(self, max_length, cap=None):
        """All elements of length <= max_length in ShortLex order.

        When the group closes before the bound the result is the whole group
        and fast multiplication via matrix keys is switched on.
        """
        if max_length < 0:
            raise InputError("max_length must be >= 0")
        cap = self.element_cap if cap is None else cap
        if self._full_list is not None and (
            self._full_list[-1].length <= max_length
        ):
            return list(self._full_list)
        levels = [[self.identity]]
        total = 1
        closed = False
        while len(levels) <= max_length:
            nxt = {}
            for w in levels[-1]:
                for s in range(self.rank):
                    if s in self.right_descents(w):
                        continue
                    x = self.element(w.word + (s,))
                    nxt[x.word] = x
            if not nxt:
                closed = True
                break
            total += len(nxt)
            if total > cap:
                raise CapExceeded(
                    "element cap %d exceeded at length %d" % (cap, len(levels))
                )
            levels.append([nxt[w] for w in sorted(nxt)])
        out = [w for level in levels for w in level]
        if closed:
            self._full_list = list(out)
            self._key_index = {_matkey(w.mat): w for w in out}
        return out

    def try_full_enumeration(self, cap=None, max_length=64):
        """Enumerate the whole group if it is finite and small; None otherwise."""
        if self._full_list is not None:
            return list(self._full_list)
        try:
            out = self.enumerate_elements(max_length, cap=cap)
        except CapExceeded:
            return None
        return list(self._full_list) if self._full_list is not None else None

    def is_finite(self, cap=None, max_length=64):
        return self.try_full_enumeration(cap=cap, max_length=max_length) is not None

    def order(self):
        full = self.try_full_enumeration()
        if full is None:
            raise CapExceeded("group did not close within the element cap")
        return len(full)

    def longest_element(self):
        full = self.try_full_enumeration()
        if full is None:
            raise CapExceeded("no longest element: group did not close")
        return full[-1]

    # -- reflections ---------------------------------------------------

    def is_reflection(self, t):
        """Membership in T = union of wSw^-1, by palindromic stripping.

        A reflection of length > 1 always admits a generator a with
        l(ata) = l(t) - 2; repeated stripping reaches a generator exactly
        when t is a reflection.
        """
        cached = self._reflection_flags.get(t.word)
        if cached is not None:
            return cached
        ok = self._strip_reflection(t) is not None
        self._reflection_flags[t.word] = ok
        return ok

    def _strip_reflection(self, t):
        """Return (w, s) with t = w s w^-1 and lengths adding, or None."""
        if t.length % 2 == 0:
            return None
        prefix = []
        cur = t
        while cur.length > 1:
            for a in range(self.rank):
                g = self.generator(a)
                stripped = self.multiply(self.multiply(g, cur), g)
                if stripped.length == cur.length - 2:
                    prefix.append(a)
                    cur = stripped
                    break
            else:
                return None
        return self.element(tuple(prefix)), cur.word[0]

    def reflections_up_to(self, max_length):
        """All reflections t with l(t) <= max_length, ShortLex sorted."""
        return [
            w
            for w in self.enumerate_elements(max_length)
            if w.length % 2 == 1 and self.is_reflection(w)
        ]

    def all_reflections(self):
        full = self.try_full_enumeration()
        if full is None:
            raise CapExceeded("infinite group: use reflections_up_to")
        return [w for w in full if w.length % 2 == 1 and self.is_reflection(w)]

    # -- reflection cocycle --------------------------------------------

    def cocycle(self, w):
        """N(w) = {t in T : l(tw) < l(w)} via prefix reflections of the word."""
        cached = self._cocycle_cache.get(w.word)
        if cached is not None:
            return cached
        out = set()
        prefix = self.identity
        for s in w.word:
            g = self.generator(s)
            out.add(self.conjugate(prefix, g))
            prefix = self.multiply(prefix, g)
        result = frozenset(out)
        if len(result) != w.length:
            raise ArithmeticError("normal form of %r is not reduced" % (w,))
        self._cocycle_cache[w.word] = result
        return result

    def eta(self, w, t):
        """Sign twist in w(t, eps) = (wtw^-1, eta(w, t) eps)."""
        return -1 if t in self.cocycle(self.inverse(w)) else 1


# -- conjugacy chains of simple reflections ------------------------------


@dataclass(frozen=True)
class ConjugacyChain:
    """Certificate that w conjugates generator a_0 to a_k through rank-2 moves.

    For each step i: a_{i-1}, a_i lie in the 2-element subset J_i, w_i is in
    the standard parabolic on J_i, w_i a_{i-1} = a_i w_i, and the lengths of
    the w_i sum to l(w) with w = w_k ... w_1.
    """

    group: CoxeterGroup
    subsets: tuple
    factors: tuple
    letters: tuple

    @property
    def k(self):
        return len(self.factors)

    def verify(self, w, r, s):
        g = self.group
        if self.letters[0] != r or self.letters[-1] != s:
            return False
        prod = g.identity
        total = 0
        for i, v in enumerate(self.factors):
            j = self.subsets[i]
            if len(j) != 2:
                return False
            if self.letters[i] not in j or self.letters[i + 1] not in j:
                return False
            if any(letter not in j for letter in v.word):
                return False
            lhs = g.multiply(v, g.generator(self.letters[i]))
            rhs = g.multiply(g.generator(self.letters[i + 1]), v)
            if lhs != rhs:
                return False
            total += v.length
            prod = g.multiply(v, prod)
        return prod == w and total == w.length


def _rank2_parabolic(group, a, c, max_length):
    """Nontrivial elements of W_{a,c} up to the given length, with words."""
    out = []
    for first in (a, c):
        word = []
        cur = first
        for _ in range(max_length):
            word.append(cur)
            out.append(group.element(tuple(word)))
            if out[-1].length != len(word):
                out.pop()
                break
            cur = c if cur == a else a
    seen = {}
    for v in out:
        seen[v.word] = v
    return list(seen.values())


def simple_conjugacy_witness(group, w, r, s):
    """A ConjugacyChain for w r w^-1 = s with l(wr) = l(w) + 1.

    Found by breadth-first search over rank-2 parabolic moves peeled from the
    right of w; the chain always exists under the precondition.
    """
    gr = group.generator(r)
    gs = group.generator(s)
    if group.conjugate(w, gr) != gs:
        raise PreconditionError("w does not conjugate r to s")
    if group.multiply(w, gr).length != w.length + 1:
        raise PreconditionError("l(wr) must equal l(w) + 1")
    start = (r, w)
    if w.is_identity():
        return ConjugacyChain(group, (), (), (r,))
    # BFS states: (current letter, unprocessed left factor), tracking moves.
    frontier = [(start, ())]
    seen = {(r, w.word)}
    while frontier:
        nxt = []
        for (a, u), trail in frontier:
            for c in range(group.rank):
                if c == a:
                    continue
                for v in _rank2_parabolic(group, a, c, u.length):
                    u2 = group.multiply(u, group.inverse(v))
                    if u2.length != u.length - v.length:
                        continue
                    a2_elt = group.conjugate(v, group.generator(a))
                    if a2_elt.length != 1:
                        continue
                    a2 = a2_elt.word[0]
                    if a2 not in (a, c):
                        continue
                    move = ((a, c), v, a2)
                    if u2.is_identity():
                        if a2 != s:
                            continue
                        trail2 = trail + (move,)
                        subsets = tuple(m[0] for m in trail2)
                        factors = tuple(m[1] for m in trail2)
                        letters = (r,) + tuple(m[2] for m in trail2)
                        chain = ConjugacyChain(group, subsets, factors, letters)
                        if not chain.verify(w, r, s):
                            raise ArithmeticError("witness failed verification")
                        return chain
                    key = (a2, u2.word)
                    if key not in seen:
                        seen.add(key)
                        nxt.append(((a2, u2), trail + (move,)))
        frontier = nxt
    raise PreconditionError("no conjugacy chain found; precondition violated?")


def enumerate_up_to(matrix, max_length, cap=DEFAULT_ELEMENT_CAP, tol=DEFAULT_TOL):
    group = CoxeterGroup(matrix, tol=tol, element_cap=cap)
    return group, group.enumerate_elements(max_length)


def length_profile(elements):
    """Counts of elements per length, as a list indexed by length."""
    if not elements:
        return []
    top = max(w.length for w in elements)
    out = [0] * (top + 1)
    for w in elements:
        out[w.length] += 1
    return out


def subgroup_closure(group, gens, max_length=None, cap=DEFAULT_ELEMENT_CAP):
    """Closure of <gens> by right multiplication, optionally length-pruned.

    Returns (elements, closed) where closed means the closure is complete.
    With a length prune the result may miss elements whose shortest product
    expression passes through longer ones, so closed=False then.
    """
    gens = [g for g in gens if not g.is_identity()]
    seen = {group.identity.word: group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group.multiply(x, g)
                if max_length is not None and y.length > max_length:
                    continue
                if y.word not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded("subgroup closure cap exceeded")
                    seen[y.word] = y
                    nxt.append(y)
        frontier = nxt
    closed = max_length is None
    return list(seen.values()), closed


def generates_whole_group(group, gens, max_length=None):
    """True if every standard generator lies in the pruned closure of <gens>.

    A True answer is exact (witnessed by explicit products); a False answer
    is only window-relative when a length prune was applied.
    """
    elements, closed = subgroup_closure(group, gens, max_length=max_length)
    words = {e.word for e in elements}
    ok = all((i,) in words for i in range(group.rank))
    return ok, (closed or ok)
