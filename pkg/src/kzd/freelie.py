"""The nilpotent halves of a Kac-Moody algebra with Chevalley relations only.

n_- is the free Lie algebra on generators f_0..f_{r-1}; the Cartan part is
never materialized, every use reduces to pairing lookups through the Gram
matrix b_ij = (alpha_i, alpha_j).  Graded pieces are indexed by multidegrees
(occurrence counts of each generator).  Basis: standard bracketings of Lyndon
words over the generator alphabet, ordered lexicographically.

The raising side n_+ is stored as mirrored elements carrying a side tag, not
a second algebra.  All scalars are Fractions.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from . import ratlin

MINUS = -1
PLUS = +1

Q0 = Fraction(0)
Q1 = Fraction(1)


@dataclass(frozen=True)
class AlgebraData:
    """Rank, Gram matrix of the simple roots, and the mode flag.

    gram[i][j] = (alpha_i, alpha_j); symmetric.  In sln mode the matrix is
    the A_{N-1} Cartan form (2 on the diagonal, -1 on adjacent entries).
    """

    rank: int
    gram: tuple
    mode: str = "free"

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if len(self.gram) != self.rank or any(len(row) != self.rank for row in self.gram):
            raise ValueError("gram must be rank x rank")
        for i in range(self.rank):
            for j in range(self.rank):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram must be symmetric")
        if self.mode not in ("free", "sln"):
            raise ValueError("mode must be 'free' or 'sln'")
        if self.mode == "sln":
            expect = cartan_gram(self.rank + 1)
            if self.gram != expect:
                raise ValueError("sln mode requires the A_{N-1} Cartan form")

    def b(self, i, j):
        return self.gram[i][j]

    def root_pair(self, deg1, deg2):
        """(alpha(deg1), alpha(deg2)) through the Gram matrix."""
        total = Q0
        for i, ci in enumerate(deg1):
            if ci:
                for j, cj in enumerate(deg2):
                    if cj:
                        total += ci * cj * self.gram[i][j]
        return total


def make_algebra(gram_rows, mode="free"):
    gram = tuple(tuple(Fraction(x) for x in row) for row in gram_rows)
    return AlgebraData(rank=len(gram), gram=gram, mode=mode)


def cartan_gram(n_value):
    """Gram matrix of the A_{N-1} root system (rank N-1)."""
    r = n_value - 1
    rows = []
    for i in range(r):
        row = []
        for j in range(r):
            if i == j:
                row.append(Fraction(2))
            elif abs(i - j) == 1:
                row.append(Fraction(-1))
            else:
                row.append(Q0)
        rows.append(tuple(row))
    return tuple(rows)


# ---------------------------------------------------------------------------
# multidegrees and words

def degree_total(deg):
    return sum(deg)

def degree_add(a, b):
    return tuple(x + y for x, y in zip(a, b))

def degree_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))

def degree_leq(a, b):
    return all(x <= y for x, y in zip(a, b))

def unit_degree(i, r):
    return tuple(1 if k == i else 0 for k in range(r))


def word_degree(word, r):
    deg = [0] * r
    for a in word:
        deg[a] += 1
    return tuple(deg)


def multiset_perms(items):
    """Distinct permutations of a sorted item tuple, in lex order."""
    items = sorted(items)
    n = len(items)
    if n == 0:
        yield ()
        return

    def rec(remaining):
        if not remaining:
            yield ()
            return
        prev = None
        for k, x in enumerate(remaining):
            if x == prev:
                continue
            prev = x
            rest = remaining[:k] + remaining[k + 1:]
            for tail in rec(rest):
                yield (x,) + tail

    yield from rec(tuple(items))


def words_of_degree(deg):
    """All words with the given content, lex sorted."""
    letters = []
    for i, c in enumerate(deg):
        letters.extend([i] * c)
    return list(multiset_perms(tuple(letters)))


def is_lyndon(w):
    n = len(w)
    if n == 0:
        return False
    for k in range(1, n):
        if w[k:] + w[:k] <= w:
            return False
    return True


@functools.lru_cache(maxsize=None)
def lyndon_words(deg):
    if degree_total(deg) == 0:
        raise ValueError("zero multidegree has no basis")
    return tuple(w for w in words_of_degree(deg) if is_lyndon(w))


@functools.lru_cache(maxsize=None)
def standard_bracketing(word):
    """Right standard factorization of a Lyndon word, as a nested tuple tree."""
    if len(word) == 1:
        return word[0]
    # longest proper Lyndon suffix
    for start in range(1, len(word)):
        if is_lyndon(word[start:]):
            return (standard_bracketing(word[:start]),
                    standard_bracketing(word[start:]))
    raise ValueError("not a Lyndon word: %r" % (word,))


@functools.lru_cache(maxsize=None)
def lyndon_basis(deg):
    """Standard bracketings of the Lyndon words of one multidegree."""
    return tuple(standard_bracketing(w) for w in lyndon_words(deg))


def tree_letters(tree):
    if isinstance(tree, int):
        return (tree,)
    return tree_letters(tree[0]) + tree_letters(tree[1])


@functools.lru_cache(maxsize=None)
def expand_tree(tree):
    """Iterated-commutator expansion of a bracket tree, word -> int coeff."""
    if isinstance(tree, int):
        return {(tree,): 1}
    left = expand_tree(tree[0])
    right = expand_tree(tree[1])
    out = {}
    for wa, ca in left.items():
        for wb, cb in right.items():
            out[wa + wb] = out.get(wa + wb, 0) + ca * cb
            out[wb + wa] = out.get(wb + wa, 0) - ca * cb
    return {w: c for w, c in out.items() if c}


@functools.lru_cache(maxsize=None)
def _lyndon_expansions(deg):
    return tuple(expand_tree(t) for t in lyndon_basis(deg))


# ---------------------------------------------------------------------------
# elements

@dataclass(frozen=True)
class LieElement:
    """Homogeneous element of n_- (side=MINUS) or n_+ (side=PLUS).

    coeffs align with lyndon_basis(degree).  The zero element has degree None
    and an empty coefficient tuple.
    """

    degree: tuple
    coeffs: tuple
    side: int = MINUS

    @staticmethod
    def zero(side=MINUS):
        return LieElement(None, (), side)

    def is_zero(self):
        return self.degree is None or all(c == 0 for c in self.coeffs)

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree or self.side != other.side:
            raise ValueError("cannot add elements of different degree or side")
        return LieElement(self.degree,
                          tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                          self.side)

    def scale(self, c):
        if self.is_zero() or c == 0:
            return LieElement.zero(self.side)
        return LieElement(self.degree, tuple(c * x for x in self.coeffs), self.side)

    def __neg__(self):
        return self.scale(Fraction(-1))

    def mirror(self):
        """Same bracket trees on the opposite side (f_i <-> e_i, no sign)."""
        return LieElement(self.degree, self.coeffs, -self.side)

    def tau(self):
        """The involution f_i -> -e_i extended over bracket trees."""
        sign = Fraction((-1) ** degree_total(self.degree)) if self.degree else Q1
        return self.mirror().scale(sign)

    def terms(self):
        """(tree, coeff) pairs with nonzero coeff."""
        if self.is_zero():
            return []
        basis = lyndon_basis(self.degree)
        return [(basis[k], c) for k, c in enumerate(self.coeffs) if c]

    def expand_words(self):
        """Tensor-algebra expansion, word tuple -> Fraction."""
        out = {}
        if self.is_zero():
            return out
        for exp, c in zip(_lyndon_expansions(self.degree), self.coeffs):
            if c == 0:
                continue
            for w, k in exp.items():
                val = out.get(w, Q0) + c * k
                if val:
                    out[w] = val
                elif w in out:
                    del out[w]
        return out


def generator(i, r, side=MINUS):
    deg = tuple(1 if k == i else 0 for k in range(r))
    return LieElement(deg, (Q1,), side)


def from_tree(tree, r, side=MINUS):
    deg = word_degree(tree_letters(tree), r)
    basis = lyndon_basis(deg)
    coeffs = [Q0] * len(basis)
    try:
        coeffs[basis.index(tree)] = Q1
        return LieElement(deg, tuple(coeffs), side)
    except ValueError:
        return from_words(deg, {w: Fraction(c) for w, c in expand_tree(tree).items()}, side)


def from_words(deg, word_coeffs, side=MINUS):
    """Lyndon coordinates of a tensor-algebra combination lying in the Lie span.

    The expansion of a Lyndon bracketing is its word plus lex-greater words,
    so coordinates peel off in lex order; a nonzero residual means the input
    was not in the graded Lie piece.
    """
    residual = {w: Fraction(c) for w, c in word_coeffs.items() if c}
    if not residual:
        return LieElement.zero(side)
    words = lyndon_words(deg)
    exps = _lyndon_expansions(deg)
    coeffs = [Q0] * len(words)
    for k, w in enumerate(words):
        c = residual.get(w, Q0)
        if c == 0:
            continue
        coeffs[k] = c
        for ww, kk in exps[k].items():
            val = residual.get(ww, Q0) - c * kk
            if val:
                residual[ww] = val
            elif ww in residual:
                del residual[ww]
    if residual:
        raise ValueError("word combination is not in the free Lie algebra")
    if all(c == 0 for c in coeffs):
        return LieElement.zero(side)
    return LieElement(deg, tuple(coeffs), side)


@dataclass(frozen=True)
class WordCombination:
    """Element of the tensor algebra on one side, all words of one multidegree."""

    degree: tuple
    words: tuple   # ((word, coeff), ...) sorted by word
    side: int = MINUS

    @staticmethod
    def from_dict(deg, d, side=MINUS):
        return WordCombination(deg, tuple(sorted((w, c) for w, c in d.items() if c)), side)

    def as_dict(self):
        return dict(self.words)


def monomial_expansion(x):
    """Inclusion of n_- (or n_+) into its tensor algebra."""
    return WordCombination.from_dict(x.degree, x.expand_words(), x.side)


def delta_functional(word, x):
    """Coefficient of the monomial f_{word} in the expansion of x.

    A degree mismatch returns 0: the coefficient is necessarily zero.
    """
    if x.is_zero():
        return Q0
    if word_degree(word, len(x.degree)) != x.degree:
        return Q0
    return x.expand_words().get(tuple(word), Q0)


def bracket_reduce(x, y):
    """Free Lie bracket of same-side elements, reduced to Lyndon coordinates."""
    if x.is_zero() or y.is_zero():
        return LieElement.zero(x.side)
    if x.side != y.side:
        raise ValueError("bracket_reduce needs same-side elements")
    xa = x.expand_words()
    ya = y.expand_words()
    out = {}
    for wa, ca in xa.items():
        for wb, cb in ya.items():
            c = ca * cb
            for w, s in ((wa + wb, c), (wb + wa, -c)):
                val = out.get(w, Q0) + s
                if val:
                    out[w] = val
                elif w in out:
                    del out[w]
    return from_words(degree_add(x.degree, y.degree), out, x.side)


# ---------------------------------------------------------------------------
# the mixed bracket [n_+, n_-] and the forms K, S

def _h_on(element, hvec, alg):
    """[sum_i hvec_i h_i, element]; scalar by the side-signed root pairing."""
    if element.is_zero():
        return element
    pair = sum((hvec[i] * alg.root_pair(element.degree, unit_degree(i, alg.rank))
                for i in range(alg.rank) if hvec[i]), Q0)
    return element.scale(Fraction(element.side) * pair)


def ad_e(i, x, alg):
    """[e_i, x] for x in n_-: an n_- part and a Cartan coefficient of h_i.

    Uses [e_i, f_j] = delta_ij h_i, [h, f_j] = -<alpha_j, h> f_j and Jacobi.
    """
    if x.is_zero():
        return LieElement.zero(MINUS), Q0
    if x.side != MINUS:
        raise ValueError("ad_e lowers n_- elements")
    r = alg.rank
    lie = LieElement.zero(MINUS)
    cartan = Q0
    for tree, c in x.terms():
        part, h = _ad_e_tree(i, tree, alg)
        lie = lie + part.scale(c)
        cartan += c * h
    return lie, cartan


@functools.lru_cache(maxsize=None)
def _ad_e_tree_cached(i, tree, alg):
    if isinstance(tree, int):
        return LieElement.zero(MINUS), (Q1 if tree == i else Q0)
    left, right = tree
    r = alg.rank
    lelt = from_tree(left, r, MINUS)
    relt = from_tree(right, r, MINUS)
    la, lh = _ad_e_tree_cached(i, left, alg)
    ra, rh = _ad_e_tree_cached(i, right, alg)
    # [e_i, [L, R]] = [[e_i, L], R] + [L, [e_i, R]]
    out = bracket_reduce(la, relt) + bracket_reduce(lelt, ra)
    if lh:
        # [h_i, R] = -(alpha(deg R), alpha_i) R
        out = out + relt.scale(-lh * alg.root_pair(relt.degree, unit_degree(i, r)))
    if rh:
        # [L, h_i] = +(alpha(deg L), alpha_i) L
        out = out + lelt.scale(rh * alg.root_pair(lelt.degree, unit_degree(i, r)))
    return out, Q0


def _ad_e_tree(i, tree, alg):
    return _ad_e_tree_cached(i, tree, alg)


def bracket_pm(a_plus, b_minus, alg):
    """[a, b] with a in n_+, b in n_-: (n_- part, h vector, n_+ part)."""
    r = alg.rank
    hvec = [Q0] * r
    minus = LieElement.zero(MINUS)
    plus = LieElement.zero(PLUS)
    if a_plus.is_zero() or b_minus.is_zero():
        return minus, hvec, plus
    for tree, c in a_plus.terms():
        m, h, p = _bracket_pm_tree(tree, b_minus, alg)
        minus = minus + m.scale(c)
        plus = plus + p.scale(c)
        for i in range(r):
            hvec[i] += c * h[i]
    return minus, hvec, plus


def _bracket_pm_tree(tree, b, alg):
    r = alg.rank
    if isinstance(tree, int):
        if degree_total(b.degree) == 1:
            lie, h = ad_e(tree, b, alg)
            hvec = [Q0] * r
            hvec[tree] = h
            return lie, hvec, LieElement.zero(PLUS)
        lie, _ = ad_e(tree, b, alg)
        return lie, [Q0] * r, LieElement.zero(PLUS)
    left, right = tree
    lelt = from_tree(left, r, PLUS)
    relt = from_tree(right, r, PLUS)
    # [ [L,R], b ] = [L, [R, b]] - [R, [L, b]]
    m1, h1, p1 = _bracket_pm_tree(right, b, alg)
    t1 = _bracket_with_mixed(lelt, m1, h1, p1, alg)
    m2, h2, p2 = _bracket_pm_tree(left, b, alg)
    t2 = _bracket_with_mixed(relt, m2, h2, p2, alg)
    return (t1[0] + (-t2[0]),
            [x - y for x, y in zip(t1[1], t2[1])],
            t1[2] + (-t2[2]))


def _bracket_with_mixed(a_plus, minus, hvec, plus, alg):
    """[a_plus, minus + h + plus] for a plus-side basis element."""
    r = alg.rank
    out_m, out_h, out_p = bracket_pm(a_plus, minus, alg) if not minus.is_zero() \
        else (LieElement.zero(MINUS), [Q0] * r, LieElement.zero(PLUS))
    if any(hvec):
        # [a, h] = -[h, a]
        out_p = out_p + (-_h_on(a_plus, hvec, alg))
    if not plus.is_zero():
        out_p = out_p + bracket_reduce(a_plus, plus)
    return out_m, out_h, out_p


def invariant_form_K(x_minus, y_plus, alg):
    """The invariant pairing of opposite graded pieces.

    Recursion K(x, [L, R]) = K([x, L], R) down to K(f_i, e_j) = delta_ij;
    the value does not depend on how the n_+ argument is re-associated.
    """
    if x_minus.is_zero() or y_plus.is_zero():
        return Q0
    if x_minus.side != MINUS or y_plus.side != PLUS:
        raise ValueError("invariant_form_K pairs n_- with n_+")
    if len(x_minus.degree) != len(y_plus.degree):
        raise ValueError("invariant_form_K arguments have different ranks")
    if x_minus.degree != y_plus.degree:
        # distinct graded pieces are K-orthogonal
        return Q0
    if degree_total(x_minus.degree) == 1:
        return sum((cx * cy for cx, cy in zip(x_minus.coeffs, y_plus.coeffs)), Q0)
    total = Q0
    for tree, c in y_plus.terms():
        left, right = tree
        lelt = from_tree(left, alg.rank, PLUS)
        # [x, L] = -[L, x], lies in n_- strictly below x
        m, _, _ = bracket_pm(lelt, x_minus, alg)
        total += c * invariant_form_K(-m, from_tree(right, alg.rank, PLUS), alg)
    return total


@functools.lru_cache(maxsize=None)
def contravariant_gram_n(deg, alg):
    """Gram matrix of S(x, y) = -K(tau(x), y) on lyndon_basis(deg)."""
    basis = lyndon_basis(deg)
    n = len(basis)
    ell = degree_total(deg)
    sign = Fraction((-1) ** (ell + 1))
    elts = [from_tree(t, alg.rank, MINUS) for t in basis]
    out = [[Q0] * n for _ in range(n)]
    for a in range(n):
        for bi in range(a, n):
            # S(x_a, x_b) = (-1)^{l+1} K(x_b, mirror(x_a))
            val = sign * invariant_form_K(elts[bi], elts[a].mirror(), alg)
            out[a][bi] = val
            out[bi][a] = val
    return tuple(tuple(row) for row in out)


def _principal_pivot_set(gram):
    """Indices of an invertible principal submatrix of maximal size.

    Symmetric matrices over Q always have one of size equal to the rank;
    grow greedily by one index, falling back to pairs.
    """
    n = len(gram)
    full_rank = ratlin.rank([list(r) for r in gram]) if n else 0
    chosen = []

    def princ_rank(idx):
        sub = [[gram[i][j] for j in idx] for i in idx]
        return ratlin.rank(sub)

    while len(chosen) < full_rank:
        cur = len(chosen)
        grew = False
        for a in range(n):
            if a in chosen:
                continue
            if princ_rank(chosen + [a]) == cur + 1:
                chosen.append(a)
                grew = True
                break
        if grew:
            continue
        for a in range(n):
            if a in chosen:
                continue
            for b in range(a + 1, n):
                if b in chosen:
                    continue
                if princ_rank(chosen + [a, b]) == cur + 2:
                    chosen.extend([a, b])
                    grew = True
                    break
            if grew:
                break
        if not grew:
            raise AssertionError("no invertible principal submatrix found")
    return chosen


@functools.lru_cache(maxsize=None)
def quotient_dual_bases(deg, alg):
    """Bases of the S-quotient pieces, K-dual to each other.

    Returns (fbars, ebars): fbars are the pivot Lyndon elements representing
    the quotient of (n_-)_deg by ker S, ebars the n_+ family with
    K(fbar_l, ebar_k) = delta_lk exactly.  Full kernel gives empty lists.
    """
    gram = contravariant_gram_n(deg, alg)
    n = len(gram)
    if n == 0:
        return (), ()
    pivots = _principal_pivot_set(gram)
    if not pivots:
        return (), ()
    sub = [[gram[i][j] for j in pivots] for i in pivots]
    inv = ratlin.inverse(sub)
    basis = lyndon_basis(deg)
    ell = degree_total(deg)
    sign = Fraction((-1) ** (ell + 1))
    fbars = tuple(from_tree(basis[p], alg.rank, MINUS) for p in pivots)
    ebars = []
    for k in range(len(pivots)):
        acc = LieElement.zero(PLUS)
        for b in range(len(pivots)):
            c = sign * inv[k][b]
            if c:
                acc = acc + from_tree(basis[pivots[b]], alg.rank, PLUS).scale(c)
        ebars.append(acc)
    return fbars, tuple(ebars)


# ---------------------------------------------------------------------------
# dimension oracle helpers

def moebius(d):
    out = 1
    p = 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            out = -out
        p += 1
    if d > 1:
        out = -out
    return out


def witt_dimension(deg):
    """Multigraded Witt number (1/m) sum_{d | gcd} mu(d) (m/d)! / prod (m_i/d)!."""
    from math import gcd, factorial
    m = degree_total(deg)
    if m == 0:
        return 0
    g = 0
    for c in deg:
        g = gcd(g, c)
    total = 0
    for d in range(1, g + 1):
        if g % d:
            continue
        mu = moebius(d)
        if mu == 0:
            continue
        term = factorial(m // d)
        for c in deg:
            term //= factorial(c // d)
        total += mu * term
    assert total % m == 0
    return total // m


def all_bracketings(deg):
    """Every full bracketing of every word of the multidegree (brute force)."""
    words = words_of_degree(deg)

    @functools.lru_cache(maxsize=None)
    def trees(word):
        if len(word) == 1:
            return (word[0],)
        out = []
        for cut in range(1, len(word)):
            for lt in trees(word[:cut]):
                for rt in trees(word[cut:]):
                    out.append((lt, rt))
        return tuple(out)

    out = []
    for w in words:
        out.extend(trees(w))
    return out


def bracketing_span_rank(deg):
    """Rank of the span of all bracketings inside the tensor algebra."""
    words = words_of_degree(deg)
    pos = {w: k for k, w in enumerate(words)}
    red = ratlin.IntRowReducer(len(words))
    seen = set()
    for tree in all_bracketings(deg):
        exp = expand_tree(tree)
        if not exp:
            continue
        vec = [0] * len(words)
        for w, c in exp.items():
            vec[pos[w]] = c
        key = tuple(vec)
        if key in seen or tuple(-x for x in vec) in seen:
            continue
        seen.add(key)
        red.add(vec)
    return red.rank
