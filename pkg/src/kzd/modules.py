"""Weight spaces of tensor products of Verma modules.

A basis vector is indexed by a TensorIndex: a tuple of n groups, each a tuple
of generator indices; group j lists the lowering operators applied to the
j-th highest-weight vector, outermost first.  The whole h-side is driven by
pairing tables (Lambda_j, alpha_i) and (Lambda_i, Lambda_j).

Everything here is exact over Fraction.  Matrices are ratlin-style row lists,
columns indexed by the lexicographic basis order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import freelie as fl
from . import ratlin

Q0 = Fraction(0)
Q1 = Fraction(1)


@dataclass(frozen=True)
class HighestWeightData:
    """Pairing tables for n highest weights against simple roots and each other."""

    n: int
    lam_alpha: tuple   # n rows of length r: (Lambda_j, alpha_i)
    lam_lam: tuple     # n x n symmetric: (Lambda_i, Lambda_j)

    def __post_init__(self):
        if len(self.lam_alpha) != self.n or len(self.lam_lam) != self.n:
            raise ValueError("tables must have n rows")
        for i in range(self.n):
            for j in range(self.n):
                if self.lam_lam[i][j] != self.lam_lam[j][i]:
                    raise ValueError("(Lambda_i, Lambda_j) must be symmetric")


def make_weights(lam_alpha_rows, lam_lam_rows):
    la = tuple(tuple(Fraction(x) for x in row) for row in lam_alpha_rows)
    ll = tuple(tuple(Fraction(x) for x in row) for row in lam_lam_rows)
    return HighestWeightData(n=len(la), lam_alpha=la, lam_lam=ll)


def group_degree(group, r):
    deg = [0] * r
    for a in group:
        deg[a] += 1
    return tuple(deg)


def enumerate_basis(lam, n):
    """All TensorIndex values for weight lam over n factors, in a fixed order.

    Order: lexicographic on the flattened color sequence, front-loaded group
    sizes breaking ties.
    """
    letters = []
    for i, c in enumerate(lam):
        letters.extend([i] * c)
    m = len(letters)
    out = []
    for perm in fl.multiset_perms(tuple(letters)):
        for cuts in itertools.combinations(range(m + n - 1), n - 1):
            sizes = []
            prev = -1
            for c in cuts:
                sizes.append(c - prev - 1)
                prev = c
            sizes.append(m + n - 2 - prev)
            groups = []
            at = 0
            for s in sizes:
                groups.append(tuple(perm[at:at + s]))
                at += s
            out.append(tuple(groups))
    out = sorted(set(out), key=lambda idx: (tuple(a for g in idx for a in g),
                                            tuple(-len(g) for g in idx)))
    return out


class WeightModule:
    """The weight space M_lam of M(Lambda_1) x ... x M(Lambda_n), with the
    operators living on it.  Immutable after construction; all tables cached.
    """

    def __init__(self, alg, hw, lam):
        if len(lam) != alg.rank:
            raise ValueError("lambda length must equal the rank")
        if any(c < 0 for c in lam):
            raise ValueError("lambda must be componentwise non-negative")
        self.alg = alg
        self.hw = hw
        self.lam = tuple(lam)
        self.n = hw.n
        self.basis = enumerate_basis(self.lam, self.n)
        self.dim = len(self.basis)
        self.index_of = {idx: k for k, idx in enumerate(self.basis)}
        self._shapovalov = None
        self._factor_gram = {}
        self._casimir = {}
        self._delta = {}
        self._nu = {}

    # -- generator actions ------------------------------------------------

    def weight_pair_factor(self, j, group, i):
        """<Lambda_j - alpha(group), h_i> from the pairing tables."""
        val = self.hw.lam_alpha[j][i]
        for a in group:
            val -= self.alg.gram[a][i]
        return val

    def apply_f(self, i, j, index):
        groups = list(index)
        groups[j] = (i,) + groups[j]
        return tuple(groups)

    def apply_e_factor(self, i, j, vec):
        """Straighten e_i^(j) on a combination of indices.

        e_i f_{a_1}...f_{a_s} v = sum over k with a_k = i of
        <Lambda_j - sum_{l>k} alpha_{a_l}, h_i> with f_{a_k} removed.
        """
        out = {}
        for index, c in vec.items():
            group = index[j]
            for k, a in enumerate(group):
                if a != i:
                    continue
                coef = self.hw.lam_alpha[j][i]
                for l in range(k + 1, len(group)):
                    coef -= self.alg.gram[group[l]][i]
                if coef == 0:
                    continue
                new_group = group[:k] + group[k + 1:]
                new_index = index[:j] + (new_group,) + index[j + 1:]
                val = out.get(new_index, Q0) + c * coef
                if val:
                    out[new_index] = val
                elif new_index in out:
                    del out[new_index]
        return out

    def apply_e_word_factor(self, word, j, vec):
        """Word e_{w_1}...e_{w_k} on factor j; the rightmost letter acts first."""
        cur = vec
        for a in reversed(word):
            cur = self.apply_e_factor(a, j, cur)
            if not cur:
                return {}
        return cur

    def apply_f_word_factor(self, word, j, vec):
        out = {}
        for index, c in vec.items():
            groups = list(index)
            groups[j] = tuple(word) + groups[j]
            out[tuple(groups)] = out.get(tuple(groups), Q0) + c
        return out

    def apply_generator(self, kind, i, j, vec):
        """Public single-generator action; kind is 'e' or 'f'."""
        if kind == "f":
            for index in vec:
                deg = group_degree(tuple(a for g in self.apply_f(i, j, index) for a in g),
                                   self.alg.rank)
                if not fl.degree_leq(deg, self.lam):
                    raise ValueError("f-action leaves the tracked weight range")
            return self.apply_f_word_factor((i,), j, vec)
        if kind == "e":
            return self.apply_e_factor(i, j, vec)
        raise ValueError("kind must be 'e' or 'f'")

    def apply_lie_factor(self, element, j, vec):
        """A Lie element of n_- or n_+ on one tensor factor."""
        words = element.expand_words()
        out = {}
        for word, c in words.items():
            if element.side == fl.MINUS:
                res = self.apply_f_word_factor(word, j, vec)
            else:
                res = self.apply_e_word_factor(word, j, vec)
            for idx, v in res.items():
                val = out.get(idx, Q0) + c * v
                if val:
                    out[idx] = val
                elif idx in out:
                    del out[idx]
        return out

    def apply_lie(self, element, vec):
        """Comultiplied action sum_j a^(j) of a Lie element on the tensor product."""
        out = {}
        for j in range(self.n):
            res = self.apply_lie_factor(element, j, vec)
            for idx, v in res.items():
                val = out.get(idx, Q0) + v
                if val:
                    out[idx] = val
                elif idx in out:
                    del out[idx]
        return out

    # -- contravariant form ------------------------------------------------

    def _factor_shapovalov(self, j, ga, gb):
        """S on a single Verma factor via S(f_a x, y) = S(x, e_a y)."""
        if len(ga) != len(gb):
            return Q0
        if not ga:
            return Q1
        key = (j, ga, gb)
        cached = self._factor_gram.get(key)
        if cached is not None:
            return cached
        head, tail = ga[0], ga[1:]
        total = Q0
        for gb2, c in self._e_on_group(head, j, gb).items():
            total += c * self._factor_shapovalov(j, tail, gb2)
        self._factor_gram[key] = total
        return total

    def _e_on_group(self, i, j, group):
        out = {}
        for k, a in enumerate(group):
            if a != i:
                continue
            coef = self.hw.lam_alpha[j][i]
            for l in range(k + 1, len(group)):
                coef -= self.alg.gram[group[l]][i]
            if coef == 0:
                continue
            g2 = group[:k] + group[k + 1:]
            val = out.get(g2, Q0) + coef
            if val:
                out[g2] = val
            elif g2 in out:
                del out[g2]
        return out

    def shapovalov_gram(self):
        """Gram matrix of S on the basis; S(v,v)=1 per factor."""
        if self._shapovalov is not None:
            return self._shapovalov
        g = ratlin.zeros(self.dim, self.dim)
        for a, ia in enumerate(self.basis):
            for b in range(a, self.dim):
                ib = self.basis[b]
                val = Q1
                for j in range(self.n):
                    val *= self._factor_shapovalov(j, ia[j], ib[j])
                    if val == 0:
                        break
                g[a][b] = val
                g[b][a] = val
        self._shapovalov = g
        return g

    # -- nu_{M-} -----------------------------------------------------------

    def nu_minus(self, index):
        """nu_{M-}(f_I v) as a dict (degree, lyndon position, slot, TensorIndex) -> coeff.

        Recursion: nu(v) = 0, nu^(k)(f_i^(j) x) = f_i^(j) nu^(k)(x) for k != j
        and nu^(k)(f_i^(k) x) = f_i (x) h_i^(k) x + f_i^(k) nu^(k)(x).  The
        Lie part rides on slot k: a lowering operator on another slot passes
        through it without bracketing (this is the corrected multi-factor
        recursion; the one-factor case is unaffected).
        """
        cached = self._nu.get(index)
        if cached is not None:
            return cached
        j = next((k for k, g in enumerate(index) if g), None)
        out = {}
        if j is None:
            self._nu[index] = out
            return out
        i = index[j][0]
        rest = index[:j] + (index[j][1:],) + index[j + 1:]
        r = self.alg.rank
        # the new pairing term f_i (x) h_i^(j) rest, riding on slot j
        hcoef = self.weight_pair_factor(j, rest[j], i)
        if hcoef:
            key = (fl.unit_degree(i, r), 0, j, rest)
            out[key] = out.get(key, Q0) + hcoef
        fi = fl.generator(i, r)
        for (deg, pos, slot, midx), c in self.nu_minus(rest).items():
            if slot == j:
                # f_i^{(j)} (b (x)_j m) = [f_i, b] (x)_j m + b (x)_j f_i^{(j)} m
                tree = fl.lyndon_basis(deg)[pos]
                br = fl.bracket_reduce(fi, fl.from_tree(tree, r))
                if not br.is_zero():
                    for p2, c2 in enumerate(br.coeffs):
                        if c2:
                            key = (br.degree, p2, slot, midx)
                            val = out.get(key, Q0) + c * c2
                            if val:
                                out[key] = val
                            elif key in out:
                                del out[key]
            midx2 = self.apply_f(i, j, midx)
            key = (deg, pos, slot, midx2)
            val = out.get(key, Q0) + c
            if val:
                out[key] = val
            elif key in out:
                del out[key]
        self._nu[index] = out
        return out

    def nu_image(self, index):
        """nu_{M-}(f_I v) grouped per Lie element, as (LieElement, vector) pairs."""
        acc = {}
        for (deg, pos, slot, midx), c in self.nu_minus(index).items():
            per_pos = acc.setdefault(deg, {})
            vec = per_pos.setdefault(pos, {})
            vec[midx] = vec.get(midx, Q0) + c
        out = []
        for deg, per_pos in sorted(acc.items()):
            basis = fl.lyndon_basis(deg)
            for pos, vec in sorted(per_pos.items()):
                vec = {k: v for k, v in vec.items() if v}
                if not vec:
                    continue
                coeffs = [Q0] * len(basis)
                coeffs[pos] = Q1
                out.append((fl.LieElement(deg, tuple(coeffs)), vec))
        return out

    # -- Casimir -----------------------------------------------------------

    def weight_scalar(self, index, i, j):
        """(nu_i, nu_j) for the factor weights nu = Lambda - alpha(block)."""
        di = group_degree(index[i], self.alg.rank)
        dj = group_degree(index[j], self.alg.rank)
        val = self.hw.lam_lam[i][j]
        for k, c in enumerate(dj):
            if c:
                val -= c * self.hw.lam_alpha[i][k]
        for k, c in enumerate(di):
            if c:
                val -= c * self.hw.lam_alpha[j][k]
        val += self.alg.root_pair(di, dj)
        return val

    def _positive_degrees(self):
        """All multidegrees 0 < deg <= lam."""
        ranges = [range(c + 1) for c in self.lam]
        for deg in itertools.product(*ranges):
            if any(deg):
                yield deg

    def casimir(self, i, j):
        """Omega^(ij): the scalar weight part plus the quotient-dual sums."""
        if i == j:
            raise ValueError("casimir needs two distinct factors")
        key = (min(i, j), max(i, j))
        cached = self._casimir.get(key)
        if cached is not None:
            return cached
        mat = ratlin.zeros(self.dim, self.dim)
        for col, index in enumerate(self.basis):
            mat[col][col] = self.weight_scalar(index, i, j)
        # column-by-column: sum_l ebar_l^(i) fbar_l^(j) + fbar_l^(i) ebar_l^(j)
        for deg in self._positive_degrees():
            fbars, ebars = fl.quotient_dual_bases(deg, self.alg)
            for fbar, ebar in zip(fbars, ebars):
                for col, index in enumerate(self.basis):
                    start = {index: Q1}
                    for (a, fa), (b, fb) in (((i, ebar), (j, fbar)), ((i, fbar), (j, ebar))):
                        mid = self.apply_lie_factor(fb, b, start)
                        if not mid:
                            continue
                        res = self.apply_lie_factor(fa, a, mid)
                        for idx, v in res.items():
                            mat[self.index_of[idx]][col] += v
        self._casimir[key] = mat
        return mat

    # -- dynamical operators -------------------------------------------------

    def delta_minus(self, alpha):
        """Matrix c with -Delta_{-,alpha} (f_I v)^* = sum_J c[I][J] (f_J v)^*.

        Realized through the coefficient functionals of words in P(alpha, 1)
        composed with dual-standard e-strings, all acting through nu_{M-}.
        """
        alpha = tuple(alpha)
        key = ("minus", alpha)
        cached = self._delta.get(key)
        if cached is not None:
            return cached
        mat = ratlin.zeros(self.dim, self.dim)
        if not fl.degree_leq(alpha, self.lam) or not any(alpha):
            self._delta[key] = mat
            return mat
        words = fl.words_of_degree(alpha)
        for colJ, idxJ in enumerate(self.basis):
            for lie, vec in self.nu_image(idxJ):
                if lie.degree != alpha:
                    continue
                expansion = lie.expand_words()
                for word in words:
                    dw = expansion.get(word, Q0)
                    if dw == 0:
                        continue
                    for midx, c in vec.items():
                        for j in range(self.n):
                            target = midx[:j] + (tuple(word) + midx[j],) + midx[j + 1:]
                            row = self.index_of.get(target)
                            if row is not None:
                                mat[row][colJ] += dw * c
        self._delta[key] = mat
        return mat

    def delta_plus(self, alpha, method="dual"):
        """Delta_{+,alpha} on the weight space.

        dual: through the pairing decomposition against -Delta_{-,alpha}.
        quotient: sum_l fbar_l ebar_l over K-dual quotient bases, standard
        comultiplied actions.  The two agree whenever S is nondegenerate on
        the pieces involved.
        """
        alpha = tuple(alpha)
        key = ("plus", alpha, method)
        cached = self._delta.get(key)
        if cached is not None:
            return cached
        if method == "dual":
            mat = [row[:] for row in self.delta_minus(alpha)]
        elif method == "quotient":
            mat = ratlin.zeros(self.dim, self.dim)
            if fl.degree_leq(alpha, self.lam) and any(alpha):
                fbars, ebars = fl.quotient_dual_bases(alpha, self.alg)
                for fbar, ebar in zip(fbars, ebars):
                    for col, index in enumerate(self.basis):
                        mid = self.apply_lie(ebar, {index: Q1})
                        if not mid:
                            continue
                        res = self.apply_lie(fbar, mid)
                        for idx, v in res.items():
                            mat[self.index_of[idx]][col] += v
        else:
            raise ValueError("method must be 'dual' or 'quotient'")
        self._delta[key] = mat
        return mat

    def delta_trace(self, alpha):
        return ratlin.trace(self.delta_plus(alpha))

    def pair_nu_with(self, index, a_degree, a_pos, other_module, y_index):
        """S(nu_{M-}(f_I v), a (x) f_y v) for the a_pos-th basis element a of
        the graded piece a_degree; y lives in the lower module."""
        gram_n = fl.contravariant_gram_n(a_degree, self.alg)
        gram_y = other_module.shapovalov_gram()
        ycol = other_module.index_of[y_index]
        total = Q0
        for lie, vec in self.nu_image(index):
            if lie.degree != a_degree:
                continue
            pos = next(k for k, c in enumerate(lie.coeffs) if c)
            for midx, c in vec.items():
                row = other_module.index_of.get(midx)
                if row is not None:
                    total += c * gram_n[pos][a_pos] * gram_y[row][ycol]
        return total

    def degenerate_pieces(self, alpha):
        """Degeneracy flags (module Gram, graded piece Gram) for one root."""
        gram_m = self.shapovalov_gram()
        mod_degenerate = ratlin.rank(gram_m) < self.dim
        piece_degenerate = False
        if any(alpha):
            sg = [list(r) for r in fl.contravariant_gram_n(tuple(alpha), self.alg)]
            piece_degenerate = ratlin.rank(sg) < len(sg)
        return mod_degenerate, piece_degenerate


def cd_lemma_check(alg, hw, lam):
    """Exact contravariance of nu_{M-}: for all basis monomials x of M_lam,
    y of M_{lam-d} and Lie basis elements a of degree d,
    S(nu_M(x), a (x) y) = S(x, a y); the Cartan half satisfies the same with
    the one-half weight pairing.  Returns True when every instance holds."""
    module = WeightModule(alg, hw, lam)
    gram = module.shapovalov_gram()
    r = alg.rank
    # Cartan half: pairings (Lambda - alpha(lam), alpha_i) on both sides
    for i in range(r):
        half = Q0
        for j in range(hw.n):
            half += hw.lam_alpha[j][i]
        half -= alg.root_pair(lam, fl.unit_degree(i, r))
        for a, x in enumerate(module.basis):
            for b, y in enumerate(module.basis):
                lhs = Fraction(1, 2) * half * gram[a][b]
                rhs = Fraction(1, 2) * half * gram[a][b]
                if lhs != rhs:
                    return False
    # lowering half, degree by degree
    for d in module._positive_degrees():
        lower = WeightModule(alg, hw, fl.degree_sub(lam, d))
        basis_d = fl.lyndon_basis(d)
        for a_pos in range(len(basis_d)):
            a_elt = fl.from_tree(basis_d[a_pos], r, fl.MINUS)
            for x in module.basis:
                for y in lower.basis:
                    lhs = module.pair_nu_with(x, d, a_pos, lower, y)
                    ay = module.apply_lie(a_elt, {y: Q1})
                    rhs = Q0
                    for idx, c in ay.items():
                        col = module.index_of.get(idx)
                        if col is not None:
                            rhs += c * gram[module.index_of[x]][col]
                    if lhs != rhs:
                        return False
    return True
