"""Dense exact linear algebra over Fraction.

Matrices are lists of row lists.  Sizes here are tiny (weight spaces and
graded Lie pieces), so plain Gauss-Jordan over Fraction is the right tool;
nothing is done in place.
"""

from __future__ import annotations

from fractions import Fraction

Q0 = Fraction(0)
Q1 = Fraction(1)


def zeros(nrows, ncols):
    return [[Q0] * ncols for _ in range(nrows)]


def identity(n):
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Q1
    return out


def mat_copy(a):
    return [row[:] for row in a]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a):
    return [[c * x for x in row] for row in a]


def mat_mul(a, b):
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    bt = list(zip(*b))
    return [[sum((ra[t] * col[t] for t in range(k)), Q0) for col in bt] for ra in a]


def mat_vec(a, v):
    return [sum((row[t] * v[t] for t in range(len(v))), Q0) for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def commutator(a, b):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def max_abs(a):
    best = Q0
    for row in a:
        for x in row:
            if abs(x) > best:
                best = abs(x)
    return best


def is_zero_matrix(a):
    return all(x == 0 for row in a for x in row)


def trace(a):
    return sum((a[i][i] for i in range(len(a))), Q0)


def rref(a):
    """Reduced row echelon form: returns (R, pivot column list)."""
    r = mat_copy(a)
    nrows = len(r)
    ncols = len(r[0]) if nrows else 0
    pivots = []
    row = 0
    for col in range(ncols):
        piv = None
        for i in range(row, nrows):
            if r[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        r[row], r[piv] = r[piv], r[row]
        inv = Q1 / r[row][col]
        r[row] = [x * inv for x in r[row]]
        for i in range(nrows):
            if i != row and r[i][col] != 0:
                c = r[i][col]
                r[i] = [x - c * y for x, y in zip(r[i], r[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    return r, pivots


def rank(a):
    if not a:
        return 0
    return len(rref(a)[1])


def nullspace(a):
    """Basis of the right kernel, as a list of vectors."""
    if not a:
        return []
    ncols = len(a[0])
    r, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Q0] * ncols
        v[fc] = Q1
        for i, pc in enumerate(pivots):
            v[pc] = -r[i][fc]
        basis.append(v)
    return basis


def solve(a, b):
    """Solve a x = b exactly; raises ValueError if inconsistent or under-determined."""
    n = len(a)
    ncols = len(a[0])
    aug = [a[i][:] + [b[i]] for i in range(n)]
    r, pivots = rref(aug)
    if ncols in pivots:
        raise ValueError("inconsistent linear system")
    if len(pivots) < ncols:
        raise ValueError("under-determined linear system")
    x = [Q0] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = r[i][ncols]
    return x


def inverse(a):
    n = len(a)
    aug = [a[i][:] + identity(n)[i] for i in range(n)]
    r, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in r]


class IntRowReducer:
    """Incremental integer row reduction, for rank counts over big vector sets.

    Rows are kept fraction-free (integer, gcd-normalized).  add() reduces the
    vector against the current echelon and keeps it when independent.
    """

    def __init__(self, ncols):
        self.ncols = ncols
        self.rows = []      # echelon rows, sorted by leading index
        self.leads = []

    @staticmethod
    def _normalize(v):
        from math import gcd
        g = 0
        for x in v:
            g = gcd(g, abs(x))
            if g == 1:
                break
        if g > 1:
            v = [x // g for x in v]
        return v

    def add(self, vec):
        """Reduce vec; returns True if it increased the rank."""
        v = list(vec)
        for lead, row in zip(self.leads, self.rows):
            if v[lead]:
                a, b = row[lead], v[lead]
                v = [a * x - b * y for x, y in zip(v, row)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            return False
        v = self._normalize(v)
        pos = 0
        while pos < len(self.leads) and self.leads[pos] < lead:
            pos += 1
        self.leads.insert(pos, lead)
        self.rows.insert(pos, v)
        return True

    @property
    def rank(self):
        return len(self.rows)
