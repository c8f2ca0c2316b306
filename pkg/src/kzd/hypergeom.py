"""The analytic layer: master-function integrands over ordered chambers.

A solution row integrates Phi_mu^{1/kappa} against the weight-function
m-forms over one chamber z_j < t_* < ... < z_{j+1} per basis index.  On a
chamber every factor of the master function keeps one sign, so the branch is
pinned per cell: |factor|^p times the constant phase exp(i pi p) for each
negative factor.  Each symmetrization term is a pure product of powers and
is integrated with endpoint-matched Gauss-Jacobi rules.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import modules as wm
from . import connections as cx
from . import symmetrize as sym
from .quadrature import ConvergenceError, AccuracyError, quad_interval, quad_tail


@dataclass(frozen=True)
class MasterExponents:
    """Raw pairing tables of the integrand exponents; the global 1/kappa
    power is kept separate."""

    zz: tuple        # n x n: (Lambda_i, Lambda_j)
    tz: tuple        # m x n: -(alpha_{c(k)}, Lambda_j)
    tt: tuple        # m x m: (alpha_{c(k)}, alpha_{c(l)})
    t_lin: tuple     # m: <alpha_{c(k)}, mu>
    z_lin: tuple     # n: <Lambda_j, mu>
    kappa: float
    coloring: tuple


def master_exponents(alg, hw, lam, mu, kappa):
    c = sym.coloring(lam)
    m = len(c)
    n = hw.n
    zz = tuple(tuple(float(hw.lam_lam[i][j]) for j in range(n)) for i in range(n))
    tz = tuple(tuple(-float(hw.lam_alpha[j][c[k]]) for j in range(n)) for k in range(m))
    tt = tuple(tuple(float(alg.gram[c[k]][c[l]]) for l in range(m)) for k in range(m))
    t_lin = tuple(float(mu.alpha[c[k]]) for k in range(m))
    z_lin = tuple(float(mu.lam[j]) for j in range(n))
    return MasterExponents(zz, tz, tt, t_lin, z_lin, float(kappa), c)


def check_convergence_regime(exps):
    """Positivity conditions under which the chamber integrals converge."""
    kappa = exps.kappa
    m = len(exps.coloring)
    for k in range(m):
        for l in range(k + 1, m):
            if exps.tt[k][l] / kappa <= 0:
                raise ConvergenceError("(alpha,alpha)/kappa must be positive")
    for k in range(m):
        for j in range(len(exps.zz)):
            if exps.tz[k][j] / kappa <= 0:
                raise ConvergenceError("-(alpha,Lambda)/kappa must be positive")
        if exps.t_lin[k] / kappa <= 0:
            raise ConvergenceError("<alpha,mu>/kappa must be positive on the tail")


# ---------------------------------------------------------------------------
# chambers

@dataclass(frozen=True)
class Cell:
    """Ordered chamber z_j < t_{b_1} < ... < t_{b_s} < z_{j+1} per block,
    with z_{n+1} = infinity; blocks hold integration-variable ids."""

    index: tuple
    blocks: tuple
    bounded: bool

    def variable_count(self):
        return sum(len(b) for b in self.blocks)


def cells(z, lam, n):
    """One chamber per basis index; the slots of each block take the smallest
    unused variable of their color, ascending."""
    try:
        zs = [float(x) for x in z]
    except (TypeError, ValueError):
        raise ValueError("marked points must be real")
    if any(zs[i] >= zs[i + 1] for i in range(len(zs) - 1)):
        raise ValueError("marked points must be real and increasing")
    if len(zs) != n:
        raise ValueError("z must have length n")
    out = []
    for index in wm.enumerate_basis(tuple(lam), n):
        blocks = sym.canonical_lift(index, tuple(lam))
        out.append(Cell(index=index, blocks=blocks, bounded=(len(blocks[-1]) == 0)))
    return out


def weight_function(index, z, t, lam):
    """Coefficient of the weight-function form against dt_1 ^ ... ^ dt_m.

    The signed wedge sum collapses to a plain sum of chain products over the
    symmetrization assignments: the permutation sign cancels against the
    wedge-reordering sign.
    """
    total = None
    for k_index in sym.sigma_of(index, tuple(lam)):
        term = None
        for j, group in enumerate(k_index):
            if not group:
                continue
            for a, b in zip(group, group[1:]):
                fac = t[a] - t[b]
                term = fac if term is None else term * fac
            fac = t[group[-1]] - z[j]
            term = fac if term is None else term * fac
        if term is None:
            contrib = 1
        else:
            contrib = 1 / term
        total = contrib if total is None else total + contrib
    return total if total is not None else 1


# ---------------------------------------------------------------------------
# one chamber term as a product of powers

class _TermIntegrand:
    """Sign-normalized product of powers on one cell for one chain term.

    factors: list of (kind, i, j, p) with value conventions
      'tt': t_i - t_j  (positive on the cell), 'tz': t_i - z_j, 'zt': z_j - t_i.
    """

    def __init__(self, cell, z, exps, chain_pairs):
        self.cell = cell
        self.z = [float(x) for x in z]
        self.exps = exps
        kappa = exps.kappa
        m = cell.variable_count()
        pos = {}
        for bj, block in enumerate(cell.blocks):
            for slot, var in enumerate(block):
                pos[var] = (bj, slot)
        self.pos = pos
        self.phase_power = 0.0
        raw = []
        for k in range(m):
            for l in range(k + 1, m):
                p = exps.tt[k][l] / kappa
                if p:
                    raw.append(("tt", k, l, p))
            for j in range(len(self.z)):
                p = exps.tz[k][j] / kappa
                if p:
                    raw.append(("tz", k, j, p))
        for (kind, a, b) in chain_pairs:
            raw.append((kind, a, b, -1.0))
        self.factors = [self._normalize(f) for f in raw]
        self.rates = [exps.t_lin[k] / kappa for k in range(m)]
        self._levels = self._build_levels()

    def _normalize(self, factor):
        kind, a, b, p = factor
        if kind == "tt":
            if self.pos[a] > self.pos[b]:
                return ("tt", a, b, p)
            self.phase_power += p
            return ("tt", b, a, p)
        bj = self.pos[a][0]
        if bj >= b:
            return ("tz", a, b, p)
        self.phase_power += p
        return ("zt", a, b, p)

    @property
    def phase(self):
        return cmath.exp(1j * math.pi * self.phase_power)

    def _build_levels(self):
        """Outer-to-inner nesting with endpoint exponents per level."""
        levels = []
        n = len(self.z)
        for bj, block in enumerate(self.cell.blocks):
            for slot in range(len(block) - 1, -1, -1):
                var = block[slot]
                lo = self.z[bj]
                if slot + 1 < len(block):
                    hi = ("var", block[slot + 1])
                elif bj + 1 < n:
                    hi = ("const", self.z[bj + 1])
                else:
                    hi = ("inf", None)
                alpha = self._alpha_exponent(bj, block, slot)
                beta = self._beta_exponent(bj, block, slot, hi)
                levels.append((var, lo, hi, alpha, beta))
        levels.sort(key=lambda lv: -(self.pos[lv[0]][0] * 10000 + self.pos[lv[0]][1]))
        return levels

    def _alpha_exponent(self, bj, block, slot):
        """Exponent of (t_var - z_bj) including the collapse power of the
        inner stack of the same block."""
        var = block[slot]
        alpha = 0.0
        for kind, a, b, p in self.factors:
            if kind == "tz" and a == var and b == bj:
                alpha += p
        if slot == 0:
            return alpha
        inner = set(block[:slot])
        collapse = float(len(inner))
        group = inner | {var}
        for kind, a, b, p in self.factors:
            if kind == "tt" and (a in inner or b in inner) and a in group and b in group:
                collapse += p
            elif kind == "tz" and a in inner and b == bj:
                collapse += p
        return alpha + collapse

    def _beta_exponent(self, bj, block, slot, hi):
        var = block[slot]
        beta = 0.0
        if hi[0] == "var":
            nxt = hi[1]
            for kind, a, b, p in self.factors:
                if kind == "tt" and a == nxt and b == var:
                    beta += p
        elif hi[0] == "const":
            for kind, a, b, p in self.factors:
                if kind == "zt" and a == var and b == bj + 1:
                    beta += p
        return beta

    def validate(self):
        for var, lo, hi, alpha, beta in self._levels:
            if alpha <= -1.0 or beta <= -1.0:
                raise ConvergenceError(
                    "divergent endpoint exponent at t_%d" % var)

    def _log_value(self, env, var, x):
        """log of the full positive product with env fixed and t_var = x (array)."""
        total = np.zeros_like(x)
        for kind, a, b, p in self.factors:
            if kind == "tt":
                va = env.get(a)
                vb = env.get(b)
                fa = x if a == var else va
                fb = x if b == var else vb
                if fa is None or fb is None:
                    continue
                total = total + p * np.log(fa - fb)
            elif kind == "tz":
                if a == var:
                    total = total + p * np.log(x - self.z[b])
                elif a in env:
                    total = total + p * math.log(env[a] - self.z[b])
            else:
                if a == var:
                    total = total + p * np.log(self.z[b] - x)
                elif a in env:
                    total = total + p * math.log(self.z[b] - env[a])
        for k, rate in enumerate(self.rates):
            if k == var:
                total = total - rate * x
            elif k in env:
                total = total - rate * env[k]
        return total

    def integrate(self, rel_tol, depth=18):
        """Nested integral over the chamber; value is real non-negative."""
        self.validate()
        m = self.cell.variable_count()
        if m == 0:
            return 1.0, 0.0
        levels = self._levels
        est_acc = [0.0]
        inner_tol = rel_tol / (2 * m)

        def eval_from(level, env):
            var, lo, hi, alpha, beta = levels[level]
            if level == len(levels) - 1:
                def g(x):
                    return np.exp(self._log_value(env, var, x))
            else:
                def g(x):
                    xs = np.atleast_1d(x)
                    out = np.empty(len(xs), dtype=float)
                    for i, xi in enumerate(xs):
                        env2 = dict(env)
                        env2[var] = float(xi)
                        out[i] = eval_from(level + 1, env2)
                    return out
            if hi[0] == "inf":
                val, err = quad_tail(g, lo, alpha, inner_tol, depth)
            else:
                hval = env[hi[1]] if hi[0] == "var" else hi[1]
                val, err = quad_interval(g, lo, hval, alpha, beta, inner_tol, 0.0, depth)
            if level == 0:
                est_acc[0] += err
            return val

        value = eval_from(0, {})
        est = est_acc[0] + abs(value) * rel_tol * (m - 1)
        return value, est


def chain_pairs_for(k_index, blocks):
    """Chain factors of one symmetrization assignment, as ('tt'/'tz', a, b)."""
    pairs = []
    for j, group in enumerate(k_index):
        for a, b in zip(group, group[1:]):
            pairs.append(("tt", a, b))
        if group:
            pairs.append(("tz", group[-1], j))
    return pairs


def z_prefactor(exps, z):
    """The t-independent part of the master function, with the cell-fixed
    branch: |z_i - z_j|^p exp(i pi p) for increasing z, times the linear
    phase exp(sum <Lambda_j, mu> z_j / kappa)."""
    kappa = exps.kappa
    n = len(z)
    out = complex(1.0)
    for i in range(n):
        for j in range(i + 1, n):
            p = exps.zz[i][j] / kappa
            out *= abs(z[i] - z[j]) ** p * cmath.exp(1j * math.pi * p)
    out *= math.exp(sum(exps.z_lin[j] * z[j] / kappa for j in range(n)))
    return out


def integrate_cell(cell, z, exps, k_index, rel_tol=1e-10, depth=18):
    """Integral over one chamber of the master density times one chain term.

    Returns (complex value, error estimate); the phase is the per-cell branch
    constant.  Raises ConvergenceError outside the convergent regime and
    AccuracyError when the tolerance cannot be certified.
    """
    term = _TermIntegrand(cell, z, exps, chain_pairs_for(k_index, cell.blocks))
    val, est = term.integrate(rel_tol, depth)
    if val and est > 1e3 * rel_tol * abs(val):
        raise AccuracyError("integral tolerance not reached", est / abs(val))
    return term.phase * val, est


@dataclass
class SolutionMatrix:
    """Rows are chambers, columns are basis indices; metadata carries the
    worst certified relative error."""

    cells: list
    basis: list
    values: np.ndarray
    max_rel_error: float


def solution_matrix(module, params, rel_tol=1e-10, threads=None, depth=18):
    """u[I][J] = integral over chamber I of Phi_mu^{1/kappa} w_J dt."""
    exps = master_exponents(module.alg, module.hw, module.lam, params.mu, params.kappa)
    check_convergence_regime(exps)
    z = [float(x) for x in params.z]
    cell_list = cells(z, module.lam, module.n)
    pref = z_prefactor(exps, z)
    lam = module.lam

    def entry(cell, col_index):
        total = complex(0.0)
        err = 0.0
        for k_index in sym.sigma_of(col_index, tuple(lam)):
            v, e = integrate_cell(cell, z, exps, k_index, rel_tol, depth)
            total += v
            err += e
        return pref * total, err

    dim = module.dim
    values = np.zeros((dim, dim), dtype=complex)
    worst = 0.0
    tasks = [(i, j) for i in range(dim) for j in range(dim)]

    def run(task):
        i, j = task
        return entry(cell_list[i], module.basis[j])

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]
    for (i, j), (val, err) in zip(tasks, results):
        values[i, j] = val
        scale = abs(val) if val else 1.0
        worst = max(worst, err / scale)
    return SolutionMatrix(cells=cell_list, basis=module.basis,
                          values=values, max_rel_error=worst)


# ---------------------------------------------------------------------------
# residual verification

def _numeric_params(z, mu_alpha, mu_lam, kappa):
    mu = cx.MuVector(alpha=tuple(float(x) for x in mu_alpha),
                     lam=tuple(float(x) for x in mu_lam))
    return cx.ConnectionParams(z=tuple(float(x) for x in z), mu=mu, kappa=float(kappa))


def _complex_matrix(rows):
    return np.array([[complex(x) for x in row] for row in rows], dtype=complex)


def kz_matrix_numeric(module, i, params):
    return _complex_matrix(cx.kz_matrix(module, i, params, lift=float))


def dyn_matrix_numeric(module, mu_dir, params):
    return _complex_matrix(cx.dyn_matrix(module, mu_dir, params, lift=float))


@dataclass
class ResidualReport:
    per_direction: dict
    max_relative: float


def residuals(module, params, mu_dirs, fd_step=1e-3, rel_tol=1e-10, threads=None):
    """Central-difference residuals of both systems on the solution rows.

    For each direction u: || kappa D_u U - U A^T ||_inf scaled by the larger
    of the two sides; mu directions move the pairing tables of mu.
    """
    kappa = float(params.kappa)
    u0 = solution_matrix(module, params, rel_tol, threads).values
    out = {}
    worst = 0.0

    def rel_residual(diff, amat):
        lhs = kappa * diff
        rhs = u0 @ amat.T
        num = np.max(np.abs(lhs - rhs))
        den = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1e-300)
        return num / den

    n = module.n
    zscale = max(abs(float(z)) for z in params.z) or 1.0
    for i in range(n):
        h = fd_step * zscale
        zp = list(map(float, params.z)); zp[i] += h
        zm = list(map(float, params.z)); zm[i] -= h
        up = solution_matrix(module, cx.ConnectionParams(tuple(zp), params.mu, kappa),
                             rel_tol, threads).values
        um = solution_matrix(module, cx.ConnectionParams(tuple(zm), params.mu, kappa),
                             rel_tol, threads).values
        bmat = kz_matrix_numeric(module, i, params)
        r = rel_residual((up - um) / (2 * h), bmat)
        out["z_%d" % i] = r
        worst = max(worst, r)
    mscale = max(max(abs(float(x)) for x in params.mu.alpha),
                 max((abs(float(x)) for x in params.mu.lam), default=0.0)) or 1.0
    for d, mu_dir in enumerate(mu_dirs):
        h = fd_step * mscale
        mup = params.mu.add(mu_dir, h)
        mum = params.mu.add(mu_dir, -h)
        up = solution_matrix(module, cx.ConnectionParams(params.z, mup, kappa),
                             rel_tol, threads).values
        um = solution_matrix(module, cx.ConnectionParams(params.z, mum, kappa),
                             rel_tol, threads).values
        cmat = dyn_matrix_numeric(module, mu_dir, params)
        r = rel_residual((up - um) / (2 * h), cmat)
        out["mu_%d" % d] = r
        worst = max(worst, r)
    return ResidualReport(per_direction=out, max_relative=worst)


# ---------------------------------------------------------------------------
# determinant formula

def log_det(values):
    sign, logabs = np.linalg.slogdet(values)
    return cmath.log(sign) + logabs


def det_closed_form_log(module, params):
    """log of the z- and mu-dependent part of the determinant formula,
    principal branches: sum_i z_i tr(mu^(i))/kappa
    + sum_alpha (delta_alpha/kappa) log<alpha,mu>
    + sum_{i<j} (eps_ij/kappa) log(z_i - z_j)."""
    kappa = float(params.kappa)
    total = complex(0.0)
    for i in range(module.n):
        tr = sum(cx.mu_block_diagonal(module, params.mu, i, float))
        total += float(params.z[i]) * tr / kappa
    for alpha in cx.admissible_roots(module):
        delta = float(module.delta_trace(alpha))
        if delta:
            pair = float(params.mu.root_pairing(alpha))
            total += delta / kappa * cmath.log(pair)
    for i in range(module.n):
        for j in range(i + 1, module.n):
            eps = float(sum(module.casimir(i, j)[a][a] for a in range(module.dim)))
            if eps:
                total += eps / kappa * cmath.log(complex(float(params.z[i]) - float(params.z[j])))
    return total


@dataclass
class DeterminantReport:
    observed_increment: complex
    predicted_increment: complex
    difference: float
    log_det_1: complex
    log_det_2: complex


def determinant_check(module, params1, params2, rel_tol=1e-10, threads=None):
    """Compare log det increments between two nearby parameter points with
    the closed form; both points must be joined by a short segment away from
    the branch loci so that principal branches agree."""
    u1 = solution_matrix(module, params1, rel_tol, threads).values
    u2 = solution_matrix(module, params2, rel_tol, threads).values
    ld1 = log_det(u1)
    ld2 = log_det(u2)
    observed = ld2 - ld1
    predicted = det_closed_form_log(module, params2) - det_closed_form_log(module, params1)
    return DeterminantReport(observed_increment=observed,
                             predicted_increment=predicted,
                             difference=abs(observed - predicted),
                             log_det_1=ld1, log_det_2=ld2)
