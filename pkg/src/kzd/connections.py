"""KZ and dynamical connection matrices on a weight space, their closed-form
derivatives, exact flatness residuals, the commuting T-operator family, and
the sl_N specialization.

Matrices are assembled generically from the module's exact operator tables,
so the same code path serves the exact-rational checks and the complex-float
evaluations used by the analytic layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import freelie as fl
from . import modules as wm
from . import ratlin

Q0 = Fraction(0)


class ResonanceError(ValueError):
    """<alpha, mu> vanishes at a root with a nonzero dynamical operator."""


class SingularityError(ValueError):
    """Coincident marked points."""


@dataclass(frozen=True)
class MuVector:
    """A Cartan point or direction, represented by its pairings only:
    alpha[i] = <alpha_i, mu>, lam[j] = <Lambda_j, mu>."""

    alpha: tuple
    lam: tuple

    def root_pairing(self, deg):
        return sum(c * a for c, a in zip(deg, self.alpha) if c)

    def scale(self, t):
        return MuVector(tuple(t * a for a in self.alpha),
                        tuple(t * l for l in self.lam))

    def add(self, other, t=1):
        return MuVector(tuple(a + t * b for a, b in zip(self.alpha, other.alpha)),
                        tuple(a + t * b for a, b in zip(self.lam, other.lam)))


def make_mu(alpha_vals, lam_vals):
    return MuVector(tuple(Fraction(x) for x in alpha_vals),
                    tuple(Fraction(x) for x in lam_vals))


@dataclass(frozen=True)
class ConnectionParams:
    z: tuple
    mu: MuVector
    kappa: object

    def __post_init__(self):
        for i in range(len(self.z)):
            for j in range(i + 1, len(self.z)):
                if self.z[i] == self.z[j]:
                    raise SingularityError("marked points must be pairwise distinct")
        if self.kappa == 0:
            raise ValueError("kappa must be nonzero")


def _zero(dim, lift):
    z = lift(Q0)
    return [[z for _ in range(dim)] for _ in range(dim)]


def mu_block_diagonal(module, mu, i, lift=lambda x: x):
    """Diagonal of <Lambda_i - alpha(block_i), mu> over the basis."""
    diag = []
    for index in module.basis:
        deg = wm.group_degree(index[i], module.alg.rank)
        diag.append(lift(mu.lam[i]) - sum((lift(c) * mu.alpha[k]
                                           for k, c in enumerate(deg) if c),
                                          lift(Q0)))
    return diag


def admissible_roots(module):
    """Multidegrees 0 < alpha <= lam with a nonzero dynamical operator."""
    out = []
    for deg in module._positive_degrees():
        if not ratlin.is_zero_matrix(module.delta_plus(deg)):
            out.append(deg)
    return out


def kz_matrix(module, i, params, lift=lambda x: x):
    """B_i = mu^(i) + sum_{j != i} Omega^(ij) / (z_i - z_j)."""
    dim = module.dim
    mat = _zero(dim, lift)
    for a, d in enumerate(mu_block_diagonal(module, params.mu, i, lift)):
        mat[a][a] = mat[a][a] + d
    for j in range(module.n):
        if j == i:
            continue
        denom = params.z[i] - params.z[j]
        if denom == 0:
            raise SingularityError("coincident z_%d and z_%d" % (i, j))
        om = module.casimir(i, j)
        inv = 1 / denom
        for a in range(dim):
            row = om[a]
            for b in range(dim):
                if row[b]:
                    mat[a][b] = mat[a][b] + lift(row[b]) * inv
    return mat


def dyn_matrix(module, mu_dir, params, lift=lambda x: x):
    """C_{mu'} = sum_i z_i (mu')^(i) + sum_{0 < alpha <= lam} ratio * Delta_{+,alpha}."""
    dim = module.dim
    mat = _zero(dim, lift)
    for i in range(module.n):
        for a, d in enumerate(mu_block_diagonal(module, mu_dir, i, lift)):
            mat[a][a] = mat[a][a] + params.z[i] * d
    for alpha in admissible_roots(module):
        pair = params.mu.root_pairing(alpha)
        if pair == 0:
            raise ResonanceError("resonance: <alpha, mu> = 0 at alpha = %s" % (alpha,))
        ratio = mu_dir.root_pairing(alpha) / pair
        dp = module.delta_plus(alpha)
        for a in range(dim):
            for b in range(dim):
                if dp[a][b]:
                    mat[a][b] = mat[a][b] + ratio * lift(dp[a][b])
    return mat


# closed-form partial derivatives -------------------------------------------

def d_kz_dz(module, i, j, params, lift=lambda x: x):
    """d B_i / d z_j, closed form."""
    dim = module.dim
    mat = _zero(dim, lift)
    if i == j:
        for k in range(module.n):
            if k == i:
                continue
            om = module.casimir(i, k)
            c = -1 / (params.z[i] - params.z[k]) ** 2
            for a in range(dim):
                for b in range(dim):
                    if om[a][b]:
                        mat[a][b] = mat[a][b] + lift(om[a][b]) * c
    else:
        om = module.casimir(i, j)
        c = 1 / (params.z[i] - params.z[j]) ** 2
        for a in range(dim):
            for b in range(dim):
                if om[a][b]:
                    mat[a][b] = mat[a][b] + lift(om[a][b]) * c
    return mat


def d_kz_dmu(module, i, mu_dir2, lift=lambda x: x):
    """d B_i along mu'': the mu''-pairing diagonal."""
    dim = module.dim
    mat = _zero(dim, lift)
    for a, d in enumerate(mu_block_diagonal(module, mu_dir2, i, lift)):
        mat[a][a] = mat[a][a] + d
    return mat


def d_dyn_dz(module, mu_dir, i, lift=lambda x: x):
    """d C_{mu'} / d z_i = (mu')^(i)."""
    return d_kz_dmu(module, i, mu_dir, lift)


def d_dyn_dmu(module, mu_dir, mu_dir2, params, lift=lambda x: x):
    """d C_{mu'} along mu'' = - sum ratio' Delta_{+,alpha}."""
    dim = module.dim
    mat = _zero(dim, lift)
    for alpha in admissible_roots(module):
        pair = params.mu.root_pairing(alpha)
        if pair == 0:
            raise ResonanceError("resonance: <alpha, mu> = 0 at alpha = %s" % (alpha,))
        ratio = -(mu_dir.root_pairing(alpha) * mu_dir2.root_pairing(alpha)) / pair ** 2
        dp = module.delta_plus(alpha)
        for a in range(dim):
            for b in range(dim):
                if dp[a][b]:
                    mat[a][b] = mat[a][b] + ratio * lift(dp[a][b])
    return mat


# flatness -------------------------------------------------------------------

@dataclass
class FlatnessReport:
    """Max residual per identity family; exact-zero booleans over rationals.

    Residual of the pair (kappa d_u - A_u, kappa d_v - A_v):
    kappa (d_u A_v - d_v A_u) - [A_u, A_v].
    """

    zz_max: object
    zmu_max: object
    mumu_max: object
    zz_exact: bool
    zmu_exact: bool
    mumu_exact: bool

    def all_exact(self):
        return self.zz_exact and self.zmu_exact and self.mumu_exact


def _residual(kappa, d_u_Av, d_v_Au, Au, Av):
    curv = ratlin.mat_sub(ratlin.mat_scale(kappa, ratlin.mat_sub(d_u_Av, d_v_Au)),
                          ratlin.commutator(Au, Av))
    return curv


def flatness_report(module, params, mu_dirs):
    """Exact residuals of all three commutation families over the rationals.

    mu_dirs: at least two directions for the mu-mu family.
    """
    n = module.n
    bmats = [kz_matrix(module, i, params) for i in range(n)]
    cmats = [dyn_matrix(module, d, params) for d in mu_dirs]
    zz = Q0
    for i in range(n):
        for j in range(i + 1, n):
            res = _residual(params.kappa,
                            d_kz_dz(module, j, i, params),
                            d_kz_dz(module, i, j, params),
                            bmats[i], bmats[j])
            zz = max(zz, ratlin.max_abs(res))
    zmu = Q0
    for i in range(n):
        for d, mu_dir in enumerate(mu_dirs):
            res = _residual(params.kappa,
                            d_dyn_dz(module, mu_dir, i),
                            d_kz_dmu(module, i, mu_dir),
                            bmats[i], cmats[d])
            zmu = max(zmu, ratlin.max_abs(res))
    mumu = Q0
    for a in range(len(mu_dirs)):
        for b in range(a + 1, len(mu_dirs)):
            res = _residual(params.kappa,
                            d_dyn_dmu(module, mu_dirs[b], mu_dirs[a], params),
                            d_dyn_dmu(module, mu_dirs[a], mu_dirs[b], params),
                            cmats[a], cmats[b])
            mumu = max(mumu, ratlin.max_abs(res))
    return FlatnessReport(zz, zmu, mumu, zz == 0, zmu == 0, mumu == 0)


# sl_N ------------------------------------------------------------------------

@dataclass(frozen=True)
class SlnData:
    """gl_N-coordinate tables: weight coordinates of each Lambda_j and the
    fundamental-coweight pairings needed to map dynamical coordinates."""

    n_value: int
    weight_coords: tuple     # n rows of length N

    def coweight_pairing(self, j, a):
        """<Lambda_j, varpi_a> for the fundamental coweight varpi_a."""
        coords = self.weight_coords[j]
        nv = self.n_value
        head = sum(coords[:a + 1], Q0)
        tail = sum(coords[a + 1:], Q0)
        return Fraction(nv - (a + 1), nv) * head - Fraction(a + 1, nv) * tail

    def mu_from_coords(self, mu_coords):
        """MuVector of mu = sum_a mu_a varpi_a: <alpha_b, mu> = mu_b."""
        r = self.n_value - 1
        alpha = tuple(mu_coords[b] for b in range(r))
        lam = tuple(sum((mu_coords[a] * self.coweight_pairing(j, a)
                         for a in range(r)), Q0 * mu_coords[0])
                    for j in range(len(self.weight_coords)))
        return MuVector(alpha, lam)


def sln_setup(n_value, weight_coord_rows):
    """AlgebraData, HighestWeightData and SlnData from gl_N weight coordinates.

    Weights are rows of N coordinates; the center acts trivially, so pairings
    project out the trace part.
    """
    if n_value < 2:
        raise ValueError("sl_N needs N >= 2")
    coords = tuple(tuple(Fraction(x) for x in row) for row in weight_coord_rows)
    for row in coords:
        if len(row) != n_value:
            raise ValueError("each weight needs N coordinates")
    r = n_value - 1
    alg = fl.AlgebraData(rank=r, gram=fl.cartan_gram(n_value), mode="sln")
    n = len(coords)
    lam_alpha = tuple(tuple(row[i] - row[i + 1] for i in range(r)) for row in coords)
    lam_lam = []
    for a in range(n):
        row = []
        for b in range(n):
            dot = sum((x * y for x, y in zip(coords[a], coords[b])), Q0)
            tra = sum(coords[a], Q0)
            trb = sum(coords[b], Q0)
            row.append(dot - tra * trb / n_value)
        lam_lam.append(tuple(row))
    hw = wm.HighestWeightData(n=n, lam_alpha=lam_alpha, lam_lam=tuple(lam_lam))
    return alg, hw, SlnData(n_value=n_value, weight_coords=coords)


def sln_positive_roots(n_value):
    """Multidegrees of the positive roots: consecutive segments alpha_b..alpha_{c-1}."""
    r = n_value - 1
    out = []
    for b in range(r):
        for c in range(b + 1, n_value):
            out.append(tuple(1 if b <= k < c else 0 for k in range(r)))
    return out


def _root_diagonal_shift(module, alpha):
    """The scalar sum_l <Lambda - alpha(lam), [ebar_l, fbar_l]> on M_lam."""
    fbars, ebars = fl.quotient_dual_bases(tuple(alpha), module.alg)
    total = Q0
    for fbar, ebar in zip(fbars, ebars):
        _, hvec, _ = fl.bracket_pm(ebar, fbar, module.alg)
        for i, c in enumerate(hvec):
            if c == 0:
                continue
            pair = sum((module.hw.lam_alpha[j][i] for j in range(module.n)), Q0)
            pair -= module.alg.root_pair(module.lam, fl.unit_degree(i, module.alg.rank))
            total += c * pair
    return total


def t_operator(module, nu_dir, mu, lift=lambda x: x):
    """T(nu, mu) = sum over all roots of ratio * e_{-alpha} e_alpha.

    Realized through the quotient dual bases; the opposite-root half is the
    commutation shift 2 fbar ebar + [ebar, fbar], which keeps every
    intermediate weight space at or below lam.
    """
    if module.alg.mode != "sln":
        raise ValueError("t_operator is defined in sl_N mode")
    dim = module.dim
    mat = _zero(dim, lift)
    for alpha in sln_positive_roots(module.alg.rank + 1):
        pair = mu.root_pairing(alpha)
        if pair == 0:
            raise ResonanceError("resonance: <alpha, mu> = 0 at alpha = %s" % (alpha,))
        ratio = nu_dir.root_pairing(alpha) / pair
        fbars, ebars = fl.quotient_dual_bases(tuple(alpha), module.alg)
        for fbar, ebar in zip(fbars, ebars):
            for col, index in enumerate(module.basis):
                mid = module.apply_lie(ebar, {index: Q0 + 1})
                if mid:
                    res = module.apply_lie(fbar, mid)
                    for idx, v in res.items():
                        mat[module.index_of[idx]][col] = \
                            mat[module.index_of[idx]][col] + 2 * ratio * lift(v)
        shift = _root_diagonal_shift(module, alpha)
        if shift:
            for a in range(dim):
                mat[a][a] = mat[a][a] + ratio * lift(shift)
    return mat
