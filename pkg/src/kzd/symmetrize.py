"""Lifting a weight space to the square-free weight (1,...,1).

The lifted algebra has one generator per integration variable; its pairing
tables are pulled back through the coloring, so the master function of the
lifted problem coincides with the original one.  Solutions project back by
summing components over the fibers of the coloring.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import freelie as fl
from . import modules as wm
from . import connections as cx


def coloring(lam):
    """The unique non-decreasing surjection {0..m-1} -> {0..r-1} with fibers lam."""
    out = []
    for i, c in enumerate(lam):
        out.extend([i] * c)
    return tuple(out)


@dataclass(frozen=True)
class LiftData:
    """Lifted rank-m data whose pairings pull back to the original tables."""

    alg: fl.AlgebraData
    hw: wm.HighestWeightData
    mu: cx.MuVector
    coloring: tuple
    lam: tuple

    @property
    def lifted_lam(self):
        return tuple(1 for _ in self.coloring)


def lift(alg, hw, lam, mu):
    """Pairing tables of the lifted system: gram, weights and mu through c."""
    c = coloring(lam)
    m = len(c)
    gram = tuple(tuple(alg.gram[c[a]][c[b]] for b in range(m)) for a in range(m))
    lam_alpha = tuple(tuple(hw.lam_alpha[j][c[a]] for a in range(m))
                      for j in range(hw.n))
    alg2 = fl.AlgebraData(rank=m, gram=gram, mode="free")
    hw2 = wm.HighestWeightData(n=hw.n, lam_alpha=lam_alpha, lam_lam=hw.lam_lam)
    mu2 = cx.MuVector(alpha=tuple(mu.alpha[c[a]] for a in range(m)), lam=mu.lam)
    return LiftData(alg=alg2, hw=hw2, mu=mu2, coloring=c, lam=tuple(lam))


def sigma_of(index, lam):
    """The lifted indices over one TensorIndex: all assignments of the
    color-i variables to the color-i slots, keeping the group shapes."""
    c = coloring(lam)
    pools = {}
    for k, col in enumerate(c):
        pools.setdefault(col, []).append(k)
    per_color_slots = {}
    for j, group in enumerate(index):
        for pos, col in enumerate(group):
            per_color_slots.setdefault(col, []).append((j, pos))
    color_list = sorted(pools)
    assignments = []
    for col in color_list:
        slots = per_color_slots.get(col, [])
        if len(slots) != len(pools[col]):
            raise ValueError("index does not have the weight lam")
        assignments.append(list(itertools.permutations(pools[col])))
    out = []
    for combo in itertools.product(*assignments):
        groups = [list(g) for g in index]
        for col, perm in zip(color_list, combo):
            for (j, pos), var in zip(per_color_slots.get(col, []), perm):
                groups[j][pos] = var
        out.append(tuple(tuple(g) for g in groups))
    return sorted(out)


def canonical_lift(index, lam):
    """The lift assigning each slot the smallest unused variable of its color."""
    c = coloring(lam)
    pools = {}
    for k, col in enumerate(c):
        pools.setdefault(col, []).append(k)
    groups = []
    for group in index:
        g2 = []
        for col in group:
            g2.append(pools[col].pop(0))
        groups.append(tuple(g2))
    return tuple(groups)


def project_pi(lifted_components, lam, n):
    """u_I = sum_{K in Sigma(I)} u~_K, on a dict keyed by lifted indices."""
    out = {}
    for index in wm.enumerate_basis(lam, n):
        total = None
        for k in sigma_of(index, lam):
            val = lifted_components[k]
            total = val if total is None else total + val
        out[index] = total
    return out
