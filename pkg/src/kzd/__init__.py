"""Compatible systems of KZ and dynamical differential operators on weight
spaces of tensor products of Verma modules, for Kac-Moody algebras given by
Chevalley relations only (sl_N arises as the quotient by the kernel of the
contravariant form).

Exact layer (rationals): free Lie algebra bases, contravariant forms, Casimir
and dynamical operators, commutator-exact flatness checks.

Numeric layer (complex floats): master-function integrands, ordered-chamber
quadrature, solution matrices, finite-difference residuals, determinant checks.
"""

__version__ = "0.1.0"
