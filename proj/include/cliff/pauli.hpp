#pragma once
#include "cliff/dirac.hpp"

namespace cliff {

// Coefficients of the Dirac connection ∂_D = ∂_B + Theta∘Phi_D (and its
// opposite-action mirror). Its curvature, quantized, is the relative
// curvature /F_D of the operator.
FormField dirac_connection(const DiracOp& d);
FormField dirac_connection_op(const DiracOp& d);

// one-form part omega_D = Theta∘Phi_D of the Dirac connection
FormField omega_d(const DiracOp& d);

// relative curvature, geometric route: quantized curvature of ∂_D
EndoField relative_curvature(const DiracOp& d);
EndoField relative_curvature_op(const DiracOp& d);

// relative curvature, closed form for simple type:
//   /F = δγ(F_A) + ((n-1)/n) (δγ(∂_A Phi) + Phi²)
EndoField relative_curvature_formula(const DiracOp& d);
EndoField relative_curvature_formula_op(const DiracOp& d);

// sparse builds of the same fields (two-forms on large fibers overflow the
// dense band cube) and the quadratic integral computed without a product field
SparseEndo relative_curvature_sparse(const DiracOp& d);
SparseEndo relative_curvature_formula_sparse(const DiracOp& d);
SparseEndo relative_curvature_formula_op_sparse(const DiracOp& d);
cplx relative_curvature_formula_square(const DiracOp& d); // ∫ tr(/F²)

// diagonal embedding of a section into the doubled module
SectionField diag_section(const SectionField& psi);

// Pauli operator on ²E: P = D ⊗ 1₂ + i /F_D ⊗ I₂  (I₂ antisymmetric)
DiracOp pauli_map(const Module& dbl, const DiracOp& d);
DiracOp pauli_map_with(const Module& dbl, const DiracOp& d, const EndoField& fslash);

// |<²psi, P ²psi>_P - <psi, D psi>| / max(1, |<psi, D psi>|)
double fermionic_equivalence(const Module& dbl, const Module& e, const DiracOp& d,
                             const DiracOp& p, const SectionField& psi);

// the operator-valued curvature term of P in the pi presentation:
//   P = D + i F,  F = -tau_P ∘ (/F_op ⊗ eps₂)
DiracOp pi_map(const Module& dbl, const DiracOp& d);
DiracOp pi_map_with(const Module& dbl, const DiracOp& d, const EndoField& fslash_op);

} // namespace cliff
