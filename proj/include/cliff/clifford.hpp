#pragma once
#include "cliff/blades.hpp"
#include "cliff/matrix.hpp"
#include <vector>

namespace cliff {

// A multivector is its blade-coefficient vector (BladeTable order).
using Multivector = Vec;

// Lambda-valued endomorphism data: one twist-endo coefficient per blade.
// delta_gamma turns it into an operator, symbol_map inverts that.
using CliffordForm = std::vector<Matrix>;

// Exterior-algebra fiber for one (signature, eps): the Chevalley action
//   gamma(alpha) = ext(alpha) + eps int_g(alpha),   gamma(alpha)^2 = eps g(alpha,alpha)
// together with its commuting opposite action
//   gamma_op(alpha) = (ext(alpha) - eps int_g(alpha)) ∘ parity,
// the chirality, the canonical one-form and the real structure.
struct Fiber {
    Signature sig;
    int eps = 1;
    int dim = 0; // 2^n

    std::vector<Matrix> ext;      // ext(e^k), k = 0..n-1
    std::vector<Matrix> intg;     // int_g(e^k)
    std::vector<Matrix> gamma;    // Chevalley action
    std::vector<Matrix> gamma_op; // opposite action
    Matrix parity;                // grade involution
    Matrix qdvol;                 // quantize(e^1 ... e^n)
    Matrix tau;                   // chirality = prefactor * qdvol
    cplx tau_prefactor;           // 1 if n(n-1)/2 + q even, i otherwise
    Matrix gram;                  // blade metric: diag(prod_{j in b} g_jj)

    static const Fiber& get(Signature sig, int eps);
};

// gamma(alpha) for a (complex) covector alpha = sum alpha_k e^k
Matrix gamma_of(const Fiber& f, const Vec& alpha);
Matrix gamma_op_of(const Fiber& f, const Vec& alpha);

// product gamma(e^{i1})...gamma(e^{ik}) over the mask, indices increasing
Matrix quantize_blade(const Fiber& f, uint32_t mask);
Matrix quantize_blade_op(const Fiber& f, uint32_t mask);

// delta_gamma of Lambda⊗End data (twist dimension w read off the form)
Matrix delta_gamma(const Fiber& f, const CliffordForm& x);
// inverse: peel blade coefficients off an operator on Lambda⊗C^w
CliffordForm symbol_map(const Fiber& f, const Matrix& a, int w);

// canonical one-form Theta_k = (eps/n) gamma(e_k ♭) on the bare fiber
std::vector<Matrix> canonical_one_form(const Fiber& f);

// quantized trace of Lambda⊗End data
cplx quantized_trace(const Fiber& f, const CliffordForm& x);

// ---- real structure -------------------------------------------------------

// J = C ∘ (blade-wise conjugation); C is real with C^2 = 1. The branch fixes
// the sign in J gamma(alpha) J = branch * gamma(alpha) (real alpha).
struct RealStructure {
    Matrix C;
    int s_J_gamma = 0; // verified branch
    int s_J_tau = 0;   // J tau J = s tau
};

RealStructure real_structure(const Fiber& f, int branch);

} // namespace cliff
