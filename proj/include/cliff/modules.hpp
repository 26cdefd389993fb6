#pragma once
#include "cliff/clifford.hpp"
#include <optional>
#include <string>

namespace cliff {

// A graded real Clifford module: fiber data plus the recorded sign flags.
// Flags are data, not conventions — every construction recomputes them and
// verify() re-checks the defining relations.
struct Module {
    Signature sig;
    int eps = 1;
    int dim = 0;
    std::vector<Matrix> gamma;    // n generators
    std::vector<Matrix> gamma_op; // commuting opposite action, same dressing
    Matrix tau;                   // Z2 grading, tau^2 = 1, {tau, gamma} = 0
    Matrix C;                     // J = C ∘ conj, C real, C^2 = 1
    Matrix gram;                  // <z,w> = z† gram w

    int s_J_gamma = 0; // J gamma(a) J = s gamma(a), real a
    int s_J_tau = 0;   // J tau J = s tau  (-1: Majorana module)
    int s_form = 0;    // <Jz,Jw> = s <w,z>
    std::string name;

    int n() const { return sig.n(); }
    Vec J(const Vec& v) const;                 // antilinear
    Matrix cc(const Matrix& x) const;          // J ∘ x ∘ J
    double verify(double tol = 1e-12) const;   // max residual over the axioms
};

// ---- constructions --------------------------------------------------------

// Lambda ⊗ C^w with tau = tau_M ⊗ tau_E and J = (C_Lambda ⊗ C_E) ∘ conj.
// tau_E is a ±1 diagonal; when majorana_dress is set, a real C_E with
// C_E tau_E C_E = -tau_E is used to force s_J_tau = -1 at signatures whose
// chirality prefactor is 1 (requires equal numbers of +1/-1 in tau_E).
Module twisted_module(Signature sig, int eps, int j_branch,
                      const std::vector<int>& tau_e,
                      bool majorana_dress = false);

// Pauli doubling ²E: gamma ⊗ 1, tau ⊗ tau2, J ⊗ eps2, half the pairing.
Module double_module(const Module& e);

// Real doubling ²S with gamma_E = diag(gamma, gamma^cc) (Majorana masses
// live here); tau ⊗ tau2, J ⊗ eps2.
Module real_double(const Module& s);

// Dirac module ²W out of a Majorana module: gamma ⊗ eps2, tau = 1 ⊗ tau2,
// J ⊗ eps2, pairing <(u1,v1),(u2,v2)> = <u1,v2> + s_form(W) <v1,u2>.
Module dirac_module(const Module& w);

Module direct_sum(const Module& a, const Module& b);

// [[pp, qq], [qq^cc, pp^cc]] on a doubled module, conjugation taken in the half
Matrix real_form(const Module& half, const Matrix& pp, const Matrix& qq);

Vec diagonal_embed(const Vec& v);
// residual of "X maps diagonal sections to diagonal sections"
double pauli_membership(const Matrix& x);

// ---- module-level quantization --------------------------------------------

Matrix quantize_m(const Module& m, uint32_t mask);
Matrix dg_oneform(const Module& m, const std::vector<Matrix>& w);
Matrix dg_twoform(const Module& m, const std::vector<std::vector<Matrix>>& f);
Matrix dg_oneform_op(const Module& m, const std::vector<Matrix>& w);
Matrix dg_twoform_op(const Module& m, const std::vector<std::vector<Matrix>>& f);

// group average over quantized blades: projection onto End_gamma
Matrix commutant_project(const Module& m, const Matrix& x);
Matrix tau_odd(const Module& m, const Matrix& x);  // (x - tau x tau)/2
Matrix tau_even(const Module& m, const Matrix& x); // (x + tau x tau)/2

std::vector<Matrix> theta(const Module& m);    // (eps/n) gamma(e_k ♭)
std::vector<Matrix> theta_op(const Module& m);
std::vector<Matrix> ext_theta(const Module& m, const Matrix& phi);
std::vector<Matrix> ext_theta_op(const Module& m, const Matrix& phi);

// ---- standard-model shaped module (n = 4) ----------------------------------

struct StmModule {
    Module W;   // W_nu ⊕ W_e over (3,1)
    int gens = 0;
    int dim_v = 0;        // nu twist dim  (= gens)
    int dim_e = 0;        // charged twist dim (= 7 gens)
    int nu_dim = 0;       // fiber dim of the nu block
    Matrix tau_m;         // base chirality lifted to W
    Matrix tau_ve;        // internal grading (tau_V ⊕ tau_E) lifted to W
    Matrix proj_nu_lr;    // {tau_M = -1, tau_V = +1} ∩ nu block
    Matrix embed_phi_e;   // lift of an End(E) matrix: filled by phi_on_We
    Matrix phi_on_Wnu(const Matrix& gen_matrix) const; // 1_Lambda ⊗ m on the nu block
    Matrix phi_on_We(const Matrix& end_e) const;       // 1_Lambda ⊗ X on the e block
};

StmModule build_stm_module(int eps, int gens);

// Yukawa mapping: Higgs doublet + generation matrices -> End(E) with the
// minimal-model block texture; the RL block is the adjoint of the LR block.
Matrix yukawa_map(int gens, const Vec& higgs, const Matrix& gq_prime,
                  const Matrix& gq, const Matrix& gl);

} // namespace cliff
