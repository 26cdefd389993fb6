#include "cliff/pauli.hpp"

namespace cliff {

namespace {

Matrix anti2() { // I₂, squares to -1
    Matrix m(2);
    m(0, 1) = -1.0;
    m(1, 0) = 1.0;
    return m;
}
Matrix swap2() {
    Matrix m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

struct OpBochner {
    FormField B;
    FormField alpha;
    EndoField phi_d;
};

OpBochner bochner_op(const DiracOp& d) {
    const Module& m = *d.mod;
    OpBochner b;
    for (int k = 0; k < m.n(); ++k) {
        EndoField ak = anticomm_field(m.gamma_op[k], d.Phi) *
                       cplx(0.5 * double(m.eps) * m.sig.g(k));
        b.B.push_back(d.A[k] + ak);
        b.alpha.push_back(std::move(ak));
    }
    b.phi_d = d.Phi - dg_oneform_field_op(m, b.alpha);
    return b;
}

} // namespace

FormField dirac_connection(const DiracOp& d) {
    const Module& m = *d.mod;
    const Bochner b = bochner(d);
    const std::vector<Matrix> th = theta(m);
    FormField r;
    for (int k = 0; k < m.n(); ++k) r.push_back(b.B[k] + lmul(th[k], b.phi_d));
    return r;
}

FormField dirac_connection_op(const DiracOp& d) {
    const Module& m = *d.mod;
    const OpBochner b = bochner_op(d);
    const std::vector<Matrix> th = theta_op(m);
    FormField r;
    for (int k = 0; k < m.n(); ++k) r.push_back(b.B[k] + lmul(th[k], b.phi_d));
    return r;
}

FormField omega_d(const DiracOp& d) {
    const Module& m = *d.mod;
    const Bochner b = bochner(d);
    const std::vector<Matrix> th = theta(m);
    FormField r;
    for (int k = 0; k < m.n(); ++k) r.push_back(lmul(th[k], b.phi_d));
    return r;
}

EndoField relative_curvature(const DiracOp& d) {
    return dg_twoform_field(*d.mod, curvature(dirac_connection(d)));
}

EndoField relative_curvature_op(const DiracOp& d) {
    return dg_twoform_field_op(*d.mod, curvature(dirac_connection_op(d)));
}

EndoField relative_curvature_formula(const DiracOp& d) {
    const Module& m = *d.mod;
    const double w = double(m.n() - 1) / double(m.n());
    return dg_twoform_field(m, curvature(d.A)) +
           (dg_oneform_field(m, conn_on_endo(d.A, d.Phi)) + product(d.Phi, d.Phi)) *
               cplx(w);
}

EndoField relative_curvature_formula_op(const DiracOp& d) {
    const Module& m = *d.mod;
    const double w = double(m.n() - 1) / double(m.n());
    return dg_twoform_field_op(m, curvature(d.A)) +
           (dg_oneform_field_op(m, conn_on_endo(d.A, d.Phi)) + product(d.Phi, d.Phi)) *
               cplx(w);
}

SparseEndo relative_curvature_sparse(const DiracOp& d) {
    const Module& m = *d.mod;
    const SparseBochner b = bochner_sparse(d);
    const std::vector<Matrix> th = theta(m);
    SparseForm conn;
    for (int k = 0; k < m.n(); ++k)
        conn.push_back(sparse_add(b.B[size_t(k)], sparse_lmul(th[size_t(k)], b.phi_d)));
    return dg_twoform_sparse(m, curvature_sparse(conn));
}

namespace {

SparseEndo formula_sparse(const DiracOp& d, bool op) {
    const Module& m = *d.mod;
    const double w = double(m.n() - 1) / double(m.n());
    const SparseForm a = sparse_form(d.A);
    const SparseEndo phi = sparse_of(d.Phi);
    const auto f = curvature_sparse(a);
    const SparseForm dphi = conn_on_endo_sparse(a, phi);
    SparseEndo r = op ? dg_twoform_sparse_op(m, f) : dg_twoform_sparse(m, f);
    SparseEndo mid = op ? dg_oneform_sparse_op(m, dphi) : dg_oneform_sparse(m, dphi);
    return sparse_add(r, sparse_scale(sparse_add(mid, sparse_prod(phi, phi)), cplx(w)));
}

} // namespace

SparseEndo relative_curvature_formula_sparse(const DiracOp& d) {
    return formula_sparse(d, false);
}

SparseEndo relative_curvature_formula_op_sparse(const DiracOp& d) {
    return formula_sparse(d, true);
}

cplx relative_curvature_formula_square(const DiracOp& d) {
    const SparseEndo f = relative_curvature_formula_sparse(d);
    return sparse_pair_integral(f, f);
}

SectionField diag_section(const SectionField& psi) {
    SectionField r(psi.band.n, psi.band.K, diagonal_embed(psi.c[0]), psi.capacity);
    for (size_t i = 0; i < psi.c.size(); ++i) r.c[i] = diagonal_embed(psi.c[i]);
    return r;
}

DiracOp pauli_map(const Module& dbl, const DiracOp& d) {
    return pauli_map_with(dbl, d, relative_curvature(d));
}

DiracOp pauli_map_with(const Module& dbl, const DiracOp& d, const EndoField& fslash) {
    FormField a;
    for (const auto& ak : d.A) a.push_back(dress_field(ak, Matrix::id(2)));
    EndoField phi = dress_field(d.Phi, Matrix::id(2)) +
                    dress_field(fslash, anti2()) * cplx(0.0, 1.0);
    return make_dirac_op(dbl, std::move(a), std::move(phi));
}

double fermionic_equivalence(const Module& dbl, const Module& e, const DiracOp& d,
                             const DiracOp& p, const SectionField& psi) {
    const SectionField dpsi = diag_section(psi);
    const cplx lhs = l2_pairing(dbl, dpsi, apply(p, dpsi));
    const cplx rhs = l2_pairing(e, psi, apply(d, psi));
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

DiracOp pi_map(const Module& dbl, const DiracOp& d) {
    return pi_map_with(dbl, d, relative_curvature_formula_op(d));
}

DiracOp pi_map_with(const Module& dbl, const DiracOp& d, const EndoField& fslash_op) {
    FormField a;
    for (const auto& ak : d.A) a.push_back(dress_field(ak, Matrix::id(2)));
    EndoField curv_term =
        lmul(dbl.tau, dress_field(fslash_op, swap2())) * cplx(0.0, -1.0);
    EndoField phi = dress_field(d.Phi, Matrix::id(2)) + curv_term;
    return make_dirac_op(dbl, std::move(a), std::move(phi));
}

} // namespace cliff
