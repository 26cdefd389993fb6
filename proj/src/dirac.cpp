#include "cliff/dirac.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cliff {

namespace {

Matrix swap2() {
    Matrix m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

EndoField zero_endo(int n, int dim, int cap) {
    return EndoField(n, 0, Matrix(dim), cap);
}

void check_clifford_connection(const Module& m, const FormField& a) {
    for (const auto& ak : a)
        for (const auto& coeff : ak.c)
            for (int j = 0; j < m.n(); ++j)
                if (norm_inf(comm(coeff, m.gamma[j])) > 1e-10)
                    throw std::invalid_argument(
                        "connection coefficients must commute with the Clifford action");
}

} // namespace

DiracOp make_dirac_op(const Module& m, FormField a, EndoField phi) {
    if (a.empty()) a.assign(size_t(m.n()), zero_endo(m.n(), m.dim, 2));
    if (int(a.size()) != m.n())
        throw std::invalid_argument("connection needs one coefficient per direction");
    check_clifford_connection(m, a);
    if (phi.empty()) phi = zero_endo(m.n(), m.dim, 2);
    DiracOp d;
    d.mod = &m;
    d.A = std::move(a);
    d.Phi = std::move(phi);
    return d;
}

DiracOp flat_dirac_op(const Module& m, int K) {
    FormField a(size_t(m.n()), EndoField(m.n(), 0, Matrix(m.dim), 4 * K + 2));
    return make_dirac_op(m, std::move(a), EndoField(m.n(), 0, Matrix(m.dim), 4 * K + 2));
}

EndoField dress_field(const EndoField& f, const Matrix& d2) {
    EndoField r(f.band.n, f.band.K, kron(d2, f.c[0]), f.capacity);
    for (size_t i = 0; i < f.c.size(); ++i) r.c[i] = kron(d2, f.c[i]);
    return r;
}

EndoField block2_field(const EndoField& a, const EndoField& b,
                       const EndoField& c, const EndoField& d) {
    const int K = std::max(std::max(a.band.K, b.band.K), std::max(c.band.K, d.band.K));
    const EndoField pa = pad_to(a, K), pb = pad_to(b, K), pc = pad_to(c, K),
                    pd = pad_to(d, K);
    const int cap = std::max(std::max(a.capacity, b.capacity),
                             std::max(c.capacity, d.capacity));
    EndoField r(a.band.n, K, block2(pa.c[0], pb.c[0], pc.c[0], pd.c[0]), cap);
    for (size_t i = 0; i < r.c.size(); ++i)
        r.c[i] = block2(pa.c[i], pb.c[i], pc.c[i], pd.c[i]);
    return r;
}

EndoField blockdiag_field(const EndoField& a, const EndoField& b) {
    const EndoField z(a.band.n, 0, Matrix(a.c[0].n), 2);
    return block2_field(a, z, z, b);
}

EndoField comm_field(const Matrix& m, const EndoField& f) {
    EndoField r;
    r.band = f.band;
    r.capacity = f.capacity;
    r.c.reserve(f.c.size());
    for (const auto& x : f.c) r.c.push_back(mul_serial(m, x) - mul_serial(x, m));
    return r;
}

EndoField anticomm_field(const Matrix& m, const EndoField& f) {
    EndoField r;
    r.band = f.band;
    r.capacity = f.capacity;
    r.c.reserve(f.c.size());
    for (const auto& x : f.c) r.c.push_back(mul_serial(m, x) + mul_serial(x, m));
    return r;
}

EndoField dg_oneform_field(const Module& m, const FormField& w) {
    EndoField r = lmul(m.gamma[0], w[0]);
    for (int k = 1; k < m.n(); ++k) r = r + lmul(m.gamma[k], w[k]);
    return r;
}

EndoField dg_oneform_field_op(const Module& m, const FormField& w) {
    EndoField r = lmul(m.gamma_op[0], w[0]);
    for (int k = 1; k < m.n(); ++k) r = r + lmul(m.gamma_op[k], w[k]);
    return r;
}

SectionField apply(const DiracOp& d, const SectionField& psi) {
    const Module& m = *d.mod;
    SectionField r = product(d.Phi, psi);
    for (int k = 0; k < m.n(); ++k)
        r = r + lmul(m.gamma[k], derive(psi, k) + product(d.A[k], psi));
    return r;
}

std::vector<SectionField> conn_on_section(const DiracOp& d, const SectionField& psi) {
    std::vector<SectionField> r;
    r.reserve(size_t(d.n()));
    for (int k = 0; k < d.n(); ++k)
        r.push_back(derive(psi, k) + product(d.A[k], psi));
    return r;
}

FormField conn_on_endo(const FormField& a, const EndoField& phi) {
    FormField r;
    r.reserve(a.size());
    for (size_t k = 0; k < a.size(); ++k)
        r.push_back(derive(phi, int(k)) + product(a[k], phi) - product(phi, a[k]));
    return r;
}

std::vector<std::vector<EndoField>> curvature(const FormField& a) {
    const int n = int(a.size());
    const int dim = a[0].c[0].n;
    std::vector<std::vector<EndoField>> f(
        size_t(n), std::vector<EndoField>(size_t(n), zero_endo(n, dim, a[0].capacity)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            f[i][j] = derive(a[j], i) - derive(a[i], j) + product(a[i], a[j]) -
                      product(a[j], a[i]);
            f[j][i] = f[i][j] * cplx(-1.0);
        }
    return f;
}

EndoField dg_twoform_field(const Module& m, const std::vector<std::vector<EndoField>>& f) {
    EndoField r = zero_endo(m.n(), m.dim, 2);
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j)
            r = r + lmul(m.gamma[i] * m.gamma[j], f[i][j]);
    return r;
}

EndoField dg_twoform_field_op(const Module& m, const std::vector<std::vector<EndoField>>& f) {
    EndoField r = zero_endo(m.n(), m.dim, 2);
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j)
            r = r + lmul(m.gamma_op[i] * m.gamma_op[j], f[i][j]);
    return r;
}

Bochner bochner(const DiracOp& d) {
    const Module& m = *d.mod;
    Bochner b;
    for (int k = 0; k < m.n(); ++k) {
        EndoField ak = anticomm_field(m.gamma[k], d.Phi) *
                       cplx(0.5 * double(m.eps) * m.sig.g(k));
        b.B.push_back(d.A[k] + ak);
        b.alpha.push_back(std::move(ak));
    }
    b.phi_d = d.Phi - dg_oneform_field(m, b.alpha);
    return b;
}

SparseForm sparse_form(const FormField& a) {
    SparseForm r;
    r.reserve(a.size());
    for (const auto& ak : a) r.push_back(sparse_of(ak));
    return r;
}

std::vector<std::vector<SparseEndo>> curvature_sparse(const SparseForm& a) {
    const int n = int(a.size());
    std::vector<std::vector<SparseEndo>> f(size_t(n), std::vector<SparseEndo>(size_t(n)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            f[i][j] = sparse_add(
                sparse_add(sparse_derive(a[j], i), sparse_scale(sparse_derive(a[i], j), -1.0)),
                sparse_add(sparse_prod(a[i], a[j]), sparse_scale(sparse_prod(a[j], a[i]), -1.0)));
            f[j][i] = sparse_scale(f[i][j], -1.0);
        }
    return f;
}

SparseEndo dg_oneform_sparse(const Module& m, const SparseForm& w) {
    SparseEndo r = sparse_lmul(m.gamma[0], w[0]);
    for (int k = 1; k < m.n(); ++k) r = sparse_add(r, sparse_lmul(m.gamma[k], w[k]));
    return r;
}

SparseEndo dg_oneform_sparse_op(const Module& m, const SparseForm& w) {
    SparseEndo r = sparse_lmul(m.gamma_op[0], w[0]);
    for (int k = 1; k < m.n(); ++k) r = sparse_add(r, sparse_lmul(m.gamma_op[k], w[k]));
    return r;
}

SparseEndo dg_twoform_sparse(const Module& m, const std::vector<std::vector<SparseEndo>>& f) {
    SparseEndo r = sparse_const(m.n(), Matrix(m.dim));
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j)
            r = sparse_add(r, sparse_lmul(m.gamma[i] * m.gamma[j], f[i][j]));
    return r;
}

SparseEndo dg_twoform_sparse_op(const Module& m, const std::vector<std::vector<SparseEndo>>& f) {
    SparseEndo r = sparse_const(m.n(), Matrix(m.dim));
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j)
            r = sparse_add(r, sparse_lmul(m.gamma_op[i] * m.gamma_op[j], f[i][j]));
    return r;
}

SparseForm conn_on_endo_sparse(const SparseForm& a, const SparseEndo& phi) {
    SparseForm r;
    r.reserve(a.size());
    for (size_t k = 0; k < a.size(); ++k)
        r.push_back(sparse_add(sparse_derive(phi, int(k)),
                               sparse_add(sparse_prod(a[k], phi),
                                          sparse_scale(sparse_prod(phi, a[k]), -1.0))));
    return r;
}

SparseBochner bochner_sparse(const DiracOp& d) {
    const Module& m = *d.mod;
    const SparseEndo phi = sparse_of(d.Phi);
    SparseBochner b;
    for (int k = 0; k < m.n(); ++k) {
        SparseEndo ak = sparse_scale(sparse_anticomm_const(m.gamma[k], phi),
                                     cplx(0.5 * double(m.eps) * m.sig.g(k)));
        b.B.push_back(sparse_add(sparse_of(d.A[k]), ak));
        b.alpha.push_back(std::move(ak));
    }
    b.phi_d = sparse_add(phi, sparse_scale(dg_oneform_sparse(m, b.alpha), -1.0));
    return b;
}

SectionField laplace(const Module& m, const FormField& b, const SectionField& psi) {
    SectionField r(psi.band.n, 0, Vec(psi.c[0].size()), psi.capacity);
    for (int k = 0; k < m.n(); ++k) {
        SectionField one = derive(psi, k) + product(b[k], psi);
        SectionField two = derive(one, k) + product(b[k], one);
        r = r + two * cplx(double(m.eps) * m.sig.g(k));
    }
    return r;
}

EndoField potential_V_D(const DiracOp& d) {
    const Module& m = *d.mod;
    const Bochner b = bochner(d);
    EndoField v = dg_twoform_field(m, curvature(d.A)) +
                  dg_oneform_field(m, conn_on_endo(d.A, d.Phi)) +
                  product(d.Phi, d.Phi);
    for (int k = 0; k < m.n(); ++k) {
        const cplx w(-double(m.eps) * m.sig.g(k));
        v = v + product(b.alpha[k], b.alpha[k]) * w;
        v = v + (derive(b.alpha[k], k) + product(b.B[k], b.alpha[k]) -
                 product(b.alpha[k], b.B[k])) *
                    w;
    }
    return v;
}

Lichnerowicz lichnerowicz_general(const DiracOp& d1, const EndoField& phi1,
                                  const DiracOp& d2, const EndoField& phi2) {
    const Module& m = *d2.mod;
    const Bochner b2 = bochner(d2);
    const EndoField v2 = potential_V_D(d2);

    // zero-order difference of the two operators
    FormField da;
    for (int k = 0; k < m.n(); ++k) da.push_back(d1.A[k] - d2.A[k]);
    const EndoField phi12 = dg_oneform_field(m, da) + (d1.Phi - d2.Phi);
    const EndoField left = phi1 + phi12;

    Lichnerowicz out;
    FormField alpha_h;
    for (int k = 0; k < m.n(); ++k) {
        EndoField ak = (lmul(m.gamma[k], phi2) + rmul(left, m.gamma[k])) *
                       cplx(0.5 * double(m.eps) * m.sig.g(k));
        out.conn.push_back(b2.B[k] + ak);
        alpha_h.push_back(std::move(ak));
    }

    EndoField v = v2 + dg_oneform_field(m, conn_on_endo(b2.B, phi2)) +
                  product(b2.phi_d, phi2) + product(left, phi2 + b2.phi_d);
    for (int k = 0; k < m.n(); ++k) {
        const cplx w(-double(m.eps) * m.sig.g(k));
        v = v + product(alpha_h[k], alpha_h[k]) * w;
        v = v + (derive(alpha_h[k], k) + product(out.conn[k], alpha_h[k]) -
                 product(alpha_h[k], out.conn[k])) *
                    w;
    }
    out.v_h = std::move(v);
    return out;
}

double is_simple_type(const DiracOp& d) {
    const Bochner b = bochner(d);
    double r = 0.0;
    for (int k = 0; k < d.n(); ++k)
        r = std::max(r, field_norm(anticomm_field(d.mod->gamma[k], b.phi_d)));
    return r;
}

double reality_residual(const DiracOp& d, Rng& rng, int trials) {
    const Module& m = *d.mod;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        SectionField psi = random_section(rng, m.n(), 1, m.dim);
        const SectionField lhs = cc_section(m, apply(d, cc_section(m, psi)));
        const SectionField rhs = apply(d, psi);
        worst = std::max(worst, field_norm(lhs - rhs) / std::max(1.0, field_norm(rhs)));
    }
    return worst;
}

FormField real_form_connection(const Module& half, const FormField& a) {
    FormField r;
    r.reserve(a.size());
    for (const auto& ak : a) r.push_back(blockdiag_field(ak, cc_endo(half, ak)));
    return r;
}

DiracOp dirac_yukawa_op(const Module& s, const Module& w,
                        const FormField& a_on_w, const EndoField& phi_w) {
    FormField a;
    for (const auto& ak : a_on_w) a.push_back(dress_field(ak, Matrix::id(2)));
    const EndoField mu_d = lmul(s.tau, dress_field(phi_w, swap2())) * cplx(-1.0);
    (void)w;
    return make_dirac_op(s, std::move(a), mu_d * cplx(0.0, 1.0));
}

DiracOp dym_op(const Module& e, const Module& s, const FormField& a_on_s,
               const EndoField& mu_d, const EndoField& mu_m) {
    FormField a = real_form_connection(s, a_on_s);
    EndoField mu_ym = block2_field(mu_d, mu_m, mu_m * cplx(-1.0),
                                   cc_endo(s, mu_d) * cplx(-1.0));
    return make_dirac_op(e, std::move(a), mu_ym * cplx(0.0, 1.0));
}

EndoField simple_type_offdiag(const Module& s, const SimpleTypeInputs& in) {
    return (s.s_J_gamma > 0)
               ? in.even_part + lmul(s.tau, dg_oneform_field(s, in.sigma))
               : lmul(s.tau, in.even_part) + dg_oneform_field(s, in.sigma);
}

DiracOp build_real_simple_type(const Module& e, const Module& s,
                               const FormField& a_on_s, const SimpleTypeInputs& in) {
    auto admissible = [&](const EndoField& f, int parity, const char* what) {
        for (int j = 0; j < s.n(); ++j)
            if (field_norm(comm_field(s.gamma[j], f)) > 1e-8)
                throw std::invalid_argument(std::string("simple-type input ") + what +
                                            " must commute with the Clifford action");
        EndoField flip = lmul(s.tau, rmul(f, s.tau));
        if (field_norm(flip - f * cplx(double(parity), 0.0)) > 1e-8)
            throw std::invalid_argument(std::string("simple-type input ") + what +
                                        " has the wrong grading parity");
    };
    admissible(in.chi, -1, "chi");
    admissible(in.even_part, +1, "even part");
    for (const EndoField& sk : in.sigma) admissible(sk, -1, "sigma");

    EndoField phi_s = simple_type_offdiag(s, in);
    const double sg = double(s.s_J_tau);
    EndoField phi_e = block2_field(in.chi, cc_endo(s, phi_s) * cplx(sg),
                                   phi_s * cplx(-1.0), cc_endo(s, in.chi) * cplx(-sg));
    return make_dirac_op(e, real_form_connection(s, a_on_s), lmul(e.tau, phi_e));
}

double equation_residual(const Module& w, const FormField& a,
                         const EndoField& phi, const EndoField& mm,
                         const SectionField& chi) {
    const DiracOp ds = make_dirac_op(w, a, EndoField());
    const SectionField lhs = apply(ds, chi) * cplx(0.0, 1.0);
    const SectionField rhs = product(phi, chi) + product(mm, cc_section(w, chi));
    return field_norm(lhs - rhs);
}

PlaneWave solve_plane_wave(const Module& w, const std::vector<int>& k,
                           const Matrix& phi, const Matrix& mm, int capacity) {
    const int d = w.dim;
    const int n = w.n();
    Matrix gk(d);
    for (int j = 0; j < n; ++j) gk += w.gamma[j] * cplx(double(k[j]));

    // chi = u e^{ikx} + v e^{-ikx}; i /∂ chi = -gamma(k) u e^{ikx} + gamma(k) v e^{-ikx}
    //   mode +k:  (-gamma(k) - phi) u - mm C conj(v) = 0
    //   mode -k:  ( gamma(k) - phi) v - mm C conj(u) = 0
    const Matrix l1 = gk * cplx(-1.0) - phi;
    const Matrix l2 = gk - phi;
    const Matrix s12 = (mm * w.C) * cplx(-1.0);

    // realified system on (Re u, Im u, Re v, Im v)
    Matrix sys(4 * d);
    auto put_lin = [&](int r0, int c0, const Matrix& t) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                sys(r0 + i, c0 + j) += t(i, j).real();
                sys(r0 + i, c0 + d + j) += -t(i, j).imag();
                sys(r0 + d + i, c0 + j) += t(i, j).imag();
                sys(r0 + d + i, c0 + d + j) += t(i, j).real();
            }
    };
    auto put_anti = [&](int r0, int c0, const Matrix& t) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                sys(r0 + i, c0 + j) += t(i, j).real();
                sys(r0 + i, c0 + d + j) += t(i, j).imag();
                sys(r0 + d + i, c0 + j) += t(i, j).imag();
                sys(r0 + d + i, c0 + d + j) += -t(i, j).real();
            }
    };
    put_lin(0, 0, l1);
    put_anti(0, 2 * d, s12);
    put_anti(2 * d, 0, s12);
    put_lin(2 * d, 2 * d, l2);

    const auto [x, sys_res] = null_vector(sys);
    Vec u(size_t(d), cplx(0.0));
    Vec v(size_t(d), cplx(0.0));
    for (int i = 0; i < d; ++i) {
        u[size_t(i)] = cplx(x[size_t(i)].real(), x[size_t(d + i)].real());
        v[size_t(i)] = cplx(x[size_t(2 * d + i)].real(), x[size_t(3 * d + i)].real());
    }

    int kb = 0;
    for (int j = 0; j < n; ++j) kb = std::max(kb, std::abs(k[j]));
    PlaneWave pw{SectionField(n, kb, Vec(size_t(d)), capacity), 0.0};
    std::vector<int> kp = k, km = k;
    for (auto& c : km) c = -c;
    f_acc(pw.chi.at(kp.data()), u);
    f_acc(pw.chi.at(km.data()), v);

    const double nn = field_norm(pw.chi);
    if (nn < 1e-14) {
        pw.residual = 1.0;
        return pw;
    }
    pw.chi = pw.chi * cplx(1.0 / nn);
    pw.residual = equation_residual(w, FormField(), const_endo(n, phi, 0, capacity),
                                    const_endo(n, mm, 0, capacity), pw.chi);
    return pw;
}

} // namespace cliff
