#include "cliff/modules.hpp"
#include <stdexcept>

namespace cliff {

namespace {

Matrix tau2() {
    Matrix m(2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}
Matrix eps2() {
    Matrix m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}
Matrix diag1s(int s) {
    Matrix m(2);
    m(0, 0) = 1.0;
    m(1, 1) = double(s);
    return m;
}

// discrete doubling: X ⊗ D in the paper's notation (outer index slowest)
Matrix dress2(const Matrix& x, const Matrix& d) { return kron(d, x); }

int sign_match(const Matrix& lhs, const Matrix& rhs, double tol) {
    if (norm_inf(lhs - rhs) < tol) return +1;
    if (norm_inf(lhs + rhs) < tol) return -1;
    return 0;
}

void fill_flags(Module& m, double tol = 1e-11) {
    const int n = m.n();
    // J gamma J = s gamma, uniformly over generators (gamma need not be real
    // on derived modules, hence conjm)
    int s = 0;
    for (int k = 0; k < n; ++k) {
        const int sk = sign_match(m.C * conjm(m.gamma[k]) * m.C, m.gamma[k], tol);
        if (sk == 0 || (s != 0 && sk != s))
            throw std::runtime_error(m.name + ": J-gamma sign not uniform");
        s = sk;
    }
    m.s_J_gamma = s;
    m.s_J_tau = sign_match(m.C * conjm(m.tau) * m.C, m.tau, tol);
    if (m.s_J_tau == 0) throw std::runtime_error(m.name + ": J-tau sign indefinite");
    // <Jz,Jw> = s <w,z>  ⇔  C^T gram C = s gram^T
    m.s_form = sign_match(transposem(m.C) * m.gram * m.C, transposem(m.gram), tol);
    if (m.s_form == 0) throw std::runtime_error(m.name + ": pairing sign indefinite");
}

} // namespace

Vec Module::J(const Vec& v) const {
    Vec cv(v.size());
    for (size_t i = 0; i < v.size(); ++i) cv[i] = std::conj(v[i]);
    return matvec(C, cv);
}

Matrix Module::cc(const Matrix& x) const { return C * conjm(x) * C; }

double Module::verify(double tol) const {
    double worst = 0.0;
    auto chk = [&](double r) { worst = std::max(worst, r); };
    const int nn = n();
    const Matrix idm = Matrix::id(dim);
    for (int i = 0; i < nn; ++i) {
        for (int j = 0; j < nn; ++j) {
            const double gij = (i == j) ? sig.g(i) : 0.0;
            chk(norm_inf(anticomm(gamma[i], gamma[j]) - idm * (2.0 * eps * gij)));
            chk(norm_inf(anticomm(gamma_op[i], gamma_op[j]) - idm * (2.0 * eps * gij)));
            chk(norm_inf(comm(gamma_op[i], gamma[j])));
        }
        chk(norm_inf(anticomm(tau, gamma[i])));
        chk(norm_inf(C * conjm(gamma[i]) * C - gamma[i] * double(s_J_gamma)));
    }
    chk(norm_inf(tau * tau - idm));
    chk(norm_inf(C * C - idm));
    chk(max_imag(C));
    chk(norm_inf(C * conjm(tau) * C - tau * double(s_J_tau)));
    chk(norm_inf(transposem(C) * gram * C - transposem(gram) * double(s_form)));
    chk(norm_inf(gram - adjointm(gram)));
    if (worst > tol)
        throw std::runtime_error(name + ": module axioms violated, residual " +
                                 std::to_string(worst));
    return worst;
}

Module twisted_module(Signature sig, int eps, int j_branch,
                      const std::vector<int>& tau_e, bool majorana_dress) {
    const Fiber& f = Fiber::get(sig, eps);
    const RealStructure rs = real_structure(f, j_branch);
    const int w = int(tau_e.size());

    Matrix taue(w), ce = Matrix::id(w), idw = Matrix::id(w);
    for (int i = 0; i < w; ++i) taue(i, i) = double(tau_e[i]);
    if (majorana_dress) {
        // pair each +1 slot with a -1 slot; C_E swaps the pair
        std::vector<int> plus, minus;
        for (int i = 0; i < w; ++i) (tau_e[i] > 0 ? plus : minus).push_back(i);
        if (plus.size() != minus.size())
            throw std::invalid_argument("twisted_module: majorana dressing needs equal gradings");
        ce = Matrix(w);
        for (size_t i = 0; i < plus.size(); ++i) {
            ce(plus[i], minus[i]) = 1.0;
            ce(minus[i], plus[i]) = 1.0;
        }
    }

    Module m;
    m.sig = sig;
    m.eps = eps;
    m.dim = f.dim * w;
    for (int k = 0; k < sig.n(); ++k) {
        m.gamma.push_back(kron(f.gamma[k], idw));
        m.gamma_op.push_back(kron(f.gamma_op[k], idw));
    }
    m.tau = kron(f.tau, taue);
    m.C = kron(rs.C, ce);
    m.gram = kron(f.gram, idw);
    m.name = "twisted";
    fill_flags(m);
    return m;
}

// gamma_op always inherits the same discrete dressing as gamma; that keeps
// [gamma_op, gamma] = 0 and the opposite Clifford relation through every
// doubling.
Module double_module(const Module& e) {
    Module m;
    m.sig = e.sig;
    m.eps = e.eps;
    m.dim = 2 * e.dim;
    const Matrix one2 = Matrix::id(2);
    for (int k = 0; k < e.n(); ++k) {
        m.gamma.push_back(dress2(e.gamma[k], one2));
        m.gamma_op.push_back(dress2(e.gamma_op[k], one2));
    }
    m.tau = dress2(e.tau, tau2());
    m.C = dress2(e.C, eps2());
    m.gram = dress2(e.gram, one2) * 0.5;
    m.name = "pauli(" + e.name + ")";
    fill_flags(m);
    return m;
}

Module real_double(const Module& s) {
    Module m;
    m.sig = s.sig;
    m.eps = s.eps;
    m.dim = 2 * s.dim;
    const Matrix dg = diag1s(s.s_J_gamma); // gamma^cc = s gamma
    for (int k = 0; k < s.n(); ++k) {
        m.gamma.push_back(dress2(s.gamma[k], dg));
        m.gamma_op.push_back(dress2(s.gamma_op[k], dg));
    }
    m.tau = dress2(s.tau, tau2());
    m.C = dress2(s.C, eps2());
    m.gram = dress2(s.gram, Matrix::id(2)) * 0.5;
    m.name = "real_double(" + s.name + ")";
    fill_flags(m);
    return m;
}

Module dirac_module(const Module& w) {
    Module m;
    m.sig = w.sig;
    m.eps = w.eps;
    m.dim = 2 * w.dim;
    for (int k = 0; k < w.n(); ++k) {
        m.gamma.push_back(dress2(w.gamma[k], eps2()));
        m.gamma_op.push_back(dress2(w.gamma_op[k], eps2()));
    }
    m.tau = dress2(Matrix::id(w.dim), tau2());
    m.C = dress2(w.C, eps2());
    Matrix swap(2);
    swap(0, 1) = 1.0;
    swap(1, 0) = double(w.s_form);
    m.gram = dress2(w.gram, swap);
    m.name = "dirac(" + w.name + ")";
    fill_flags(m);
    return m;
}

Module direct_sum(const Module& a, const Module& b) {
    if (a.sig.p != b.sig.p || a.sig.q != b.sig.q || a.eps != b.eps)
        throw std::invalid_argument("direct_sum: incompatible base data");
    Module m;
    m.sig = a.sig;
    m.eps = a.eps;
    m.dim = a.dim + b.dim;
    auto bd = [&](const Matrix& x, const Matrix& y) {
        Matrix r(m.dim);
        for (int i = 0; i < x.n; ++i)
            for (int j = 0; j < x.n; ++j) r(i, j) = x(i, j);
        for (int i = 0; i < y.n; ++i)
            for (int j = 0; j < y.n; ++j) r(a.dim + i, a.dim + j) = y(i, j);
        return r;
    };
    for (int k = 0; k < a.n(); ++k) {
        m.gamma.push_back(bd(a.gamma[k], b.gamma[k]));
        m.gamma_op.push_back(bd(a.gamma_op[k], b.gamma_op[k]));
    }
    m.tau = bd(a.tau, b.tau);
    m.C = bd(a.C, b.C);
    m.gram = bd(a.gram, b.gram);
    m.name = a.name + "+" + b.name;
    fill_flags(m);
    return m;
}

Matrix real_form(const Module& half, const Matrix& pp, const Matrix& qq) {
    return block2(pp, qq, half.cc(qq), half.cc(pp));
}

Vec diagonal_embed(const Vec& v) {
    Vec r(2 * v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = r[i + v.size()] = v[i];
    return r;
}

double pauli_membership(const Matrix& x) {
    const int h = x.n / 2;
    const Matrix p = getblock(x, 0, 0, h), q = getblock(x, 0, 1, h);
    const Matrix r = getblock(x, 1, 0, h), s = getblock(x, 1, 1, h);
    return norm_inf((p + q) - (r + s));
}

Matrix quantize_m(const Module& m, uint32_t mask) {
    Matrix r = Matrix::id(m.dim);
    for (int k = 31; k >= 0; --k)
        if (mask & (1u << k)) r = m.gamma[k] * r;
    return r;
}

Matrix dg_oneform(const Module& m, const std::vector<Matrix>& w) {
    Matrix r(m.dim);
    for (int k = 0; k < m.n(); ++k) r += m.gamma[k] * w[k];
    return r;
}

Matrix dg_twoform(const Module& m, const std::vector<std::vector<Matrix>>& f) {
    Matrix r(m.dim);
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j) r += m.gamma[i] * (m.gamma[j] * f[i][j]);
    return r;
}

Matrix dg_oneform_op(const Module& m, const std::vector<Matrix>& w) {
    Matrix r(m.dim);
    for (int k = 0; k < m.n(); ++k) r += m.gamma_op[k] * w[k];
    return r;
}

Matrix dg_twoform_op(const Module& m, const std::vector<std::vector<Matrix>>& f) {
    Matrix r(m.dim);
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j) r += m.gamma_op[i] * (m.gamma_op[j] * f[i][j]);
    return r;
}

Matrix commutant_project(const Module& m, const Matrix& x) {
    // Average g^{-1} x g over the finite group generated by the quantized
    // basis blades (signs drop out in conjugation), which lands exactly on
    // the commutant of the Clifford action.
    const int nb = 1 << m.n();
    Matrix acc(m.dim);
    for (int b = 0; b < nb; ++b) {
        Matrix q = quantize_m(m, static_cast<unsigned>(b));
        // blade squares are scalar: q^2 = s * id with s = ±1
        cplx s = (q * q)(0, 0);
        acc += q * x * q * (1.0 / s);
    }
    return acc * cplx(1.0 / nb, 0.0);
}

Matrix tau_odd(const Module& m, const Matrix& x) { return (x - m.tau * x * m.tau) * cplx(0.5, 0.0); }
Matrix tau_even(const Module& m, const Matrix& x) { return (x + m.tau * x * m.tau) * cplx(0.5, 0.0); }

std::vector<Matrix> theta(const Module& m) {
    std::vector<Matrix> th;
    for (int k = 0; k < m.n(); ++k)
        th.push_back(m.gamma[k] * (double(m.eps) * m.sig.g(k) / double(m.n())));
    return th;
}

std::vector<Matrix> theta_op(const Module& m) {
    std::vector<Matrix> th;
    for (int k = 0; k < m.n(); ++k)
        th.push_back(m.gamma_op[k] * (double(m.eps) * m.sig.g(k) / double(m.n())));
    return th;
}

std::vector<Matrix> ext_theta(const Module& m, const Matrix& phi) {
    std::vector<Matrix> w;
    for (const Matrix& th : theta(m)) w.push_back(th * phi);
    return w;
}

std::vector<Matrix> ext_theta_op(const Module& m, const Matrix& phi) {
    std::vector<Matrix> w;
    for (const Matrix& th : theta_op(m)) w.push_back(th * phi);
    return w;
}

// ---- standard-model shaped module ------------------------------------------

Matrix yukawa_map(int gens, const Vec& higgs, const Matrix& gq_prime,
                  const Matrix& gq, const Matrix& gl) {
    if (higgs.size() != 2) throw std::invalid_argument("yukawa_map: doublet expected");
    const int nr = 3 * gens, nl = 4 * gens, ne = nr + nl;
    // E basis: R block [d_R | u_R | e_R], then L block [quark doublet | lepton
    // doublet], doublet component major inside each doublet.
    Matrix lr(0);
    std::vector<std::vector<cplx>> lrblk(nl, std::vector<cplx>(nr, cplx(0.0)));
    const cplx ph0 = higgs[0], ph1 = higgs[1];
    // charge-conjugate doublet I2 ∘ conj: (a,b) -> (-conj(b), conj(a))
    const cplx pc0 = -std::conj(ph1), pc1 = std::conj(ph0);
    for (int i = 0; i < gens; ++i)
        for (int j = 0; j < gens; ++j) {
            for (int c = 0; c < 2; ++c) {
                const int qrow = c * gens + i;
                lrblk[qrow][j] += gq_prime(i, j) * (c == 0 ? ph0 : ph1);            // d_R
                lrblk[qrow][gens + j] += -gq(i, j) * (c == 0 ? pc0 : pc1);          // u_R
                lrblk[2 * gens + qrow][2 * gens + j] += gl(i, j) * (c == 0 ? ph0 : ph1); // e_R
            }
        }
    Matrix phie(ne);
    for (int r = 0; r < nl; ++r)
        for (int c = 0; c < nr; ++c) {
            phie(nr + r, c) = lrblk[r][c];               // LR block
            phie(c, nr + r) = std::conj(lrblk[r][c]);    // RL = LR†
        }
    (void)lr;
    return phie;
}

Matrix StmModule::phi_on_Wnu(const Matrix& gen_matrix) const {
    Matrix r(W.dim);
    const Matrix lift = kron(Matrix::id(nu_dim / dim_v), gen_matrix);
    for (int i = 0; i < nu_dim; ++i)
        for (int j = 0; j < nu_dim; ++j) r(i, j) = lift(i, j);
    return r;
}

Matrix StmModule::phi_on_We(const Matrix& end_e) const {
    Matrix r(W.dim);
    const int e_fiber = W.dim - nu_dim;
    const Matrix lift = kron(Matrix::id(e_fiber / dim_e), end_e);
    for (int i = 0; i < e_fiber; ++i)
        for (int j = 0; j < e_fiber; ++j) r(nu_dim + i, nu_dim + j) = lift(i, j);
    return r;
}

StmModule build_stm_module(int eps, int gens) {
    const Signature sig{3, 1};
    StmModule s;
    s.gens = gens;
    s.dim_v = gens;
    s.dim_e = 7 * gens;
    std::vector<int> tau_v(gens, +1);
    std::vector<int> tau_e(s.dim_e);
    for (int i = 0; i < s.dim_e; ++i) tau_e[i] = (i < 3 * gens) ? +1 : -1;
    Module wnu = twisted_module(sig, eps, -1, tau_v);
    wnu.name = "W_nu";
    Module we = twisted_module(sig, eps, -1, tau_e);
    we.name = "W_e";
    s.nu_dim = wnu.dim;
    const int lam = Fiber::get(sig, eps).dim;

    // internal grading alone (tau_V ⊕ tau_E), i.e. the twist factor of tau
    Matrix tauv_l = kron(Matrix::id(lam), [&] {
        Matrix t(gens);
        for (int i = 0; i < gens; ++i) t(i, i) = 1.0;
        return t;
    }());
    Matrix taue_l = kron(Matrix::id(lam), [&] {
        Matrix t(s.dim_e);
        for (int i = 0; i < s.dim_e; ++i) t(i, i) = double(tau_e[i]);
        return t;
    }());
    const Matrix taum_lam = Fiber::get(sig, eps).tau;

    s.W = direct_sum(wnu, we);
    s.W.name = "W_stm";

    const int dim = s.W.dim;
    auto embed = [&](const Matrix& a, const Matrix& b) {
        Matrix r(dim);
        for (int i = 0; i < a.n; ++i)
            for (int j = 0; j < a.n; ++j) r(i, j) = a(i, j);
        for (int i = 0; i < b.n; ++i)
            for (int j = 0; j < b.n; ++j) r(s.nu_dim + i, s.nu_dim + j) = b(i, j);
        return r;
    };
    s.tau_m = embed(kron(taum_lam, Matrix::id(gens)), kron(taum_lam, Matrix::id(s.dim_e)));
    s.tau_ve = embed(tauv_l, taue_l);

    // {tau_M = -1} ∩ {tau_V = +1} on the nu block
    const Matrix idn = Matrix::id(dim);
    Matrix pnu(dim);
    for (int i = 0; i < s.nu_dim; ++i) pnu(i, i) = 1.0;
    s.proj_nu_lr = pnu * ((idn - s.tau_m) * 0.5);
    return s;
}

} // namespace cliff
