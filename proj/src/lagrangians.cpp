#include "cliff/lagrangians.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cliff {

ScalarField trace_field(const EndoField& f) {
    ScalarField r(f.band.n, f.band.K, cplx(0.0), f.capacity);
    for (size_t i = 0; i < f.c.size(); ++i) r.c[i] = trace(f.c[i]);
    return r;
}

ScalarField tr_g_one_form_sq(const Signature& sig, const FormField& w) {
    ScalarField acc = trace_field(product(w[0], w[0])) * cplx(sig.g(0), 0.0);
    for (size_t j = 1; j < w.size(); ++j)
        acc = acc + trace_field(product(w[j], w[j])) * cplx(sig.g(j), 0.0);
    return acc;
}

ScalarField tr_g_two_form_sq(const Signature& sig,
                             const std::vector<std::vector<EndoField>>& f) {
    const int n = static_cast<int>(f.size());
    ScalarField acc(f[0][1].band.n, 0, cplx(0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            acc = acc + trace_field(product(f[i][j], f[i][j])) *
                            cplx(sig.g(i) * sig.g(j), 0.0);
    return acc;
}

cplx universal_action(const DiracOp& d) {
    return integrate(trace_field(potential_V_D(d)));
}

std::vector<ScalarField> dirac_vector_field(const DiracOp& d) {
    const Module& m = *d.mod;
    FormField om = omega_d(d);
    std::vector<ScalarField> xi;
    xi.reserve(om.size());
    for (int k = 0; k < m.n(); ++k)
        xi.push_back(trace_field(om[k]) * cplx(-m.eps * m.sig.g(k), 0.0));
    return xi;
}

double xi_max(const DiracOp& d) {
    double r = 0.0;
    for (const ScalarField& s : dirac_vector_field(d)) r = std::max(r, field_norm(s));
    return r;
}

ScalarField gamma_trace_curv(const DiracOp& d) {
    return trace_field(dg_twoform_field(*d.mod, curvature(dirac_connection(d))));
}

DiracFunction dirac_function_identity(const DiracOp& d) {
    const Module& m = *d.mod;
    DiracFunction r;
    r.lhs = trace_field(potential_V_D(d));
    FormField om = omega_d(d);
    r.rhs = gamma_trace_curv(d) -
            trace_field(ev_g(m.sig, om, om)) * cplx(m.eps, 0.0) +
            divergence(m.sig, dirac_vector_field(d));
    r.pointwise = field_norm(r.lhs - r.rhs);
    r.integral = std::abs(integrate(r.lhs) - integrate(r.rhs));
    return r;
}

double evg_omega_residual(const DiracOp& d) {
    const Module& m = *d.mod;
    Bochner b = bochner(d);
    FormField om = omega_d(d);
    EndoField resid = ev_g(m.sig, om, om) +
                      product(b.phi_d, b.phi_d) * cplx(m.eps / double(m.n()), 0.0);
    return field_norm(resid);
}

Translation translation_invariance(const DiracOp& d, const FormField& alpha) {
    const Module& m = *d.mod;
    for (const EndoField& ak : alpha)
        for (int j = 0; j < m.n(); ++j)
            if (field_norm(comm_field(m.gamma[j], ak)) > 1e-8)
                throw std::invalid_argument(
                    "translation one-form must commute with the Clifford action");

    DiracOp shifted = make_dirac_op(m, d.A, d.Phi + dg_oneform_field(m, alpha));
    ScalarField v0 = trace_field(potential_V_D(d));
    ScalarField v1 = trace_field(potential_V_D(shifted));
    cplx i0 = integrate(v0), i1 = integrate(v1);

    Translation t;
    t.integral = std::abs(i1 - i0) / std::max(1.0, std::abs(i0));
    t.pointwise = field_norm(v1 - v0);
    return t;
}

// --- Yang-Mills-Higgs -------------------------------------------------------

FormField higgs_gauge_potential(const Module& m, const EndoField& phi_h) {
    std::vector<Matrix> th = theta(m);
    FormField h;
    h.reserve(th.size());
    for (int k = 0; k < m.n(); ++k) h.push_back(lmul(th[k], phi_h));
    return h;
}

double ymh_curvature_residual(const Module& m, const FormField& a,
                              const EndoField& phi_h) {
    for (int j = 0; j < m.n(); ++j)
        if (field_norm(comm_field(m.gamma[j], phi_h)) > 1e-8)
            throw std::invalid_argument(
                "YMH zero-order part must commute with the Clifford action");

    DiracOp d = make_dirac_op(m, a, phi_h);
    auto full = curvature(dirac_connection(d));
    auto fa = curvature(d.A);
    std::vector<Matrix> th = theta(m);

    FormField dphi = conn_on_endo(d.A, phi_h);
    EndoField phi2 = product(phi_h, phi_h);
    FormField x;
    for (int k = 0; k < m.n(); ++k) x.push_back(dphi[k] + rmul(phi2, th[k]));

    double r = 0.0;
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j)
            r = std::max(r, field_norm(full[i][j] - fa[i][j] -
                                       rmul(x[i], th[j]) + rmul(x[j], th[i])));
    return r;
}

double ymh_flat_mass_residual(const Module& m, const Matrix& mass) {
    DiracOp d = make_dirac_op(m, {}, const_endo(m.n(), mass * cplx(0.0, 1.0)));
    auto full = curvature(dirac_connection(d));
    std::vector<Matrix> th = theta(m);
    Matrix m2 = mass * mass;

    double r = 0.0;
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j) {
            Matrix expect = m2 * comm(th[i], th[j]) * cplx(-1.0, 0.0);
            r = std::max(r, field_norm(full[i][j] - const_endo(m.n(), expect)));
        }
    return r;
}

cplx higgs_lambda_ratio(const Module& m, const Matrix& phi_h) {
    std::vector<Matrix> th = theta(m);
    cplx num = 0.0;
    for (int k = 0; k < m.n(); ++k) {
        Matrix hk = th[k] * phi_h;
        num += cplx(m.sig.g(k), 0.0) * trace(hk * hk);
    }
    return num / trace(phi_h * phi_h);
}

// --- doubled operators ------------------------------------------------------
//
// Quadratic actions of the doubled images. Two-form fields on those fibers do
// not fit the dense band cube, so the image is never assembled: every one of
// its coefficients has the shape id₂⊗x + I₂⊗y (the connection and theta of
// the double are id₂-dressed), and I₂² = -1 closes that set under products.
// A pair (x, y) of sparse ²S-fields therefore stands in for each field of the
// image; 2×2 dressing factors are traced out by hand (tr I₂ = 0, tr id₂ = 2).

namespace {

struct PairEndo {
    SparseEndo re, im; // id₂⊗re + I₂⊗im
};

PairEndo pair_add(const PairEndo& a, const PairEndo& b) {
    return {sparse_add(a.re, b.re), sparse_add(a.im, b.im)};
}
PairEndo pair_scale(const PairEndo& a, cplx s) {
    return {sparse_scale(a.re, s), sparse_scale(a.im, s)};
}
PairEndo pair_lmul(const Matrix& m, const PairEndo& a) { // id₂⊗m from the left
    return {sparse_lmul(m, a.re), sparse_lmul(m, a.im)};
}
PairEndo pair_anticomm(const Matrix& m, const PairEndo& a) {
    return {sparse_anticomm_const(m, a.re), sparse_anticomm_const(m, a.im)};
}
PairEndo pair_derive(const PairEndo& a, int j) {
    return {sparse_derive(a.re, j), sparse_derive(a.im, j)};
}

// ∫ tr of a product of two pair fields: the id⊗I cross terms are traceless
// and I² = -1, so tr_P(ab) = 2 tr(a_re b_re) - 2 tr(a_im b_im).
cplx pair_pair_integral(const PairEndo& a, const PairEndo& b) {
    return 2.0 * (sparse_pair_integral(a.re, b.re) - sparse_pair_integral(a.im, b.im));
}

// values at a sample point
struct PairVal {
    Matrix re, im;
};
PairVal pair_eval(const PairEndo& f, const std::vector<double>& x) {
    return {sparse_eval(f.re, x), sparse_eval(f.im, x)};
}
PairVal pv_add(PairVal a, const PairVal& b) {
    a.re += b.re;
    a.im += b.im;
    return a;
}
PairVal pv_scale(PairVal a, cplx s) {
    a.re *= s;
    a.im *= s;
    return a;
}
PairVal pv_prod(const PairVal& a, const PairVal& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
cplx pv_trace(const PairVal& v) { return 2.0 * trace(v.re); }
double pv_norm(const PairVal& v) { return std::max(norm_inf(v.re), norm_inf(v.im)); }

// the image operator in pair form: connection (no I₂ part) and zero-order part
struct PairOp {
    const Module* e = nullptr; // the double shares sig and eps with ²S
    std::vector<PairEndo> A;
    PairEndo phi;
};

PairOp pair_image(const Module& e, const DiracOp& dym, SparseEndo curv_part) {
    PairOp p;
    p.e = &e;
    const SparseEndo none = sparse_const(e.n(), Matrix(e.dim));
    for (const auto& ak : dym.A) p.A.push_back({sparse_of(ak), none});
    p.phi = {sparse_of(dym.Phi), sparse_scale(std::move(curv_part), cplx(0.0, 1.0))};
    return p;
}

struct PairBochner {
    std::vector<PairEndo> B, alpha;
    PairEndo phi_d;
};

PairBochner pair_bochner(const PairOp& p) {
    const Module& m = *p.e;
    PairBochner b;
    for (int k = 0; k < m.n(); ++k) {
        PairEndo ak = pair_scale(pair_anticomm(m.gamma[size_t(k)], p.phi),
                                 cplx(0.5 * double(m.eps) * m.sig.g(k)));
        b.B.push_back(pair_add(p.A[size_t(k)], ak));
        b.alpha.push_back(std::move(ak));
    }
    PairEndo dg = pair_lmul(m.gamma[0], b.alpha[0]);
    for (int k = 1; k < m.n(); ++k)
        dg = pair_add(dg, pair_lmul(m.gamma[size_t(k)], b.alpha[size_t(k)]));
    b.phi_d = pair_add(p.phi, pair_scale(dg, -1.0));
    return b;
}

// ∫ tr_P of the quantized gauge curvature: only the mode-zero commutator of
// the connection survives the integral (derivatives have no zero mode)
cplx pair_gauge_action(const PairOp& p) {
    const Module& m = *p.e;
    const std::vector<int> t0(size_t(m.n()), 0);
    const double vol = std::pow(2.0 * M_PI, m.n());
    cplx s = 0.0;
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j) {
            Matrix z = sparse_prod_mode(p.A[size_t(i)].re, p.A[size_t(j)].re, t0) -
                       sparse_prod_mode(p.A[size_t(j)].re, p.A[size_t(i)].re, t0);
            s += 2.0 * vol * trace_prod(m.gamma[size_t(i)] * m.gamma[size_t(j)], z);
        }
    return s;
}

// ∫ tr_P V of the image. Term by term in the potential: the quantized
// curvature and middle terms reduce to mode-zero traces, the derivative
// pieces have no zero mode, commutator traces vanish pointwise, and the
// squares are pair integrals.
cplx pair_universal_action(const PairOp& p, const std::vector<PairEndo>& ac) {
    const Module& m = *p.e;
    const std::vector<int> t0(size_t(m.n()), 0);
    const double vol = std::pow(2.0 * M_PI, m.n());
    cplx s = pair_gauge_action(p);
    for (int k = 0; k < m.n(); ++k) {
        Matrix z = sparse_prod_mode(p.A[size_t(k)].re, p.phi.re, t0) -
                   sparse_prod_mode(p.phi.re, p.A[size_t(k)].re, t0);
        s += 2.0 * vol * trace_prod(m.gamma[size_t(k)], z);
    }
    s += pair_pair_integral(p.phi, p.phi);
    for (int k = 0; k < m.n(); ++k) {
        const double ck = 0.5 * double(m.eps) * m.sig.g(k);
        s += cplx(-double(m.eps) * m.sig.g(k) * ck * ck) *
             pair_pair_integral(ac[size_t(k)], ac[size_t(k)]);
    }
    return s;
}

cplx pair_route_mid(const PairOp& p, const std::vector<PairEndo>& ac) {
    const Module& m = *p.e;
    cplx s = -pair_pair_integral(p.phi, p.phi);
    for (int k = 0; k < m.n(); ++k)
        s += cplx(0.25 * double(m.eps) * m.sig.g(k)) *
             pair_pair_integral(ac[size_t(k)], ac[size_t(k)]);
    return s;
}

std::vector<PairEndo> pair_anticomms(const PairOp& p) {
    std::vector<PairEndo> ac;
    for (int k = 0; k < p.e->n(); ++k)
        ac.push_back(pair_anticomm(p.e->gamma[size_t(k)], p.phi));
    return ac;
}

// deterministic sample points for the pointwise probes
std::vector<std::vector<double>> sample_points(int n, int count) {
    static const double irr[8] = {0.41421356237309515, 0.7320508075688772,
                                  0.2360679774997896,  0.6457513110645906,
                                  0.3166247903553998,  0.6055512754639891,
                                  0.1231056256176605,  0.3588989435406736};
    std::vector<std::vector<double>> pts;
    for (int t = 1; t <= count; ++t) {
        std::vector<double> x(size_t(n));
        for (int d = 0; d < n; ++d) {
            double v = double(t) * irr[d % 8];
            x[size_t(d)] = 2.0 * M_PI * (v - std::floor(v));
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

} // namespace

SmBasis sm_basis(const DiracOp& dym) {
    const Module& m = *dym.mod;
    const SparseForm a = sparse_form(dym.A);
    SmBasis b;
    const auto f = curvature_sparse(a);
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j)
            b.f2 += m.sig.g(i) * m.sig.g(j) *
                    sparse_pair_integral(f[size_t(i)][size_t(j)], f[size_t(i)][size_t(j)]).real();
    const SparseEndo mu = sparse_scale(sparse_of(dym.Phi), cplx(0.0, -1.0));
    const SparseForm dmu = conn_on_endo_sparse(a, mu);
    for (int k = 0; k < m.n(); ++k)
        b.dmu2 += m.sig.g(k) * sparse_pair_integral(dmu[size_t(k)], dmu[size_t(k)]).real();
    b.mu2 = sparse_pair_integral(mu, mu).real();
    const SparseEndo mu2f = sparse_prod(mu, mu);
    b.mu4 = sparse_pair_integral(mu2f, mu2f).real();
    return b;
}

SmBasis sm_basis_reference(const DiracOp& dym) {
    const Module& m = *dym.mod;
    SmBasis b;
    b.f2 = integrate(tr_g_two_form_sq(m.sig, curvature(dym.A))).real();
    EndoField mu = dym.Phi * cplx(0.0, -1.0);
    b.dmu2 = integrate(tr_g_one_form_sq(m.sig, conn_on_endo(dym.A, mu))).real();
    EndoField mu2 = product(mu, mu);
    b.mu2 = integrate(trace_field(mu2)).real();
    b.mu4 = integrate(trace_field(product(mu2, mu2))).real();
    return b;
}

SmIdentity sm_identity(const DymScenario& sc) {
    DiracOp dym = dym_op(*sc.e, *sc.s, sc.a_s, sc.mu_d, sc.mu_m);
    SmIdentity r;
    r.basis = sm_basis(dym);

    PairOp p = pair_image(*sc.e, dym, relative_curvature_sparse(dym));
    const std::vector<PairEndo> ac = pair_anticomms(p);
    r.route_a = pair_universal_action(p, ac).real();
    r.route_mid = pair_route_mid(p, ac).real();

    const int n = sc.e->n();
    const double w = double(n - 1) / n;
    const double a = 2.0 * (n - 1) * (n - 1) * (n - 1) / double(n * n);
    r.route_b = (n - 3) * r.basis.f2 - 2.0 * sc.e->eps * (n - 2) * w * w * r.basis.dmu2 -
                a * r.basis.mu4 - 2.0 * r.basis.mu2;
    return r;
}

SmIdentity sm_identity_reference(const DymScenario& sc) {
    DiracOp dym = dym_op(*sc.e, *sc.s, sc.a_s, sc.mu_d, sc.mu_m);
    SmIdentity r;
    r.basis = sm_basis_reference(dym);

    DiracOp p = pauli_map(*sc.dbl, dym);
    r.route_a = universal_action(p).real();

    const Module& pm = *p.mod;
    ScalarField mid = trace_field(product(p.Phi, p.Phi)) * cplx(-1.0, 0.0);
    for (int k = 0; k < pm.n(); ++k) {
        EndoField ac = anticomm_field(pm.gamma[k], p.Phi);
        mid = mid + trace_field(product(ac, ac)) * cplx(0.25 * pm.eps * pm.sig.g(k), 0.0);
    }
    r.route_mid = integrate(mid).real();

    const int n = pm.n();
    const double w = double(n - 1) / n;
    const double a = 2.0 * (n - 1) * (n - 1) * (n - 1) / double(n * n);
    r.route_b = (n - 3) * r.basis.f2 - 2.0 * pm.eps * (n - 2) * w * w * r.basis.dmu2 -
                a * r.basis.mu4 - 2.0 * r.basis.mu2;
    return r;
}

PiIdentity pi_identity(const DymScenario& sc) {
    DiracOp dym = dym_op(*sc.e, *sc.s, sc.a_s, sc.mu_d, sc.mu_m);
    PiIdentity r;
    r.basis = sm_basis(dym);

    const Module& m = *sc.e;
    const int n = m.n();
    const SparseEndo fop = relative_curvature_formula_op_sparse(dym);
    PairOp p = pair_image(m, dym, sparse_lmul(m.tau, fop));

    r.lhs = pair_pair_integral(p.phi, p.phi).real();
    const SparseEndo mu = sparse_scale(sparse_of(dym.Phi), cplx(0.0, -1.0));
    r.mid = 2.0 * (sparse_pair_integral(fop, fop).real() -
                   sparse_pair_integral(mu, mu).real());

    const double w = double(n - 1) / n;
    r.rhs = -r.basis.f2 + 2.0 * m.eps * w * w * r.basis.dmu2 +
            2.0 * w * w * r.basis.mu4 - 2.0 * r.basis.mu2;

    const std::vector<PairEndo> ac = pair_anticomms(p);
    r.ua = pair_universal_action(p, ac).real();
    r.eh = pair_gauge_action(p).real();

    const PairBochner b = pair_bochner(p);
    const std::vector<Matrix> th = theta(m); // theta of the double is id₂⊗theta(²S)

    std::vector<PairEndo> om;
    std::vector<ScalarField> xi;
    for (int k = 0; k < n; ++k) {
        om.push_back(pair_lmul(th[size_t(k)], b.phi_d));
        xi.push_back(sparse_trace(om.back().re) * cplx(-2.0 * m.eps * m.sig.g(k), 0.0));
        r.xi = std::max(r.xi, field_norm(xi.back()));
    }

    for (int k = 0; k < n; ++k) {
        const PairEndo acd = pair_anticomm(m.gamma[size_t(k)], b.phi_d);
        r.simple = std::max(r.simple, std::max(sparse_norm(acd.re), sparse_norm(acd.im)));
    }

    // sampled probes: ev_g(omega,omega) + (eps/n) phi_d², and the pointwise
    // presentation tr_P V = gamma-trace - eps tr ev_g(omega,omega) + div xi
    const ScalarField divxi = divergence(m.sig, xi);
    std::vector<PairEndo> conn;
    for (int k = 0; k < n; ++k) conn.push_back(pair_add(b.B[size_t(k)], om[size_t(k)]));
    std::vector<std::vector<PairEndo>> dconn(size_t(n)), dA(size_t(n));
    std::vector<PairEndo> dphik, dalpha;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            dconn[size_t(k)].push_back(pair_derive(conn[size_t(k)], j));
            dA[size_t(k)].push_back(pair_derive(p.A[size_t(k)], j));
        }
        dphik.push_back(pair_derive(p.phi, k));
        dalpha.push_back(pair_derive(b.alpha[size_t(k)], k));
    }

    for (const auto& x : sample_points(n, 6)) {
        PairVal phiv = pair_eval(p.phi, x);
        PairVal phidv = pair_eval(b.phi_d, x);
        std::vector<PairVal> av, bv, alv, omv;
        for (int k = 0; k < n; ++k) {
            av.push_back(pair_eval(p.A[size_t(k)], x));
            bv.push_back(pair_eval(b.B[size_t(k)], x));
            alv.push_back(pair_eval(b.alpha[size_t(k)], x));
            omv.push_back(pair_eval(om[size_t(k)], x));
        }

        // ev_g(omega,omega) + (eps/n) phi_d²
        PairVal resid = pv_scale(pv_prod(phidv, phidv), cplx(double(m.eps) / n));
        for (int k = 0; k < n; ++k)
            resid = pv_add(resid, pv_scale(pv_prod(omv[size_t(k)], omv[size_t(k)]),
                                           cplx(m.sig.ginv(k))));
        r.evg = std::max(r.evg, pv_norm(resid));

        // tr_P V at x (the commutator [B, alpha] is traceless pointwise)
        cplx lhs = pv_trace(pv_prod(phiv, phiv));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                PairVal f = pv_add(pair_eval(dA[size_t(j)][size_t(i)], x),
                                   pv_scale(pair_eval(dA[size_t(i)][size_t(j)], x), -1.0));
                f = pv_add(f, pv_prod(av[size_t(i)], av[size_t(j)]));
                f = pv_add(f, pv_scale(pv_prod(av[size_t(j)], av[size_t(i)]), -1.0));
                lhs += 2.0 * trace_prod(m.gamma[size_t(i)] * m.gamma[size_t(j)], f.re);
            }
        for (int k = 0; k < n; ++k) {
            PairVal dk = pv_add(pair_eval(dphik[size_t(k)], x),
                                pv_prod(av[size_t(k)], phiv));
            dk = pv_add(dk, pv_scale(pv_prod(phiv, av[size_t(k)]), -1.0));
            lhs += 2.0 * trace_prod(m.gamma[size_t(k)], dk.re);
            const cplx wk(-double(m.eps) * m.sig.g(k));
            lhs += wk * (pv_trace(pv_prod(alv[size_t(k)], alv[size_t(k)])) +
                         pv_trace(pair_eval(dalpha[size_t(k)], x)));
        }

        // gamma-trace of the Dirac-connection curvature at x
        cplx rhs = eval_at(divxi, x);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                PairVal f = pv_add(pair_eval(dconn[size_t(j)][size_t(i)], x),
                                   pv_scale(pair_eval(dconn[size_t(i)][size_t(j)], x), -1.0));
                f = pv_add(f, pv_prod(pair_eval(conn[size_t(i)], x), pair_eval(conn[size_t(j)], x)));
                f = pv_add(f, pv_scale(pv_prod(pair_eval(conn[size_t(j)], x),
                                               pair_eval(conn[size_t(i)], x)),
                                       -1.0));
                rhs += 2.0 * trace_prod(m.gamma[size_t(i)] * m.gamma[size_t(j)], f.re);
            }
        for (int k = 0; k < n; ++k)
            rhs -= cplx(double(m.eps) * m.sig.ginv(k)) *
                   pv_trace(pv_prod(omv[size_t(k)], omv[size_t(k)]));

        r.pointwise = std::max(r.pointwise, std::abs(lhs - rhs));
        r.pointwise_scale = std::max(r.pointwise_scale, std::abs(lhs));
    }
    return r;
}

PiIdentity pi_identity_reference(const DymScenario& sc) {
    DiracOp dym = dym_op(*sc.e, *sc.s, sc.a_s, sc.mu_d, sc.mu_m);
    PiIdentity r;
    r.basis = sm_basis_reference(dym);

    DiracOp p = pi_map(*sc.dbl, dym);
    r.lhs = integrate(trace_field(product(p.Phi, p.Phi))).real();

    EndoField fop = relative_curvature_formula_op(dym);
    EndoField mu = dym.Phi * cplx(0.0, -1.0);
    r.mid = 2.0 * (integrate(trace_field(product(fop, fop))).real() -
                   integrate(trace_field(product(mu, mu))).real());

    const int n = p.mod->n();
    const double w = double(n - 1) / n;
    r.rhs = -r.basis.f2 + 2.0 * p.mod->eps * w * w * r.basis.dmu2 +
            2.0 * w * w * r.basis.mu4 - 2.0 * r.basis.mu2;

    r.xi = xi_max(p);
    r.evg = evg_omega_residual(p);
    r.simple = is_simple_type(p);

    r.ua = universal_action(p).real();
    DiracOp d_gauge = make_dirac_op(*sc.dbl, p.A, p.Phi * cplx(0.0));
    r.eh = integrate(gamma_trace_curv(d_gauge)).real();

    DiracFunction df = dirac_function_identity(p);
    r.pointwise = df.pointwise;
    r.pointwise_scale = std::max(1e-300, field_norm(df.lhs));
    return r;
}

std::vector<double> refit_coefficients(const std::vector<SmBasis>& rows,
                                       const std::vector<double>& values) {
    std::vector<std::vector<double>> a;
    a.reserve(rows.size());
    for (const SmBasis& r : rows) a.push_back({r.f2, r.dmu2, r.mu4, r.mu2});
    return lls_fit(a, values);
}

cplx fermionic_action(const Module& m, const DiracOp& d, const SectionField& psi) {
    return l2_pairing(m, psi, apply(d, psi));
}

// --- vacuum energy ----------------------------------------------------------

LambdaResult lambda_dm(const Module& e, const Module& s,
                       const Matrix& mdn, const Matrix& mmn, const Matrix& phie) {
    const int dim_w = s.dim / 2;
    if (mdn.n != dim_w || mmn.n != dim_w || phie.n != dim_w)
        throw std::invalid_argument("lambda_dm: masses must live on the half module");
    if (e.dim != 2 * s.dim)
        throw std::invalid_argument("lambda_dm: module tower mismatch");

    const int n = s.n();
    LambdaResult r;
    long num = 2L * (n - 1) * (n - 1) * (n - 1), den = long(n) * n;
    long g = std::gcd(num, den);
    r.a_num = num / g;
    r.a_den = den / g;
    const double a = double(num) / double(den);

    Matrix eps2(2), id2 = Matrix::id(2);
    eps2(0, 1) = 1.0;
    eps2(1, 0) = 1.0;

    Matrix phi_d = mdn + phie;
    Matrix mu_d = s.tau * kron(eps2, phi_d) * cplx(-1.0, 0.0);
    Matrix mu_m = kron(id2, mmn);
    Matrix mu_d_cc = s.cc(mu_d);
    Matrix mu = block2(mu_d, mu_m, mu_m * cplx(-1.0, 0.0), mu_d_cc * cplx(-1.0, 0.0));

    Matrix mu2 = mu * mu;
    Matrix mu4 = mu2 * mu2;
    double x = a * trace(mu4).real() + trace(mu2).real();

    Matrix pe2 = phie * phie;
    r.lambda_block = x / 4.0 - (a * trace(pe2 * pe2).real() - trace(pe2).real());

    Matrix md2 = mdn * mdn, mm2 = mmn * mmn, cr = mdn * mmn;
    r.lambda_formula = a * trace(md2 * md2).real() - trace(md2).real() +
                       a * trace(mm2 * mm2).real() - trace(mm2).real() -
                       2.0 * a * trace(cr * cr).real();

    r.cross_residual = norm_inf(mu_m * mu_d_cc + mu_m * mu_d);
    return r;
}

}  // namespace cliff
