#include "cliff/clifford.hpp"
#include <map>
#include <mutex>
#include <stdexcept>

namespace cliff {

namespace {

Matrix build_ext(const BladeTable& t, int k) {
    Matrix m(t.dim);
    for (int col = 0; col < t.dim; ++col) {
        const uint32_t b = t.mask_of[col];
        if (b & (1u << k)) continue;
        const int row = t.index_of[b | (1u << k)];
        m(row, col) = double(shuffle_sign(b, k));
    }
    return m;
}

Matrix build_intg(const BladeTable& t, int k, double gkk) {
    Matrix m(t.dim);
    for (int col = 0; col < t.dim; ++col) {
        const uint32_t b = t.mask_of[col];
        if (!(b & (1u << k))) continue;
        const int row = t.index_of[b & ~(1u << k)];
        m(row, col) = double(shuffle_sign(b, k)) * gkk;
    }
    return m;
}

} // namespace

const Fiber& Fiber::get(Signature sig, int eps) {
    static std::map<std::tuple<int, int, int>, Fiber> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_tuple(sig.p, sig.q, eps);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const int n = sig.n();
    const BladeTable& t = BladeTable::get(n);
    Fiber f;
    f.sig = sig;
    f.eps = eps;
    f.dim = t.dim;
    f.parity = Matrix(t.dim);
    f.gram = Matrix(t.dim);
    for (int i = 0; i < t.dim; ++i) {
        const uint32_t b = t.mask_of[i];
        f.parity(i, i) = (grade(b) & 1) ? -1.0 : 1.0;
        double s = 1.0;
        for (int k = 0; k < n; ++k)
            if (b & (1u << k)) s *= sig.g(k);
        f.gram(i, i) = s;
    }
    for (int k = 0; k < n; ++k) {
        f.ext.push_back(build_ext(t, k));
        f.intg.push_back(build_intg(t, k, sig.g(k)));
        f.gamma.push_back(f.ext[k] + double(eps) * f.intg[k]);
        f.gamma_op.push_back((f.ext[k] - double(eps) * f.intg[k]) * f.parity);
    }
    f.qdvol = quantize_blade(f, (n == 32) ? ~0u : ((1u << n) - 1u));
    const int m = n * (n - 1) / 2 + sig.q;
    f.tau_prefactor = (m % 2 == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    f.tau = f.qdvol * f.tau_prefactor;
    return cache.emplace(key, std::move(f)).first->second;
}

Matrix gamma_of(const Fiber& f, const Vec& alpha) {
    Matrix m(f.dim);
    for (int k = 0; k < f.sig.n(); ++k)
        if (alpha[k] != cplx(0.0)) m += f.gamma[k] * alpha[k];
    return m;
}

Matrix gamma_op_of(const Fiber& f, const Vec& alpha) {
    Matrix m(f.dim);
    for (int k = 0; k < f.sig.n(); ++k)
        if (alpha[k] != cplx(0.0)) m += f.gamma_op[k] * alpha[k];
    return m;
}

namespace {
Matrix quantize_with(const std::vector<Matrix>& gam, int dim, uint32_t mask) {
    Matrix r = Matrix::id(dim);
    // gamma(e^{i1}) ∘ ... ∘ gamma(e^{ik}), i1 < ... < ik: right-to-left
    for (int k = 31; k >= 0; --k)
        if (mask & (1u << k)) r = gam[k] * r;
    return r;
}
} // namespace

Matrix quantize_blade(const Fiber& f, uint32_t mask) {
    return quantize_with(f.gamma, f.dim, mask);
}

Matrix quantize_blade_op(const Fiber& f, uint32_t mask) {
    return quantize_with(f.gamma_op, f.dim, mask);
}

Matrix delta_gamma(const Fiber& f, const CliffordForm& x) {
    if (int(x.size()) != f.dim) throw std::invalid_argument("delta_gamma: wrong blade count");
    const int w = x[0].n;
    const BladeTable& t = BladeTable::get(f.sig.n());
    Matrix r(f.dim * w);
    for (int i = 0; i < f.dim; ++i) {
        if (norm_inf(x[i]) == 0.0) continue;
        r += kron(quantize_blade(f, t.mask_of[i]), x[i]);
    }
    return r;
}

CliffordForm symbol_map(const Fiber& f, const Matrix& a, int w) {
    if (a.n != f.dim * w) throw std::invalid_argument("symbol_map: dimension mismatch");
    // quantize(b) hits the vacuum cleanly: Q(b)(1⊗chi) = b ⊗ chi, so the
    // twist coefficients sit in the vacuum block-column of a.
    CliffordForm x(f.dim, Matrix(w));
    for (int b = 0; b < f.dim; ++b)
        for (int r = 0; r < w; ++r)
            for (int c = 0; c < w; ++c) x[b](r, c) = a(b * w + r, 0 * w + c);
    return x;
}

std::vector<Matrix> canonical_one_form(const Fiber& f) {
    const int n = f.sig.n();
    std::vector<Matrix> th;
    th.reserve(n);
    for (int k = 0; k < n; ++k)
        th.push_back(f.gamma[k] * (double(f.eps) * f.sig.g(k) / double(n)));
    return th;
}

cplx quantized_trace(const Fiber& f, const CliffordForm& x) {
    return trace(delta_gamma(f, x));
}

RealStructure real_structure(const Fiber& f, int branch) {
    const int n = f.sig.n();
    RealStructure rs;
    if (branch == +1) {
        rs.C = Matrix::id(f.dim);
    } else {
        // Q(dvol) anticommutes with every generator; normalize its square
        // with an op-side blade when Q(dvol)^2 = -1.
        Matrix c = f.qdvol;
        const double sq = (c * c)(0, 0).real();
        if (sq < 0.0) {
            bool found = false;
            for (int l = 0; l < n && !found; ++l) {
                if (f.eps * f.sig.g(l) > 0.0) {
                    c = c * f.gamma_op[l];
                    found = true;
                }
            }
            for (int l = 0; l < n && !found; ++l)
                for (int mth = l + 1; mth < n && !found; ++mth)
                    if (f.sig.g(l) * f.sig.g(mth) > 0.0) {
                        c = c * (f.gamma_op[l] * f.gamma_op[mth]);
                        found = true;
                    }
            if (!found) throw std::runtime_error("real_structure: no normalizer blade");
        }
        rs.C = c;
    }
    // verify: C real, C^2 = 1, uniform gamma sign, definite tau sign
    if (max_imag(rs.C) > 1e-14) throw std::runtime_error("real_structure: C not real");
    if (norm_inf(rs.C * rs.C - Matrix::id(f.dim)) > 1e-12)
        throw std::runtime_error("real_structure: C^2 != 1");
    for (int k = 0; k < n; ++k) {
        const Matrix lhs = rs.C * f.gamma[k] * rs.C;
        if (norm_inf(lhs - f.gamma[k] * double(branch)) > 1e-12)
            throw std::runtime_error("real_structure: gamma branch not realized");
    }
    rs.s_J_gamma = branch;
    const Matrix jt = rs.C * conjm(f.tau) * rs.C;
    if (norm_inf(jt - f.tau) < 1e-12)
        rs.s_J_tau = +1;
    else if (norm_inf(jt + f.tau) < 1e-12)
        rs.s_J_tau = -1;
    else
        throw std::runtime_error("real_structure: tau sign indefinite");
    return rs;
}

} // namespace cliff
