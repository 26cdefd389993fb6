#include "cliff/fourier.hpp"

#include <map>
#include <stdexcept>

namespace cliff {

EndoField rmul(const EndoField& f, const Matrix& m) {
    EndoField r;
    r.band = f.band;
    r.capacity = f.capacity;
    r.c.reserve(f.c.size());
    for (const auto& x : f.c) r.c.push_back(mul_serial(x, m));
    return r;
}

SectionField cc_section(const Module& m, const SectionField& psi) {
    SectionField r = conj_field(psi);
    for (auto& v : r.c) v = matvec(m.C, v);
    return r;
}

EndoField cc_endo(const Module& m, const EndoField& phi) {
    EndoField r = conj_field(phi);
    for (auto& x : r.c) x = m.C * x * m.C;
    return r;
}

cplx l2_pairing(const Module& m, const SectionField& a, const SectionField& b) {
    const int K = std::max(a.band.K, b.band.K);
    const SectionField x = pad_to(a, K), y = pad_to(b, K);
    cplx s = 0.0;
    for (size_t i = 0; i < x.c.size(); ++i) s += pair_with(m.gram, x.c[i], y.c[i]);
    return s * std::pow(2.0 * M_PI, a.band.n);
}

cplx l2_pairing_quadrature(const Module& m, const SectionField& a,
                           const SectionField& b, int pts) {
    const int n = a.band.n;
    std::vector<double> x(n, 0.0);
    std::vector<int> idx(n, 0);
    cplx s = 0.0;
    const size_t total = size_t(std::pow(double(pts), n));
    for (size_t t = 0; t < total; ++t) {
        size_t f = t;
        for (int d = n - 1; d >= 0; --d) {
            idx[d] = int(f % pts);
            f /= pts;
            x[d] = 2.0 * M_PI * double(idx[d]) / double(pts);
        }
        s += pair_with(m.gram, eval_at(a, x), eval_at(b, x));
    }
    return s * std::pow(2.0 * M_PI / double(pts), n);
}

std::vector<std::vector<EndoField>> wedge(const FormField& a, const FormField& b) {
    const int n = int(a.size());
    std::vector<std::vector<EndoField>> f(n, std::vector<EndoField>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            f[i][j] = product(a[i], b[j]) - product(a[j], b[i]);
        }
    return f;
}

EndoField ev_g(const Signature& sig, const FormField& a, const FormField& b) {
    EndoField r;
    for (int k = 0; k < sig.n(); ++k) {
        EndoField t = product(a[k], b[k]) * cplx(sig.ginv(k));
        r = r.empty() ? t : r + t;
    }
    return r;
}

ScalarField divergence(const Signature& sig, const std::vector<ScalarField>& xi) {
    (void)sig; // flat coordinates: div = sum of plain partials of components
    ScalarField r;
    for (size_t k = 0; k < xi.size(); ++k) {
        ScalarField t = derive(xi[k], int(k));
        r = r.empty() ? t : r + t;
    }
    return r;
}

Matrix random_matrix(Rng& rng, int dim, double amp) {
    Matrix m(dim);
    for (auto& v : m.a) v = rng.c() * amp;
    return m;
}

ScalarField random_real_scalar(Rng& rng, int n, int K, double amp) {
    ScalarField f(n, K, cplx(0.0));
    std::vector<int> k(n), mk(n);
    for (size_t i = 0; i < f.c.size(); ++i) f.c[i] = rng.c() * amp;
    // enforce the reality symmetry c_{-k} = conj(c_k)
    ScalarField r = f;
    for (size_t i = 0; i < f.c.size(); ++i) {
        f.band.decode(i, k.data());
        for (int d = 0; d < n; ++d) mk[d] = -k[d];
        r.c[i] = 0.5 * (f.c[i] + std::conj(f.at(mk.data())));
    }
    return r;
}

EndoField random_endo_field(Rng& rng, int n, int K, int dim, double amp) {
    EndoField f(n, K, Matrix(dim));
    for (auto& m : f.c) m = random_matrix(rng, dim, amp);
    return f;
}

SectionField random_section(Rng& rng, int n, int K, int dim, double amp) {
    SectionField f(n, K, Vec(dim, cplx(0.0)));
    for (auto& v : f.c)
        for (auto& x : v) x = rng.c() * amp;
    return f;
}

EndoField const_endo(int n, const Matrix& m, int K, int cap) {
    EndoField f(n, K, m, cap);
    std::vector<int> k0(n, 0);
    f.at(k0.data()) = m;
    return f;
}

ScalarField sparse_real_scalar(Rng& rng, int n, int K, int nmodes, double amp) {
    ScalarField f(n, K, cplx(0.0));
    std::vector<int> k(n), mk(n);
    for (int m = 0; m < nmodes; ++m) {
        for (int d = 0; d < n; ++d) k[d] = int(rng.below(uint64_t(2 * K + 1))) - K;
        const cplx c = rng.c() * amp;
        for (int d = 0; d < n; ++d) mk[d] = -k[d];
        f.at(k.data()) += c;
        f.at(mk.data()) += std::conj(c);
    }
    return f;
}

EndoField scalar_times(const ScalarField& s, const Matrix& m) {
    EndoField r(s.band.n, s.band.K, m * s.c[0], s.capacity);
    for (size_t i = 0; i < s.c.size(); ++i) r.c[i] = m * s.c[i];
    return r;
}

// ---- sparse mode lists ------------------------------------------------------

namespace {

bool nonzero(const Matrix& m) {
    for (const auto& v : m.a)
        if (v != cplx(0.0)) return true;
    return false;
}

// accumulate into a keyed map, then flatten back to a SparseEndo
using ModeMap = std::map<std::vector<int>, Matrix>;

void map_acc(ModeMap& acc, const std::vector<int>& k, const Matrix& m) {
    auto it = acc.find(k);
    if (it == acc.end()) acc.emplace(k, m);
    else it->second += m;
}

SparseEndo map_flatten(int n, int dim, ModeMap&& acc) {
    SparseEndo r;
    r.n = n;
    r.dim = dim;
    for (auto& [k, m] : acc) {
        if (!nonzero(m)) continue;
        r.key.push_back(k);
        r.coef.push_back(std::move(m));
    }
    return r;
}

} // namespace

SparseEndo sparse_of(const EndoField& f) {
    SparseEndo r;
    r.n = f.band.n;
    r.dim = f.c[0].n;
    std::vector<int> k(size_t(f.band.n));
    for (size_t i = 0; i < f.c.size(); ++i) {
        if (!nonzero(f.c[i])) continue;
        f.band.decode(i, k.data());
        r.key.push_back(k);
        r.coef.push_back(f.c[i]);
    }
    return r;
}

EndoField dense_of(const SparseEndo& s, int K, int capacity) {
    EndoField r(s.n, K, Matrix(s.dim), capacity < 0 ? 4 * K + 2 : capacity);
    for (size_t i = 0; i < s.size(); ++i) {
        if (!r.band.contains(s.key[i].data()))
            throw std::out_of_range("dense_of: mode outside the requested band");
        r.at(s.key[i].data()) += s.coef[i];
    }
    return r;
}

SparseEndo sparse_const(int n, const Matrix& m) {
    SparseEndo r;
    r.n = n;
    r.dim = m.n;
    if (nonzero(m)) {
        r.key.emplace_back(size_t(n), 0);
        r.coef.push_back(m);
    }
    return r;
}

Matrix sparse_mode(const SparseEndo& f, const std::vector<int>& k) {
    for (size_t i = 0; i < f.size(); ++i)
        if (f.key[i] == k) return f.coef[i];
    return Matrix(f.dim);
}

SparseEndo sparse_add(const SparseEndo& a, const SparseEndo& b) {
    ModeMap acc;
    for (size_t i = 0; i < a.size(); ++i) map_acc(acc, a.key[i], a.coef[i]);
    for (size_t i = 0; i < b.size(); ++i) map_acc(acc, b.key[i], b.coef[i]);
    return map_flatten(a.n, a.dim ? a.dim : b.dim, std::move(acc));
}

SparseEndo sparse_scale(SparseEndo f, cplx s) {
    for (auto& m : f.coef) m *= s;
    return f;
}

SparseEndo sparse_lmul(const Matrix& m, SparseEndo f) {
    for (auto& c : f.coef) c = m * c;
    return f;
}

SparseEndo sparse_rmul(SparseEndo f, const Matrix& m) {
    for (auto& c : f.coef) c = c * m;
    return f;
}

SparseEndo sparse_comm_const(const Matrix& m, const SparseEndo& f) {
    SparseEndo r = f;
    for (auto& c : r.coef) c = m * c - c * m;
    return r;
}

SparseEndo sparse_anticomm_const(const Matrix& m, const SparseEndo& f) {
    SparseEndo r = f;
    for (auto& c : r.coef) c = m * c + c * m;
    return r;
}

SparseEndo sparse_derive(const SparseEndo& f, int j) {
    SparseEndo r;
    r.n = f.n;
    r.dim = f.dim;
    for (size_t i = 0; i < f.size(); ++i) {
        if (f.key[i][size_t(j)] == 0) continue;
        r.key.push_back(f.key[i]);
        r.coef.push_back(f.coef[i] * cplx(0.0, double(f.key[i][size_t(j)])));
    }
    return r;
}

SparseEndo sparse_dress(const SparseEndo& f, const Matrix& d2) {
    SparseEndo r = f;
    r.dim = f.dim * d2.n;
    for (auto& c : r.coef) c = kron(d2, c);
    return r;
}

SparseEndo sparse_prod(const SparseEndo& a, const SparseEndo& b) {
    ModeMap acc;
    std::vector<int> t(size_t(a.n));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) {
            for (int d = 0; d < a.n; ++d)
                t[size_t(d)] = a.key[i][size_t(d)] + b.key[j][size_t(d)];
            map_acc(acc, t, a.coef[i] * b.coef[j]);
        }
    return map_flatten(a.n, a.dim, std::move(acc));
}

Matrix sparse_prod_mode(const SparseEndo& a, const SparseEndo& b, const std::vector<int>& t) {
    Matrix r(a.dim);
    std::vector<int> kb(size_t(a.n));
    for (size_t i = 0; i < a.size(); ++i) {
        for (int d = 0; d < a.n; ++d) kb[size_t(d)] = t[size_t(d)] - a.key[i][size_t(d)];
        for (size_t j = 0; j < b.size(); ++j)
            if (b.key[j] == kb) r += a.coef[i] * b.coef[j];
    }
    return r;
}

Matrix sparse_eval(const SparseEndo& f, const std::vector<double>& x) {
    Matrix r(f.dim);
    for (size_t i = 0; i < f.size(); ++i) {
        double ph = 0.0;
        for (int d = 0; d < f.n; ++d) ph += f.key[i][size_t(d)] * x[size_t(d)];
        r += f.coef[i] * std::exp(cplx(0.0, ph));
    }
    return r;
}

cplx sparse_trace_integral(const SparseEndo& f) {
    const std::vector<int> k0(size_t(f.n), 0);
    return trace(sparse_mode(f, k0)) * std::pow(2.0 * M_PI, f.n);
}

cplx sparse_pair_integral(const SparseEndo& a, const SparseEndo& b) {
    cplx s = 0.0;
    std::vector<int> mk(size_t(a.n));
    for (size_t i = 0; i < a.size(); ++i) {
        for (int d = 0; d < a.n; ++d) mk[size_t(d)] = -a.key[i][size_t(d)];
        for (size_t j = 0; j < b.size(); ++j)
            if (b.key[j] == mk) s += trace_prod(a.coef[i], b.coef[j]);
    }
    return s * std::pow(2.0 * M_PI, a.n);
}

ScalarField sparse_trace(const SparseEndo& f) {
    int K = 0;
    for (const auto& k : f.key)
        for (int v : k) K = std::max(K, v < 0 ? -v : v);
    ScalarField r(f.n, K, cplx(0.0));
    for (size_t i = 0; i < f.size(); ++i) r.at(f.key[i].data()) += trace(f.coef[i]);
    return r;
}

double sparse_norm(const SparseEndo& f) {
    double m = 0.0;
    for (const auto& c : f.coef) m = std::max(m, norm_inf(c));
    return m;
}

} // namespace cliff
