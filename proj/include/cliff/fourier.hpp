#pragma once
#include "cliff/matrix.hpp"
#include "cliff/modules.hpp"
#include "cliff/rng.hpp"
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cliff {

// Everything lives in finitely many Fourier modes over the flat n-torus, so
// derivatives and products are exact: differentiation multiplies by i k_j,
// multiplication convolves and *grows* the band. Nothing is ever truncated
// silently — outgrowing the declared capacity throws.
struct CapacityExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Band {
    int n = 0, K = 0;
    int width() const { return 2 * K + 1; }
    size_t count() const {
        size_t c = 1;
        for (int i = 0; i < n; ++i) c *= size_t(width());
        return c;
    }
    void decode(size_t flat, int* k) const {
        for (int i = n - 1; i >= 0; --i) {
            k[i] = int(flat % width()) - K;
            flat /= width();
        }
    }
    size_t encode(const int* k) const {
        size_t f = 0;
        for (int i = 0; i < n; ++i) f = f * width() + size_t(k[i] + K);
        return f;
    }
    bool contains(const int* k) const {
        for (int i = 0; i < n; ++i)
            if (k[i] < -K || k[i] > K) return false;
        return true;
    }
};

// coefficient-type glue
inline cplx f_zero(const cplx&) { return cplx(0.0); }
inline Matrix f_zero(const Matrix& m) { return Matrix(m.n); }
inline Vec f_zero(const Vec& v) { return Vec(v.size(), cplx(0.0)); }
inline void f_acc(cplx& a, const cplx& b) { a += b; }
inline void f_acc(Matrix& a, const Matrix& b) { a += b; }
inline void f_acc(Vec& a, const Vec& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}
inline cplx f_mul(const cplx& a, const cplx& b) { return a * b; }
inline Matrix f_mul(const Matrix& a, const Matrix& b) { return mul_serial(a, b); }
inline Vec f_mul(const Matrix& a, const Vec& b) { return matvec(a, b); }
inline Matrix f_mul(const cplx& a, const Matrix& b) { return b * a; }
inline Vec f_mul(const cplx& a, const Vec& b) {
    Vec r = b;
    for (auto& x : r) x *= a;
    return r;
}
inline void f_sub(cplx& a, const cplx& b) { a -= b; }
inline void f_sub(Matrix& a, const Matrix& b) { a -= b; }
inline void f_sub(Vec& a, const Vec& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
}
inline double f_norm(const cplx& a) { return std::abs(a); }
inline double f_norm(const Matrix& a) { return norm_inf(a); }
inline double f_norm(const Vec& a) {
    double m = 0.0;
    for (const auto& x : a) m = std::max(m, std::abs(x));
    return m;
}

template <class V>
struct Field {
    Band band;
    int capacity = 0;
    std::vector<V> c;

    Field() = default;
    Field(int n, int K, const V& shape, int cap = -1)
        : band{n, K}, capacity(cap < 0 ? 4 * K + 2 : cap),
          c(Band{n, K}.count(), f_zero(shape)) {}

    V& at(const int* k) { return c[band.encode(k)]; }
    const V& at(const int* k) const { return c[band.encode(k)]; }
    bool empty() const { return c.empty(); }
};

using ScalarField = Field<cplx>;
using EndoField = Field<Matrix>;
using SectionField = Field<Vec>;
using FormField = std::vector<EndoField>; // n covector components

template <class V>
Field<V> pad_to(const Field<V>& f, int K) {
    if (K == f.band.K) return f;
    if (K < f.band.K) throw std::invalid_argument("pad_to: shrinking band");
    Field<V> r(f.band.n, K, f.c[0], f.capacity);
    std::vector<int> k(f.band.n);
    for (size_t i = 0; i < f.c.size(); ++i) {
        f.band.decode(i, k.data());
        r.at(k.data()) = f.c[i];
    }
    return r;
}

template <class V>
Field<V> operator+(const Field<V>& a, const Field<V>& b) {
    const int K = std::max(a.band.K, b.band.K);
    Field<V> x = pad_to(a, K);
    x.capacity = std::max(a.capacity, b.capacity);
    if (b.band.K == K) {
        for (size_t i = 0; i < x.c.size(); ++i) f_acc(x.c[i], b.c[i]);
    } else {
        std::vector<int> k(b.band.n);
        for (size_t i = 0; i < b.c.size(); ++i) {
            b.band.decode(i, k.data());
            f_acc(x.at(k.data()), b.c[i]);
        }
    }
    return x;
}

template <class V>
Field<V> operator*(Field<V> a, cplx s) {
    for (auto& v : a.c) v = f_mul(s, v);
    return a;
}

template <class V>
Field<V> operator-(const Field<V>& a, const Field<V>& b) {
    const int K = std::max(a.band.K, b.band.K);
    Field<V> x = pad_to(a, K);
    x.capacity = std::max(a.capacity, b.capacity);
    if (b.band.K == K) {
        for (size_t i = 0; i < x.c.size(); ++i) f_sub(x.c[i], b.c[i]);
    } else {
        std::vector<int> k(b.band.n);
        for (size_t i = 0; i < b.c.size(); ++i) {
            b.band.decode(i, k.data());
            f_sub(x.at(k.data()), b.c[i]);
        }
    }
    return x;
}

// exact derivative along coordinate j
template <class V>
Field<V> derive(const Field<V>& f, int j) {
    Field<V> r = f;
    std::vector<int> k(f.band.n);
    for (size_t i = 0; i < r.c.size(); ++i) {
        r.band.decode(i, k.data());
        r.c[i] = f_mul(cplx(0.0, double(k[j])), f.c[i]);
    }
    return r;
}

// exact product = convolution; band grows to Ka + Kb (capacity-checked).
// Serial reference kernel: fixed summation order per output mode.
template <class A, class B>
auto product_serial(const Field<A>& a, const Field<B>& b)
    -> Field<decltype(f_mul(a.c[0], b.c[0]))> {
    using R = decltype(f_mul(a.c[0], b.c[0]));
    const int n = a.band.n, Kout = a.band.K + b.band.K;
    // the larger budget wins: zero-filled placeholders must not shrink a chain
    const int cap = std::max(a.capacity, b.capacity);
    if (Kout > cap)
        throw CapacityExceeded("product: band " + std::to_string(Kout) +
                               " exceeds capacity " + std::to_string(cap));
    Field<R> r(n, Kout, f_mul(a.c[0], b.c[0]), cap);
    // identically-zero coefficients contribute an exact zero; skipping them is
    // a pure speedup (fields are typically sparse in the band)
    std::vector<char> nza(a.c.size()), nzb(b.c.size());
    for (size_t i = 0; i < a.c.size(); ++i) nza[i] = f_norm(a.c[i]) != 0.0;
    for (size_t i = 0; i < b.c.size(); ++i) nzb[i] = f_norm(b.c[i]) != 0.0;
    std::vector<int> ko(n), ka(n), kb(n);
    for (size_t io = 0; io < r.c.size(); ++io) {
        r.band.decode(io, ko.data());
        R acc = f_zero(r.c[0]);
        for (size_t ia = 0; ia < a.c.size(); ++ia) {
            if (!nza[ia]) continue;
            a.band.decode(ia, ka.data());
            bool ok = true;
            for (int d = 0; d < n; ++d) {
                kb[d] = ko[d] - ka[d];
                if (kb[d] < -b.band.K || kb[d] > b.band.K) { ok = false; break; }
            }
            if (!ok) continue;
            const size_t ib = b.band.encode(kb.data());
            if (!nzb[ib]) continue;
            f_acc(acc, f_mul(a.c[ia], b.c[ib]));
        }
        r.c[io] = acc;
    }
    return r;
}

// OpenMP kernel: parallel over output modes only, so each coefficient is
// accumulated by one thread in the same order as the serial kernel.
template <class A, class B>
auto product(const Field<A>& a, const Field<B>& b)
    -> Field<decltype(f_mul(a.c[0], b.c[0]))> {
    using R = decltype(f_mul(a.c[0], b.c[0]));
    const int n = a.band.n, Kout = a.band.K + b.band.K;
    // the larger budget wins: zero-filled placeholders must not shrink a chain
    const int cap = std::max(a.capacity, b.capacity);
    if (Kout > cap)
        throw CapacityExceeded("product: band " + std::to_string(Kout) +
                               " exceeds capacity " + std::to_string(cap));
    Field<R> r(n, Kout, f_mul(a.c[0], b.c[0]), cap);
    // same zero-skip as the serial kernel: the pair set is independent of the
    // thread count, so results stay bit-identical to product_serial
    std::vector<char> nza(a.c.size()), nzb(b.c.size());
    for (size_t i = 0; i < a.c.size(); ++i) nza[i] = f_norm(a.c[i]) != 0.0;
    for (size_t i = 0; i < b.c.size(); ++i) nzb[i] = f_norm(b.c[i]) != 0.0;
    const long total = long(r.c.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long io = 0; io < total; ++io) {
        std::vector<int> ko(n), ka(n), kb(n);
        r.band.decode(size_t(io), ko.data());
        R acc = f_zero(r.c[0]);
        for (size_t ia = 0; ia < a.c.size(); ++ia) {
            if (!nza[ia]) continue;
            a.band.decode(ia, ka.data());
            bool ok = true;
            for (int d = 0; d < n; ++d) {
                kb[d] = ko[d] - ka[d];
                if (kb[d] < -b.band.K || kb[d] > b.band.K) { ok = false; break; }
            }
            if (!ok) continue;
            const size_t ib = b.band.encode(kb.data());
            if (!nzb[ib]) continue;
            f_acc(acc, f_mul(a.c[ia], b.c[ib]));
        }
        r.c[size_t(io)] = acc;
    }
    return r;
}

// multiply by a constant endomorphism (no band growth)
template <class B>
auto lmul(const Matrix& m, const Field<B>& f) -> Field<decltype(f_mul(m, f.c[0]))> {
    Field<decltype(f_mul(m, f.c[0]))> r;
    r.band = f.band;
    r.capacity = f.capacity;
    r.c.reserve(f.c.size());
    for (const auto& x : f.c) r.c.push_back(f_mul(m, x));
    return r;
}
EndoField rmul(const EndoField& f, const Matrix& m);

// integral over the torus: (2π)^n times the zero mode
template <class V>
V integrate(const Field<V>& f) {
    std::vector<int> k0(f.band.n, 0);
    V z = f.at(k0.data());
    const double vol = std::pow(2.0 * M_PI, f.band.n);
    return f_mul(cplx(vol), z);
}

template <class V>
V eval_at(const Field<V>& f, const std::vector<double>& x) {
    V acc = f_zero(f.c[0]);
    std::vector<int> k(f.band.n);
    for (size_t i = 0; i < f.c.size(); ++i) {
        f.band.decode(i, k.data());
        double ph = 0.0;
        for (int d = 0; d < f.band.n; ++d) ph += k[d] * x[d];
        f_acc(acc, f_mul(std::exp(cplx(0.0, ph)), f.c[i]));
    }
    return acc;
}

template <class V>
double field_norm(const Field<V>& f) {
    double m = 0.0;
    for (const auto& v : f.c) m = std::max(m, f_norm(v));
    return m;
}

// pointwise complex conjugate of the function: c_k -> conj(c_{-k})
template <class V>
Field<V> conj_field(const Field<V>& f) {
    Field<V> r = f;
    std::vector<int> k(f.band.n), mk(f.band.n);
    for (size_t i = 0; i < f.c.size(); ++i) {
        f.band.decode(i, k.data());
        for (int d = 0; d < f.band.n; ++d) mk[d] = -k[d];
        V v = f.at(mk.data());
        if constexpr (std::is_same_v<V, cplx>) r.c[i] = std::conj(v);
        else if constexpr (std::is_same_v<V, Matrix>) r.c[i] = conjm(v);
        else {
            for (auto& x : v) x = std::conj(x);
            r.c[i] = v;
        }
    }
    return r;
}

// J applied pointwise to a section / an endomorphism field
SectionField cc_section(const Module& m, const SectionField& psi);
EndoField cc_endo(const Module& m, const EndoField& phi);

// L2 pairing of sections: integral of <psi(x), phi(x)>  (mode sum, exact)
cplx l2_pairing(const Module& m, const SectionField& a, const SectionField& b);
// the same by uniform-grid quadrature (pts samples per dimension)
cplx l2_pairing_quadrature(const Module& m, const SectionField& a,
                           const SectionField& b, int pts);

// forms
std::vector<std::vector<EndoField>> wedge(const FormField& a, const FormField& b);
EndoField ev_g(const Signature& sig, const FormField& a, const FormField& b);
ScalarField divergence(const Signature& sig, const std::vector<ScalarField>& xi);

// random data (deterministic given the rng state)
Matrix random_matrix(Rng& rng, int dim, double amp = 1.0);
ScalarField random_real_scalar(Rng& rng, int n, int K, double amp = 1.0);
EndoField random_endo_field(Rng& rng, int n, int K, int dim, double amp = 1.0);
SectionField random_section(Rng& rng, int n, int K, int dim, double amp = 1.0);

// real scalar profile supported on a few random modes (+ conjugate partners);
// keeps convolutions cheap on large fibers
ScalarField sparse_real_scalar(Rng& rng, int n, int K, int nmodes, double amp = 1.0);
EndoField scalar_times(const ScalarField& s, const Matrix& m);

EndoField const_endo(int n, const Matrix& m, int K = 0, int cap = -1);

// ---- sparse mode lists ------------------------------------------------------
//
// A dense Field spans the whole band cube, so a two-form coefficient on a
// large fiber costs (2K+1)^n * dim^2 even when only a handful of modes are
// populated. SparseEndo keeps just the nonzero coefficients, keyed by mode
// vector; products grow the support instead of the cube. Quadratic actions on
// the big doubled modules are computed in this representation and validated
// against the dense route on small fibers.

struct SparseEndo {
    int n = 0;    // torus dimension
    int dim = 0;  // fiber dimension
    std::vector<std::vector<int>> key;
    std::vector<Matrix> coef;

    size_t size() const { return key.size(); }
};

using SparseForm = std::vector<SparseEndo>;

SparseEndo sparse_of(const EndoField& f);
EndoField dense_of(const SparseEndo& s, int K, int capacity = -1);
SparseEndo sparse_const(int n, const Matrix& m);

// coefficient at mode k (zero matrix when absent)
Matrix sparse_mode(const SparseEndo& f, const std::vector<int>& k);

SparseEndo sparse_add(const SparseEndo& a, const SparseEndo& b);
SparseEndo sparse_scale(SparseEndo f, cplx s);
SparseEndo sparse_lmul(const Matrix& m, SparseEndo f);
SparseEndo sparse_rmul(SparseEndo f, const Matrix& m);
SparseEndo sparse_comm_const(const Matrix& m, const SparseEndo& f);
SparseEndo sparse_anticomm_const(const Matrix& m, const SparseEndo& f);
SparseEndo sparse_derive(const SparseEndo& f, int j);
SparseEndo sparse_dress(const SparseEndo& f, const Matrix& d2); // kron(d2, coef)

// full convolution product and the single mode t of it
SparseEndo sparse_prod(const SparseEndo& a, const SparseEndo& b);
Matrix sparse_prod_mode(const SparseEndo& a, const SparseEndo& b, const std::vector<int>& t);

Matrix sparse_eval(const SparseEndo& f, const std::vector<double>& x);

cplx sparse_trace_integral(const SparseEndo& f);                     // ∫ tr f
cplx sparse_pair_integral(const SparseEndo& a, const SparseEndo& b); // ∫ tr(ab), no product field
ScalarField sparse_trace(const SparseEndo& f);                       // tr f as a dense scalar field
double sparse_norm(const SparseEndo& f);                             // sup_k |coef_k|_inf

} // namespace cliff
