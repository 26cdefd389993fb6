#pragma once
#include <complex>
#include <vector>
#include <cassert>
#include <cmath>

namespace cliff {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major. Fiber dimensions stay small
// (<= a few hundred), so no blocking; the multiply kernel exists in a serial
// and an OpenMP flavour which must agree bit-for-bit (parallelism is over
// output rows, each inner sum keeps a fixed order).
struct Matrix {
    int n = 0;
    std::vector<cplx> a;

    Matrix() = default;
    explicit Matrix(int dim) : n(dim), a(size_t(dim) * dim, cplx(0.0)) {}

    static Matrix id(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    cplx& operator()(int i, int j) { return a[size_t(i) * n + j]; }
    const cplx& operator()(int i, int j) const { return a[size_t(i) * n + j]; }

    Matrix& operator+=(const Matrix& o) {
        assert(n == o.n);
        for (size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        assert(n == o.n);
        for (size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
        return *this;
    }
    Matrix& operator*=(cplx s) {
        for (auto& x : a) x *= s;
        return *this;
    }
};

Matrix operator+(Matrix x, const Matrix& y);
Matrix operator-(Matrix x, const Matrix& y);
Matrix operator*(Matrix x, cplx s);
Matrix operator*(cplx s, Matrix x);
Matrix operator*(const Matrix& x, const Matrix& y); // dispatches serial/omp

Matrix mul_serial(const Matrix& x, const Matrix& y);
Matrix mul_omp(const Matrix& x, const Matrix& y);

Matrix adjointm(const Matrix& x);
Matrix transposem(const Matrix& x);
Matrix conjm(const Matrix& x);
cplx trace(const Matrix& x);
cplx trace_prod(const Matrix& x, const Matrix& y); // tr(xy) without forming xy
double norm_inf(const Matrix& x);  // max |entry|
double norm_fro(const Matrix& x);
double max_imag(const Matrix& x);

Matrix comm(const Matrix& x, const Matrix& y);     // xy - yx
Matrix anticomm(const Matrix& x, const Matrix& y); // xy + yx

Matrix kron(const Matrix& x, const Matrix& y);
// [[p, q], [r, s]] out of equal-size blocks
Matrix block2(const Matrix& p, const Matrix& q, const Matrix& r, const Matrix& s);
Matrix getblock(const Matrix& x, int bi, int bj, int half);

// ---- vectors ------------------------------------------------------------

using Vec = std::vector<cplx>;

Vec matvec(const Matrix& m, const Vec& v);
Vec vadd(Vec x, const Vec& y);
Vec vsub(Vec x, const Vec& y);
Vec vscale(Vec x, cplx s);
double vnorm(const Vec& v);
// sesquilinear, antilinear in the first slot: sum conj(x_i) g_ij y_j
cplx pair_with(const Matrix& gram, const Vec& x, const Vec& y);

// ---- small dense solvers -------------------------------------------------

// Least squares for real systems via normal equations (few unknowns only:
// coefficient refits). Rows of `a` are the sample rows, length k each.
std::vector<double> lls_fit(const std::vector<std::vector<double>>& a,
                            const std::vector<double>& b);

// One unit-norm approximate null vector of a square complex matrix by
// Gaussian elimination with partial pivoting; returns {v, ||Mv||}.
std::pair<Vec, double> null_vector(Matrix m);

// Solve M x = b for square complex M (partial pivoting).
Vec solve_linear(Matrix m, Vec b);

} // namespace cliff
