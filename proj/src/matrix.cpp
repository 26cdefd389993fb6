#include "cliff/matrix.hpp"
#include <stdexcept>
#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cliff {

Matrix operator+(Matrix x, const Matrix& y) { x += y; return x; }
Matrix operator-(Matrix x, const Matrix& y) { x -= y; return x; }
Matrix operator*(Matrix x, cplx s) { x *= s; return x; }
Matrix operator*(cplx s, Matrix x) { x *= s; return x; }

Matrix mul_serial(const Matrix& x, const Matrix& y) {
    assert(x.n == y.n);
    const int n = x.n;
    Matrix r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx xik = x(i, k);
            if (xik == cplx(0.0)) continue;
            const cplx* yr = &y.a[size_t(k) * n];
            cplx* rr = &r.a[size_t(i) * n];
            for (int j = 0; j < n; ++j) rr[j] += xik * yr[j];
        }
    return r;
}

Matrix mul_omp(const Matrix& x, const Matrix& y) {
    assert(x.n == y.n);
    const int n = x.n;
    Matrix r(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const cplx xik = x(i, k);
            if (xik == cplx(0.0)) continue;
            const cplx* yr = &y.a[size_t(k) * n];
            cplx* rr = &r.a[size_t(i) * n];
            for (int j = 0; j < n; ++j) rr[j] += xik * yr[j];
        }
    }
    return r;
}

Matrix operator*(const Matrix& x, const Matrix& y) {
    // rows are independent, per-row arithmetic order identical in both
    // kernels, so the dispatch cannot change results
    if (x.n >= 96) return mul_omp(x, y);
    return mul_serial(x, y);
}

Matrix adjointm(const Matrix& x) {
    Matrix r(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(j, i) = std::conj(x(i, j));
    return r;
}

Matrix transposem(const Matrix& x) {
    Matrix r(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(j, i) = x(i, j);
    return r;
}

Matrix conjm(const Matrix& x) {
    Matrix r(x.n);
    for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = std::conj(x.a[i]);
    return r;
}

cplx trace(const Matrix& x) {
    cplx t = 0.0;
    for (int i = 0; i < x.n; ++i) t += x(i, i);
    return t;
}

cplx trace_prod(const Matrix& x, const Matrix& y) {
    assert(x.n == y.n);
    cplx t = 0.0;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) t += x(i, j) * y(j, i);
    return t;
}

double norm_inf(const Matrix& x) {
    double m = 0.0;
    for (const auto& v : x.a) m = std::max(m, std::abs(v));
    return m;
}

double norm_fro(const Matrix& x) {
    double s = 0.0;
    for (const auto& v : x.a) s += std::norm(v);
    return std::sqrt(s);
}

double max_imag(const Matrix& x) {
    double m = 0.0;
    for (const auto& v : x.a) m = std::max(m, std::abs(v.imag()));
    return m;
}

Matrix comm(const Matrix& x, const Matrix& y) { return x * y - y * x; }
Matrix anticomm(const Matrix& x, const Matrix& y) { return x * y + y * x; }

Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix r(x.n * y.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) {
            const cplx xij = x(i, j);
            if (xij == cplx(0.0)) continue;
            for (int k = 0; k < y.n; ++k)
                for (int l = 0; l < y.n; ++l)
                    r(i * y.n + k, j * y.n + l) = xij * y(k, l);
        }
    return r;
}

Matrix block2(const Matrix& p, const Matrix& q, const Matrix& r, const Matrix& s) {
    const int h = p.n;
    assert(q.n == h && r.n == h && s.n == h);
    Matrix m(2 * h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) {
            m(i, j) = p(i, j);
            m(i, j + h) = q(i, j);
            m(i + h, j) = r(i, j);
            m(i + h, j + h) = s(i, j);
        }
    return m;
}

Matrix getblock(const Matrix& x, int bi, int bj, int half) {
    Matrix r(half);
    for (int i = 0; i < half; ++i)
        for (int j = 0; j < half; ++j) r(i, j) = x(bi * half + i, bj * half + j);
    return r;
}

Vec matvec(const Matrix& m, const Vec& v) {
    assert(int(v.size()) == m.n);
    Vec r(m.n, cplx(0.0));
    for (int i = 0; i < m.n; ++i) {
        cplx s = 0.0;
        const cplx* row = &m.a[size_t(i) * m.n];
        for (int j = 0; j < m.n; ++j) s += row[j] * v[j];
        r[i] = s;
    }
    return r;
}

Vec vadd(Vec x, const Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return x;
}
Vec vsub(Vec x, const Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
    return x;
}
Vec vscale(Vec x, cplx s) {
    for (auto& v : x) v *= s;
    return x;
}
double vnorm(const Vec& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

cplx pair_with(const Matrix& gram, const Vec& x, const Vec& y) {
    Vec gy = matvec(gram, y);
    cplx s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * gy[i];
    return s;
}

std::vector<double> lls_fit(const std::vector<std::vector<double>>& a,
                            const std::vector<double>& b) {
    const size_t m = a.size();
    if (m == 0) throw std::invalid_argument("lls_fit: empty system");
    const size_t k = a[0].size();
    // normal equations A^T A x = A^T b
    std::vector<double> ata(k * k, 0.0), atb(k, 0.0);
    for (size_t r = 0; r < m; ++r) {
        for (size_t i = 0; i < k; ++i) {
            atb[i] += a[r][i] * b[r];
            for (size_t j = 0; j < k; ++j) ata[i * k + j] += a[r][i] * a[r][j];
        }
    }
    // Gaussian elimination with partial pivoting
    std::vector<double> x(k, 0.0);
    std::vector<size_t> piv(k);
    for (size_t i = 0; i < k; ++i) piv[i] = i;
    for (size_t c = 0; c < k; ++c) {
        size_t best = c;
        for (size_t r = c + 1; r < k; ++r)
            if (std::abs(ata[r * k + c]) > std::abs(ata[best * k + c])) best = r;
        if (best != c)
            for (size_t j = 0; j < k; ++j) std::swap(ata[c * k + j], ata[best * k + j]),
                std::swap(atb[c], atb[best]);
        const double d = ata[c * k + c];
        if (std::abs(d) < 1e-300) throw std::runtime_error("lls_fit: singular normal matrix");
        for (size_t r = c + 1; r < k; ++r) {
            const double f = ata[r * k + c] / d;
            if (f == 0.0) continue;
            for (size_t j = c; j < k; ++j) ata[r * k + j] -= f * ata[c * k + j];
            atb[r] -= f * atb[c];
        }
    }
    for (size_t i = k; i-- > 0;) {
        double s = atb[i];
        for (size_t j = i + 1; j < k; ++j) s -= ata[i * k + j] * x[j];
        x[i] = s / ata[i * k + i];
    }
    return x;
}

namespace {
// row echelon with partial pivoting; returns pivot columns
std::vector<int> echelon(Matrix& m) {
    const int n = m.n;
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < n && row < n; ++col) {
        int best = row;
        for (int r = row + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(best, col))) best = r;
        if (std::abs(m(best, col)) < 1e-13) continue;
        if (best != row)
            for (int j = 0; j < n; ++j) std::swap(m(row, j), m(best, j));
        const cplx d = m(row, col);
        for (int r = row + 1; r < n; ++r) {
            const cplx f = m(r, col) / d;
            if (f == cplx(0.0)) continue;
            for (int j = col; j < n; ++j) m(r, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}
} // namespace

std::pair<Vec, double> null_vector(Matrix m) {
    const Matrix orig = m;
    const int n = m.n;
    std::vector<int> pivots = echelon(m);
    // pick the first non-pivot column as the free variable
    std::vector<bool> ispiv(n, false);
    for (int c : pivots) ispiv[c] = true;
    int freecol = -1;
    for (int c = 0; c < n; ++c)
        if (!ispiv[c]) { freecol = c; break; }
    Vec v(n, cplx(0.0));
    if (freecol < 0) {
        // numerically full rank: report the last pivot direction anyway
        v[n - 1] = 1.0;
    } else {
        v[freecol] = 1.0;
        for (int r = int(pivots.size()) - 1; r >= 0; --r) {
            const int pc = pivots[r];
            cplx s = 0.0;
            for (int j = pc + 1; j < n; ++j) s += m(r, j) * v[j];
            v[pc] = -s / m(r, pc);
        }
    }
    const double nv = vnorm(v);
    for (auto& x : v) x /= nv;
    Vec mv = matvec(orig, v);
    return {v, vnorm(mv)};
}

Vec solve_linear(Matrix m, Vec b) {
    const int n = m.n;
    for (int c = 0; c < n; ++c) {
        int best = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(best, c))) best = r;
        if (std::abs(m(best, c)) < 1e-300) throw std::runtime_error("solve_linear: singular");
        if (best != c) {
            for (int j = 0; j < n; ++j) std::swap(m(c, j), m(best, j));
            std::swap(b[c], b[best]);
        }
        const cplx d = m(c, c);
        for (int r = c + 1; r < n; ++r) {
            const cplx f = m(r, c) / d;
            if (f == cplx(0.0)) continue;
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
            b[r] -= f * b[c];
        }
    }
    Vec x(n, cplx(0.0));
    for (int i = n; i-- > 0;) {
        cplx s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

} // namespace cliff
