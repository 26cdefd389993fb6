#include <chrono>
#include <cstring>
#include <iostream>

#include "cliff/fourier.hpp"

// Times the OpenMP kernels against their serial references and verifies that
// the two produce bit-for-bit identical results (the parallel kernels keep the
// serial accumulation order within each output slot).

using namespace cliff;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool bit_equal(const Matrix& a, const Matrix& b) {
    return a.n == b.n &&
           std::memcmp(a.a.data(), b.a.data(), a.a.size() * sizeof(cplx)) == 0;
}

bool bit_equal(const EndoField& a, const EndoField& b) {
    if (a.c.size() != b.c.size()) return false;
    for (size_t i = 0; i < a.c.size(); ++i)
        if (!bit_equal(a.c[i], b.c[i])) return false;
    return true;
}

void row(const char* kernel, const char* size, double serial, double omp, bool same) {
    std::printf("%-14s %-12s %10.2f %10.2f %9.2fx   %s\n", kernel, size, serial, omp,
                serial / omp, same ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    Rng rng{0xBE9C4u};
    bool ok = true;

    std::printf("%-14s %-12s %10s %10s %10s\n", "kernel", "size", "serial ms", "omp ms",
                "speedup");

    for (int dim : {64, 128, 256}) {
        Matrix a = random_matrix(rng, dim), b = random_matrix(rng, dim);
        const int reps = dim <= 128 ? 40 : 10;
        Matrix rs, rp;
        auto t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < reps; ++i) rs = mul_serial(a, b);
        const double ts = ms_since(t0) / reps;
        t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < reps; ++i) rp = mul_omp(a, b);
        const double tp = ms_since(t0) / reps;
        const bool same = bit_equal(rs, rp);
        ok = ok && same;
        char size[32];
        std::snprintf(size, sizeof size, "%dx%d", dim, dim);
        row("matmul", size, ts, tp, same);
    }

    for (int dim : {32, 64}) {
        EndoField f = random_endo_field(rng, 4, 1, dim, 1.0);
        EndoField g = random_endo_field(rng, 4, 1, dim, 1.0);
        const int reps = dim <= 32 ? 5 : 2;
        EndoField rs, rp;
        auto t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < reps; ++i) rs = product_serial(f, g);
        const double ts = ms_since(t0) / reps;
        t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < reps; ++i) rp = product(f, g);
        const double tp = ms_since(t0) / reps;
        const bool same = bit_equal(rs, rp);
        ok = ok && same;
        char size[32];
        std::snprintf(size, sizeof size, "n=4 K=1 d=%d", dim);
        row("field product", size, ts, tp, same);
    }

    if (!ok) {
        std::fprintf(stderr, "parallel kernels drifted from the serial reference\n");
        return 1;
    }
    return 0;
}
