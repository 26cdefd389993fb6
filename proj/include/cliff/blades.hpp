#pragma once
#include <cstdint>
#include <vector>

namespace cliff {

// Flat metric g = diag(+1 x p, -1 x q); the -1 directions come last.
struct Signature {
    int p = 0;
    int q = 0;
    int n() const { return p + q; }
    double g(int k) const { return k < p ? 1.0 : -1.0; } // g_kk, 0-based
    double ginv(int k) const { return g(k); }            // diagonal, so g^kk = g_kk
};

// Basis order for the exterior algebra on R^n: by grade, then lexicographic
// on the increasing index tuple. Bit k of a mask stands for e^{k+1}.
struct BladeTable {
    int n = 0;
    int dim = 0;                      // 2^n
    std::vector<uint32_t> mask_of;    // basis index -> mask
    std::vector<int> index_of;        // mask -> basis index

    static const BladeTable& get(int n);
};

inline int grade(uint32_t mask) { return __builtin_popcount(mask); }

// sign (-1)^{#{j in mask : j < k}} picked up moving e^{k+1} past lower factors
int shuffle_sign(uint32_t mask, int k);

} // namespace cliff
