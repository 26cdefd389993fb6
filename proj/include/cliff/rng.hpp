#pragma once
#include <cstdint>
#include <complex>
#include <string_view>

namespace cliff {

// Deterministic splitmix64. std:: engines/distributions are not pinned down
// by the standard tightly enough for bit-for-bit reproducible reports, so the
// whole harness draws from this.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [0,1)
    double u01() { return double(next() >> 11) * 0x1.0p-53; }
    // uniform in [-1,1)
    double sym() { return 2.0 * u01() - 1.0; }
    std::complex<double> c() { return {sym(), sym()}; }
    // integer in [0, m)
    uint64_t below(uint64_t m) { return next() % m; }
};

// FNV-1a, used to derive per-check seeds from (master seed, check id).
inline uint64_t hash64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline Rng check_rng(uint64_t master_seed, std::string_view check_id) {
    return Rng(master_seed ^ hash64(check_id));
}

} // namespace cliff
