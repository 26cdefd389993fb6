#include "cliff/blades.hpp"
#include <algorithm>
#include <map>
#include <mutex>

namespace cliff {

int shuffle_sign(uint32_t mask, int k) {
    const uint32_t below = mask & ((1u << k) - 1u);
    return (__builtin_popcount(below) & 1) ? -1 : 1;
}

const BladeTable& BladeTable::get(int n) {
    static std::map<int, BladeTable> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    BladeTable t;
    t.n = n;
    t.dim = 1 << n;
    t.mask_of.resize(t.dim);
    t.index_of.assign(t.dim, -1);
    std::vector<uint32_t> masks(t.dim);
    for (uint32_t m = 0; m < uint32_t(t.dim); ++m) masks[m] = m;
    std::stable_sort(masks.begin(), masks.end(), [](uint32_t a, uint32_t b) {
        const int ga = grade(a), gb = grade(b);
        if (ga != gb) return ga < gb;
        // lexicographic on the increasing tuple: compare lowest set bits
        uint32_t x = a, y = b;
        while (x && y) {
            const int ix = __builtin_ctz(x), iy = __builtin_ctz(y);
            if (ix != iy) return ix < iy;
            x &= x - 1;
            y &= y - 1;
        }
        return a < b;
    });
    for (int i = 0; i < t.dim; ++i) {
        t.mask_of[i] = masks[i];
        t.index_of[masks[i]] = i;
    }
    return cache.emplace(n, std::move(t)).first->second;
}

} // namespace cliff
