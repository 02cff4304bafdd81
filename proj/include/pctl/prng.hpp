// Deterministic PRNG with stable cross-platform output. Standard library
// distributions are implementation-defined, so bounded draws are done by
// hand here; identical seeds must give byte-identical artifacts.

#pragma once

#include <cstdint>

namespace pctl {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        // rejection sampling to kill modulo bias
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    bool coin() { return next() & 1u; }

private:
    std::uint64_t state_;
};

} // namespace pctl
