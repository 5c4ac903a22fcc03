#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>

#include "jigsaw/errors.hpp"

namespace jigsaw {

// Source of all protocol randomness: tearing sizes, embed offsets, R blocks
// and key material. Two modes:
//   seeded(s)  deterministic stream (mt19937_64), for tests and --seed runs
//   system()   OS entropy via std::random_device (/dev/urandom on Linux),
//              required for keys and R in production
class RandomSource {
public:
    static RandomSource seeded(uint64_t seed) { return RandomSource(seed); }
    static RandomSource system() { return RandomSource(); }

    bool deterministic() const { return det_; }

    uint64_t next_u64() {
        if (det_)
            return gen_();
        uint64_t hi = (*dev_)();
        uint64_t lo = (*dev_)();
        return (hi << 32) | (lo & 0xFFFFFFFFu);
    }

    // Uniform in [0, bound], inclusive, without modulo bias.
    uint64_t uniform(uint64_t bound) {
        if (bound == UINT64_MAX)
            return next_u64();
        uint64_t span = bound + 1;
        uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % span;
    }

    bool coin() { return next_u64() & 1; }

    void fill_bytes(uint8_t* out, size_t n) {
        size_t i = 0;
        while (i < n) {
            uint64_t v = next_u64();
            for (int b = 0; b < 8 && i < n; ++b, ++i) {
                out[i] = static_cast<uint8_t>(v);
                v >>= 8;
            }
        }
    }

private:
    explicit RandomSource(uint64_t seed) : det_(true), gen_(seed) {}
    RandomSource() : det_(false), dev_(std::make_unique<std::random_device>()) {}

    bool det_;
    std::mt19937_64 gen_;
    std::unique_ptr<std::random_device> dev_;
};

} // namespace jigsaw
