#pragma once

#include <vector>

#include "jigsaw/bitstring.hpp"
#include "jigsaw/errors.hpp"
#include "jigsaw/random.hpp"

namespace jigsaw {

struct TearConfig {
    size_t ps_bits;
    size_t l_min_bits; // lower limit on part size; controls expansion overhead

    TearConfig(size_t ps, size_t l_min) : ps_bits(ps), l_min_bits(l_min) {
        if (ps < 8 || ps % 8 != 0)
            throw WidthError("block width must be a positive multiple of 8 bits");
        if (l_min < 1 || l_min > ps - 2)
            throw Error("part size lower limit must lie in [1, ps-2]");
    }

    size_t max_part_bits() const { return ps_bits - 2; }
};

// Split data into parts of random sizes in [l_min, ps-2], in order. The
// final part is the remainder and may be shorter than l_min. Concatenating
// the parts reproduces the input exactly; empty data yields no parts.
inline std::vector<BitString> tear(const BitString& data, const TearConfig& cfg,
                                   RandomSource& rng) {
    std::vector<BitString> parts;
    size_t pos = 0;
    while (pos < data.size()) {
        size_t remaining = data.size() - pos;
        size_t sz = cfg.l_min_bits +
                    static_cast<size_t>(rng.uniform(cfg.max_part_bits() - cfg.l_min_bits));
        if (sz >= remaining)
            sz = remaining;
        parts.push_back(data.substr(pos, sz));
        pos += sz;
    }
    return parts;
}

} // namespace jigsaw
