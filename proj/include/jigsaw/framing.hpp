#pragma once

#include "jigsaw/bitstring.hpp"
#include "jigsaw/block.hpp"
#include "jigsaw/errors.hpp"
#include "jigsaw/random.hpp"

namespace jigsaw {

// Sentinel framing: a part travels as '1' ++ part ++ '1' so the receiver can
// recover its exact extent after unmasking, whatever offset it was placed at.

inline BitString frame(const BitString& part) {
    BitString out;
    out.reserve_bits(part.size() + 2);
    out.push_back(true);
    out.append(part);
    out.push_back(true);
    return out;
}

// Place a framed part into an otherwise-zero block at the given MSB-first
// bit offset.
inline Block embed(const BitString& framed, size_t offset, size_t ps_bits) {
    if (framed.size() < 2 || framed.size() > ps_bits)
        throw EmbedError("framed part must fit the block, sentinels included");
    if (!framed.bit(0) || !framed.bit(framed.size() - 1))
        throw EmbedError("framed part must begin and end with a 1 sentinel");
    if (offset > ps_bits - framed.size())
        throw EmbedError("embed offset out of range");
    Block b(ps_bits);
    for (size_t i = 0; i < framed.size(); ++i)
        if (framed.bit(i))
            b.set_bit(offset + i, true);
    return b;
}

// Inverse of embed∘frame: the bits strictly between the first and last
// 1-bits of the block. Fails when no sentinel pair exists.
inline BitString extract(const Block& block) {
    auto first = first_set_bit(block);
    auto last = last_set_bit(block);
    if (!first || *first == *last)
        throw FramingError("block carries no sentinel pair");
    BitString out;
    out.reserve_bits(*last - *first - 1);
    for (size_t i = *first + 1; i < *last; ++i)
        out.push_back(block.bit(i));
    return out;
}

// Uniform embedding offset over every legal position.
inline size_t random_offset(RandomSource& rng, size_t framed_len, size_t ps_bits) {
    if (framed_len > ps_bits)
        throw EmbedError("framed part longer than the block");
    return static_cast<size_t>(rng.uniform(ps_bits - framed_len));
}

} // namespace jigsaw
