#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jigsaw/errors.hpp"
#include "jigsaw/random.hpp"

namespace jigsaw {

// Fixed-width ps-bit value: the unit of masking, key storage and packet
// payload. Bit 0 is the most significant bit (left-to-right wire order).
// Stored as little-endian 64-bit limbs, always reduced below 2^ps.
class Block {
public:
    Block() = default; // zero-width placeholder, not usable in arithmetic

    explicit Block(size_t ps_bits)
        : ps_(checked_width(ps_bits)), limbs_((ps_bits + 63) / 64, 0) {}

    static Block from_u64(size_t ps_bits, uint64_t value) {
        Block b(ps_bits);
        b.limbs_[0] = value;
        b.reduce();
        return b;
    }

    // Big-endian bytes: bytes[0] holds bits 0..7 (most significant).
    static Block from_bytes(size_t ps_bits, std::span<const uint8_t> bytes) {
        Block b(ps_bits);
        if (bytes.size() != ps_bits / 8)
            throw WidthError("byte count does not match block width");
        for (size_t i = 0; i < bytes.size(); ++i) {
            size_t lsb_byte = bytes.size() - 1 - i;
            b.limbs_[lsb_byte / 8] |= uint64_t(bytes[i]) << ((lsb_byte % 8) * 8);
        }
        return b;
    }

    size_t width() const { return ps_; }
    bool valid() const { return ps_ != 0; }

    // msb_index 0 = most significant bit.
    bool bit(size_t msb_index) const {
        size_t p = ps_ - 1 - msb_index;
        return (limbs_[p / 64] >> (p % 64)) & 1;
    }

    void set_bit(size_t msb_index, bool v) {
        size_t p = ps_ - 1 - msb_index;
        uint64_t m = uint64_t(1) << (p % 64);
        if (v)
            limbs_[p / 64] |= m;
        else
            limbs_[p / 64] &= ~m;
    }

    bool is_zero() const {
        for (uint64_t l : limbs_)
            if (l)
                return false;
        return true;
    }

    bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1); }

    std::vector<uint8_t> to_bytes() const {
        std::vector<uint8_t> out(ps_ / 8);
        for (size_t i = 0; i < out.size(); ++i) {
            size_t lsb_byte = out.size() - 1 - i;
            out[i] = static_cast<uint8_t>(limbs_[lsb_byte / 8] >> ((lsb_byte % 8) * 8));
        }
        return out;
    }

    uint64_t low_u64() const { return limbs_.empty() ? 0 : limbs_[0]; }

    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s;
        s.reserve(ps_ / 4);
        for (uint8_t b : to_bytes()) {
            s.push_back(digits[b >> 4]);
            s.push_back(digits[b & 0xF]);
        }
        return s;
    }

    bool operator==(const Block&) const = default;

    friend Block xor_block(const Block& a, const Block& b);
    friend Block mul_mod(const Block& a, const Block& r);
    friend Block inverse_odd(const Block& r);
    friend std::optional<size_t> first_set_bit(const Block& b);
    friend std::optional<size_t> last_set_bit(const Block& b);

private:
    static size_t checked_width(size_t ps_bits) {
        if (ps_bits < 8 || ps_bits % 8 != 0)
            throw WidthError("block width must be a positive multiple of 8 bits");
        return ps_bits;
    }

    void reduce() {
        if (size_t rem = ps_ % 64)
            limbs_.back() &= (uint64_t(1) << rem) - 1;
    }

    size_t ps_ = 0;
    std::vector<uint64_t> limbs_; // limb 0 = least significant
};

inline Block xor_block(const Block& a, const Block& b) {
    if (!a.valid() || a.ps_ != b.ps_)
        throw WidthError("xor_block operands must share one width");
    Block out = a;
    for (size_t i = 0; i < out.limbs_.size(); ++i)
        out.limbs_[i] ^= b.limbs_[i];
    return out;
}

// (a * r) mod 2^ps, blocks read as unsigned integers.
inline Block mul_mod(const Block& a, const Block& r) {
    if (!a.valid() || a.ps_ != r.ps_)
        throw WidthError("mul_mod operands must share one width");
    const size_t n = a.limbs_.size();
    Block out(a.ps_);
    using u128 = unsigned __int128;
    for (size_t i = 0; i < n; ++i) {
        if (a.limbs_[i] == 0)
            continue;
        u128 carry = 0;
        for (size_t j = 0; i + j < n; ++j) {
            u128 t = u128(a.limbs_[i]) * r.limbs_[j] + out.limbs_[i + j] + carry;
            out.limbs_[i + j] = static_cast<uint64_t>(t);
            carry = t >> 64;
        }
    }
    out.reduce();
    return out;
}

namespace detail {

// 2 - t (mod 2^ps), i.e. ~t + 3 with carry.
inline Block two_minus(const Block& t) {
    auto bytes = t.to_bytes();
    unsigned carry = 3;
    for (size_t i = bytes.size(); i-- > 0;) {
        unsigned v = static_cast<uint8_t>(~bytes[i]) + carry;
        bytes[i] = static_cast<uint8_t>(v);
        carry = v >> 8;
    }
    return Block::from_bytes(t.width(), bytes);
}

} // namespace detail

// Multiplicative inverse of an odd value mod 2^ps by Hensel lifting:
// x <- x * (2 - r*x) doubles the number of correct low bits each round,
// and x = r is already correct mod 8.
inline Block inverse_odd(const Block& r) {
    if (!r.valid())
        throw WidthError("inverse_odd needs a sized block");
    if (!r.is_odd())
        throw NotInvertibleError("even values have no inverse mod 2^ps");
    Block x = r;
    for (size_t bits = 3; bits < r.ps_; bits *= 2)
        x = mul_mod(x, detail::two_minus(mul_mod(r, x)));
    return x;
}

inline Block random_block(RandomSource& rng, size_t ps_bits, bool force_odd = false) {
    std::vector<uint8_t> bytes(ps_bits / 8);
    rng.fill_bytes(bytes.data(), bytes.size());
    Block b = Block::from_bytes(ps_bits, bytes);
    if (force_odd)
        b.set_bit(ps_bits - 1, true);
    return b;
}

// MSB-first index of the most significant 1-bit; nullopt for the zero block.
inline std::optional<size_t> first_set_bit(const Block& b) {
    for (size_t i = b.limbs_.size(); i-- > 0;) {
        if (b.limbs_[i]) {
            size_t hi = 63 - static_cast<size_t>(std::countl_zero(b.limbs_[i]));
            return b.ps_ - 1 - (i * 64 + hi);
        }
    }
    return std::nullopt;
}

// MSB-first index of the least significant 1-bit; nullopt for the zero block.
inline std::optional<size_t> last_set_bit(const Block& b) {
    for (size_t i = 0; i < b.limbs_.size(); ++i) {
        if (b.limbs_[i]) {
            size_t lo = static_cast<size_t>(std::countr_zero(b.limbs_[i]));
            return b.ps_ - 1 - (i * 64 + lo);
        }
    }
    return std::nullopt;
}

} // namespace jigsaw
