#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jigsaw/errors.hpp"

namespace jigsaw {

// Arbitrary-length bit sequence, MSB-first within each storage byte.
// Every bit is data; there is no padding semantics. Unused trailing bits of
// the last storage byte are kept zero so equality is plain member equality.
class BitString {
public:
    BitString() = default;

    static BitString from_string(std::string_view s) {
        BitString out;
        out.reserve_bits(s.size());
        for (char c : s) {
            if (c != '0' && c != '1')
                throw Error("bit string literals may contain only 0 and 1");
            out.push_back(c == '1');
        }
        return out;
    }

    // Whole bytes, 8 bits each, MSB first.
    static BitString from_bytes(std::span<const uint8_t> bytes) {
        BitString out;
        out.bytes_.assign(bytes.begin(), bytes.end());
        out.len_ = bytes.size() * 8;
        return out;
    }

    size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool bit(size_t i) const { return (bytes_[i / 8] >> (7 - i % 8)) & 1; }

    void push_back(bool v) {
        if (len_ % 8 == 0)
            bytes_.push_back(0);
        if (v)
            bytes_.back() |= static_cast<uint8_t>(0x80u >> (len_ % 8));
        ++len_;
    }

    void append(const BitString& o) {
        if (len_ % 8 == 0) {
            bytes_.insert(bytes_.end(), o.bytes_.begin(), o.bytes_.end());
            len_ += o.len_;
            return;
        }
        reserve_bits(len_ + o.len_);
        for (size_t i = 0; i < o.len_; ++i)
            push_back(o.bit(i));
    }

    BitString substr(size_t pos, size_t n) const {
        if (pos + n > len_)
            throw Error("bit substring out of range");
        BitString out;
        out.reserve_bits(n);
        for (size_t i = 0; i < n; ++i)
            out.push_back(bit(pos + i));
        return out;
    }

    // Exact bytes; the length must be a whole number of bytes.
    std::vector<uint8_t> to_bytes() const {
        if (len_ % 8 != 0)
            throw Error("bit length is not a whole number of bytes");
        return bytes_;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(len_);
        for (size_t i = 0; i < len_; ++i)
            s.push_back(bit(i) ? '1' : '0');
        return s;
    }

    void reserve_bits(size_t n) { bytes_.reserve((n + 7) / 8); }

    bool operator==(const BitString&) const = default;

private:
    std::vector<uint8_t> bytes_;
    size_t len_ = 0;
};

} // namespace jigsaw
