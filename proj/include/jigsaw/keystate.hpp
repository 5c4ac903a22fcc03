#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "jigsaw/block.hpp"
#include "jigsaw/errors.hpp"
#include "jigsaw/random.hpp"

namespace jigsaw {

// The pre-shared secret P_1..P_k plus the MAC key. One KeyState pairs one
// sender with one receiver; both evolve it in lockstep, one transform per
// group. A desynchronized pair cannot be repaired.
struct KeyState {
    std::vector<Block> blocks; // P_1..P_k
    size_t ps_bits = 0;
    size_t k = 0;
    std::array<uint8_t, 32> mac_key{};
    uint64_t generation = 0;

    bool operator==(const KeyState&) const = default;
};

inline KeyState generate_key(RandomSource& rng, size_t k, size_t ps_bits) {
    if (k < 2)
        throw Error("key needs at least two blocks");
    KeyState s;
    s.ps_bits = ps_bits;
    s.k = k;
    s.blocks.reserve(k);
    for (size_t i = 0; i < k; ++i)
        s.blocks.push_back(random_block(rng, ps_bits));
    rng.fill_bytes(s.mac_key.data(), s.mac_key.size());
    return s;
}

// Key evolution: P_i ^= R for i < k, P_k *= R (mod 2^ps). R must be odd so
// the multiplication is a bijection and P_k keeps its entropy.
inline void transform(KeyState& state, const Block& r) {
    if (r.width() != state.ps_bits)
        throw WidthError("transform R width does not match the key");
    if (!r.is_odd())
        throw NotInvertibleError("transform requires an odd R");
    for (size_t i = 0; i + 1 < state.k; ++i)
        state.blocks[i] = xor_block(state.blocks[i], r);
    state.blocks[state.k - 1] = mul_mod(state.blocks[state.k - 1], r);
    ++state.generation;
}

// Key file: "JGSW" | version 0x01 | ps_bits u32 | k u16 | mac_key_len u16 |
// mac_key | P_1..P_k, each ps/8 bytes. All integers big-endian.
inline constexpr char kKeyMagic[4] = {'J', 'G', 'S', 'W'};
inline constexpr uint8_t kKeyFileVersion = 0x01;

constexpr size_t key_file_size(size_t k, size_t ps_bits) {
    return 4 + 1 + 4 + 2 + 2 + 32 + k * (ps_bits / 8);
}

namespace detail {

inline void put_be(std::ostream& out, uint64_t v, int bytes) {
    for (int i = bytes - 1; i >= 0; --i)
        out.put(static_cast<char>(v >> (8 * i)));
}

inline uint64_t get_be(std::istream& in, int bytes) {
    uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        int c = in.get();
        if (c == EOF)
            throw KeyFileError("truncated key file");
        v = (v << 8) | static_cast<uint8_t>(c);
    }
    return v;
}

} // namespace detail

inline void save_key(const KeyState& s, std::ostream& out) {
    out.write(kKeyMagic, 4);
    out.put(static_cast<char>(kKeyFileVersion));
    detail::put_be(out, s.ps_bits, 4);
    detail::put_be(out, s.k, 2);
    detail::put_be(out, s.mac_key.size(), 2);
    out.write(reinterpret_cast<const char*>(s.mac_key.data()), s.mac_key.size());
    for (const Block& b : s.blocks) {
        auto bytes = b.to_bytes();
        out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    }
    if (!out)
        throw KeyFileError("key file write failed");
}

inline KeyState load_key(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kKeyMagic, 4) != 0)
        throw KeyFileError("bad key file magic");
    if (detail::get_be(in, 1) != kKeyFileVersion)
        throw KeyFileError("unsupported key file version");
    size_t ps_bits = static_cast<size_t>(detail::get_be(in, 4));
    size_t k = static_cast<size_t>(detail::get_be(in, 2));
    size_t mac_len = static_cast<size_t>(detail::get_be(in, 2));
    if (ps_bits < 8 || ps_bits % 8 != 0 || ps_bits > 65536)
        throw KeyFileError("key file block width out of range");
    if (k < 2)
        throw KeyFileError("key file group width out of range");
    if (mac_len != 32)
        throw KeyFileError("unexpected MAC key length");
    KeyState s;
    s.ps_bits = ps_bits;
    s.k = k;
    in.read(reinterpret_cast<char*>(s.mac_key.data()), 32);
    if (in.gcount() != 32)
        throw KeyFileError("truncated key file");
    std::vector<uint8_t> buf(ps_bits / 8);
    s.blocks.reserve(k);
    for (size_t i = 0; i < k; ++i) {
        in.read(reinterpret_cast<char*>(buf.data()), buf.size());
        if (static_cast<size_t>(in.gcount()) != buf.size())
            throw KeyFileError("truncated key file");
        s.blocks.push_back(Block::from_bytes(ps_bits, buf));
    }
    return s;
}

inline void save_key_file(const KeyState& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw KeyFileError("cannot open key file for writing: " + path);
    save_key(s, out);
}

inline KeyState load_key_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw KeyFileError("cannot open key file: " + path);
    KeyState s = load_key(in);
    if (in.peek() != EOF)
        throw KeyFileError("trailing bytes after key material");
    return s;
}

} // namespace jigsaw
