#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "jigsaw/block.hpp"
#include "jigsaw/errors.hpp"
#include "jigsaw/sha256.hpp"

namespace jigsaw {

// Wire packet, big-endian throughout:
//   magic 0x4A 0x50 | version 0x01 | flags | seq u64 | payload ps/8 | tag 16
// The MAC tag covers version|flags|seq|payload; the magic is framing only.
inline constexpr uint8_t kPacketMagic0 = 0x4A;
inline constexpr uint8_t kPacketMagic1 = 0x50;
inline constexpr uint8_t kWireVersion = 0x01;

inline constexpr uint8_t kFlagRBlock = 0x01;       // payload is R ^ P_k; ends a group
inline constexpr uint8_t kFlagEndOfMessage = 0x02; // final group of a message; implies R
inline constexpr uint8_t kFlagMask = kFlagRBlock | kFlagEndOfMessage;

inline constexpr size_t kTagBytes = 16;
inline constexpr size_t kPacketOverheadBytes = 2 + 1 + 1 + 8 + kTagBytes;

constexpr size_t packet_size_bytes(size_t ps_bits) {
    return kPacketOverheadBytes + ps_bits / 8;
}

struct Packet {
    uint8_t version = kWireVersion;
    uint8_t flags = 0;
    uint64_t seq = 0;
    Block payload;
    std::array<uint8_t, kTagBytes> tag{};
};

// Keyed tag: HMAC-SHA256 truncated to 128 bits.
inline std::array<uint8_t, kTagBytes> compute_mac(std::span<const uint8_t> mac_key,
                                                  std::span<const uint8_t> header_and_payload) {
    if (mac_key.size() != 32)
        throw Error("MAC key must be 32 bytes");
    auto full = hmac_sha256(mac_key, header_and_payload);
    std::array<uint8_t, kTagBytes> tag;
    std::copy_n(full.begin(), kTagBytes, tag.begin());
    return tag;
}

namespace detail {

inline std::vector<uint8_t> mac_input(uint8_t version, uint8_t flags, uint64_t seq,
                                      const Block& payload) {
    std::vector<uint8_t> buf;
    buf.reserve(1 + 1 + 8 + payload.width() / 8);
    buf.push_back(version);
    buf.push_back(flags);
    for (int i = 7; i >= 0; --i)
        buf.push_back(static_cast<uint8_t>(seq >> (8 * i)));
    auto body = payload.to_bytes();
    buf.insert(buf.end(), body.begin(), body.end());
    return buf;
}

inline bool tags_equal(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    // constant-time: examine every byte regardless of mismatch position
    uint8_t diff = 0;
    for (size_t i = 0; i < kTagBytes; ++i)
        diff |= static_cast<uint8_t>(a[i] ^ b[i]);
    return diff == 0;
}

} // namespace detail

// Assign the session's next sequence number and tag the packet.
inline Packet seal(uint64_t& next_seq, const std::array<uint8_t, 32>& mac_key,
                   const Block& payload, uint8_t flags) {
    if (flags & ~kFlagMask)
        throw Error("reserved flag bits must be zero");
    if ((flags & kFlagEndOfMessage) && !(flags & kFlagRBlock))
        throw Error("end-of-message is only valid on an R packet");
    if (next_seq == UINT64_MAX)
        throw SessionExhausted("packet sequence space exhausted");
    Packet p;
    p.flags = flags;
    p.seq = next_seq++;
    p.payload = payload;
    p.tag = compute_mac(mac_key, detail::mac_input(p.version, p.flags, p.seq, p.payload));
    return p;
}

inline std::vector<uint8_t> serialize_packet(const Packet& p) {
    std::vector<uint8_t> out;
    out.reserve(packet_size_bytes(p.payload.width()));
    out.push_back(kPacketMagic0);
    out.push_back(kPacketMagic1);
    out.push_back(p.version);
    out.push_back(p.flags);
    for (int i = 7; i >= 0; --i)
        out.push_back(static_cast<uint8_t>(p.seq >> (8 * i)));
    auto body = p.payload.to_bytes();
    out.insert(out.end(), body.begin(), body.end());
    out.insert(out.end(), p.tag.begin(), p.tag.end());
    return out;
}

// Parse one packet and check its tag; only authenticated packets come back.
inline Packet verify_and_parse(const std::array<uint8_t, 32>& mac_key,
                               std::span<const uint8_t> bytes) {
    if (bytes.size() < kPacketOverheadBytes + 1)
        throw MalformedPacket("packet too short");
    if (bytes[0] != kPacketMagic0 || bytes[1] != kPacketMagic1)
        throw MalformedPacket("bad packet magic");
    Packet p;
    p.version = bytes[2];
    if (p.version != kWireVersion)
        throw MalformedPacket("unsupported packet version");
    p.flags = bytes[3];
    if (p.flags & ~kFlagMask)
        throw MalformedPacket("reserved flag bits set");
    if ((p.flags & kFlagEndOfMessage) && !(p.flags & kFlagRBlock))
        throw MalformedPacket("end-of-message without R flag");
    p.seq = 0;
    for (int i = 0; i < 8; ++i)
        p.seq = (p.seq << 8) | bytes[4 + i];
    size_t payload_bytes = bytes.size() - kPacketOverheadBytes;
    p.payload = Block::from_bytes(payload_bytes * 8, bytes.subspan(12, payload_bytes));
    std::copy_n(bytes.end() - kTagBytes, kTagBytes, p.tag.begin());
    auto expect = compute_mac(mac_key, detail::mac_input(p.version, p.flags, p.seq, p.payload));
    if (!detail::tags_equal(expect, p.tag))
        throw AuthFailure("packet tag mismatch");
    return p;
}

} // namespace jigsaw
