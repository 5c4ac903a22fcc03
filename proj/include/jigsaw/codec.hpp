#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "jigsaw/bitstring.hpp"
#include "jigsaw/block.hpp"
#include "jigsaw/errors.hpp"
#include "jigsaw/framing.hpp"
#include "jigsaw/keystate.hpp"
#include "jigsaw/random.hpp"
#include "jigsaw/tearing.hpp"

namespace jigsaw {

// Group encoder/decoder. A group is up to k-1 masked data blocks followed by
// one R block; it is also the unit of key evolution. Masking the data blocks
// of one group is order-free and may run concurrently, but the transform
// must follow the whole group and precede the next one, so sessions are
// strictly sequential, single-owner objects.

// Block-level operation counters, kept for comparison with the published
// cost formulas.
struct OpCounters {
    uint64_t xor_blocks = 0;
    uint64_t mul_blocks = 0;
    uint64_t parts = 0;
    uint64_t groups = 0;
};

struct GroupPlaintext {
    std::vector<BitString> parts; // 0..k-1 parts, each at most ps-2 bits
};

struct GroupCiphertext {
    std::vector<Block> data_blocks; // one per part, in order
    Block r_block;                  // R ^ P_k
    bool end_of_message = false;
};

struct EncodeSession {
    KeyState key;
    size_t l_min_bits;
    std::vector<BitString> pending; // parts waiting for a full group, < k-1
    uint64_t next_seq = 0;
    OpCounters counters;

    EncodeSession(KeyState k_, size_t l_min) : key(std::move(k_)), l_min_bits(l_min) {
        tear_config(); // validates the bounds
    }

    TearConfig tear_config() const { return TearConfig(key.ps_bits, l_min_bits); }
};

struct DecodeSession {
    KeyState key;
    std::vector<Block> pending_blocks; // data blocks of the group in progress
    BitString current_message;         // parts decoded since the last end-of-message
    bool in_message = false;
    bool poisoned = false; // set on any decode error; the session is dead
    uint64_t next_seq = 0; // packets delivered so far (transport bookkeeping)
    OpCounters counters;

    explicit DecodeSession(KeyState k_) : key(std::move(k_)) {}

    // True when no group or message is in progress.
    bool idle() const { return pending_blocks.empty() && !in_message; }
};

// Mask one group: frame and embed each part at a random offset, XOR with
// P_i; convey a fresh odd R as R ^ P_k; then evolve the key. Random draws
// per group, in order: one offset per part, then R.
inline GroupCiphertext encode_group(EncodeSession& session, const GroupPlaintext& parts,
                                    RandomSource& rng, bool end_of_message = false) {
    KeyState& key = session.key;
    const size_t ps = key.ps_bits;
    if (parts.parts.size() > key.k - 1)
        throw PartSizeError("a group holds at most k-1 parts");
    GroupCiphertext ct;
    ct.data_blocks.reserve(parts.parts.size());
    for (size_t i = 0; i < parts.parts.size(); ++i) {
        const BitString& part = parts.parts[i];
        if (part.size() > ps - 2)
            throw PartSizeError("part exceeds ps-2 bits");
        BitString framed = frame(part);
        size_t offset = random_offset(rng, framed.size(), ps);
        ct.data_blocks.push_back(xor_block(embed(framed, offset, ps), key.blocks[i]));
        ++session.counters.xor_blocks;
    }
    Block r = random_block(rng, ps, /*force_odd=*/true);
    ct.r_block = xor_block(r, key.blocks[key.k - 1]);
    ++session.counters.xor_blocks;
    transform(key, r);
    session.counters.xor_blocks += key.k - 1;
    session.counters.mul_blocks += 1;
    session.counters.parts += parts.parts.size();
    session.counters.groups += 1;
    ct.end_of_message = end_of_message;
    return ct;
}

// Unmask one group with the synchronized key, recover R, evolve the key.
// Any failure poisons the session: a desynchronized key pair cannot be
// resynchronized, so the caller must re-establish.
inline GroupPlaintext decode_group(DecodeSession& session, const GroupCiphertext& ct) {
    if (session.poisoned)
        throw DesyncError("session is poisoned by an earlier failure");
    KeyState& key = session.key;
    try {
        if (ct.data_blocks.size() > key.k - 1)
            throw DesyncError("group carries more than k-1 data blocks");
        Block r = xor_block(ct.r_block, key.blocks[key.k - 1]);
        ++session.counters.xor_blocks;
        if (!r.is_odd())
            throw DesyncError("recovered R is even");
        GroupPlaintext pt;
        pt.parts.reserve(ct.data_blocks.size());
        for (size_t i = 0; i < ct.data_blocks.size(); ++i) {
            Block unmasked = xor_block(ct.data_blocks[i], key.blocks[i]);
            ++session.counters.xor_blocks;
            pt.parts.push_back(extract(unmasked));
        }
        transform(key, r);
        session.counters.xor_blocks += key.k - 1;
        session.counters.mul_blocks += 1;
        session.counters.parts += pt.parts.size();
        session.counters.groups += 1;
        return pt;
    } catch (...) {
        session.poisoned = true;
        throw;
    }
}

// Tear data into parts and emit groups. Without flush, a trailing partial
// group stays pending so the next message continues it (no key block is
// wasted between messages). With flush, the final group is flagged
// end-of-message; an empty message still costs one group (a lone R block).
inline std::vector<GroupCiphertext> encode_message(EncodeSession& session,
                                                   const BitString& data, RandomSource& rng,
                                                   bool flush = true) {
    auto cfg = session.tear_config();
    std::vector<BitString> queue = std::move(session.pending);
    session.pending.clear();
    for (BitString& part : tear(data, cfg, rng))
        queue.push_back(std::move(part));

    const size_t group_cap = session.key.k - 1;
    std::vector<GroupCiphertext> out;
    size_t pos = 0;
    if (flush) {
        if (queue.empty()) {
            out.push_back(encode_group(session, {}, rng, /*end_of_message=*/true));
            return out;
        }
        while (pos < queue.size()) {
            size_t take = std::min(group_cap, queue.size() - pos);
            GroupPlaintext g;
            g.parts.assign(std::make_move_iterator(queue.begin() + pos),
                           std::make_move_iterator(queue.begin() + pos + take));
            pos += take;
            out.push_back(encode_group(session, g, rng, /*end_of_message=*/pos == queue.size()));
        }
        return out;
    }
    while (queue.size() - pos >= group_cap) {
        GroupPlaintext g;
        g.parts.assign(std::make_move_iterator(queue.begin() + pos),
                       std::make_move_iterator(queue.begin() + pos + group_cap));
        pos += group_cap;
        out.push_back(encode_group(session, g, rng));
    }
    session.pending.assign(std::make_move_iterator(queue.begin() + pos),
                           std::make_move_iterator(queue.end()));
    return out;
}

// Streaming receive: feed one in-order payload block. Data blocks buffer
// until the R-flagged block closes the group; a completed message is
// returned when the end-of-message group decodes.
inline std::optional<BitString> push_block(DecodeSession& session, const Block& payload,
                                           bool r_flag, bool end_of_message) {
    if (!r_flag) {
        if (session.poisoned)
            throw DesyncError("session is poisoned by an earlier failure");
        if (session.pending_blocks.size() >= session.key.k - 1) {
            session.poisoned = true;
            throw DesyncError("group carries more than k-1 data blocks");
        }
        session.pending_blocks.push_back(payload);
        session.in_message = true;
        return std::nullopt;
    }
    GroupCiphertext ct;
    ct.data_blocks = std::move(session.pending_blocks);
    session.pending_blocks.clear();
    ct.r_block = payload;
    ct.end_of_message = end_of_message;
    GroupPlaintext pt = decode_group(session, ct);
    for (const BitString& part : pt.parts)
        session.current_message.append(part);
    session.in_message = true;
    if (!end_of_message)
        return std::nullopt;
    BitString done = std::move(session.current_message);
    session.current_message = BitString();
    session.in_message = false;
    return done;
}

// Decode a whole message from groups already in sequence order. The last
// consumed group must carry the end-of-message mark.
inline BitString decode_message(DecodeSession& session, std::span<const GroupCiphertext> groups) {
    for (const GroupCiphertext& g : groups) {
        for (const Block& b : g.data_blocks)
            push_block(session, b, false, false);
        auto done = push_block(session, g.r_block, true, g.end_of_message);
        if (done)
            return std::move(*done);
    }
    throw TruncationError("group stream ended without end-of-message");
}

} // namespace jigsaw
