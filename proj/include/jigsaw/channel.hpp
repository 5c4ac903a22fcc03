#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jigsaw/errors.hpp"
#include "jigsaw/random.hpp"

namespace jigsaw {

// Deterministic fault injection for protocol testing. Faults target packets
// by their position in the sent stream (== wire sequence number for a fresh
// session). Everything derives from the schedule seed, so a failing run can
// be replayed exactly.
struct ChannelFault {
    enum class Kind { drop, duplicate, reorder, tamper, replay };

    Kind kind;
    std::optional<uint64_t> target_seq; // nullopt = every packet
    std::optional<uint64_t> param;      // reorder distance / tamper bit index
    uint64_t seed = 0;
};

class AdversarialChannel {
public:
    explicit AdversarialChannel(std::vector<ChannelFault> faults, uint64_t seed = 0)
        : faults_(std::move(faults)), seed_(seed) {}

    // Transforms the sent packet stream into the delivered one. Application
    // order: tamper, then drop, then duplicate, then replay, then reorder.
    std::vector<std::vector<uint8_t>>
    apply(const std::vector<std::vector<uint8_t>>& packets) const {
        std::vector<std::vector<uint8_t>> work = packets;

        for (const ChannelFault& f : faults_) {
            if (f.kind != ChannelFault::Kind::tamper)
                continue;
            for (size_t i = 0; i < work.size(); ++i) {
                if (!matches(f, i))
                    continue;
                size_t nbits = work[i].size() * 8;
                uint64_t bit = f.param ? *f.param % nbits
                                       : RandomSource::seeded(mix(f.seed, i)).uniform(nbits - 1);
                work[i][bit / 8] ^= static_cast<uint8_t>(0x80u >> (bit % 8));
            }
        }

        std::vector<std::vector<uint8_t>> out;
        std::vector<std::vector<uint8_t>> replayed;
        for (size_t i = 0; i < work.size(); ++i) {
            bool dropped = false;
            bool duplicated = false;
            bool replay = false;
            for (const ChannelFault& f : faults_) {
                if (!matches(f, i))
                    continue;
                if (f.kind == ChannelFault::Kind::drop)
                    dropped = true;
                if (f.kind == ChannelFault::Kind::duplicate)
                    duplicated = true;
                if (f.kind == ChannelFault::Kind::replay)
                    replay = true;
            }
            if (dropped)
                continue;
            out.push_back(work[i]);
            if (duplicated)
                out.push_back(work[i]);
            if (replay)
                replayed.push_back(work[i]);
        }
        out.insert(out.end(), replayed.begin(), replayed.end());

        for (const ChannelFault& f : faults_) {
            if (f.kind != ChannelFault::Kind::reorder)
                continue;
            uint64_t distance = f.param.value_or(1);
            if (distance == 0 || out.size() < 2)
                continue;
            if (f.target_seq) {
                // delay one packet by up to `distance` delivery slots
                move_later(out, *f.target_seq, distance);
            } else {
                shuffle_windows(out, distance, mix(seed_, f.seed));
            }
        }
        return out;
    }

private:
    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
        return x ? x : 1;
    }

    static bool matches(const ChannelFault& f, size_t index) {
        return !f.target_seq || *f.target_seq == index;
    }

    // Position of the packet that was originally at stream index `seq` is
    // found by value identity: called before any other reorder shifts it.
    static void move_later(std::vector<std::vector<uint8_t>>& out, uint64_t seq,
                           uint64_t distance) {
        if (seq >= out.size())
            return;
        size_t from = static_cast<size_t>(seq);
        size_t to = std::min(out.size() - 1, from + static_cast<size_t>(distance));
        auto pkt = std::move(out[from]);
        out.erase(out.begin() + from);
        out.insert(out.begin() + to, std::move(pkt));
    }

    // Seeded permutation of consecutive windows of size distance+1, so no
    // packet moves more than `distance` delivery slots.
    static void shuffle_windows(std::vector<std::vector<uint8_t>>& out, uint64_t distance,
                                uint64_t seed) {
        RandomSource rng = RandomSource::seeded(seed);
        size_t window = static_cast<size_t>(distance) + 1;
        for (size_t start = 0; start < out.size(); start += window) {
            size_t end = std::min(out.size(), start + window);
            for (size_t i = end - 1; i > start; --i) {
                size_t j = start + static_cast<size_t>(rng.uniform(i - start));
                std::swap(out[i], out[j]);
            }
        }
    }

    std::vector<ChannelFault> faults_;
    uint64_t seed_;
};

// Fault schedule grammar, comma separated:
//   drop:SEQ | dup:SEQ|all | replay:SEQ | tamper:SEQ|all[@BIT] | reorder:DIST
// An empty string is a perfect channel.
inline std::vector<ChannelFault> parse_fault_spec(std::string_view spec, uint64_t seed = 0) {
    std::vector<ChannelFault> faults;
    size_t pos = 0;
    auto parse_u64 = [](std::string_view s) -> uint64_t {
        if (s.empty())
            throw Error("fault spec: missing number");
        uint64_t v = 0;
        for (char c : s) {
            if (c < '0' || c > '9')
                throw Error("fault spec: bad number '" + std::string(s) + "'");
            v = v * 10 + static_cast<uint64_t>(c - '0');
        }
        return v;
    };
    while (pos < spec.size()) {
        size_t comma = spec.find(',', pos);
        std::string_view entry = spec.substr(pos, comma == spec.npos ? spec.npos : comma - pos);
        pos = comma == spec.npos ? spec.size() : comma + 1;
        if (entry.empty())
            continue;
        size_t colon = entry.find(':');
        std::string_view kind = entry.substr(0, colon);
        std::string_view rest = colon == entry.npos ? std::string_view{} : entry.substr(colon + 1);
        std::string_view target = rest;
        std::optional<uint64_t> param;
        if (size_t at = rest.find('@'); at != rest.npos) {
            target = rest.substr(0, at);
            param = parse_u64(rest.substr(at + 1));
        }
        ChannelFault f;
        f.seed = seed + faults.size();
        if (kind == "drop")
            f.kind = ChannelFault::Kind::drop;
        else if (kind == "dup")
            f.kind = ChannelFault::Kind::duplicate;
        else if (kind == "replay")
            f.kind = ChannelFault::Kind::replay;
        else if (kind == "tamper")
            f.kind = ChannelFault::Kind::tamper;
        else if (kind == "reorder")
            f.kind = ChannelFault::Kind::reorder;
        else
            throw Error("fault spec: unknown kind '" + std::string(kind) + "'");
        if (f.kind == ChannelFault::Kind::reorder) {
            f.param = target.empty() ? 1 : parse_u64(target);
            faults.push_back(f);
            continue;
        }
        f.param = param;
        if (target == "all" || target.empty()) {
            if (f.kind != ChannelFault::Kind::tamper)
                throw Error(target.empty() ? "fault spec: missing target sequence"
                                           : "fault spec: 'all' is only valid for tamper");
            // tamper without a sequence hits every packet
        } else {
            f.target_seq = parse_u64(target);
        }
        faults.push_back(f);
    }
    return faults;
}

} // namespace jigsaw
