#include <gtest/gtest.h>

#include <cstring>
#include <string>

#include "jigsaw/sha256.hpp"
#include "jigsaw/wire.hpp"

using namespace jigsaw;

namespace {

std::string hex(std::span<const uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::vector<uint8_t> ascii(const char* s) {
    return std::vector<uint8_t>(s, s + std::strlen(s));
}

std::array<uint8_t, 32> test_mac_key(uint8_t fill) {
    std::array<uint8_t, 32> k;
    k.fill(fill);
    return k;
}

} // namespace

// FIPS 180-4 vectors pin the hash; RFC 4231 vectors pin the HMAC. Together
// they are the external oracle for the tag construction.
TEST(Sha256, StandardVectors) {
    EXPECT_EQ(hex(sha256(std::vector<uint8_t>{})),
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(hex(sha256(ascii("abc"))),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(hex(sha256(ascii("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))),
              "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // one million 'a', exercising the streaming path
    Sha256 h;
    std::vector<uint8_t> chunk(1000, 'a');
    for (int i = 0; i < 1000; ++i)
        h.update(chunk.data(), chunk.size());
    EXPECT_EQ(hex(h.finish()),
              "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST(HmacSha256, Rfc4231Vectors) {
    std::vector<uint8_t> key1(20, 0x0b);
    EXPECT_EQ(hex(hmac_sha256(key1, ascii("Hi There"))),
              "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");

    EXPECT_EQ(hex(hmac_sha256(ascii("Jefe"), ascii("what do ya want for nothing?"))),
              "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");

    std::vector<uint8_t> key3(20, 0xaa), data3(50, 0xdd);
    EXPECT_EQ(hex(hmac_sha256(key3, data3)),
              "773ea91e36800e46854db8ebd09181a72959098b3ef8c122d9635514ced565fe");

    // key longer than the block size must be hashed first
    std::vector<uint8_t> key5(131, 0xaa);
    EXPECT_EQ(hex(hmac_sha256(key5, ascii("Test Using Larger Than Block-Size Key - Hash Key First"))),
              "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54");
}

TEST(ComputeMac, DeterministicAndKeyLengthChecked) {
    auto key = test_mac_key(7);
    std::vector<uint8_t> msg{1, 2, 3, 4};
    EXPECT_EQ(compute_mac(key, msg), compute_mac(key, msg));
    std::vector<uint8_t> short_key(16, 7);
    EXPECT_THROW(compute_mac(short_key, msg), Error);
}

TEST(ComputeMac, AvalancheOnSingleBitFlips) {
    auto rng = RandomSource::seeded(41);
    auto key = test_mac_key(9);
    for (int iter = 0; iter < 10000; ++iter) {
        std::vector<uint8_t> msg(1 + rng.uniform(63));
        rng.fill_bytes(msg.data(), msg.size());
        auto base = compute_mac(key, msg);
        size_t bit = rng.uniform(msg.size() * 8 - 1);
        msg[bit / 8] ^= static_cast<uint8_t>(0x80u >> (bit % 8));
        EXPECT_NE(compute_mac(key, msg), base);
    }
}

TEST(ComputeMac, DistinctKeysDistinctTags) {
    auto rng = RandomSource::seeded(42);
    for (int iter = 0; iter < 10000; ++iter) {
        std::array<uint8_t, 32> k1, k2;
        rng.fill_bytes(k1.data(), 32);
        rng.fill_bytes(k2.data(), 32);
        if (k1 == k2)
            continue;
        std::vector<uint8_t> msg(32);
        rng.fill_bytes(msg.data(), msg.size());
        EXPECT_NE(compute_mac(k1, msg), compute_mac(k2, msg));
    }
}

TEST(Seal, SequenceStartsAtZeroAndRoundTrips) {
    auto key = test_mac_key(1);
    uint64_t next_seq = 0;
    Block payload = Block::from_u64(64, 0xDEADBEEF);
    Packet p = seal(next_seq, key, payload, kFlagRBlock);
    EXPECT_EQ(p.seq, 0u);
    EXPECT_EQ(next_seq, 1u);

    auto bytes = serialize_packet(p);
    Packet q = verify_and_parse(key, bytes);
    EXPECT_EQ(q.flags, p.flags);
    EXPECT_EQ(q.seq, p.seq);
    EXPECT_EQ(q.payload, p.payload);
    EXPECT_EQ(q.tag, p.tag);
}

TEST(Seal, PacketSizeMatchesFormat) {
    auto key = test_mac_key(2);
    uint64_t next_seq = 0;
    Packet p = seal(next_seq, key, Block(1024), 0);
    EXPECT_EQ(serialize_packet(p).size(), 156u); // 2+1+1+8+128+16
    EXPECT_EQ(packet_size_bytes(1024), 156u);
}

TEST(Seal, ByteLayoutIsExact) {
    auto key = test_mac_key(11);
    uint64_t next_seq = 0x0102030405060708ull;
    Block payload = Block::from_u64(16, 0xBEEF);
    Packet p = seal(next_seq, key, payload, kFlagRBlock | kFlagEndOfMessage);
    auto bytes = serialize_packet(p);
    ASSERT_EQ(bytes.size(), 30u);
    EXPECT_EQ(bytes[0], 0x4A); // 'J'
    EXPECT_EQ(bytes[1], 0x50); // 'P'
    EXPECT_EQ(bytes[2], 0x01); // version
    EXPECT_EQ(bytes[3], 0x03); // flags
    const uint8_t seq_be[8] = {0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08};
    for (int i = 0; i < 8; ++i)
        EXPECT_EQ(bytes[4 + i], seq_be[i]);
    EXPECT_EQ(bytes[12], 0xBE);
    EXPECT_EQ(bytes[13], 0xEF);

    // the tag is the truncated keyed hash of version|flags|seq|payload
    std::vector<uint8_t> mac_input(bytes.begin() + 2, bytes.end() - kTagBytes);
    auto expect_tag = compute_mac(key, mac_input);
    EXPECT_TRUE(std::equal(expect_tag.begin(), expect_tag.end(), bytes.end() - kTagBytes));
    auto full = hmac_sha256(key, mac_input);
    EXPECT_TRUE(std::equal(expect_tag.begin(), expect_tag.end(), full.begin()));
}

TEST(Seal, FlagValidationAndExhaustion) {
    auto key = test_mac_key(3);
    uint64_t next_seq = 0;
    Block payload(64);
    EXPECT_THROW(seal(next_seq, key, payload, 0x04), Error);
    EXPECT_THROW(seal(next_seq, key, payload, kFlagEndOfMessage), Error); // EOM needs R

    uint64_t at_end = UINT64_MAX;
    EXPECT_THROW(seal(at_end, key, payload, 0), SessionExhausted);
}

TEST(Seal, ParseSealIdentityAcrossWidths) {
    auto rng = RandomSource::seeded(43);
    auto key = test_mac_key(4);
    for (size_t ps : {size_t(16), size_t(64), size_t(1024)}) {
        uint64_t next_seq = rng.uniform(1000000);
        for (int iter = 0; iter < 50; ++iter) {
            Block payload = random_block(rng, ps);
            uint8_t flags = rng.coin() ? kFlagRBlock : 0;
            if (flags && rng.coin())
                flags |= kFlagEndOfMessage;
            Packet p = seal(next_seq, key, payload, flags);
            Packet q = verify_and_parse(key, serialize_packet(p));
            EXPECT_EQ(q.flags, flags);
            EXPECT_EQ(q.seq, p.seq);
            EXPECT_EQ(q.payload, payload);
        }
    }
}

TEST(Verify, EveryHeaderAndPayloadBitFlipIsRejected) {
    // exhaustive over a small packet: every single-bit mutation must fail
    auto key = test_mac_key(5);
    uint64_t next_seq = 7;
    auto rng = RandomSource::seeded(44);
    Packet p = seal(next_seq, key, random_block(rng, 16), kFlagRBlock);
    auto bytes = serialize_packet(p);
    for (size_t bit = 0; bit < bytes.size() * 8; ++bit) {
        auto mutated = bytes;
        mutated[bit / 8] ^= static_cast<uint8_t>(0x80u >> (bit % 8));
        EXPECT_ANY_THROW(verify_and_parse(key, mutated)) << "bit " << bit;
    }
}

TEST(Verify, SeqAndPayloadFlipsRaiseAuthFailure) {
    auto key = test_mac_key(6);
    uint64_t next_seq = 1;
    auto rng = RandomSource::seeded(45);
    Packet p = seal(next_seq, key, random_block(rng, 64), 0);
    auto bytes = serialize_packet(p);
    // seq bytes live at offsets 4..11, payload right after
    for (size_t byte : {size_t(4), size_t(11), size_t(12), size_t(15)}) {
        auto mutated = bytes;
        mutated[byte] ^= 0x01;
        EXPECT_THROW(verify_and_parse(key, mutated), AuthFailure) << "byte " << byte;
    }
    // magic and version corruption is malformed rather than unauthenticated
    for (size_t byte : {size_t(0), size_t(1), size_t(2)}) {
        auto mutated = bytes;
        mutated[byte] ^= 0x01;
        EXPECT_THROW(verify_and_parse(key, mutated), MalformedPacket) << "byte " << byte;
    }
}

TEST(Verify, TruncatedAndUndersizedRejected) {
    auto key = test_mac_key(8);
    uint64_t next_seq = 0;
    auto bytes = serialize_packet(seal(next_seq, key, Block(64), 0));
    EXPECT_THROW(verify_and_parse(key, std::span(bytes).first(28)), MalformedPacket);
    EXPECT_THROW(verify_and_parse(key, std::span(bytes).first(5)), MalformedPacket);
}

TEST(Verify, ReplayedBytesStillVerify) {
    // wire layer accepts duplicates; ordering is the transport's job
    auto key = test_mac_key(9);
    uint64_t next_seq = 0;
    auto bytes = serialize_packet(seal(next_seq, key, Block::from_u64(32, 5), kFlagRBlock));
    EXPECT_NO_THROW(verify_and_parse(key, bytes));
    EXPECT_NO_THROW(verify_and_parse(key, bytes));
}

TEST(Verify, RandomGarbageNeverParses) {
    auto rng = RandomSource::seeded(47);
    auto key = test_mac_key(12);
    for (int iter = 0; iter < 2000; ++iter) {
        std::vector<uint8_t> junk(rng.uniform(200));
        rng.fill_bytes(junk.data(), junk.size());
        EXPECT_THROW(verify_and_parse(key, junk), Error) << "iter " << iter;
    }
}

TEST(Verify, TagBindsTheSequenceNumber) {
    auto rng = RandomSource::seeded(46);
    auto key = test_mac_key(10);
    for (int iter = 0; iter < 1000; ++iter) {
        Block payload = random_block(rng, 64);
        uint64_t seq_a = rng.uniform(1u << 30), seq_b = seq_a + 1 + rng.uniform(100);
        uint64_t na = seq_a, nb = seq_b;
        Packet a = seal(na, key, payload, 0);
        Packet b = seal(nb, key, payload, 0);
        EXPECT_NE(a.tag, b.tag);
    }
}
