#include <gtest/gtest.h>

#include <cstdint>
#include <set>
#include <vector>

#include "jigsaw/block.hpp"

using namespace jigsaw;

namespace {

// Independent multiply-then-reduce oracle: schoolbook base-256 arithmetic on
// big-endian byte vectors, sharing no code with Block's limb multiply.
std::vector<uint8_t> mul_oracle(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
    std::vector<uint32_t> acc(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) {
            size_t out = (a.size() - 1 - i) + (b.size() - 1 - j);
            acc[out] += uint32_t(a[i]) * uint32_t(b[j]);
            // propagate eagerly so acc stays below 2^32
            size_t c = out;
            while (acc[c] > 0xFF) {
                acc[c + 1] += acc[c] >> 8;
                acc[c] &= 0xFF;
                ++c;
            }
        }
    std::vector<uint8_t> result(a.size()); // truncate to a's width = mod 2^ps
    for (size_t i = 0; i < a.size(); ++i)
        result[a.size() - 1 - i] = static_cast<uint8_t>(acc[i]);
    return result;
}

} // namespace

TEST(BlockXor, IdentityKnownVectorAndSelfInverse) {
    Block zero = Block::from_u64(8, 0x00);
    Block key = Block::from_u64(8, 0xC6);
    EXPECT_EQ(xor_block(zero, key).low_u64(), 0xC6u);

    // masked block from the worked 8-bit example: 01011011 ^ 11000110
    Block embedded = Block::from_u64(8, 0x5B);
    EXPECT_EQ(xor_block(embedded, key).low_u64(), 0x9Du);

    EXPECT_TRUE(xor_block(key, key).is_zero());
}

TEST(BlockXor, WidthMismatchRejected) {
    EXPECT_THROW(xor_block(Block::from_u64(8, 1), Block::from_u64(16, 1)), WidthError);
}

TEST(BlockXor, RoundTripExhaustiveAt8Bits) {
    for (uint64_t a = 0; a < 256; ++a)
        for (uint64_t b = 0; b < 256; ++b) {
            Block ba = Block::from_u64(8, a), bb = Block::from_u64(8, b);
            EXPECT_EQ(xor_block(xor_block(ba, bb), bb), ba);
        }
}

TEST(BlockXor, RoundTripRandomAt1024Bits) {
    auto rng = RandomSource::seeded(11);
    for (int i = 0; i < 1000; ++i) {
        Block a = random_block(rng, 1024);
        Block b = random_block(rng, 1024);
        EXPECT_EQ(xor_block(xor_block(a, b), b), a);
    }
}

TEST(BlockMul, SmallValues) {
    EXPECT_EQ(mul_mod(Block::from_u64(8, 5), Block::from_u64(8, 1)).low_u64(), 5u);
    EXPECT_EQ(mul_mod(Block::from_u64(8, 3), Block::from_u64(8, 5)).low_u64(), 15u);
    // 128*3 = 384 = 256 + 128
    EXPECT_EQ(mul_mod(Block::from_u64(8, 128), Block::from_u64(8, 3)).low_u64(), 128u);
    EXPECT_THROW(mul_mod(Block::from_u64(8, 1), Block::from_u64(16, 1)), WidthError);
}

TEST(BlockMul, BijectionForEveryOddMultiplierAt8Bits) {
    for (uint64_t r = 1; r < 256; r += 2) {
        Block rb = Block::from_u64(8, r);
        std::set<uint64_t> image;
        for (uint64_t x = 0; x < 256; ++x)
            image.insert(mul_mod(Block::from_u64(8, x), rb).low_u64());
        EXPECT_EQ(image.size(), 256u) << "multiplier " << r;
    }
}

TEST(BlockMul, AgreesWithByteOracle) {
    auto rng = RandomSource::seeded(12);
    for (size_t ps : {size_t(64), size_t(1024)}) {
        for (int i = 0; i < 10000; ++i) {
            Block a = random_block(rng, ps);
            Block r = random_block(rng, ps);
            auto expect = mul_oracle(a.to_bytes(), r.to_bytes());
            EXPECT_EQ(mul_mod(a, r).to_bytes(), expect) << "ps=" << ps << " iter=" << i;
        }
    }
}

TEST(BlockInverse, KnownValuesAndEvenRejection) {
    EXPECT_EQ(inverse_odd(Block::from_u64(8, 1)).low_u64(), 1u);
    EXPECT_EQ(inverse_odd(Block::from_u64(8, 3)).low_u64(), 171u); // 3*171 = 513 = 2*256+1
    EXPECT_THROW(inverse_odd(Block::from_u64(8, 2)), NotInvertibleError);
    EXPECT_THROW(inverse_odd(Block::from_u64(8, 0)), NotInvertibleError);
}

TEST(BlockInverse, MatchesExhaustiveSearchAt8Bits) {
    for (uint64_t r = 1; r < 256; r += 2) {
        uint64_t found = 0;
        for (uint64_t s = 0; s < 256; ++s)
            if ((r * s) % 256 == 1) {
                found = s;
                break;
            }
        EXPECT_EQ(inverse_odd(Block::from_u64(8, r)).low_u64(), found) << "r=" << r;
    }
}

TEST(BlockInverse, ComposesToIdentityAt8Bits) {
    for (uint64_t r = 1; r < 256; r += 2) {
        Block rb = Block::from_u64(8, r);
        Block inv = inverse_odd(rb);
        for (uint64_t x = 0; x < 256; ++x) {
            Block xb = Block::from_u64(8, x);
            EXPECT_EQ(mul_mod(mul_mod(xb, rb), inv), xb);
        }
    }
}

TEST(BlockInverse, WideWidths) {
    auto rng = RandomSource::seeded(13);
    for (size_t ps : {size_t(64), size_t(1024)}) {
        for (int i = 0; i < 50; ++i) {
            Block r = random_block(rng, ps, /*force_odd=*/true);
            EXPECT_EQ(mul_mod(r, inverse_odd(r)), Block::from_u64(ps, 1));
        }
    }
}

TEST(RandomBlock, ForceOddAlwaysOdd) {
    auto rng = RandomSource::seeded(14);
    for (int i = 0; i < 1000; ++i)
        EXPECT_TRUE(random_block(rng, 64, true).is_odd());
}

TEST(RandomBlock, SeededDeterminism) {
    auto a = RandomSource::seeded(99);
    auto b = RandomSource::seeded(99);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(random_block(a, 1024), random_block(b, 1024));
}

TEST(RandomBlock, BitFrequencyNearHalf) {
    auto rng = RandomSource::seeded(15);
    const int draws = 100000;
    int counts[8] = {0};
    for (int i = 0; i < draws; ++i) {
        Block b = random_block(rng, 8);
        for (size_t bit = 0; bit < 8; ++bit)
            counts[bit] += b.bit(bit);
    }
    // binomial: mean draws/2, sigma = sqrt(draws)/2 ~ 158; allow 3 sigma
    for (int bit = 0; bit < 8; ++bit)
        EXPECT_NEAR(counts[bit], draws / 2, 3 * 158.2) << "bit " << bit;
}

TEST(BitScan, KnownValueEdgesAndZero) {
    Block b = Block::from_u64(8, 0x5B); // 01011011
    EXPECT_EQ(first_set_bit(b), 1u);
    EXPECT_EQ(last_set_bit(b), 7u);

    Block top = Block::from_u64(8, 0x80);
    EXPECT_EQ(first_set_bit(top), 0u);
    EXPECT_EQ(last_set_bit(top), 0u);

    EXPECT_EQ(first_set_bit(Block(8)), std::nullopt);
    EXPECT_EQ(last_set_bit(Block(8)), std::nullopt);
}

TEST(BitScan, MultiLimb) {
    Block b(192);
    b.set_bit(5, true);
    b.set_bit(130, true);
    EXPECT_EQ(first_set_bit(b), 5u);
    EXPECT_EQ(last_set_bit(b), 130u);
}

TEST(BlockBytes, RoundTripAndOrder) {
    // 0x0102 as a 16-bit block: byte 0 is the most significant
    Block b = Block::from_u64(16, 0x0102);
    std::vector<uint8_t> expect{0x01, 0x02};
    EXPECT_EQ(b.to_bytes(), expect);
    EXPECT_EQ(Block::from_bytes(16, expect), b);
}

TEST(BlockWidth, InvalidWidthsRejected) {
    EXPECT_THROW(Block(0), WidthError);
    EXPECT_THROW(Block(12), WidthError);
    EXPECT_THROW(Block(7), WidthError);
    EXPECT_NO_THROW(Block(8));
    EXPECT_NO_THROW(Block(8192));
}
