#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "pachash/bit_vector.hpp"
#include "pachash/errors.hpp"

using namespace pachash;

namespace {

struct Pair {
    std::vector<bool> plain;
    BitVectorWithSelect bv;
};

Pair random_bits(std::mt19937_64 &rng, std::uint64_t size, double density) {
    std::bernoulli_distribution coin(density);
    Pair p;
    p.plain.resize(size);
    BitVector bits(size);
    for (std::uint64_t i = 0; i < size; ++i)
        if (coin(rng)) p.plain[i] = true, bits.set(i);
    p.bv = BitVectorWithSelect(std::move(bits));
    return p;
}

}  // namespace

TEST(BitVector, SelectMatchesLinearScan) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10000; ++t) {
        std::uint64_t size = rng() % 300;
        double density = std::uniform_real_distribution<double>(0, 1)(rng);
        auto [plain, bv] = random_bits(rng, size, density);
        std::uint64_t ones = 0;
        for (bool b : plain) ones += b;
        ASSERT_EQ(bv.ones(), ones);
        ASSERT_EQ(bv.zeros(), size - ones);
        for (std::uint64_t r = 1; r <= ones; ++r) ASSERT_EQ(bv.select1(r), oracle::select1(plain, r));
        for (std::uint64_t r = 1; r <= size - ones; ++r) ASSERT_EQ(bv.select0(r), oracle::select0(plain, r));
    }
}

TEST(BitVector, SelectAcrossManySamples) {
    std::mt19937_64 rng(9);
    for (double density : {0.01, 0.5, 0.99}) {
        auto [plain, bv] = random_bits(rng, 200000, density);
        // Positions of every bit kind, computed once.
        std::vector<std::uint64_t> one_pos, zero_pos;
        for (std::uint64_t i = 0; i < plain.size(); ++i) (plain[i] ? one_pos : zero_pos).push_back(i);
        for (std::uint64_t r = 1; r <= one_pos.size(); ++r) ASSERT_EQ(bv.select1(r), one_pos[r - 1]);
        for (std::uint64_t r = 1; r <= zero_pos.size(); ++r) ASSERT_EQ(bv.select0(r), zero_pos[r - 1]);
    }
}

TEST(BitVector, SelectRejectsBadRanks) {
    BitVector bits(10);
    bits.set(3);
    BitVectorWithSelect bv(bits);
    EXPECT_THROW(bv.select1(0), InvalidArgument);
    EXPECT_THROW(bv.select1(2), InvalidArgument);
    EXPECT_THROW(bv.select0(10), InvalidArgument);
    EXPECT_EQ(bv.select0(9), 9u);
}

TEST(BitVector, SelectSupportOverhead) {
    std::mt19937_64 rng(3);
    for (std::uint64_t size : {1ull << 16, 1ull << 18, 1ull << 20})
        for (double density : {0.0, 0.3, 0.5, 1.0}) {
            auto [plain, bv] = random_bits(rng, size, density);
            EXPECT_LE(double(bv.select_support_bits()), 0.25 * double(size)) << size << " " << density;
        }
}

TEST(BitVector, ByteImageRoundTrip) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 500; ++t) {
        std::uint64_t size = rng() % 1000;
        BitVector bits(size);
        for (std::uint64_t i = 0; i < size; ++i)
            if (rng() & 1) bits.set(i);
        auto bytes = bits.to_bytes();
        ASSERT_EQ(bytes.size(), (size + 7) / 8);
        ASSERT_EQ(BitVector::from_bytes(bytes, size), bits);
    }
    std::vector<std::uint8_t> stray = {0xff};
    EXPECT_THROW(BitVector::from_bytes(stray, 4), FormatError);
    EXPECT_THROW(BitVector::from_bytes(stray, 9), FormatError);
}

TEST(PackedArray, RoundTripAllWidths) {
    std::mt19937_64 rng(8);
    for (unsigned width = 0; width <= 64; ++width) {
        std::uint64_t n = 1 + rng() % 200;
        std::uint64_t mask = width == 64 ? ~0ull : (1ull << width) - 1;
        std::vector<std::uint64_t> ref(n);
        PackedArray arr(n, width);
        for (std::uint64_t i = 0; i < n; ++i) arr.set(i, ref[i] = rng() & mask);
        // Overwrite a few to check neighbours stay intact.
        for (int k = 0; k < 20; ++k) {
            std::uint64_t i = rng() % n;
            arr.set(i, ref[i] = rng() & mask);
        }
        for (std::uint64_t i = 0; i < n; ++i) ASSERT_EQ(arr.get(i), ref[i]) << width;
        EXPECT_EQ(arr.size_bits(), n * width);
        EXPECT_EQ(PackedArray::from_bytes(arr.to_bytes(), n, width), arr);
    }
    EXPECT_THROW(PackedArray(1, 65), InvalidArgument);
}

TEST(BitVector, SelectInWord) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10000; ++t) {
        std::uint64_t w = rng() & rng();
        unsigned r = 0;
        for (unsigned i = 0; i < 64; ++i)
            if (w >> i & 1) {
                ASSERT_EQ(select_in_word(w, r++), i);
            }
    }
}
