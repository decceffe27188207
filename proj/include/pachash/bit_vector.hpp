#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pachash {

/// Plain packed bit sequence, bit i lives in word i/64 at position i%64.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::uint64_t size) : words_((size + 63) / 64, 0), size_(size) {}

    std::uint64_t size() const { return size_; }
    bool get(std::uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(std::uint64_t i, bool value = true) {
        auto mask = std::uint64_t(1) << (i & 63);
        if (value)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    std::span<const std::uint64_t> words() const { return words_; }
    std::uint64_t count_ones() const;

    /// Little-endian byte image of ceil(size/8) bytes.
    std::vector<std::uint8_t> to_bytes() const;
    static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::uint64_t size);

    friend bool operator==(const BitVector &, const BitVector &) = default;

private:
    std::vector<std::uint64_t> words_;
    std::uint64_t size_ = 0;
};

/// Bit vector with select0/select1. Each direction samples every
/// kSampleRate-th bit of that kind and finishes with a popcount scan.
class BitVectorWithSelect {
public:
    static constexpr std::uint64_t kSampleRate = 8192;

    BitVectorWithSelect() = default;
    explicit BitVectorWithSelect(BitVector bits);

    const BitVector &bits() const { return bits_; }
    std::uint64_t size() const { return bits_.size(); }
    std::uint64_t ones() const { return ones_; }
    std::uint64_t zeros() const { return bits_.size() - ones_; }

    /// Position of the r-th 1-bit, 1 <= r <= ones().
    std::uint64_t select1(std::uint64_t r) const;
    /// Position of the r-th 0-bit, 1 <= r <= zeros().
    std::uint64_t select0(std::uint64_t r) const;

    /// Bits spent on the sample directories.
    std::uint64_t select_support_bits() const;

private:
    struct Sample {
        std::uint64_t word;    // word holding the sampled bit
        std::uint64_t before;  // bits of the sampled kind in words [0, word)
    };
    template <bool kOnes>
    std::uint64_t select(std::uint64_t r, const std::vector<Sample> &samples) const;

    BitVector bits_;
    std::uint64_t ones_ = 0;
    std::vector<Sample> ones_samples_;
    std::vector<Sample> zeros_samples_;
};

/// Array of fixed-width unsigned integers packed into 64-bit words.
class PackedArray {
public:
    PackedArray() = default;
    PackedArray(std::uint64_t size, unsigned width);

    std::uint64_t size() const { return size_; }
    unsigned width() const { return width_; }
    std::uint64_t size_bits() const { return size_ * width_; }

    std::uint64_t get(std::uint64_t i) const;
    void set(std::uint64_t i, std::uint64_t value);

    std::vector<std::uint8_t> to_bytes() const;
    static PackedArray from_bytes(std::span<const std::uint8_t> bytes, std::uint64_t size, unsigned width);

    friend bool operator==(const PackedArray &, const PackedArray &) = default;

private:
    std::vector<std::uint64_t> words_;
    std::uint64_t size_ = 0;
    unsigned width_ = 0;
};

/// Index of the r-th (0-based) set bit inside a word.
unsigned select_in_word(std::uint64_t word, unsigned r);

}  // namespace pachash
