#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace pachash {

/// Appends bits MSB-first into a byte buffer.
class BitWriter {
public:
    explicit BitWriter(std::vector<std::uint8_t> &out) : out_(out) {}
    void put(std::uint32_t code, unsigned length);
    /// Pads the last partial byte with zero bits.
    void flush();

private:
    std::vector<std::uint8_t> &out_;
    std::uint32_t acc_ = 0;
    unsigned filled_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}
    /// Returns -1 once the input is exhausted.
    int next();
    std::uint64_t bits_consumed() const { return pos_; }

private:
    std::span<const std::uint8_t> in_;
    std::uint64_t pos_ = 0;
};

/// Canonical, length-limited Huffman code over byte symbols.
class HuffmanCode {
public:
    static constexpr unsigned kMaxLength = 20;

    HuffmanCode() = default;
    static HuffmanCode from_frequencies(std::span<const std::uint64_t, 256> freq);
    /// Rejects length tables that violate the Kraft inequality.
    static HuffmanCode from_lengths(const std::array<std::uint8_t, 256> &lengths);

    const std::array<std::uint8_t, 256> &lengths() const { return lengths_; }

    void encode(std::uint8_t symbol, BitWriter &out) const { out.put(codes_[symbol], lengths_[symbol]); }
    /// Returns -1 on an invalid or truncated code.
    int decode(BitReader &in) const;

private:
    void assign_codes();

    std::array<std::uint8_t, 256> lengths_{};
    std::array<std::uint32_t, 256> codes_{};
    std::array<std::uint32_t, kMaxLength + 1> first_code_{};
    std::array<std::uint32_t, kMaxLength + 1> first_index_{};
    std::array<std::uint32_t, kMaxLength + 1> count_{};
    std::vector<std::uint8_t> sorted_;
};

}  // namespace pachash
