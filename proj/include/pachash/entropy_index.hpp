#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pachash/bit_vector.hpp"
#include "pachash/detail/bytes.hpp"
#include "pachash/huffman.hpp"
#include "pachash/params.hpp"

namespace pachash {

/// Entropy-coded form of the block index p.
///
/// Conceptually p is the sparse bit vector with a 1-bit at (i-1) + (p_i-1)
/// over universe + count + 1 positions. The bins are cut into chunks of
/// range_size bins; every chunk stores the gaps between consecutive values
/// (the first one relative to the chunk start) as LEB128 bytes, entropy coded
/// with one Huffman code shared by all chunks. A query decodes a single chunk.
///
/// Serialized layout (little-endian):
///   codec u8 (=1) | version u8 (=1) | range_size u32 | count u64 | universe u64 |
///   code lengths u8[256] | chunks u64 | directory (chunks+1) x (ones_before u32, byte_offset u32) |
///   chunk bytes
/// The absolute bit offset of chunk c is c·range_size + ones_before[c] and is
/// not stored.
class EntropyCodedIndex {
public:
    static constexpr std::uint8_t kCodecHuffmanGaps = 1;
    static constexpr std::uint8_t kVersion = 1;
    static constexpr std::uint32_t kDefaultRangeSize = 1024;

    EntropyCodedIndex() = default;

    /// Same preconditions as EliasFanoIndex::build; range_size >= 1.
    static EntropyCodedIndex build(std::span<const std::uint64_t> values, std::uint64_t universe,
                                   std::uint32_t range_size = kDefaultRangeSize);

    std::uint64_t count() const { return count_; }
    std::uint64_t universe() const { return universe_; }
    std::uint32_t range_size() const { return range_size_; }
    std::uint64_t chunk_count() const { return ones_before_.size() - 1; }
    std::uint64_t ones_before_chunk(std::uint64_t c) const { return ones_before_[c]; }
    std::uint64_t chunk_bit_offset(std::uint64_t c) const { return c * range_size_ + ones_before_[c]; }

    /// Identical contract to EliasFanoIndex::locate.
    BlockRange locate(BinId b) const;

    std::vector<std::uint64_t> decode() const;
    BitVector to_bit_vector() const;

    /// Serialized size in bits.
    std::uint64_t size_bits() const;

    void serialize(detail::ByteWriter &out) const;
    static EntropyCodedIndex deserialize(detail::ByteReader &in);

    friend bool operator==(const EntropyCodedIndex &, const EntropyCodedIndex &);

private:
    /// Decodes chunk c, calling visit(value) for each value in order.
    template <typename Visit>
    void decode_chunk(std::uint64_t c, Visit &&visit) const;

    std::uint64_t count_ = 0;
    std::uint64_t universe_ = 0;
    std::uint32_t range_size_ = kDefaultRangeSize;
    HuffmanCode code_;
    std::vector<std::uint64_t> ones_before_;   // chunks + 1 entries, ends at count
    std::vector<std::uint64_t> byte_offset_;   // chunks + 1 entries
    std::vector<std::uint8_t> data_;
};

}  // namespace pachash
