#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pachash/params.hpp"

namespace pachash {

struct BlockEntry {
    Key key;
    std::uint16_t offset = 0;  // byte offset of the object's first byte within the block
    friend bool operator==(const BlockEntry &, const BlockEntry &) = default;
};

/// One data block of the tabled layout.
///
///   [u16 count field][count x (key 8 bytes, offset u16)][payload][padding]
///
/// The count field carries the entry count in its low 14 bits plus two flags:
/// kClosedFlag marks a block whose last payload byte ends an object (nothing
/// continues into the next block), kPaddedFlag marks a block ending in
/// padding. Padding is zero except for its length, stored as a LEB128 varint
/// written backwards from the last byte of the block (byte B-1 holds the low
/// seven bits). Padded blocks are always closed.
struct BlockImage {
    static constexpr std::uint16_t kCountMask = 0x3FFF;
    static constexpr std::uint16_t kPaddedFlag = 0x4000;
    static constexpr std::uint16_t kClosedFlag = 0x8000;

    std::uint32_t block_size = 0;
    std::vector<BlockEntry> entries;
    bool closed = false;
    std::uint32_t padding = 0;
    /// Bytes from payload_start() up to data_end().
    std::vector<std::uint8_t> payload;

    std::uint32_t payload_start() const { return kBlockCountBytes + kEntryBytes * static_cast<std::uint32_t>(entries.size()); }
    std::uint32_t data_end() const { return block_size - padding; }
    /// Bytes at the start of the payload that belong to an object begun earlier.
    std::uint32_t continuation_bytes() const {
        return (entries.empty() ? data_end() : entries.front().offset) - payload_start();
    }
    /// Length of entry k when it ends inside this block; for the last entry of
    /// an open block this is only the part stored here.
    std::uint32_t bytes_in_block(std::size_t k) const {
        std::uint32_t end = k + 1 < entries.size() ? entries[k + 1].offset : data_end();
        return end - entries[k].offset;
    }
    std::span<const std::uint8_t> bytes_at(std::uint32_t offset, std::uint32_t length) const {
        return std::span(payload).subspan(offset - payload_start(), length);
    }

    friend bool operator==(const BlockImage &, const BlockImage &) = default;
};

/// Throws InvalidArgument when the image violates the layout invariants.
std::vector<std::uint8_t> encode_block(const BlockImage &image);
void encode_block_into(const BlockImage &image, std::span<std::uint8_t> out);

/// Throws IntegrityError naming block_id when the bytes are malformed.
BlockImage decode_block(std::span<const std::uint8_t> bytes, std::uint64_t block_id);

enum class IndexKind : std::uint8_t { kEliasFano = 0, kEntropyCoded = 1, kVla = 2 };

std::string index_kind_name(IndexKind kind);

/// First block of a store file. Every integer is little-endian; the rest of
/// the block is zero.
struct StoreHeader {
    static constexpr char kMagic[9] = "PCHSTOR1";
    static constexpr std::uint16_t kVersion = 1;
    static constexpr std::uint32_t kEncodedBytes = 59;

    std::uint16_t version = kVersion;
    std::uint32_t block_size = 4096;
    std::uint32_t a = 8;
    std::uint64_t m = 1;
    std::uint64_t n = 0;
    std::uint64_t total_payload_bytes = 0;
    std::uint64_t hash_seed = 0;
    IndexKind index_kind = IndexKind::kEliasFano;
    std::uint64_t index_offset = 0;

    StoreParams params() const;

    std::vector<std::uint8_t> encode() const;
    /// Accepts a prefix of the file of at least kEncodedBytes bytes.
    static StoreHeader decode(std::span<const std::uint8_t> bytes);

    friend bool operator==(const StoreHeader &, const StoreHeader &) = default;
};

}  // namespace pachash
