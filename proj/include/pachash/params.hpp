#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace pachash {

/// 8-byte object identifier. Longer user keys must be hashed down by the caller.
struct Key {
    std::array<std::uint8_t, 8> bytes{};

    static Key from_u64(std::uint64_t v) {
        Key k;
        for (int i = 0; i < 8; ++i) k.bytes[i] = static_cast<std::uint8_t>(v >> (8 * i));
        return k;
    }
    std::uint64_t to_u64() const {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[i]) << (8 * i);
        return v;
    }
    /// Parses exactly 16 hex digits, byte order as written.
    static Key from_hex(std::string_view hex);
    std::string to_hex() const;

    friend auto operator<=>(const Key &, const Key &) = default;
};

/// Bin number in 1..num_bins.
struct BinId {
    std::uint64_t value = 0;
    friend auto operator<=>(const BinId &, const BinId &) = default;
};

/// Block number in 1..m. Block 0 on disk is the header block.
using BlockId = std::uint64_t;

/// Inclusive range of data blocks.
struct BlockRange {
    BlockId first = 1;
    BlockId last = 1;

    std::uint64_t size() const { return last - first + 1; }
    bool contains(BlockId b) const { return first <= b && b <= last; }
    friend bool operator==(const BlockRange &, const BlockRange &) = default;
};

/// Per-block bookkeeping of the tabled layout: a 2-byte count plus a
/// (key, offset) entry per object starting in the block.
inline constexpr std::uint32_t kBlockCountBytes = 2;
inline constexpr std::uint32_t kEntryBytes = 10;
/// Free bytes needed to start an object: its entry plus one payload byte.
inline constexpr std::uint32_t kMinObjectStartBytes = kEntryBytes + 1;
inline constexpr std::uint32_t kMinBlockSize = 64;
inline constexpr std::uint32_t kMaxBlockSize = 65536;

/// Structural constants shared by builder, index and query engine.
struct StoreParams {
    std::uint32_t a = 8;
    std::uint64_t m = 1;
    std::uint32_t block_size_bytes = 4096;
    std::uint64_t n = 0;
    std::uint64_t total_payload_bytes = 0;
    std::uint64_t hash_seed = 0;

    std::uint64_t num_bins() const { return std::uint64_t(a) * m; }
    /// Bytes of a block not taken by the entry count; entries and values share them.
    std::uint32_t payload_capacity_bytes() const { return block_size_bytes - kBlockCountBytes; }

    /// Throws InvalidArgument when a field combination is unusable.
    void validate() const;
};

inline bool is_power_of_two(std::uint64_t v) { return v != 0 && std::has_single_bit(v); }

}  // namespace pachash
