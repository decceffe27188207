#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pachash/bit_vector.hpp"
#include "pachash/detail/bytes.hpp"
#include "pachash/params.hpp"

namespace pachash {

/// Elias-Fano coded non-decreasing sequence p_1..p_k over 1..universe.
///
/// Each value v = p_i - 1 is split into lower_bits_width low bits, stored in a
/// packed array, and the remaining high part u_i, stored in unary as a 1-bit
/// at position (i-1) + u_i of the upper bit vector. A predecessor query runs
/// one select0 to reach the cluster of values sharing the query's high part
/// and then scans that cluster.
///
/// With universe = a·k and a a power of two the payload is exactly
/// k·(2 + log2 a) + 1 bits.
class EliasFanoIndex {
public:
    struct Predecessor {
        std::uint64_t position;  // 1-based
        std::uint64_t value;
    };

    EliasFanoIndex() = default;

    /// values must be non-decreasing, within 1..universe, and non-empty.
    static EliasFanoIndex build(std::span<const std::uint64_t> values, std::uint64_t universe);

    std::uint64_t count() const { return count_; }
    std::uint64_t universe() const { return universe_; }
    unsigned lower_bits_width() const { return lower_.width(); }
    const PackedArray &lower() const { return lower_; }
    const BitVectorWithSelect &upper() const { return upper_; }

    /// p_i for 1 <= i <= count().
    std::uint64_t get(std::uint64_t i) const;
    std::vector<std::uint64_t> decode() const;

    /// Largest i with p_i <= b (the last of equal values), or nullopt when
    /// p_1 > b. When `scanned` is given, the number of cluster entries that
    /// were inspected is added to it.
    std::optional<Predecessor> predecessor(std::uint64_t b, std::uint64_t *scanned = nullptr) const;

    /// Number of values <= b / < b.
    std::uint64_t count_at_most(std::uint64_t b, std::uint64_t *scanned = nullptr) const;
    std::uint64_t count_less(std::uint64_t b, std::uint64_t *scanned = nullptr) const;

    /// Blocks that may hold bin b: max(1, #{p < b}) .. #{p <= b}, clamped to
    /// 1..count(). The first block is one too early exactly when b starts a
    /// block and bin b-1 is non-empty.
    BlockRange locate(BinId b) const;

    /// Lower array plus upper bit vector, without select directories.
    std::uint64_t size_bits() const { return lower_.size_bits() + upper_.size(); }
    std::uint64_t select_support_bits() const { return upper_.select_support_bits(); }

    void serialize(detail::ByteWriter &out) const;
    static EliasFanoIndex deserialize(detail::ByteReader &in);

    friend bool operator==(const EliasFanoIndex &x, const EliasFanoIndex &y) {
        return x.count_ == y.count_ && x.universe_ == y.universe_ && x.lower_ == y.lower_ &&
               x.upper_.bits() == y.upper_.bits();
    }

private:
    static unsigned lower_width_for(std::uint64_t count, std::uint64_t universe);
    static std::uint64_t upper_length(std::uint64_t count, std::uint64_t universe, unsigned width);

    std::uint64_t count_ = 0;
    std::uint64_t universe_ = 0;
    PackedArray lower_;
    BitVectorWithSelect upper_;
};

}  // namespace pachash
