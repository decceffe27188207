#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pachash/block_format.hpp"
#include "pachash/detail/bytes.hpp"
#include "pachash/elias_fano.hpp"
#include "pachash/entropy_index.hpp"

namespace pachash {

/// The in-memory index of a store: p in one of the two representations.
class StoreIndex {
public:
    StoreIndex() = default;
    /// kind must be kEliasFano or kEntropyCoded (kVla uses Elias-Fano).
    static StoreIndex build(IndexKind kind, std::span<const std::uint64_t> p, std::uint64_t universe,
                            std::uint32_t range_size = EntropyCodedIndex::kDefaultRangeSize);

    IndexKind kind() const { return kind_; }
    std::uint64_t count() const;
    std::uint64_t universe() const;
    BlockRange locate(BinId b) const;
    std::vector<std::uint64_t> decode() const;
    std::uint64_t size_bits() const;

    /// Only valid for the matching kind.
    const EliasFanoIndex &elias_fano() const { return ef_; }
    const EntropyCodedIndex &entropy_coded() const { return ec_; }

    void serialize(detail::ByteWriter &out) const;
    static StoreIndex deserialize(IndexKind kind, detail::ByteReader &in);

    friend bool operator==(const StoreIndex &x, const StoreIndex &y);

private:
    bool uses_ec() const { return kind_ == IndexKind::kEntropyCoded; }

    IndexKind kind_ = IndexKind::kEliasFano;
    EliasFanoIndex ef_;
    EntropyCodedIndex ec_;
};

}  // namespace pachash
