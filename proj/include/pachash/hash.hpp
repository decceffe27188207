#pragma once

#include <cstdint>

#include "pachash/params.hpp"

namespace pachash {

/// Keyed 64-bit hash (SipHash-2-4) of an 8-byte key.
std::uint64_t hash64(const Key &key, std::uint64_t seed);

/// Maps a full-width hash onto 1..num_bins by fixed-point scaling.
/// Scaling keeps the order of hashes, so objects sorted by hash stay sorted
/// by bin for every num_bins.
inline BinId scale_to_bin(std::uint64_t h, std::uint64_t num_bins) {
    auto scaled = static_cast<unsigned __int128>(h) * num_bins;
    return BinId{static_cast<std::uint64_t>(scaled >> 64) + 1};
}

/// Requires num_bins >= 1.
BinId hash_to_bin(const Key &key, std::uint64_t seed, std::uint64_t num_bins);

}  // namespace pachash
