#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pachash/block_format.hpp"
#include "pachash/params.hpp"
#include "pachash/store_index.hpp"

namespace pachash {

class Store;

struct InputObject {
    Key key;
    std::vector<std::uint8_t> value;
};

struct BuildOptions {
    std::uint32_t a = 8;
    std::uint32_t block_size = 4096;
    std::uint64_t seed = 0;
    IndexKind index = IndexKind::kEliasFano;
    std::uint32_t range_size = EntropyCodedIndex::kDefaultRangeSize;
    std::uint64_t max_value_bytes = 0xFFFFFFFFu;

    void validate() const;
};

/// What the index sequence needs to know about one packed block.
struct BlockSummary {
    std::uint32_t entries = 0;
    bool continues = false;  // starts with bytes of an object begun earlier
    std::uint64_t first_hash = 0;
    std::uint64_t last_hash = 0;
};

/// p for a packed store. p_1 = 1; a block starting inside an object gets that
/// object's bin; a block starting with a new object of bin b gets b, or b-1
/// when bin b-1 is empty.
std::vector<std::uint64_t> index_sequence(std::span<const BlockSummary> blocks, std::uint32_t a);

/// A complete store held in memory.
struct BuiltStore {
    StoreHeader header;
    std::vector<std::uint8_t> data;  // blocks 1..m
    std::vector<std::uint64_t> p;
    StoreIndex index;

    std::vector<std::uint8_t> file_image() const;
    void write(const std::string &path) const;
};

/// Throws InvalidArgument on duplicate keys or oversized values.
BuiltStore build(std::span<const InputObject> objects, const BuildOptions &options);

/// Combines two stores built with the same a, block size and seed. The result
/// equals build() over the union; options.a, block_size and seed are ignored
/// and taken from the inputs.
BuiltStore merge(const Store &x, const Store &y, const BuildOptions &options);

/// Recomputes p from the data blocks with a single scan. range_size 0 keeps
/// the chunking of the store's current entropy-coded index.
StoreIndex rebuild_index(const Store &store, std::uint32_t range_size = 0);

}  // namespace pachash
