#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pachash/block_device.hpp"
#include "pachash/block_format.hpp"
#include "pachash/params.hpp"
#include "pachash/store_index.hpp"

namespace pachash {

struct QueryResult {
    bool found = false;
    std::vector<std::uint8_t> value;
    BlockRange range;
    std::uint64_t blocks_fetched = 0;
    std::uint64_t bytes_fetched = 0;
};

/// One slot of a batch; error_code is empty when the query succeeded.
struct BatchItem {
    QueryResult result;
    std::string error_code;
    std::string error_message;
};

struct StoredObject {
    Key key;
    std::uint64_t hash = 0;
    std::vector<std::uint8_t> value;
};

/// Byte accounting of a full walk over the data blocks.
struct AuditReport {
    std::uint32_t block_size = 0;
    std::uint64_t blocks = 0;
    std::uint64_t objects = 0;
    std::uint64_t payload_bytes = 0;
    std::uint64_t table_bytes = 0;
    std::uint64_t count_bytes = 0;
    std::uint64_t padding_bytes = 0;
    std::uint64_t max_nonfinal_padding = 0;
    std::vector<std::string> problems;

    bool ok() const { return problems.empty(); }
    double load_factor() const;
};

/// An opened store of the tabled layout. Reads are safe from several threads.
class Store {
public:
    static Store open(const std::string &path, OpenOptions options = {});
    /// Serves the blocks from a complete file image held in memory.
    static Store from_image(std::vector<std::uint8_t> image);

    const StoreHeader &header() const { return header_; }
    StoreParams params() const { return header_.params(); }
    const StoreIndex &index() const { return index_; }
    BlockDevice &device() const { return *device_; }
    std::uint64_t index_section_bytes() const { return index_bytes_; }

    BinId bin_of(const Key &key) const;
    BlockRange locate(BinId b) const { return index_.locate(b); }

    /// Exactly one read_range per call. Throws IntegrityError on corrupt blocks
    /// or when the key occurs twice.
    QueryResult query(const Key &key) const;
    /// Results in key order; up to max_in_flight reads may be outstanding.
    std::vector<BatchItem> query_batch(std::span<const Key> keys, unsigned max_in_flight = 128) const;

    BlockImage read_block(BlockId id) const;
    /// All objects in layout order.
    std::vector<StoredObject> read_all_objects() const;
    /// Per block, in order; used by rebuild and audit.
    template <typename Visit>
    void for_each_block(Visit &&visit) const;

    AuditReport audit() const;

private:
    Store() = default;
    static Store from_parts(StoreHeader header, std::span<const std::uint8_t> index_bytes,
                            std::unique_ptr<BlockDevice> device);

    StoreHeader header_;
    StoreIndex index_;
    std::uint64_t index_bytes_ = 0;
    std::unique_ptr<BlockDevice> device_;
};

/// Value of entry `entry` of block images[block] where images[k] is block
/// first + k of a store with m blocks. Needs every block the object touches;
/// throws IntegrityError otherwise.
std::vector<std::uint8_t> extract_value(std::span<const BlockImage> images, BlockId first, std::uint64_t m,
                                        std::size_t block, std::size_t entry);

template <typename Visit>
void Store::for_each_block(Visit &&visit) const {
    constexpr std::uint64_t kChunk = 256;
    const std::uint32_t bs = header_.block_size;
    for (BlockId first = 1; first <= header_.m; first += kChunk) {
        BlockId last = std::min<BlockId>(header_.m, first + kChunk - 1);
        auto bytes = device_->read_range({first, last});
        for (BlockId id = first; id <= last; ++id)
            visit(id, decode_block(std::span(bytes).subspan((id - first) * bs, bs), id));
    }
}

}  // namespace pachash
