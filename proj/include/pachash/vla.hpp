#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pachash/block_device.hpp"
#include "pachash/block_format.hpp"
#include "pachash/elias_fano.hpp"

namespace pachash {

/// Positional array of variable-size objects in the compact layout.
///
/// Block i: [prev_count u64][first_start u16 or 0xFFFF][payload]. Objects are
/// [LEB128 length][bytes] packed back to back across block payloads; the tail
/// of the last block is zero. prev_count counts the objects starting in blocks
/// 1..i-1 and first_start is the block offset of the first object starting in
/// block i. The index stores p_i = first position whose bytes touch block i.
class VlaStore {
public:
    static constexpr std::uint32_t kBlockHeaderBytes = 10;
    static constexpr std::uint16_t kNoStart = 0xFFFF;

    struct GetResult {
        std::vector<std::uint8_t> value;
        BlockRange range;
        std::uint64_t blocks_fetched = 0;
        std::uint64_t objects_skipped = 0;
    };

    struct BlockInfo {
        std::uint64_t prev_count = 0;
        std::uint16_t first_start = kNoStart;
    };

    /// Complete file image. Block size must be within 64..65535.
    static std::vector<std::uint8_t> build(std::span<const std::vector<std::uint8_t>> objects,
                                           std::uint32_t block_size);
    static VlaStore open(const std::string &path, OpenOptions options = {});
    static VlaStore from_image(std::vector<std::uint8_t> image);

    const StoreHeader &header() const { return header_; }
    std::uint64_t size() const { return header_.n; }
    std::uint64_t blocks() const { return header_.m; }
    const EliasFanoIndex &index() const { return index_; }
    BlockDevice &device() const { return *device_; }
    std::uint32_t payload_per_block() const { return header_.block_size - kBlockHeaderBytes; }
    /// n / m, the positions per block playing the role of a.
    double effective_a() const { return double(header_.n) / double(header_.m); }

    /// 1-based position. One read_range per call.
    GetResult get(std::uint64_t i) const;

    BlockInfo block_info(BlockId id) const;

private:
    VlaStore() = default;
    static VlaStore from_parts(StoreHeader header, std::span<const std::uint8_t> index_bytes,
                               std::unique_ptr<BlockDevice> device);

    StoreHeader header_;
    EliasFanoIndex index_;
    std::unique_ptr<BlockDevice> device_;
};

}  // namespace pachash
