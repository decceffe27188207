#include "pachash/vla.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include "pachash/detail/bytes.hpp"
#include "pachash/errors.hpp"

namespace pachash {

namespace {

/// Reads a LEB128 value from stream at pos; false when it runs off the end.
bool read_varint(std::span<const std::uint8_t> stream, std::uint64_t &pos, std::uint64_t &value) {
    value = 0;
    for (unsigned shift = 0; shift < 64; shift += 7) {
        if (pos >= stream.size()) return false;
        std::uint8_t b = stream[pos++];
        value |= std::uint64_t(b & 0x7f) << shift;
        if (!(b & 0x80)) return true;
    }
    return false;
}

}  // namespace

std::vector<std::uint8_t> VlaStore::build(std::span<const std::vector<std::uint8_t>> objects,
                                          std::uint32_t block_size) {
    if (block_size < kMinBlockSize || block_size >= kMaxBlockSize)
        throw InvalidArgument("positional array block size must be within 64..65535");
    const std::uint64_t per_block = block_size - kBlockHeaderBytes;

    std::vector<std::uint8_t> stream;
    std::vector<std::uint64_t> starts;
    starts.reserve(objects.size());
    std::uint64_t payload = 0;
    detail::ByteWriter w(stream);
    for (const auto &x : objects) {
        starts.push_back(stream.size());
        w.varint(x.size());
        w.bytes(x);
        payload += x.size();
    }
    const std::uint64_t m = std::max<std::uint64_t>(1, (stream.size() + per_block - 1) / per_block);

    StoreHeader h;
    h.block_size = block_size;
    h.a = 0;
    h.m = m;
    h.n = objects.size();
    h.total_payload_bytes = payload;
    h.index_kind = IndexKind::kVla;
    h.index_offset = (m + 1) * std::uint64_t(block_size);

    std::vector<std::uint8_t> image = h.encode();
    image.resize(h.index_offset, 0);
    std::vector<std::uint64_t> p(m, 1);
    for (std::uint64_t i = 0; i < m; ++i) {
        const std::uint64_t lo = i * per_block, hi = lo + per_block;
        std::uint8_t *block = image.data() + (i + 1) * block_size;
        auto first = std::lower_bound(starts.begin(), starts.end(), lo);
        std::uint64_t prev_count = first - starts.begin();
        std::uint16_t first_start = kNoStart;
        if (first != starts.end() && *first < hi) first_start = static_cast<std::uint16_t>(kBlockHeaderBytes + *first - lo);
        detail::put_le(block, prev_count, 8);
        detail::put_le(block + 8, first_start, 2);
        if (lo < stream.size())
            std::copy(stream.begin() + lo, stream.begin() + std::min<std::uint64_t>(hi, stream.size()),
                      block + kBlockHeaderBytes);
        // Object holding the first payload byte of block i.
        if (!starts.empty()) p[i] = std::upper_bound(starts.begin(), starts.end(), lo) - starts.begin();
    }
    auto index = EliasFanoIndex::build(p, std::max<std::uint64_t>(1, objects.size()));
    detail::ByteWriter iw(image);
    index.serialize(iw);
    return image;
}

VlaStore VlaStore::from_parts(StoreHeader header, std::span<const std::uint8_t> index_bytes,
                              std::unique_ptr<BlockDevice> device) {
    if (header.index_kind != IndexKind::kVla) throw FormatError("not a positional array store");
    if (header.block_size >= kMaxBlockSize) throw FormatError("positional array block size out of range");
    VlaStore store;
    store.header_ = header;
    detail::ByteReader reader(index_bytes, "index section");
    store.index_ = EliasFanoIndex::deserialize(reader);
    if (reader.remaining() != 0) throw FormatError("index section: trailing bytes");
    if (store.index_.count() != header.m || store.index_.universe() != std::max<std::uint64_t>(1, header.n))
        throw FormatError("index section disagrees with the header");
    store.device_ = std::move(device);
    return store;
}

VlaStore VlaStore::open(const std::string &path, OpenOptions options) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open " + path);
    auto size = static_cast<std::uint64_t>(in.tellg());
    std::vector<std::uint8_t> head(std::min<std::uint64_t>(size, StoreHeader::kEncodedBytes));
    in.seekg(0);
    in.read(reinterpret_cast<char *>(head.data()), static_cast<std::streamsize>(head.size()));
    StoreHeader header = StoreHeader::decode(head);
    if (size < header.index_offset) throw FormatError(path + " is shorter than its data blocks");
    std::vector<std::uint8_t> index(size - header.index_offset);
    in.seekg(static_cast<std::streamoff>(header.index_offset));
    in.read(reinterpret_cast<char *>(index.data()), static_cast<std::streamsize>(index.size()));
    if (!in) throw IoError("short read from " + path);
    auto device = std::make_unique<FileBlockDevice>(path, header.block_size, header.m, options.direct_io);
    return from_parts(header, index, std::move(device));
}

VlaStore VlaStore::from_image(std::vector<std::uint8_t> image) {
    auto shared = std::make_shared<const std::vector<std::uint8_t>>(std::move(image));
    StoreHeader header = StoreHeader::decode(*shared);
    if (shared->size() < header.index_offset) throw FormatError("store image is shorter than its data blocks");
    auto device = std::make_unique<MemoryBlockDevice>(shared, header.block_size, header.m);
    return from_parts(header, std::span(*shared).subspan(header.index_offset), std::move(device));
}

VlaStore::BlockInfo VlaStore::block_info(BlockId id) const {
    auto bytes = device_->read_range({id, id});
    return {detail::get_le(bytes.data(), 8), static_cast<std::uint16_t>(detail::get_le(bytes.data() + 8, 2))};
}

VlaStore::GetResult VlaStore::get(std::uint64_t i) const {
    if (i < 1 || i > header_.n)
        throw InvalidArgument("position " + std::to_string(i) + " outside 1.." + std::to_string(header_.n));
    GetResult result;
    result.range = index_.locate(BinId{i});
    const std::uint32_t bs = header_.block_size;
    const std::uint32_t per_block = payload_per_block();
    auto bytes = device_->read_range(result.range);
    result.blocks_fetched = result.range.size();

    std::vector<std::uint8_t> stream;
    stream.reserve(result.range.size() * per_block);
    std::optional<std::uint64_t> pos;
    std::uint64_t skip = 0;
    for (std::uint64_t k = 0; k < result.range.size(); ++k) {
        const std::uint8_t *block = bytes.data() + k * bs;
        auto prev_count = detail::get_le(block, 8);
        auto first_start = static_cast<std::uint16_t>(detail::get_le(block + 8, 2));
        if (!pos && first_start != kNoStart) {
            BlockId id = result.range.first + k;
            if (first_start < kBlockHeaderBytes || first_start >= bs)
                throw IntegrityError("block " + std::to_string(id) + ": bad first object offset");
            if (prev_count > i - 1)
                throw IntegrityError("block " + std::to_string(id) + ": object count beyond the requested position");
            pos = stream.size() + first_start - kBlockHeaderBytes;
            skip = i - 1 - prev_count;
        }
        stream.insert(stream.end(), block + kBlockHeaderBytes, block + bs);
    }
    if (!pos) throw IntegrityError("no object starts in the fetched blocks");

    auto corrupt = [&] {
        return IntegrityError("object " + std::to_string(i) + " runs past the fetched blocks " +
                              std::to_string(result.range.first) + ".." + std::to_string(result.range.last));
    };
    std::uint64_t at = *pos, length = 0;
    for (; result.objects_skipped < skip; ++result.objects_skipped) {
        if (!read_varint(stream, at, length) || length > stream.size() - at) throw corrupt();
        at += length;
    }
    if (!read_varint(stream, at, length) || length > stream.size() - at) throw corrupt();
    result.value.assign(stream.begin() + at, stream.begin() + at + length);
    return result;
}

}  // namespace pachash
