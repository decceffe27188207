#include "pachash/store.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "pachash/errors.hpp"
#include "pachash/hash.hpp"

namespace pachash {

namespace {

constexpr unsigned kMaxWorkers = 32;

std::vector<std::uint8_t> read_file_range(std::ifstream &in, const std::string &path, std::uint64_t offset,
                                          std::uint64_t length) {
    std::vector<std::uint8_t> out(length);
    in.seekg(static_cast<std::streamoff>(offset));
    in.read(reinterpret_cast<char *>(out.data()), static_cast<std::streamsize>(length));
    if (!in) throw IoError("short read from " + path);
    return out;
}

}  // namespace

double AuditReport::load_factor() const {
    if (blocks == 0 || block_size == 0) return 0;
    return double(payload_bytes) / (double(blocks) * block_size);
}

std::vector<std::uint8_t> extract_value(std::span<const BlockImage> images, BlockId first, std::uint64_t m,
                                        std::size_t block, std::size_t entry) {
    const BlockImage &img = images[block];
    const BlockEntry &e = img.entries[entry];
    auto here = img.bytes_at(e.offset, img.bytes_in_block(entry));
    std::vector<std::uint8_t> value(here.begin(), here.end());
    if (entry + 1 < img.entries.size() || img.closed) return value;
    for (std::size_t k = block + 1;; ++k) {
        BlockId id = first + k;
        if (id > m) throw IntegrityError("object of key " + e.key.to_hex() + " runs past the last block");
        if (k >= images.size())
            throw IntegrityError("object of key " + e.key.to_hex() + " continues past fetched block " +
                                 std::to_string(id - 1));
        const BlockImage &next = images[k];
        auto part = next.bytes_at(next.payload_start(), next.continuation_bytes());
        value.insert(value.end(), part.begin(), part.end());
        if (!next.entries.empty() || next.closed) return value;
    }
}

Store Store::from_parts(StoreHeader header, std::span<const std::uint8_t> index_bytes,
                        std::unique_ptr<BlockDevice> device) {
    if (header.index_kind == IndexKind::kVla) throw FormatError("store holds a positional array; use the vla commands");
    Store store;
    store.header_ = header;
    detail::ByteReader reader(index_bytes, "index section");
    store.index_ = StoreIndex::deserialize(header.index_kind, reader);
    if (reader.remaining() != 0) throw FormatError("index section: trailing bytes");
    if (store.index_.count() != header.m || store.index_.universe() != std::uint64_t(header.a) * header.m)
        throw FormatError("index section disagrees with the header");
    store.index_bytes_ = index_bytes.size();
    store.device_ = std::move(device);
    return store;
}

Store Store::open(const std::string &path, OpenOptions options) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open " + path);
    auto size = static_cast<std::uint64_t>(in.tellg());
    if (size < StoreHeader::kEncodedBytes) throw FormatError(path + " is too short for a store header");
    StoreHeader header = StoreHeader::decode(read_file_range(in, path, 0, StoreHeader::kEncodedBytes));
    if (size < header.index_offset) throw FormatError(path + " is shorter than its data blocks");
    auto index = read_file_range(in, path, header.index_offset, size - header.index_offset);
    auto device = std::make_unique<FileBlockDevice>(path, header.block_size, header.m, options.direct_io);
    return from_parts(header, index, std::move(device));
}

Store Store::from_image(std::vector<std::uint8_t> image) {
    auto shared = std::make_shared<const std::vector<std::uint8_t>>(std::move(image));
    StoreHeader header = StoreHeader::decode(*shared);
    if (shared->size() < header.index_offset) throw FormatError("store image is shorter than its data blocks");
    auto device = std::make_unique<MemoryBlockDevice>(shared, header.block_size, header.m);
    return from_parts(header, std::span(*shared).subspan(header.index_offset), std::move(device));
}

BinId Store::bin_of(const Key &key) const {
    return hash_to_bin(key, header_.hash_seed, std::uint64_t(header_.a) * header_.m);
}

QueryResult Store::query(const Key &key) const {
    QueryResult result;
    result.range = locate(bin_of(key));
    const std::uint32_t bs = header_.block_size;
    std::vector<std::uint8_t> bytes(result.range.size() * bs);
    device_->read_range(result.range, bytes);
    result.blocks_fetched = result.range.size();
    result.bytes_fetched = bytes.size();

    std::vector<BlockImage> images;
    images.reserve(result.range.size());
    for (BlockId id = result.range.first; id <= result.range.last; ++id)
        images.push_back(decode_block(std::span(bytes).subspan((id - result.range.first) * bs, bs), id));

    std::optional<std::pair<std::size_t, std::size_t>> hit;
    for (std::size_t k = 0; k < images.size(); ++k)
        for (std::size_t e = 0; e < images[k].entries.size(); ++e) {
            if (images[k].entries[e].key != key) continue;
            if (hit) throw IntegrityError("key " + key.to_hex() + " stored twice");
            hit = {k, e};
        }
    if (hit) {
        result.found = true;
        result.value = extract_value(images, result.range.first, header_.m, hit->first, hit->second);
    }
    return result;
}

std::vector<BatchItem> Store::query_batch(std::span<const Key> keys, unsigned max_in_flight) const {
    if (max_in_flight == 0) throw InvalidArgument("max_in_flight must be >= 1");
    std::vector<BatchItem> out(keys.size());
    auto run = [&](std::size_t i) {
        try {
            out[i].result = query(keys[i]);
        } catch (const Error &e) {
            out[i].error_code = e.code();
            out[i].error_message = e.what();
        } catch (const std::exception &e) {
            out[i].error_code = "internal";
            out[i].error_message = e.what();
        }
    };
    auto workers = static_cast<unsigned>(
        std::min<std::size_t>({max_in_flight, keys.size(), kMaxWorkers}));
    if (workers <= 1) {
        for (std::size_t i = 0; i < keys.size(); ++i) run(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        threads.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < keys.size();) run(i);
        });
    for (auto &t : threads) t.join();
    return out;
}

BlockImage Store::read_block(BlockId id) const {
    auto bytes = device_->read_range({id, id});
    return decode_block(bytes, id);
}

std::vector<StoredObject> Store::read_all_objects() const {
    std::vector<BlockImage> images;
    images.reserve(header_.m);
    for_each_block([&](BlockId, BlockImage image) { images.push_back(std::move(image)); });
    std::vector<StoredObject> out;
    out.reserve(header_.n);
    for (std::size_t k = 0; k < images.size(); ++k)
        for (std::size_t e = 0; e < images[k].entries.size(); ++e) {
            const Key &key = images[k].entries[e].key;
            out.push_back({key, hash64(key, header_.hash_seed), extract_value(images, 1, header_.m, k, e)});
        }
    return out;
}

AuditReport Store::audit() const {
    AuditReport report;
    report.block_size = header_.block_size;
    bool previous_closed = true;
    std::optional<std::pair<std::uint64_t, Key>> previous_object;
    auto problem = [&](BlockId id, const std::string &what) {
        report.problems.push_back("block " + std::to_string(id) + ": " + what);
    };
    for_each_block([&](BlockId id, const BlockImage &img) {
        ++report.blocks;
        report.objects += img.entries.size();
        report.payload_bytes += img.payload.size();
        report.table_bytes += std::uint64_t(kEntryBytes) * img.entries.size();
        report.count_bytes += kBlockCountBytes;
        report.padding_bytes += img.padding;
        if (id < header_.m) {
            report.max_nonfinal_padding = std::max<std::uint64_t>(report.max_nonfinal_padding, img.padding);
            if (img.padding >= kMinObjectStartBytes) problem(id, "padding of " + std::to_string(img.padding) + " bytes");
        } else if (!img.closed) {
            problem(id, "last block is not closed");
        }
        std::uint32_t cont = img.continuation_bytes();
        if (previous_closed && cont > 0) problem(id, "continuation bytes after a closed block");
        if (!previous_closed && cont == 0) problem(id, "open predecessor but no continuation bytes");
        previous_closed = img.closed;
        for (const auto &e : img.entries) {
            std::pair<std::uint64_t, Key> current{hash64(e.key, header_.hash_seed), e.key};
            if (previous_object && !(*previous_object < current)) problem(id, "objects out of hash order");
            previous_object = current;
        }
    });
    std::uint64_t accounted = report.payload_bytes + report.table_bytes + report.count_bytes + report.padding_bytes;
    if (accounted != header_.m * header_.block_size)
        report.problems.push_back("accounted bytes " + std::to_string(accounted) + " differ from m*B");
    if (report.payload_bytes != header_.total_payload_bytes)
        report.problems.push_back("payload bytes differ from the header total");
    if (report.objects != header_.n) report.problems.push_back("object count differs from the header");
    return report;
}

}  // namespace pachash
