#include "pachash/builder.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "pachash/errors.hpp"
#include "pachash/hash.hpp"
#include "pachash/store.hpp"

namespace pachash {

namespace {

struct SortedObject {
    std::uint64_t hash;
    Key key;
    std::span<const std::uint8_t> value;
};

/// Fills blocks in order. An object starts only where at least
/// kMinObjectStartBytes bytes are free; otherwise the block is closed with
/// padding.
class Packer {
public:
    Packer(std::uint32_t block_size, std::vector<std::uint8_t> &out) : bs_(block_size), out_(out) {}

    void add(const SortedObject &x) {
        if (bs_ - used() < kMinObjectStartBytes) close(true);
        if (image_.entries.empty()) summary_.first_hash = x.hash;
        summary_.last_hash = x.hash;
        image_.entries.push_back({x.key, 0});
        positions_.push_back(static_cast<std::uint32_t>(image_.payload.size()));
        std::size_t done = 0;
        while (done < x.value.size()) {
            if (used() == bs_) {
                close(false);
                summary_.continues = true;
            }
            std::size_t take = std::min<std::size_t>(x.value.size() - done, bs_ - used());
            image_.payload.insert(image_.payload.end(), x.value.begin() + done, x.value.begin() + done + take);
            done += take;
        }
    }

    std::vector<BlockSummary> finish() {
        close(true);
        return std::move(summaries_);
    }

private:
    std::uint32_t used() const {
        return kBlockCountBytes + kEntryBytes * static_cast<std::uint32_t>(image_.entries.size()) +
               static_cast<std::uint32_t>(image_.payload.size());
    }

    void close(bool closed) {
        image_.block_size = bs_;
        image_.closed = closed;
        image_.padding = closed ? bs_ - used() : 0;
        for (std::size_t k = 0; k < image_.entries.size(); ++k)
            image_.entries[k].offset = static_cast<std::uint16_t>(image_.payload_start() + positions_[k]);
        summary_.entries = static_cast<std::uint32_t>(image_.entries.size());
        auto pos = out_.size();
        out_.resize(pos + bs_);
        encode_block_into(image_, std::span(out_).subspan(pos, bs_));
        summaries_.push_back(summary_);
        image_.entries.clear();
        image_.payload.clear();
        positions_.clear();
        summary_ = {};
    }

    std::uint32_t bs_;
    std::vector<std::uint8_t> &out_;
    BlockImage image_;
    std::vector<std::uint32_t> positions_;
    BlockSummary summary_;
    std::vector<BlockSummary> summaries_;
};

BuiltStore pack(std::span<const SortedObject> objects, const BuildOptions &options) {
    BuiltStore store;
    Packer packer(options.block_size, store.data);
    std::uint64_t payload = 0;
    for (const auto &x : objects) {
        packer.add(x);
        payload += x.value.size();
    }
    auto summaries = packer.finish();

    StoreHeader &h = store.header;
    h.block_size = options.block_size;
    h.a = options.a;
    h.m = summaries.size();
    h.n = objects.size();
    h.total_payload_bytes = payload;
    h.hash_seed = options.seed;
    h.index_kind = options.index;
    h.index_offset = (h.m + 1) * std::uint64_t(h.block_size);
    store.p = index_sequence(summaries, options.a);
    store.index = StoreIndex::build(options.index, store.p, std::uint64_t(options.a) * h.m, options.range_size);
    return store;
}

bool hash_order(const SortedObject &x, const SortedObject &y) {
    return x.hash != y.hash ? x.hash < y.hash : x.key < y.key;
}

}  // namespace

void BuildOptions::validate() const {
    if (!is_power_of_two(a)) throw InvalidArgument("a must be a power of two, got " + std::to_string(a));
    if (block_size < kMinBlockSize || block_size > kMaxBlockSize)
        throw InvalidArgument("block size must be within " + std::to_string(kMinBlockSize) + ".." +
                              std::to_string(kMaxBlockSize));
    if (index != IndexKind::kEliasFano && index != IndexKind::kEntropyCoded)
        throw InvalidArgument("index kind must be ef or ec");
    if (range_size == 0) throw InvalidArgument("range size must be >= 1");
}

std::vector<std::uint64_t> index_sequence(std::span<const BlockSummary> blocks, std::uint32_t a) {
    const std::uint64_t bins = std::uint64_t(a) * blocks.size();
    std::vector<std::uint64_t> p(blocks.size());
    std::uint64_t last_bin = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const BlockSummary &s = blocks[i];
        if (i == 0) {
            p[i] = 1;
        } else if (s.continues) {
            p[i] = last_bin;
        } else if (s.entries > 0) {
            std::uint64_t b = scale_to_bin(s.first_hash, bins).value;
            p[i] = last_bin + 1 < b ? b - 1 : b;
        } else {
            p[i] = std::min(last_bin + 1, bins);
        }
        if (s.entries > 0) last_bin = scale_to_bin(s.last_hash, bins).value;
    }
    return p;
}

std::vector<std::uint8_t> BuiltStore::file_image() const {
    std::vector<std::uint8_t> out = header.encode();
    out.insert(out.end(), data.begin(), data.end());
    detail::ByteWriter w(out);
    index.serialize(w);
    return out;
}

void BuiltStore::write(const std::string &path) const {
    auto image = file_image();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    out.write(reinterpret_cast<const char *>(image.data()), static_cast<std::streamsize>(image.size()));
    if (!out.flush()) throw IoError("cannot write " + path);
}

BuiltStore build(std::span<const InputObject> objects, const BuildOptions &options) {
    options.validate();
    std::vector<SortedObject> sorted;
    sorted.reserve(objects.size());
    for (const auto &x : objects) {
        if (x.value.size() > options.max_value_bytes)
            throw InvalidArgument("value of key " + x.key.to_hex() + " exceeds " +
                                  std::to_string(options.max_value_bytes) + " bytes");
        sorted.push_back({hash64(x.key, options.seed), x.key, x.value});
    }
    std::sort(sorted.begin(), sorted.end(), hash_order);
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].key == sorted[i - 1].key) throw InvalidArgument("duplicate key " + sorted[i].key.to_hex());
    return pack(sorted, options);
}

BuiltStore merge(const Store &x, const Store &y, const BuildOptions &options) {
    const StoreHeader &hx = x.header();
    const StoreHeader &hy = y.header();
    if (hx.a != hy.a || hx.block_size != hy.block_size || hx.hash_seed != hy.hash_seed)
        throw InvalidArgument("stores differ in a, block size or seed");
    BuildOptions merged = options;
    merged.a = hx.a;
    merged.block_size = hx.block_size;
    merged.seed = hx.hash_seed;
    merged.validate();

    auto xs = x.read_all_objects();
    auto ys = y.read_all_objects();
    std::vector<SortedObject> out;
    out.reserve(xs.size() + ys.size());
    auto check_sorted = [](const std::vector<StoredObject> &v, const char *which) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(std::pair(v[i - 1].hash, v[i - 1].key) < std::pair(v[i].hash, v[i].key)))
                throw IntegrityError(std::string(which) + " store is not in hash order");
    };
    check_sorted(xs, "first");
    check_sorted(ys, "second");
    std::size_t i = 0, j = 0;
    while (i < xs.size() || j < ys.size()) {
        bool take_x;
        if (i == xs.size()) {
            take_x = false;
        } else if (j == ys.size()) {
            take_x = true;
        } else {
            if (xs[i].key == ys[j].key) throw InvalidArgument("duplicate key " + xs[i].key.to_hex());
            take_x = std::pair(xs[i].hash, xs[i].key) < std::pair(ys[j].hash, ys[j].key);
        }
        const StoredObject &o = take_x ? xs[i++] : ys[j++];
        out.push_back({o.hash, o.key, o.value});
    }
    return pack(out, merged);
}

StoreIndex rebuild_index(const Store &store, std::uint32_t range_size) {
    const StoreHeader &h = store.header();
    std::vector<BlockSummary> summaries;
    summaries.reserve(h.m);
    bool previous_closed = true;
    store.for_each_block([&](BlockId, const BlockImage &img) {
        BlockSummary s;
        s.entries = static_cast<std::uint32_t>(img.entries.size());
        s.continues = !previous_closed && img.continuation_bytes() > 0;
        if (!img.entries.empty()) {
            s.first_hash = hash64(img.entries.front().key, h.hash_seed);
            s.last_hash = hash64(img.entries.back().key, h.hash_seed);
        }
        previous_closed = img.closed;
        summaries.push_back(s);
    });
    auto p = index_sequence(summaries, h.a);
    if (range_size == 0)
        range_size = h.index_kind == IndexKind::kEntropyCoded ? store.index().entropy_coded().range_size()
                                                              : EntropyCodedIndex::kDefaultRangeSize;
    return StoreIndex::build(h.index_kind, p, std::uint64_t(h.a) * h.m, range_size);
}

}  // namespace pachash
