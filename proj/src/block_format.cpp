#include "pachash/block_format.hpp"

#include <algorithm>
#include <cstring>

#include "pachash/detail/bytes.hpp"
#include "pachash/errors.hpp"

namespace pachash {

namespace {

void check_image(const BlockImage &image) {
    auto fail = [](const std::string &what) { throw InvalidArgument("block image: " + what); };
    if (image.block_size < kMinBlockSize || image.block_size > kMaxBlockSize) fail("unsupported block size");
    if (image.entries.size() > BlockImage::kCountMask) fail("too many entries");
    std::uint64_t start = image.payload_start();
    if (start > image.block_size) fail("entry table overflows the block");
    if (image.padding > 0 && !image.closed) fail("padded block must be closed");
    if (start + image.payload.size() + image.padding != image.block_size) fail("payload and padding do not fill the block");
    std::uint32_t previous = image.payload_start();
    for (const auto &e : image.entries) {
        if (e.offset < previous) fail("entry offsets out of order");
        if (e.offset > image.data_end() || e.offset >= image.block_size) fail("entry offset beyond block data");
        previous = e.offset;
    }
}

}  // namespace

void encode_block_into(const BlockImage &image, std::span<std::uint8_t> out) {
    check_image(image);
    if (out.size() != image.block_size) throw InvalidArgument("block image: output size differs from block size");
    std::fill(out.begin(), out.end(), 0);
    std::uint16_t field = static_cast<std::uint16_t>(image.entries.size());
    if (image.closed) field |= BlockImage::kClosedFlag;
    if (image.padding > 0) field |= BlockImage::kPaddedFlag;
    detail::put_le(out.data(), field, 2);
    std::size_t pos = kBlockCountBytes;
    for (const auto &e : image.entries) {
        std::memcpy(out.data() + pos, e.key.bytes.data(), 8);
        detail::put_le(out.data() + pos + 8, e.offset, 2);
        pos += kEntryBytes;
    }
    if (!image.payload.empty()) std::memcpy(out.data() + pos, image.payload.data(), image.payload.size());
    if (image.padding == 0) return;
    std::uint64_t v = image.padding;
    std::size_t i = image.block_size;
    do {
        out[--i] = static_cast<std::uint8_t>((v & 0x7f) | (v >= 0x80 ? 0x80 : 0));
        v >>= 7;
    } while (v > 0);
}

std::vector<std::uint8_t> encode_block(const BlockImage &image) {
    std::vector<std::uint8_t> out(image.block_size);
    encode_block_into(image, out);
    return out;
}

BlockImage decode_block(std::span<const std::uint8_t> bytes, std::uint64_t block_id) {
    auto fail = [block_id](const std::string &what) {
        return IntegrityError("block " + std::to_string(block_id) + ": " + what);
    };
    if (bytes.size() < kMinBlockSize || bytes.size() > kMaxBlockSize) throw fail("unsupported block size");
    BlockImage image;
    image.block_size = static_cast<std::uint32_t>(bytes.size());
    auto field = static_cast<std::uint16_t>(detail::get_le(bytes.data(), 2));
    std::uint32_t count = field & BlockImage::kCountMask;
    image.closed = field & BlockImage::kClosedFlag;
    bool padded = field & BlockImage::kPaddedFlag;
    std::uint64_t start = kBlockCountBytes + std::uint64_t(kEntryBytes) * count;
    if (start > bytes.size()) throw fail("entry table overflows the block");
    if (padded) {
        if (!image.closed) throw fail("padded block is not closed");
        std::uint64_t v = 0;
        std::size_t i = bytes.size();
        for (unsigned shift = 0;; shift += 7) {
            if (i == start || shift > 21) throw fail("bad padding length");
            std::uint8_t b = bytes[--i];
            v |= std::uint64_t(b & 0x7f) << shift;
            if (!(b & 0x80)) break;
        }
        if (v == 0 || v > bytes.size() - start || v < bytes.size() - i) throw fail("bad padding length");
        image.padding = static_cast<std::uint32_t>(v);
        for (std::size_t k = bytes.size() - v; k < i; ++k)
            if (bytes[k] != 0) throw fail("nonzero padding");
    }
    image.entries.resize(count);
    std::uint32_t previous = static_cast<std::uint32_t>(start);
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::uint8_t *p = bytes.data() + kBlockCountBytes + k * kEntryBytes;
        std::memcpy(image.entries[k].key.bytes.data(), p, 8);
        auto offset = static_cast<std::uint32_t>(detail::get_le(p + 8, 2));
        if (offset < previous) throw fail("entry " + std::to_string(k + 1) + " offset out of order");
        if (offset > image.data_end() || offset >= image.block_size)
            throw fail("entry " + std::to_string(k + 1) + " offset beyond block data");
        image.entries[k].offset = static_cast<std::uint16_t>(offset);
        previous = offset;
    }
    image.payload.assign(bytes.begin() + start, bytes.begin() + image.data_end());
    return image;
}

std::string index_kind_name(IndexKind kind) {
    switch (kind) {
        case IndexKind::kEliasFano: return "ef";
        case IndexKind::kEntropyCoded: return "ec";
        case IndexKind::kVla: return "vla";
    }
    return "unknown";
}

StoreParams StoreHeader::params() const {
    StoreParams p;
    p.a = a;
    p.m = m;
    p.block_size_bytes = block_size;
    p.n = n;
    p.total_payload_bytes = total_payload_bytes;
    p.hash_seed = hash_seed;
    return p;
}

std::vector<std::uint8_t> StoreHeader::encode() const {
    std::vector<std::uint8_t> out;
    detail::ByteWriter w(out);
    w.bytes(std::span(reinterpret_cast<const std::uint8_t *>(kMagic), 8));
    w.u16(version);
    w.u32(block_size);
    w.u32(a);
    w.u64(m);
    w.u64(n);
    w.u64(total_payload_bytes);
    w.u64(hash_seed);
    w.u8(static_cast<std::uint8_t>(index_kind));
    w.u64(index_offset);
    out.resize(std::max<std::size_t>(block_size, out.size()), 0);
    return out;
}

StoreHeader StoreHeader::decode(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes, "store header");
    auto magic = r.bytes(8);
    if (std::memcmp(magic.data(), kMagic, 8) != 0) throw FormatError("not a store file (bad magic)");
    StoreHeader h;
    h.version = static_cast<std::uint16_t>(r.u16());
    if (h.version != kVersion) throw FormatError("unsupported store version " + std::to_string(h.version));
    h.block_size = static_cast<std::uint32_t>(r.u32());
    h.a = static_cast<std::uint32_t>(r.u32());
    h.m = r.u64();
    h.n = r.u64();
    h.total_payload_bytes = r.u64();
    h.hash_seed = r.u64();
    auto kind = r.u8();
    if (kind > 2) throw FormatError("unknown index kind " + std::to_string(kind));
    h.index_kind = static_cast<IndexKind>(kind);
    h.index_offset = r.u64();
    if (h.block_size < kMinBlockSize || h.block_size > kMaxBlockSize) throw FormatError("unsupported block size");
    if (h.m == 0) throw FormatError("store has no data blocks");
    if (h.index_offset != (h.m + 1) * std::uint64_t(h.block_size)) throw FormatError("index section offset disagrees with m");
    if (h.index_kind != IndexKind::kVla && !is_power_of_two(h.a)) throw FormatError("a is not a power of two");
    return h;
}

}  // namespace pachash
