#include "pachash/entropy_index.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "pachash/errors.hpp"

namespace pachash {

namespace {

void gap_symbols(std::uint64_t gap, std::vector<std::uint8_t> &out) {
    while (gap >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(gap | 0x80));
        gap >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(gap));
}

}  // namespace

EntropyCodedIndex EntropyCodedIndex::build(std::span<const std::uint64_t> values, std::uint64_t universe,
                                           std::uint32_t range_size) {
    if (values.empty()) throw InvalidArgument("entropy-coded index: sequence must not be empty");
    if (universe == 0 || range_size == 0) throw InvalidArgument("entropy-coded index: universe and range size must be >= 1");
    if (values.size() > 0xFFFFFFFFu) throw InvalidArgument("entropy-coded index: too many values");

    EntropyCodedIndex ec;
    ec.count_ = values.size();
    ec.universe_ = universe;
    ec.range_size_ = range_size;
    const std::uint64_t chunks = (universe + range_size - 1) / range_size;

    // Gap symbols per chunk, then one code over all of them.
    std::vector<std::vector<std::uint8_t>> symbols(chunks);
    std::array<std::uint64_t, 256> freq{};
    ec.ones_before_.assign(chunks + 1, 0);
    std::uint64_t previous = 0;
    std::uint64_t i = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) {
        ec.ones_before_[c] = i;
        const std::uint64_t chunk_end = std::min<std::uint64_t>((c + 1) * range_size, universe);
        std::uint64_t base = c * range_size;  // bins of chunk c are base+1..chunk_end
        for (; i < values.size() && values[i] <= chunk_end; ++i) {
            std::uint64_t p = values[i];
            if (p < 1 || p > universe) throw InvalidArgument("entropy-coded index: value outside universe");
            if (p < previous) throw InvalidArgument("entropy-coded index: sequence decreases at position " + std::to_string(i + 1));
            gap_symbols(p - std::max(base + 1, previous), symbols[c]);
            previous = p;
        }
        for (auto s : symbols[c]) ++freq[s];
    }
    if (i != values.size()) throw InvalidArgument("entropy-coded index: value outside universe");
    ec.ones_before_[chunks] = i;

    ec.code_ = HuffmanCode::from_frequencies(freq);
    ec.byte_offset_.assign(chunks + 1, 0);
    for (std::uint64_t c = 0; c < chunks; ++c) {
        ec.byte_offset_[c] = ec.data_.size();
        BitWriter bits(ec.data_);
        for (auto s : symbols[c]) ec.code_.encode(s, bits);
        bits.flush();
    }
    ec.byte_offset_[chunks] = ec.data_.size();
    if (ec.data_.size() > 0xFFFFFFFFu) throw InvalidArgument("entropy-coded index: encoding exceeds 4 GiB");
    return ec;
}

template <typename Visit>
void EntropyCodedIndex::decode_chunk(std::uint64_t c, Visit &&visit) const {
    const std::uint64_t expected = ones_before_[c + 1] - ones_before_[c];
    const std::uint64_t base = c * std::uint64_t(range_size_);
    const std::uint64_t chunk_end = std::min<std::uint64_t>(base + range_size_, universe_);
    auto corrupt = [c](const char *why) {
        return IntegrityError("entropy-coded chunk " + std::to_string(c) + " corrupt: " + why);
    };
    BitReader bits(std::span<const std::uint8_t>(data_).subspan(byte_offset_[c], byte_offset_[c + 1] - byte_offset_[c]));
    std::uint64_t previous = base + 1;
    for (std::uint64_t k = 0; k < expected; ++k) {
        std::uint64_t gap = 0;
        for (unsigned shift = 0;; shift += 7) {
            int s = code_.decode(bits);
            if (s < 0) throw corrupt("invalid code");
            if (shift > 63) throw corrupt("gap too long");
            gap |= std::uint64_t(s & 0x7f) << shift;
            if (!(s & 0x80)) break;
        }
        std::uint64_t p = previous + gap;
        if (p < previous || p > chunk_end) throw corrupt("value leaves the chunk");
        visit(p);
        previous = p;
    }
    if ((bits.bits_consumed() + 7) / 8 != byte_offset_[c + 1] - byte_offset_[c]) throw corrupt("trailing bytes");
}

BlockRange EntropyCodedIndex::locate(BinId b) const {
    if (b.value < 1 || b.value > universe_)
        throw InvalidArgument("bin " + std::to_string(b.value) + " outside 1.." + std::to_string(universe_));
    const std::uint64_t c = (b.value - 1) / range_size_;
    std::uint64_t less = ones_before_[c];
    std::uint64_t at_most = ones_before_[c];
    decode_chunk(c, [&](std::uint64_t p) {
        less += p < b.value;
        at_most += p <= b.value;
    });
    std::uint64_t first = std::max<std::uint64_t>(1, less);
    std::uint64_t last = std::clamp<std::uint64_t>(at_most, first, count_);
    return {first, last};
}

std::vector<std::uint64_t> EntropyCodedIndex::decode() const {
    std::vector<std::uint64_t> out;
    out.reserve(count_);
    for (std::uint64_t c = 0; c < chunk_count(); ++c) decode_chunk(c, [&](std::uint64_t p) { out.push_back(p); });
    return out;
}

BitVector EntropyCodedIndex::to_bit_vector() const {
    BitVector bv(universe_ + count_ + 1);
    std::uint64_t i = 0;
    for (std::uint64_t c = 0; c < chunk_count(); ++c) decode_chunk(c, [&](std::uint64_t p) { bv.set(i++ + p - 1); });
    return bv;
}

std::uint64_t EntropyCodedIndex::size_bits() const {
    std::uint64_t header = 1 + 1 + 4 + 8 + 8 + 256 + 8;
    std::uint64_t directory = 8 * ones_before_.size();
    return 8 * (header + directory + data_.size());
}

void EntropyCodedIndex::serialize(detail::ByteWriter &out) const {
    out.u8(kCodecHuffmanGaps);
    out.u8(kVersion);
    out.u32(range_size_);
    out.u64(count_);
    out.u64(universe_);
    out.bytes(code_.lengths());
    out.u64(chunk_count());
    for (std::size_t c = 0; c < ones_before_.size(); ++c) {
        out.u32(ones_before_[c]);
        out.u32(byte_offset_[c]);
    }
    out.bytes(data_);
}

EntropyCodedIndex EntropyCodedIndex::deserialize(detail::ByteReader &in) {
    if (in.u8() != kCodecHuffmanGaps) throw FormatError("entropy-coded section: unknown codec");
    if (in.u8() != kVersion) throw FormatError("entropy-coded section: unsupported version");
    EntropyCodedIndex ec;
    ec.range_size_ = static_cast<std::uint32_t>(in.u32());
    ec.count_ = in.u64();
    ec.universe_ = in.u64();
    if (ec.range_size_ == 0 || ec.count_ == 0 || ec.universe_ == 0) throw FormatError("entropy-coded section: empty");
    std::array<std::uint8_t, 256> lengths{};
    auto raw = in.bytes(256);
    std::copy(raw.begin(), raw.end(), lengths.begin());
    ec.code_ = HuffmanCode::from_lengths(lengths);
    std::uint64_t chunks = in.u64();
    if (chunks != (ec.universe_ + ec.range_size_ - 1) / ec.range_size_ || chunks > in.remaining() / 8)
        throw FormatError("entropy-coded section: bad chunk count");
    ec.ones_before_.resize(chunks + 1);
    ec.byte_offset_.resize(chunks + 1);
    for (std::uint64_t c = 0; c <= chunks; ++c) {
        ec.ones_before_[c] = in.u32();
        ec.byte_offset_[c] = in.u32();
        if (c > 0 && (ec.ones_before_[c] < ec.ones_before_[c - 1] || ec.byte_offset_[c] < ec.byte_offset_[c - 1]))
            throw FormatError("entropy-coded section: directory not monotone");
    }
    if (ec.ones_before_[0] != 0 || ec.byte_offset_[0] != 0 || ec.ones_before_[chunks] != ec.count_)
        throw FormatError("entropy-coded section: directory does not cover the sequence");
    auto data = in.bytes(ec.byte_offset_[chunks]);
    ec.data_.assign(data.begin(), data.end());
    return ec;
}

bool operator==(const EntropyCodedIndex &x, const EntropyCodedIndex &y) {
    return x.count_ == y.count_ && x.universe_ == y.universe_ && x.range_size_ == y.range_size_ &&
           x.code_.lengths() == y.code_.lengths() && x.ones_before_ == y.ones_before_ &&
           x.byte_offset_ == y.byte_offset_ && x.data_ == y.data_;
}

}  // namespace pachash
