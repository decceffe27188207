#include "pachash/elias_fano.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "pachash/errors.hpp"

namespace pachash {

unsigned EliasFanoIndex::lower_width_for(std::uint64_t count, std::uint64_t universe) {
    if (universe <= count) return 0;
    return static_cast<unsigned>(std::bit_width(universe / count) - 1);
}

std::uint64_t EliasFanoIndex::upper_length(std::uint64_t count, std::uint64_t universe, unsigned width) {
    // count ones plus ((universe-1) >> width) + 2 zeros, i.e. 2k+1 bits for universe = a·k.
    return count + ((universe - 1) >> width) + 2;
}

EliasFanoIndex EliasFanoIndex::build(std::span<const std::uint64_t> values, std::uint64_t universe) {
    if (values.empty()) throw InvalidArgument("Elias-Fano sequence must not be empty");
    if (universe == 0) throw InvalidArgument("Elias-Fano universe must be >= 1");

    EliasFanoIndex ef;
    ef.count_ = values.size();
    ef.universe_ = universe;
    unsigned width = lower_width_for(ef.count_, universe);
    ef.lower_ = PackedArray(ef.count_, width);
    BitVector upper(upper_length(ef.count_, universe, width));

    std::uint64_t previous = 1;
    for (std::uint64_t i = 0; i < values.size(); ++i) {
        std::uint64_t p = values[i];
        if (p < 1 || p > universe)
            throw InvalidArgument("value " + std::to_string(p) + " at position " + std::to_string(i + 1) +
                                  " outside 1.." + std::to_string(universe));
        if (p < previous)
            throw InvalidArgument("sequence decreases at position " + std::to_string(i + 1));
        previous = p;
        std::uint64_t v = p - 1;
        ef.lower_.set(i, v);
        upper.set(i + (v >> width));
    }
    ef.upper_ = BitVectorWithSelect(std::move(upper));
    return ef;
}

std::uint64_t EliasFanoIndex::get(std::uint64_t i) const {
    if (i < 1 || i > count_) throw InvalidArgument("Elias-Fano position " + std::to_string(i) + " out of range");
    std::uint64_t high = upper_.select1(i) - (i - 1);
    return ((high << lower_.width()) | lower_.get(i - 1)) + 1;
}

std::vector<std::uint64_t> EliasFanoIndex::decode() const {
    std::vector<std::uint64_t> out;
    out.reserve(count_);
    const auto &bits = upper_.bits();
    std::uint64_t high = 0;
    for (std::uint64_t pos = 0; pos < bits.size() && out.size() < count_; ++pos) {
        if (bits.get(pos))
            out.push_back(((high << lower_.width()) | lower_.get(out.size())) + 1);
        else
            ++high;
    }
    return out;
}

std::uint64_t EliasFanoIndex::count_at_most(std::uint64_t b, std::uint64_t *scanned) const {
    if (b == 0) return 0;
    if (b >= universe_) return count_;
    const unsigned width = lower_.width();
    const std::uint64_t v = b - 1;
    const std::uint64_t high = v >> width;
    const std::uint64_t low = width == 0 ? 0 : v & ((std::uint64_t(1) << width) - 1);

    // The cluster of values with high part `high` starts right after the
    // high-th 0-bit; its entries are the 1-bits up to the next 0-bit.
    std::uint64_t pos = high == 0 ? 0 : upper_.select0(high) + 1;
    const auto &bits = upper_.bits();
    std::uint64_t inspected = 0;
    while (pos < bits.size() && bits.get(pos)) {
        std::uint64_t index = pos - high;  // 0-based element index
        ++inspected;
        if (lower_.get(index) > low) break;
        ++pos;
    }
    if (scanned) *scanned += inspected;
    // Elements before `pos` in the upper vector: pos - high of them.
    return pos - high;
}

std::uint64_t EliasFanoIndex::count_less(std::uint64_t b, std::uint64_t *scanned) const {
    return b <= 1 ? 0 : count_at_most(b - 1, scanned);
}

std::optional<EliasFanoIndex::Predecessor> EliasFanoIndex::predecessor(std::uint64_t b,
                                                                       std::uint64_t *scanned) const {
    std::uint64_t c = count_at_most(b, scanned);
    if (c == 0) return std::nullopt;
    return Predecessor{c, get(c)};
}

BlockRange EliasFanoIndex::locate(BinId b) const {
    if (b.value < 1 || b.value > universe_)
        throw InvalidArgument("bin " + std::to_string(b.value) + " outside 1.." + std::to_string(universe_));
    std::uint64_t first = std::max<std::uint64_t>(1, count_less(b.value));
    std::uint64_t last = std::clamp<std::uint64_t>(count_at_most(b.value), first, count_);
    return {first, last};
}

void EliasFanoIndex::serialize(detail::ByteWriter &out) const {
    out.u64(count_);
    out.u64(universe_);
    out.u8(lower_.width());
    out.bytes(lower_.to_bytes());
    out.bytes(upper_.bits().to_bytes());
}

EliasFanoIndex EliasFanoIndex::deserialize(detail::ByteReader &in) {
    EliasFanoIndex ef;
    ef.count_ = in.u64();
    ef.universe_ = in.u64();
    auto width = static_cast<unsigned>(in.u8());
    if (ef.count_ == 0 || ef.universe_ == 0) throw FormatError("Elias-Fano section: empty sequence");
    if (ef.count_ > (std::uint64_t(1) << 48) || ef.universe_ > (std::uint64_t(1) << 56))
        throw FormatError("Elias-Fano section: implausible size");
    if (width != lower_width_for(ef.count_, ef.universe_)) throw FormatError("Elias-Fano section: bad lower width");
    std::uint64_t lower_bytes = (ef.count_ * width + 7) / 8;
    ef.lower_ = PackedArray::from_bytes(in.bytes(lower_bytes), ef.count_, width);
    std::uint64_t upper_bits = upper_length(ef.count_, ef.universe_, width);
    ef.upper_ = BitVectorWithSelect(BitVector::from_bytes(in.bytes((upper_bits + 7) / 8), upper_bits));
    if (ef.upper_.ones() != ef.count_) throw FormatError("Elias-Fano section: upper bits disagree with count");
    if (ef.get(ef.count_) > ef.universe_) throw FormatError("Elias-Fano section: value beyond universe");
    return ef;
}

}  // namespace pachash
