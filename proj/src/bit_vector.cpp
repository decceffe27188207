#include "pachash/bit_vector.hpp"

#include <algorithm>
#include <bit>

#include "pachash/errors.hpp"

namespace pachash {

unsigned select_in_word(std::uint64_t word, unsigned r) {
    for (; r > 0; --r) word &= word - 1;
    return static_cast<unsigned>(std::countr_zero(word));
}

std::uint64_t BitVector::count_ones() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
}

std::vector<std::uint8_t> BitVector::to_bytes() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
    return out;
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::uint64_t size) {
    if (bytes.size() != (size + 7) / 8) throw FormatError("bit vector byte image has the wrong length");
    BitVector bv(size);
    for (std::size_t i = 0; i < bytes.size(); ++i) bv.words_[i / 8] |= std::uint64_t(bytes[i]) << (8 * (i % 8));
    if (size % 64 != 0 && !bv.words_.empty() && (bv.words_.back() >> (size % 64)) != 0)
        throw FormatError("bit vector has bits set past its end");
    return bv;
}

BitVectorWithSelect::BitVectorWithSelect(BitVector bits) : bits_(std::move(bits)) {
    auto words = bits_.words();
    std::uint64_t ones_before = 0;
    std::uint64_t next_one = 1;   // rank of the next 1-bit to sample
    std::uint64_t next_zero = 1;  // rank of the next 0-bit to sample
    for (std::uint64_t w = 0; w < words.size(); ++w) {
        std::uint64_t valid = std::min<std::uint64_t>(64, bits_.size() - 64 * w);
        auto ones = static_cast<std::uint64_t>(std::popcount(words[w]));
        std::uint64_t zeros = valid - ones;
        std::uint64_t zeros_before = 64 * w - ones_before;
        while (next_one <= ones_before + ones) {
            ones_samples_.push_back({w, ones_before});
            next_one += kSampleRate;
        }
        while (next_zero <= zeros_before + zeros) {
            zeros_samples_.push_back({w, zeros_before});
            next_zero += kSampleRate;
        }
        ones_before += ones;
    }
    ones_ = ones_before;
}

template <bool kOnes>
std::uint64_t BitVectorWithSelect::select(std::uint64_t r, const std::vector<Sample> &samples) const {
    const auto &s = samples[(r - 1) / kSampleRate];
    auto words = bits_.words();
    std::uint64_t before = s.before;
    for (std::uint64_t w = s.word; w < words.size(); ++w) {
        std::uint64_t word = kOnes ? words[w] : ~words[w];
        auto c = static_cast<std::uint64_t>(std::popcount(word));
        if (before + c >= r) return 64 * w + select_in_word(word, static_cast<unsigned>(r - before - 1));
        before += c;
    }
    throw IntegrityError("select ran past the end of the bit vector");
}

std::uint64_t BitVectorWithSelect::select1(std::uint64_t r) const {
    if (r == 0 || r > ones_) throw InvalidArgument("select1 rank out of range");
    return select<true>(r, ones_samples_);
}

std::uint64_t BitVectorWithSelect::select0(std::uint64_t r) const {
    if (r == 0 || r > zeros()) throw InvalidArgument("select0 rank out of range");
    return select<false>(r, zeros_samples_);
}

std::uint64_t BitVectorWithSelect::select_support_bits() const {
    return 128 * (ones_samples_.size() + zeros_samples_.size());
}

PackedArray::PackedArray(std::uint64_t size, unsigned width)
    : words_((size * width + 63) / 64, 0), size_(size), width_(width) {
    if (width > 64) throw InvalidArgument("packed array width exceeds 64 bits");
}

std::uint64_t PackedArray::get(std::uint64_t i) const {
    if (width_ == 0) return 0;
    std::uint64_t pos = i * width_;
    std::uint64_t word = pos >> 6;
    unsigned shift = pos & 63;
    std::uint64_t v = words_[word] >> shift;
    if (shift + width_ > 64) v |= words_[word + 1] << (64 - shift);
    return width_ == 64 ? v : v & ((std::uint64_t(1) << width_) - 1);
}

void PackedArray::set(std::uint64_t i, std::uint64_t value) {
    if (width_ == 0) return;
    std::uint64_t mask = width_ == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << width_) - 1;
    value &= mask;
    std::uint64_t pos = i * width_;
    std::uint64_t word = pos >> 6;
    unsigned shift = pos & 63;
    words_[word] = (words_[word] & ~(mask << shift)) | (value << shift);
    if (shift + width_ > 64) {
        unsigned spill = 64 - shift;
        words_[word + 1] = (words_[word + 1] & ~(mask >> spill)) | (value >> spill);
    }
}

std::vector<std::uint8_t> PackedArray::to_bytes() const {
    std::vector<std::uint8_t> out((size_bits() + 7) / 8);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
    return out;
}

PackedArray PackedArray::from_bytes(std::span<const std::uint8_t> bytes, std::uint64_t size, unsigned width) {
    PackedArray a(size, width);
    if (bytes.size() != (a.size_bits() + 7) / 8) throw FormatError("packed array byte image has the wrong length");
    for (std::size_t i = 0; i < bytes.size(); ++i) a.words_[i / 8] |= std::uint64_t(bytes[i]) << (8 * (i % 8));
    return a;
}

}  // namespace pachash
