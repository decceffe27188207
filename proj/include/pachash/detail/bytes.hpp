#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "pachash/errors.hpp"

// Little-endian encode/decode helpers shared by the on-disk formats.

namespace pachash::detail {

inline void put_le(std::uint8_t *out, std::uint64_t v, unsigned bytes) {
    for (unsigned i = 0; i < bytes; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint64_t get_le(const std::uint8_t *in, unsigned bytes) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < bytes; ++i) v |= std::uint64_t(in[i]) << (8 * i);
    return v;
}

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t> &out) : out_(out) {}

    void u8(std::uint64_t v) { le(v, 1); }
    void u16(std::uint64_t v) { le(v, 2); }
    void u32(std::uint64_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void varint(std::uint64_t v) {
        while (v >= 0x80) {
            out_.push_back(static_cast<std::uint8_t>(v | 0x80));
            v >>= 7;
        }
        out_.push_back(static_cast<std::uint8_t>(v));
    }

private:
    void le(std::uint64_t v, unsigned n) {
        auto pos = out_.size();
        out_.resize(pos + n);
        put_le(out_.data() + pos, v, n);
    }
    std::vector<std::uint8_t> &out_;
};

/// Bounds-checked reader; every overrun raises FormatError naming `what`.
class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> in, std::string what) : in_(in), what_(std::move(what)) {}

    std::uint64_t u8() { return le(1); }
    std::uint64_t u16() { return le(2); }
    std::uint64_t u32() { return le(4); }
    std::uint64_t u64() { return le(8); }
    std::span<const std::uint8_t> bytes(std::uint64_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint64_t varint() {
        std::uint64_t v = 0;
        for (unsigned shift = 0; shift < 64; shift += 7) {
            need(1);
            std::uint8_t b = in_[pos_++];
            v |= std::uint64_t(b & 0x7f) << shift;
            if (!(b & 0x80)) return v;
        }
        throw FormatError(what_ + ": varint longer than 64 bits");
    }
    std::uint64_t position() const { return pos_; }
    std::uint64_t remaining() const { return in_.size() - pos_; }

private:
    void need(std::uint64_t n) const {
        if (n > in_.size() - pos_) throw FormatError(what_ + ": truncated");
    }
    std::uint64_t le(unsigned n) {
        need(n);
        auto v = get_le(in_.data() + pos_, n);
        pos_ += n;
        return v;
    }
    std::span<const std::uint8_t> in_;
    std::uint64_t pos_ = 0;
    std::string what_;
};

}  // namespace pachash::detail
