#include "pachash/params.hpp"

#include <cstdio>

#include "pachash/errors.hpp"

namespace pachash {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Key Key::from_hex(std::string_view hex) {
    if (hex.size() != 16) throw InvalidArgument("key must be 16 hex digits, got '" + std::string(hex) + "'");
    Key k;
    for (std::size_t i = 0; i < 8; ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw InvalidArgument("key contains a non-hex digit: '" + std::string(hex) + "'");
        k.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return k;
}

std::string Key::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (std::size_t i = 0; i < 8; ++i) {
        s[2 * i] = digits[bytes[i] >> 4];
        s[2 * i + 1] = digits[bytes[i] & 15];
    }
    return s;
}

void StoreParams::validate() const {
    if (!is_power_of_two(a)) throw InvalidArgument("a must be a power of two >= 1");
    if (m == 0) throw InvalidArgument("m must be >= 1");
    if (block_size_bytes < kMinBlockSize || block_size_bytes > kMaxBlockSize)
        throw InvalidArgument("block size must lie in 64..65536 bytes");
    if (total_payload_bytes > m * std::uint64_t(payload_capacity_bytes()))
        throw InvalidArgument("payload does not fit into m blocks");
}

}  // namespace pachash
