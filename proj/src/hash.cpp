#include "pachash/hash.hpp"

#include <sodium.h>

#include <cstring>

#include "pachash/errors.hpp"

namespace pachash {

namespace {

struct SodiumInit {
    SodiumInit() {
        if (sodium_init() < 0) throw Error("libsodium initialisation failed");
    }
};

void store_le64(unsigned char *out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

}  // namespace

std::uint64_t hash64(const Key &key, std::uint64_t seed) {
    static const SodiumInit init;
    static_assert(crypto_shorthash_siphash24_KEYBYTES == 16);
    unsigned char k[crypto_shorthash_siphash24_KEYBYTES];
    store_le64(k, seed);
    store_le64(k + 8, seed ^ 0x9E3779B97F4A7C15ULL);
    unsigned char out[crypto_shorthash_siphash24_BYTES];
    crypto_shorthash_siphash24(out, key.bytes.data(), key.bytes.size(), k);
    std::uint64_t h = 0;
    for (int i = 0; i < 8; ++i) h |= std::uint64_t(out[i]) << (8 * i);
    return h;
}

BinId hash_to_bin(const Key &key, std::uint64_t seed, std::uint64_t num_bins) {
    if (num_bins == 0) throw InvalidArgument("hash_to_bin: num_bins must be >= 1");
    return scale_to_bin(hash64(key, seed), num_bins);
}

}  // namespace pachash
