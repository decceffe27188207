#include "pachash/theory.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pachash/errors.hpp"

namespace pachash {

TheoryModel::TheoryModel(StoreParams params, double payload_bits_per_block)
    : params_(params), payload_bits_(payload_bits_per_block) {
    if (!(payload_bits_ > 0)) throw InvalidArgument("payload bits per block must be positive");
    if (payload_bits_ > 8.0 * params_.block_size_bytes)
        throw InvalidArgument("payload bits per block exceed the block size");
    if (params_.a == 0) throw InvalidArgument("a must be >= 1");
}

double TheoryModel::expected_blocks(double object_bits) const {
    return 1.0 + object_bits / payload_bits_ + 1.0 / params_.a;
}

double TheoryModel::objects_per_bin() const {
    double total_bits = 8.0 * static_cast<double>(params_.total_payload_bytes);
    if (total_bits <= 0) throw InvalidArgument("refined bound needs a non-empty store (N = 0)");
    return static_cast<double>(params_.n) * payload_bits_ / (total_bits * params_.a);
}

double TheoryModel::expected_blocks_refined(double object_bits, std::uint64_t gcd_sizes_bits) const {
    if (gcd_sizes_bits == 0) throw InvalidArgument("gcd of sizes must be >= 1 bit");
    double beta = objects_per_bin();
    double c = static_cast<double>(gcd_sizes_bits);
    return 1.0 + (object_bits - c + 1.0 - std::exp(-beta)) / payload_bits_ + 1.0 / params_.a;
}

std::uint64_t ef_index_bits(std::uint64_t m, std::uint32_t a) {
    if (m == 0 || !is_power_of_two(a)) throw InvalidArgument("ef_index_bits: need m >= 1 and a power of two");
    auto log_a = static_cast<std::uint64_t>(std::countr_zero(a));
    return m * (2 + log_a) + 1;
}

double succincter_bound_bits_per_block(std::uint64_t a) {
    if (a == 0) throw InvalidArgument("succincter bound: a must be >= 1");
    return 1.4427 + std::log2(static_cast<double>(a) + 1.0);
}

double mkphf_lower_bound_bits_per_block(std::uint64_t k) {
    if (k == 0) throw InvalidArgument("MkPHF bound: k must be >= 1");
    return 0.5 * std::log2(2.0 * std::numbers::pi * static_cast<double>(k));
}

LogBounds binomial_log_bounds(double c, std::uint64_t n) {
    if (!(c > 1.0)) throw InvalidArgument("binomial bounds need c > 1");
    if (n == 0) throw InvalidArgument("binomial bounds need n >= 1");
    const double nd = static_cast<double>(n);
    // log2 f(c,n) = ½·log2(c / ((c-1)·2πn)) + n·(c·log2 c - (c-1)·log2(c-1))
    double per_n = c * std::log2(c) - (c - 1.0) * std::log2(c - 1.0);
    double log_f = 0.5 * std::log2(c / ((c - 1.0) * 2.0 * std::numbers::pi * nd)) + nd * per_n;

    double shrink = 1.0 - (c * c - c + 1.0) / (12.0 * c * (c - 1.0) * nd);
    LogBounds b;
    b.lower_log2 = shrink > 0 ? log_f + std::log2(shrink) : -std::numeric_limits<double>::infinity();
    b.upper_log2 = log_f - std::numbers::log2e / (12.0 * nd + 1.0);
    return b;
}

}  // namespace pachash
