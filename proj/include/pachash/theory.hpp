#pragma once

#include <cstdint>

#include "pachash/params.hpp"

// Closed-form cost and space formulas of the packed hash table. All evaluators
// work in doubles; exact checks live in the tests.

namespace pachash {

struct LogBounds {
    double lower_log2 = 0;
    double upper_log2 = 0;
};

class TheoryModel {
public:
    /// payload_bits_per_block is the usable payload per block in bits and
    /// must not exceed 8 * block size.
    TheoryModel(StoreParams params, double payload_bits_per_block);

    /// Model that treats the whole block as payload, ignoring per-block tables.
    static TheoryModel full_block(const StoreParams &params) {
        return TheoryModel(params, 8.0 * params.block_size_bytes);
    }

    const StoreParams &params() const { return params_; }
    double payload_bits_per_block() const { return payload_bits_; }

    /// Expected blocks fetched for an object of object_bits bits:
    /// 1 + |x|/B̄ + 1/a. Zero bits gives the cost of a negative query.
    double expected_blocks(double object_bits) const;

    /// Tighter estimate 1 + (|x| - c + 1 - e^-β)/B̄ + 1/a with β = n·B̄/(N·a)
    /// the mean number of objects per bin and c = gcd_sizes_bits.
    /// Throws InvalidArgument when the store holds no payload.
    double expected_blocks_refined(double object_bits, std::uint64_t gcd_sizes_bits) const;

    /// β = n·B̄/(N·a).
    double objects_per_bin() const;

private:
    StoreParams params_;
    double payload_bits_;
};

/// m·(2 + log2 a) + 1: Elias-Fano payload bits for m values below a·m,
/// excluding select support.
std::uint64_t ef_index_bits(std::uint64_t m, std::uint32_t a);

/// 1.4427 + log2(a + 1): per-block size of the index stored as a compressed
/// sparse bit vector with rank/select support.
double succincter_bound_bits_per_block(std::uint64_t a);

/// 0.5·log2(2πk): bits per block any minimal k-perfect hash function needs.
double mkphf_lower_bound_bits_per_block(std::uint64_t k);

/// Stirling brackets of log2 C(c·n, n). Requires c > 1 and n >= 1.
LogBounds binomial_log_bounds(double c, std::uint64_t n);

}  // namespace pachash
