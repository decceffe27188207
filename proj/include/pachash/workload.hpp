#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pachash/builder.hpp"

namespace pachash {

enum class SizeDistribution { kIdentical, kNormal, kUniform };

/// Synthetic objects: random unique 8-byte keys, random value bytes, sizes
/// from one of three distributions. Normal sizes have mean `size` and
/// variance size/5, rounded and raised to at least 1.
struct WorkloadSpec {
    std::uint64_t n = 0;
    SizeDistribution distribution = SizeDistribution::kIdentical;
    std::uint64_t size = 64;
    std::uint64_t lo = 1;
    std::uint64_t hi = 100;
    std::uint64_t seed = 1;

    /// "identical:S", "normal:S" or "uniform:LO:HI".
    static WorkloadSpec parse(std::uint64_t n, const std::string &distribution, std::uint64_t seed);
    std::string describe() const;
    void validate() const;
};

std::vector<std::uint64_t> generate_sizes(const WorkloadSpec &spec);
std::vector<InputObject> generate(const WorkloadSpec &spec);

/// count random keys not present in `present`.
std::vector<Key> generate_absent_keys(std::span<const InputObject> present, std::uint64_t count, std::uint64_t seed);

/// Binary records: [key 8 bytes][value length u32 LE][value].
void write_binary_records(std::ostream &out, std::span<const InputObject> objects);
std::vector<InputObject> read_binary_records(std::istream &in);

/// Text records: one per line, 16 hex digits, a tab, the value.
void write_text_records(std::ostream &out, std::span<const InputObject> objects);
std::vector<InputObject> read_text_records(std::istream &in);

}  // namespace pachash
