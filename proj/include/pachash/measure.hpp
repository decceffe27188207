#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "pachash/params.hpp"
#include "pachash/store.hpp"
#include "pachash/theory.hpp"

namespace pachash {

struct IoStats {
    std::uint64_t query_count = 0;
    double mean_blocks = 0;
    double mean_bytes = 0;
    std::map<std::uint64_t, std::uint64_t> blocks_histogram;
};

struct WorkloadQuery {
    Key key;
    bool present = false;
    std::uint64_t size_bytes = 0;  // stored value size; 0 for absent keys
};

/// One object size: measured mean bytes fetched next to the model.
struct IoRow {
    std::uint64_t size_bytes = 0;
    std::uint64_t queries = 0;
    double measured_bytes = 0;
    double mean_blocks = 0;
    double stderr_blocks = 0;
    double theory_bytes = 0;
    double refined_bytes = 0;
};

struct IoReport {
    IoStats stats;
    std::vector<IoRow> rows;
    std::uint64_t errors = 0;
    std::uint64_t wrong_outcomes = 0;  // found/absent disagreeing with the workload

    /// Header "size,measured_bytes,theory_bytes,refined_bytes", one row per size.
    void write_csv(std::ostream &out) const;
};

IoStats summarize(std::span<const QueryResult> results);

/// Runs the workload through query_batch. Rows use the exact stored size of
/// each object (absent keys under size 0); the model values are
/// expected_blocks(8·size)·B and the refined bound with c = gcd of the present
/// sizes in bits.
IoReport measure_io(const Store &store, std::span<const WorkloadQuery> workload, const TheoryModel &theory,
                    unsigned max_in_flight = 128);

}  // namespace pachash
