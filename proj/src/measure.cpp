#include "pachash/measure.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>

namespace pachash {

IoStats summarize(std::span<const QueryResult> results) {
    IoStats s;
    double blocks = 0, bytes = 0;
    for (const auto &r : results) {
        ++s.query_count;
        blocks += double(r.blocks_fetched);
        bytes += double(r.bytes_fetched);
        ++s.blocks_histogram[r.blocks_fetched];
    }
    if (s.query_count > 0) {
        s.mean_blocks = blocks / double(s.query_count);
        s.mean_bytes = bytes / double(s.query_count);
    }
    return s;
}

IoReport measure_io(const Store &store, std::span<const WorkloadQuery> workload, const TheoryModel &theory,
                    unsigned max_in_flight) {
    std::vector<Key> keys;
    keys.reserve(workload.size());
    std::uint64_t gcd_bytes = 0;
    for (const auto &q : workload) {
        keys.push_back(q.key);
        if (q.present) gcd_bytes = std::gcd(gcd_bytes, q.size_bytes);
    }
    auto items = store.query_batch(keys, max_in_flight);

    IoReport report;
    std::vector<QueryResult> ok;
    ok.reserve(items.size());
    struct Bucket {
        std::uint64_t count = 0;
        double blocks = 0, blocks_sq = 0, bytes = 0;
    };
    std::map<std::uint64_t, Bucket> buckets;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!items[i].error_code.empty()) {
            ++report.errors;
            continue;
        }
        const QueryResult &r = items[i].result;
        if (r.found != workload[i].present) ++report.wrong_outcomes;
        ok.push_back(r);
        Bucket &b = buckets[workload[i].present ? workload[i].size_bytes : 0];
        ++b.count;
        b.blocks += double(r.blocks_fetched);
        b.blocks_sq += double(r.blocks_fetched) * double(r.blocks_fetched);
        b.bytes += double(r.bytes_fetched);
    }
    report.stats = summarize(ok);

    const double bs = store.header().block_size;
    const bool refined_ok = store.header().total_payload_bytes > 0;
    const std::uint64_t c_bits = std::max<std::uint64_t>(1, 8 * gcd_bytes);
    for (const auto &[size, b] : buckets) {
        IoRow row;
        row.size_bytes = size;
        row.queries = b.count;
        row.measured_bytes = b.bytes / double(b.count);
        row.mean_blocks = b.blocks / double(b.count);
        if (b.count > 1) {
            double var = (b.blocks_sq - b.blocks * b.blocks / double(b.count)) / double(b.count - 1);
            row.stderr_blocks = std::sqrt(std::max(0.0, var) / double(b.count));
        }
        row.theory_bytes = theory.expected_blocks(8.0 * double(size)) * bs;
        row.refined_bytes = refined_ok ? theory.expected_blocks_refined(8.0 * double(size), c_bits) * bs : row.theory_bytes;
        report.rows.push_back(row);
    }
    return report;
}

void IoReport::write_csv(std::ostream &out) const {
    out << "size,measured_bytes,theory_bytes,refined_bytes\n";
    out << std::fixed << std::setprecision(2);
    for (const auto &r : rows)
        out << r.size_bytes << ',' << r.measured_bytes << ',' << r.theory_bytes << ',' << r.refined_bytes << '\n';
}

}  // namespace pachash
