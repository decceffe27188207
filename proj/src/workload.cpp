#include "pachash/workload.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <unordered_set>

#include "pachash/detail/bytes.hpp"
#include "pachash/errors.hpp"

namespace pachash {

namespace {

std::uint64_t parse_u64(const std::string &text, const std::string &what) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used, 10);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != text.size() || text[0] == '-') throw InvalidArgument("bad " + what + ": '" + text + "'");
    return v;
}

}  // namespace

WorkloadSpec WorkloadSpec::parse(std::uint64_t n, const std::string &distribution, std::uint64_t seed) {
    std::vector<std::string> parts;
    std::stringstream ss(distribution);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    WorkloadSpec spec;
    spec.n = n;
    spec.seed = seed;
    if (parts.size() == 2 && parts[0] == "identical") {
        spec.distribution = SizeDistribution::kIdentical;
        spec.size = parse_u64(parts[1], "size");
    } else if (parts.size() == 2 && parts[0] == "normal") {
        spec.distribution = SizeDistribution::kNormal;
        spec.size = parse_u64(parts[1], "size");
    } else if (parts.size() == 3 && parts[0] == "uniform") {
        spec.distribution = SizeDistribution::kUniform;
        spec.lo = parse_u64(parts[1], "lower size");
        spec.hi = parse_u64(parts[2], "upper size");
    } else {
        throw InvalidArgument("distribution must be identical:S, normal:S or uniform:LO:HI, got '" + distribution + "'");
    }
    spec.validate();
    return spec;
}

std::string WorkloadSpec::describe() const {
    switch (distribution) {
        case SizeDistribution::kIdentical: return "identical:" + std::to_string(size);
        case SizeDistribution::kNormal: return "normal:" + std::to_string(size);
        case SizeDistribution::kUniform: return "uniform:" + std::to_string(lo) + ":" + std::to_string(hi);
    }
    return "?";
}

void WorkloadSpec::validate() const {
    if (distribution == SizeDistribution::kUniform) {
        if (lo < 1 || lo > hi) throw InvalidArgument("uniform sizes need 1 <= lo <= hi");
    } else if (size < 1) {
        throw InvalidArgument("object size must be >= 1");
    }
    if (std::max(size, hi) > 0xFFFFFFFFu) throw InvalidArgument("object size exceeds 2^32-1 bytes");
}

std::vector<std::uint64_t> generate_sizes(const WorkloadSpec &spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed ^ 0x5157u);
    std::vector<std::uint64_t> sizes(spec.n);
    switch (spec.distribution) {
        case SizeDistribution::kIdentical:
            std::fill(sizes.begin(), sizes.end(), spec.size);
            break;
        case SizeDistribution::kNormal: {
            std::normal_distribution<double> dist(double(spec.size), std::sqrt(double(spec.size) / 5.0));
            for (auto &s : sizes) s = static_cast<std::uint64_t>(std::max(1.0, std::round(dist(rng))));
            break;
        }
        case SizeDistribution::kUniform: {
            std::uniform_int_distribution<std::uint64_t> dist(spec.lo, spec.hi);
            for (auto &s : sizes) s = dist(rng);
            break;
        }
    }
    return sizes;
}

std::vector<InputObject> generate(const WorkloadSpec &spec) {
    auto sizes = generate_sizes(spec);
    std::mt19937_64 rng(spec.seed);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(spec.n);
    std::vector<InputObject> out(spec.n);
    for (std::uint64_t i = 0; i < spec.n; ++i) {
        std::uint64_t k;
        do k = rng();
        while (!seen.insert(k).second);
        out[i].key = Key::from_u64(k);
        out[i].value.resize(sizes[i]);
        for (std::size_t j = 0; j < sizes[i]; j += 8) {
            std::uint64_t r = rng();
            for (std::size_t b = j; b < std::min<std::size_t>(j + 8, sizes[i]); ++b, r >>= 8)
                out[i].value[b] = static_cast<std::uint8_t>(r);
        }
    }
    return out;
}

std::vector<Key> generate_absent_keys(std::span<const InputObject> present, std::uint64_t count, std::uint64_t seed) {
    std::unordered_set<std::uint64_t> used;
    used.reserve(present.size() + count);
    for (const auto &x : present) used.insert(x.key.to_u64());
    std::mt19937_64 rng(seed ^ 0xABu);
    std::vector<Key> out;
    out.reserve(count);
    while (out.size() < count) {
        std::uint64_t k = rng();
        if (used.insert(k).second) out.push_back(Key::from_u64(k));
    }
    return out;
}

void write_binary_records(std::ostream &out, std::span<const InputObject> objects) {
    std::uint8_t len[4];
    for (const auto &x : objects) {
        if (x.value.size() > 0xFFFFFFFFu) throw InvalidArgument("value of key " + x.key.to_hex() + " too long for a record");
        out.write(reinterpret_cast<const char *>(x.key.bytes.data()), 8);
        detail::put_le(len, x.value.size(), 4);
        out.write(reinterpret_cast<const char *>(len), 4);
        out.write(reinterpret_cast<const char *>(x.value.data()), static_cast<std::streamsize>(x.value.size()));
    }
    if (!out) throw IoError("writing records failed");
}

std::vector<InputObject> read_binary_records(std::istream &in) {
    std::vector<InputObject> out;
    for (std::uint64_t record = 1;; ++record) {
        InputObject x;
        in.read(reinterpret_cast<char *>(x.key.bytes.data()), 8);
        if (in.gcount() == 0 && in.eof()) break;
        std::uint8_t len[4];
        if (in.gcount() == 8) in.read(reinterpret_cast<char *>(len), 4);
        if (!in) throw FormatError("record " + std::to_string(record) + ": truncated header");
        x.value.resize(detail::get_le(len, 4));
        in.read(reinterpret_cast<char *>(x.value.data()), static_cast<std::streamsize>(x.value.size()));
        if (!in && !x.value.empty()) throw FormatError("record " + std::to_string(record) + ": truncated value");
        out.push_back(std::move(x));
    }
    return out;
}

void write_text_records(std::ostream &out, std::span<const InputObject> objects) {
    for (const auto &x : objects) {
        for (auto c : x.value)
            if (c == '\t' || c == '\n') throw InvalidArgument("text records cannot hold tabs or newlines");
        out << x.key.to_hex() << '\t';
        out.write(reinterpret_cast<const char *>(x.value.data()), static_cast<std::streamsize>(x.value.size()));
        out << '\n';
    }
}

std::vector<InputObject> read_text_records(std::istream &in) {
    std::vector<InputObject> out;
    std::string line;
    for (std::uint64_t number = 1; std::getline(in, line); ++number) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError("line " + std::to_string(number) + ": missing tab");
        InputObject x;
        try {
            x.key = Key::from_hex(line.substr(0, tab));
        } catch (const InvalidArgument &e) {
            throw FormatError("line " + std::to_string(number) + ": " + e.what());
        }
        x.value.assign(line.begin() + tab + 1, line.end());
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace pachash
