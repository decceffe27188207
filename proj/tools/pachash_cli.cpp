// pachash: command-line front end for packed hash table stores.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "pachash/builder.hpp"
#include "pachash/errors.hpp"
#include "pachash/hash.hpp"
#include "pachash/measure.hpp"
#include "pachash/store.hpp"
#include "pachash/theory.hpp"
#include "pachash/vla.hpp"
#include "pachash/workload.hpp"

using namespace pachash;

namespace {

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char *digits = "0123456789abcdef";
    std::string s;
    s.reserve(2 * bytes.size());
    for (auto b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 15]);
    }
    return s;
}

std::vector<InputObject> read_input(const std::string &path, bool text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return text ? read_text_records(in) : read_binary_records(in);
}

IndexKind parse_index_kind(const std::string &name) {
    if (name == "ef") return IndexKind::kEliasFano;
    if (name == "ec") return IndexKind::kEntropyCoded;
    throw InvalidArgument("--index must be ef or ec");
}

void print_value(const std::vector<std::uint8_t> &value, bool raw) {
    if (raw) {
        std::cout.write(reinterpret_cast<const char *>(value.data()), static_cast<std::streamsize>(value.size()));
        std::cout << '\n';
    } else {
        std::cout << "value=" << to_hex(value) << '\n';
    }
}

std::string range_text(BlockRange r) { return std::to_string(r.first) + ".." + std::to_string(r.last); }

struct GenerateArgs {
    std::uint64_t n = 1000;
    std::string dist = "normal:64";
    std::uint64_t seed = 1;
    std::string out;
    bool text = false;
};

void cmd_generate(const GenerateArgs &args) {
    auto spec = WorkloadSpec::parse(args.n, args.dist, args.seed);
    auto objects = generate(spec);
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + args.out);
    if (args.text) {
        // Text values must avoid tabs and newlines; map bytes onto letters.
        for (auto &x : objects)
            for (auto &c : x.value) c = static_cast<std::uint8_t>('a' + c % 26);
        write_text_records(out, objects);
    } else {
        write_binary_records(out, objects);
    }
    std::cout << "generated " << objects.size() << " objects (" << spec.describe() << ") into " << args.out << '\n';
}

struct BuildArgs {
    std::string input, out;
    bool text = false;
    std::uint32_t a = 8;
    std::uint32_t block_size = 4096;
    std::string index = "ef";
    std::uint32_t range_size = EntropyCodedIndex::kDefaultRangeSize;
    std::uint64_t seed = 0;
};

BuildOptions options_of(const BuildArgs &args) {
    BuildOptions o;
    o.a = args.a;
    o.block_size = args.block_size;
    o.seed = args.seed;
    o.index = parse_index_kind(args.index);
    o.range_size = args.range_size;
    return o;
}

void report_built(const BuiltStore &s, const std::string &path) {
    const auto &h = s.header;
    std::cout << "wrote " << path << ": n=" << h.n << " m=" << h.m << " a=" << h.a << " block_size=" << h.block_size
              << " index=" << index_kind_name(h.index_kind) << " index_bits=" << s.index.size_bits() << '\n';
}

void cmd_build(const BuildArgs &args) {
    auto objects = read_input(args.input, args.text);
    auto store = build(objects, options_of(args));
    store.write(args.out);
    report_built(store, args.out);
}

struct QueryArgs {
    std::string store, key;
    bool raw = false;
    bool direct = false;
};

void cmd_query(const QueryArgs &args) {
    auto store = Store::open(args.store, {args.direct});
    auto r = store.query(Key::from_hex(args.key));
    std::cout << (r.found ? "found" : "not_found") << " bin=" << store.bin_of(Key::from_hex(args.key)).value
              << " range=" << range_text(r.range) << " blocks=" << r.blocks_fetched << " bytes=" << r.bytes_fetched;
    if (r.found) std::cout << " size=" << r.value.size();
    std::cout << '\n';
    if (r.found) print_value(r.value, args.raw);
}

struct BenchArgs {
    std::string store, out;
    std::uint64_t queries = 100000;
    double present_fraction = 1.0;
    unsigned in_flight = 128;
    std::uint64_t seed = 1;
    bool direct = false;
};

void cmd_bench(const BenchArgs &args) {
    if (args.present_fraction < 0 || args.present_fraction > 1) throw InvalidArgument("--present-fraction must be within 0..1");
    auto store = Store::open(args.store, {args.direct});
    auto objects = store.read_all_objects();
    std::mt19937_64 rng(args.seed);
    std::vector<InputObject> present;
    present.reserve(objects.size());
    for (auto &o : objects) present.push_back({o.key, {}});
    auto absent_count = static_cast<std::uint64_t>(std::llround(double(args.queries) * (1.0 - args.present_fraction)));
    if (objects.empty()) absent_count = args.queries;
    auto absent = generate_absent_keys(present, absent_count, args.seed);
    std::vector<WorkloadQuery> workload;
    workload.reserve(args.queries);
    std::uniform_int_distribution<std::size_t> pick(0, objects.empty() ? 0 : objects.size() - 1);
    for (const auto &k : absent) workload.push_back({k, false, 0});
    while (workload.size() < args.queries) {
        const auto &o = objects[pick(rng)];
        workload.push_back({o.key, true, o.value.size()});
    }
    std::shuffle(workload.begin(), workload.end(), rng);

    store.device().reset_counters();
    auto report = measure_io(store, workload, TheoryModel::full_block(store.params()), args.in_flight);
    auto io = store.device().counters();
    std::cout << std::fixed << std::setprecision(4) << "queries=" << report.stats.query_count
              << " mean_blocks=" << report.stats.mean_blocks << " mean_bytes=" << report.stats.mean_bytes
              << " reads=" << io.reads << " errors=" << report.errors << " wrong=" << report.wrong_outcomes << '\n';
    if (!args.out.empty()) {
        std::ofstream out(args.out, std::ios::trunc);
        if (!out) throw IoError("cannot create " + args.out);
        report.write_csv(out);
        std::cout << "wrote " << args.out << '\n';
    } else {
        report.write_csv(std::cout);
    }
    if (report.errors > 0 || report.wrong_outcomes > 0) throw IntegrityError("benchmark saw failed or wrong queries");
}

struct MergeArgs {
    std::string first, second, out, index;
    std::uint32_t range_size = EntropyCodedIndex::kDefaultRangeSize;
};

void cmd_merge(const MergeArgs &args) {
    auto x = Store::open(args.first);
    auto y = Store::open(args.second);
    BuildOptions o;
    o.index = args.index.empty() ? x.header().index_kind : parse_index_kind(args.index);
    o.range_size = args.range_size;
    auto merged = merge(x, y, o);
    merged.write(args.out);
    report_built(merged, args.out);
}

struct RebuildArgs {
    std::string store, out;
};

void cmd_rebuild_index(const RebuildArgs &args) {
    auto store = Store::open(args.store);
    auto index = rebuild_index(store);
    bool same = index == store.index();
    std::cout << "rebuilt index: " << index.size_bits() << " bits, " << (same ? "identical to" : "differs from")
              << " the stored index\n";
    if (!args.out.empty()) {
        std::vector<std::uint8_t> image = store.header().encode();
        image.resize(store.header().index_offset);
        for (BlockId id = 1; id <= store.header().m; ++id) {
            auto block = store.device().read_range({id, id});
            std::copy(block.begin(), block.end(), image.begin() + id * store.header().block_size);
        }
        detail::ByteWriter w(image);
        index.serialize(w);
        std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char *>(image.data()), static_cast<std::streamsize>(image.size()));
        if (!out.flush()) throw IoError("cannot write " + args.out);
        std::cout << "wrote " << args.out << '\n';
    } else if (!same) {
        throw IntegrityError("stored index does not match the data blocks");
    }
}

void print_header(const StoreHeader &h, std::uint64_t index_bytes) {
    std::cout << "magic " << StoreHeader::kMagic << '\n'
              << "version " << h.version << '\n'
              << "block_size " << h.block_size << '\n'
              << "a " << h.a << '\n'
              << "m " << h.m << '\n'
              << "n " << h.n << '\n'
              << "total_payload_bytes " << h.total_payload_bytes << '\n'
              << "hash_seed " << h.hash_seed << '\n'
              << "index_kind " << static_cast<int>(h.index_kind) << " (" << index_kind_name(h.index_kind) << ")\n"
              << "index_offset " << h.index_offset << '\n'
              << "index_bytes " << index_bytes << '\n';
}

std::string join(const std::vector<std::uint64_t> &v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

struct InspectArgs {
    std::string store;
    std::uint64_t max_blocks = 64;
};

void inspect_vla(const InspectArgs &args) {
    auto store = VlaStore::open(args.store);
    const auto &h = store.header();
    std::ifstream f(args.store, std::ios::binary | std::ios::ate);
    print_header(h, static_cast<std::uint64_t>(f.tellg()) - h.index_offset);
    std::cout << "index_bits " << store.index().size_bits() << '\n'
              << "p " << join(store.index().decode()) << '\n';
    for (BlockId id = 1; id <= std::min(h.m, args.max_blocks); ++id) {
        auto info = store.block_info(id);
        std::cout << "block " << id << " prev_count=" << info.prev_count << " first_start=";
        if (info.first_start == VlaStore::kNoStart)
            std::cout << "none\n";
        else
            std::cout << info.first_start << '\n';
    }
    if (h.m > args.max_blocks) std::cout << "... " << h.m - args.max_blocks << " more blocks\n";
}

void cmd_inspect(const InspectArgs &args) {
    std::vector<std::uint8_t> head(StoreHeader::kEncodedBytes);
    {
        std::ifstream f(args.store, std::ios::binary);
        if (!f) throw IoError("cannot open " + args.store);
        f.read(reinterpret_cast<char *>(head.data()), static_cast<std::streamsize>(head.size()));
        if (!f) throw FormatError(args.store + " is too short for a store header");
    }
    if (StoreHeader::decode(head).index_kind == IndexKind::kVla) return inspect_vla(args);

    auto store = Store::open(args.store);
    const auto &h = store.header();
    print_header(h, store.index_section_bytes());
    std::cout << "index_bits " << store.index().size_bits() << '\n';
    auto p = store.index().decode();
    if (p.size() <= 64) std::cout << "p " << join(p) << '\n';

    std::map<BlockId, BlockImage> cache;
    auto image = [&](BlockId id) -> const BlockImage & {
        auto it = cache.find(id);
        if (it == cache.end()) it = cache.emplace(id, store.read_block(id)).first;
        return it->second;
    };
    auto object_length = [&](BlockId id, std::size_t e) {
        std::vector<BlockImage> images{image(id)};
        while (true) {
            try {
                return extract_value(images, id, h.m, 0, e).size();
            } catch (const IntegrityError &) {
                if (id + images.size() > h.m) throw;
                images.push_back(image(id + images.size()));
            }
        }
    };
    const std::uint64_t bins = std::uint64_t(h.a) * h.m;
    for (BlockId id = 1; id <= std::min(h.m, args.max_blocks); ++id) {
        const BlockImage &img = image(id);
        std::cout << "block " << id << " count=" << img.entries.size() << " closed=" << (img.closed ? "yes" : "no")
                  << " padding=" << img.padding << " continuation=" << img.continuation_bytes()
                  << " payload_start=" << img.payload_start() << '\n';
        for (std::size_t e = 0; e < img.entries.size(); ++e) {
            const auto &entry = img.entries[e];
            std::cout << "  key=" << entry.key.to_hex() << " offset=" << entry.offset
                      << " bin=" << hash_to_bin(entry.key, h.hash_seed, bins).value
                      << " length=" << object_length(id, e) << '\n';
        }
        cache.erase(cache.begin(), cache.lower_bound(id + 1));
    }
    if (h.m > args.max_blocks) std::cout << "... " << h.m - args.max_blocks << " more blocks\n";
}

void cmd_audit(const std::string &path) {
    auto store = Store::open(path);
    auto r = store.audit();
    std::cout << "blocks " << r.blocks << '\n'
              << "objects " << r.objects << '\n'
              << "payload_bytes " << r.payload_bytes << '\n'
              << "table_bytes " << r.table_bytes << '\n'
              << "count_bytes " << r.count_bytes << '\n'
              << "padding_bytes " << r.padding_bytes << '\n'
              << "max_nonfinal_padding " << r.max_nonfinal_padding << '\n'
              << std::fixed << std::setprecision(4) << "load_factor " << r.load_factor() << '\n';
    for (const auto &p : r.problems) std::cout << "problem " << p << '\n';
    if (!r.ok()) throw IntegrityError(std::to_string(r.problems.size()) + " audit problems");
    std::cout << "audit ok\n";
}

struct VlaBuildArgs {
    std::string input, out;
    bool text = false;
    std::uint32_t block_size = 4096;
};

void cmd_vla_build(const VlaBuildArgs &args) {
    auto objects = read_input(args.input, args.text);
    std::vector<std::vector<std::uint8_t>> values;
    values.reserve(objects.size());
    for (auto &o : objects) values.push_back(std::move(o.value));
    auto image = VlaStore::build(values, args.block_size);
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char *>(image.data()), static_cast<std::streamsize>(image.size()));
    if (!out.flush()) throw IoError("cannot write " + args.out);
    auto store = VlaStore::from_image(std::move(image));
    std::cout << "wrote " << args.out << ": n=" << store.size() << " m=" << store.blocks()
              << " block_size=" << args.block_size << " index_bits=" << store.index().size_bits() << '\n';
}

struct VlaGetArgs {
    std::string store;
    std::uint64_t position = 1;
    bool raw = false;
};

void cmd_vla_get(const VlaGetArgs &args) {
    auto store = VlaStore::open(args.store);
    auto r = store.get(args.position);
    std::cout << "found position=" << args.position << " range=" << range_text(r.range)
              << " blocks=" << r.blocks_fetched << " skipped=" << r.objects_skipped << " size=" << r.value.size()
              << '\n';
    print_value(r.value, args.raw);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Packed hash table stores: build, query, measure"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto *g = app.add_subcommand("generate", "Write a synthetic input file");
    g->add_option("--n", gen.n, "Object count")->check(CLI::NonNegativeNumber);
    g->add_option("--dist", gen.dist, "identical:S, normal:S or uniform:LO:HI")->capture_default_str();
    g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    g->add_option("--out", gen.out, "Output file")->required();
    g->add_flag("--text", gen.text, "Write text records instead of binary ones");

    BuildArgs b;
    auto *bc = app.add_subcommand("build", "Build a store from an input file");
    bc->add_option("--input", b.input, "Input records")->required();
    bc->add_flag("--text", b.text, "Input is text records");
    bc->add_option("--out", b.out, "Store file")->required();
    bc->add_option("--a", b.a, "Bins per block (power of two)")->capture_default_str();
    bc->add_option("--block-size", b.block_size, "Block size in bytes")->capture_default_str();
    bc->add_option("--index", b.index, "ef or ec")->check(CLI::IsMember({"ef", "ec"}))->capture_default_str();
    bc->add_option("--range-size", b.range_size, "Bins per entropy-coded chunk")->capture_default_str();
    bc->add_option("--seed", b.seed, "Hash seed")->capture_default_str();

    QueryArgs q;
    auto *qc = app.add_subcommand("query", "Look up one key");
    qc->add_option("--store", q.store, "Store file")->required();
    qc->add_option("--key", q.key, "Key as 16 hex digits")->required();
    qc->add_flag("--raw", q.raw, "Print the value bytes instead of hex");
    qc->add_flag("--direct", q.direct, "Try unbuffered reads");

    BenchArgs bench;
    auto *bb = app.add_subcommand("bench", "Measure bytes fetched per query");
    bb->add_option("--store", bench.store, "Store file")->required();
    bb->add_option("--queries", bench.queries, "Query count")->capture_default_str();
    bb->add_option("--present-fraction", bench.present_fraction, "Share of keys that exist")->capture_default_str();
    bb->add_option("--in-flight", bench.in_flight, "Concurrent reads")->check(CLI::PositiveNumber)->capture_default_str();
    bb->add_option("--seed", bench.seed, "Workload seed")->capture_default_str();
    bb->add_option("--out", bench.out, "CSV output (stdout when omitted)");
    bb->add_flag("--direct", bench.direct, "Try unbuffered reads");

    MergeArgs mg;
    auto *mc = app.add_subcommand("merge", "Merge two stores");
    mc->add_option("first", mg.first, "First store")->required();
    mc->add_option("second", mg.second, "Second store")->required();
    mc->add_option("--out", mg.out, "Merged store")->required();
    mc->add_option("--index", mg.index, "ef or ec (default: that of the first store)")->check(CLI::IsMember({"ef", "ec"}));
    mc->add_option("--range-size", mg.range_size, "Bins per entropy-coded chunk")->capture_default_str();

    RebuildArgs rb;
    auto *rc = app.add_subcommand("rebuild-index", "Recompute the index from the data blocks");
    rc->add_option("--store", rb.store, "Store file")->required();
    rc->add_option("--out", rb.out, "Write a copy with the rebuilt index");

    InspectArgs ins;
    auto *ic = app.add_subcommand("inspect", "Dump the header and block tables");
    ic->add_option("--store", ins.store, "Store file")->required();
    ic->add_option("--max-blocks", ins.max_blocks, "Blocks to list")->capture_default_str();

    std::string audit_path;
    auto *ac = app.add_subcommand("audit", "Account for every byte of the data blocks");
    ac->add_option("--store", audit_path, "Store file")->required();

    VlaBuildArgs vb;
    auto *vbc = app.add_subcommand("vla-build", "Build a positional array from an input file (values in order)");
    vbc->add_option("--input", vb.input, "Input records")->required();
    vbc->add_flag("--text", vb.text, "Input is text records");
    vbc->add_option("--out", vb.out, "Store file")->required();
    vbc->add_option("--block-size", vb.block_size, "Block size in bytes")->capture_default_str();

    VlaGetArgs vg;
    auto *vgc = app.add_subcommand("vla-get", "Fetch one position of a positional array");
    vgc->add_option("--store", vg.store, "Store file")->required();
    vgc->add_option("--index", vg.position, "1-based position")->required();
    vgc->add_flag("--raw", vg.raw, "Print the value bytes instead of hex");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*g) cmd_generate(gen);
        else if (*bc) cmd_build(b);
        else if (*qc) cmd_query(q);
        else if (*bb) cmd_bench(bench);
        else if (*mc) cmd_merge(mg);
        else if (*rc) cmd_rebuild_index(rb);
        else if (*ic) cmd_inspect(ins);
        else if (*ac) cmd_audit(audit_path);
        else if (*vbc) cmd_vla_build(vb);
        else if (*vgc) cmd_vla_get(vg);
    } catch (const Error &e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
