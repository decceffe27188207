#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "pachash/builder.hpp"
#include "pachash/errors.hpp"
#include "pachash/hash.hpp"
#include "pachash/store.hpp"

using namespace pachash;

namespace {

Store open_image(const BuiltStore &s) { return Store::from_image(s.file_image()); }

void expect_all_found(const Store &store, const std::vector<InputObject> &objects) {
    for (const auto &x : objects) {
        auto r = store.query(x.key);
        ASSERT_TRUE(r.found) << x.key.to_hex();
        ASSERT_EQ(r.value, x.value) << x.key.to_hex();
    }
}

std::vector<InputObject> concat(std::vector<InputObject> a, const std::vector<InputObject> &b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST(Builder, StraddlingBinInstance) {
    auto example = oracle::straddling_bin_store();
    auto store = build(example.objects, example.options);
    ASSERT_EQ(store.header.m, 3u);
    ASSERT_EQ(store.header.n, 9u);
    EXPECT_EQ(store.index.universe(), 12u);
    EXPECT_EQ(store.index.locate(BinId{8}), (BlockRange{2, 3}));
    auto spans = oracle::bin_spans(store, example.objects);
    auto check = oracle::check_locate(store.index, spans, 3);
    EXPECT_TRUE(check.violations.empty());
    EXPECT_EQ(check.one_extra, 1u);
    EXPECT_EQ(check.exact + check.one_extra, check.nonempty_bins);
}

TEST(Builder, EmptyInput) {
    auto store = build({}, BuildOptions{});
    EXPECT_EQ(store.header.m, 1u);
    EXPECT_EQ(store.header.n, 0u);
    EXPECT_EQ(store.p, std::vector<std::uint64_t>{1});
    EXPECT_EQ(store.data.size(), 4096u);
    auto img = decode_block(store.data, 1);
    EXPECT_TRUE(img.entries.empty());
    EXPECT_TRUE(img.closed);
    EXPECT_EQ(img.padding, 4094u);
    auto opened = open_image(store);
    EXPECT_TRUE(opened.audit().ok());
    EXPECT_EQ(rebuild_index(opened).decode(), std::vector<std::uint64_t>{1});
}

TEST(Builder, TenThousandObjectsAuditAndRoundTrip) {
    auto objects = oracle::random_objects(5, 10000, 1000);
    BuildOptions opt;
    opt.seed = 99;
    auto built = build(objects, opt);
    auto store = open_image(built);
    auto audit = store.audit();
    ASSERT_TRUE(audit.ok()) << audit.problems.front();
    const auto m = built.header.m, n = built.header.n;
    EXPECT_EQ(audit.payload_bytes + audit.table_bytes + audit.count_bytes + audit.padding_bytes, m * 4096);
    EXPECT_EQ(audit.table_bytes, 10 * n);
    EXPECT_EQ(audit.count_bytes, 2 * m);
    EXPECT_LT(audit.max_nonfinal_padding, 11u);
    EXPECT_GE(double(audit.payload_bytes) / double(m * 4096), 1.0 - double(10 * n + 2 * m + 11 * m) / double(m * 4096));
    expect_all_found(store, objects);
}

TEST(Builder, PackingIsTight) {
    // Every block but the last holds at least B - 12 bytes of entries and payload.
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto rs = oracle::random_store(seed);
        auto built = build(rs.objects, rs.options);
        std::uint64_t need = 0;
        for (const auto &x : rs.objects) need += x.value.size() + 10;
        const std::uint64_t m = built.header.m;
        EXPECT_GT(need + (rs.objects.empty() ? 1 : 0), (m - 1) * (rs.options.block_size - 12)) << seed;
    }
}

TEST(Builder, RejectsBadInput) {
    auto objects = oracle::random_objects(1, 10, 10);
    auto dup = objects;
    dup.push_back(objects[3]);
    EXPECT_THROW(build(dup, BuildOptions{}), InvalidArgument);

    BuildOptions capped;
    capped.max_value_bytes = 5;
    std::vector<InputObject> big = {{Key::from_u64(1), std::vector<std::uint8_t>(6)}};
    EXPECT_THROW(build(big, capped), InvalidArgument);

    BuildOptions bad_a;
    bad_a.a = 3;
    EXPECT_THROW(build(objects, bad_a), InvalidArgument);
    BuildOptions bad_b;
    bad_b.block_size = 32;
    EXPECT_THROW(build(objects, bad_b), InvalidArgument);
    BuildOptions bad_kind;
    bad_kind.index = IndexKind::kVla;
    EXPECT_THROW(build(objects, bad_kind), InvalidArgument);
}

TEST(Builder, Deterministic) {
    auto objects = oracle::random_objects(2, 3000, 300);
    BuildOptions opt;
    opt.block_size = 512;
    auto a = build(objects, opt).file_image();
    auto shuffled = objects;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(4));
    auto b = build(shuffled, opt).file_image();
    EXPECT_EQ(a, b);
}

TEST(Builder, IndexSequenceMatchesLayoutOracle) {
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        auto rs = oracle::random_store(seed);
        auto built = build(rs.objects, rs.options);
        const auto m = built.header.m;
        const auto bins = std::uint64_t(rs.options.a) * m;
        ASSERT_EQ(built.p.size(), m);
        ASSERT_TRUE(std::is_sorted(built.p.begin(), built.p.end()));
        for (auto v : built.p) ASSERT_TRUE(v >= 1 && v <= bins);
        ASSERT_EQ(built.p[0], 1u);
        if (rs.objects.empty()) continue;
        auto spans = oracle::bin_spans(built, rs.objects);
        ASSERT_EQ(built.p, oracle::expected_p(spans, m)) << "seed " << seed;
        ASSERT_EQ(built.index.decode(), built.p);
    }
}

TEST(Builder, LargeObjectsAndEntryLessBlocks) {
    std::mt19937_64 rng(6);
    std::vector<InputObject> objects;
    for (int i = 0; i < 40; ++i) {
        InputObject x;
        x.key = Key::from_u64(rng());
        x.value.resize(i % 5 == 0 ? 700 + rng() % 900 : rng() % 40);
        for (auto &c : x.value) c = static_cast<std::uint8_t>(rng());
        objects.push_back(std::move(x));
    }
    for (auto kind : {IndexKind::kEliasFano, IndexKind::kEntropyCoded}) {
        BuildOptions opt;
        opt.a = 2;
        opt.block_size = 128;
        opt.index = kind;
        opt.range_size = 3;
        auto built = build(objects, opt);
        std::uint64_t empty_blocks = 0;
        for (std::uint64_t i = 0; i < built.header.m; ++i)
            empty_blocks += decode_block(std::span(built.data).subspan(i * 128, 128), i + 1).entries.empty();
        EXPECT_GT(empty_blocks, 5u);
        auto spans = oracle::bin_spans(built, objects);
        EXPECT_EQ(built.p, oracle::expected_p(spans, built.header.m));
        auto check = oracle::check_locate(built.index, spans, built.header.m);
        EXPECT_TRUE(check.violations.empty()) << check.violations.front();
        auto store = open_image(built);
        EXPECT_TRUE(store.audit().ok());
        EXPECT_EQ(rebuild_index(store), built.index);
        expect_all_found(store, objects);
    }
}

TEST(Builder, ObjectEndingExactlyAtBlockEnd) {
    // 2 + 10 + 52 = 64: the first object fills block 1 to the last byte.
    std::vector<InputObject> objects = {{Key::from_u64(1), std::vector<std::uint8_t>(52, 1)}};
    BuildOptions opt;
    opt.block_size = 64;
    opt.a = 1;
    auto one = build(objects, opt);
    EXPECT_EQ(one.header.m, 1u);
    EXPECT_TRUE(decode_block(one.data, 1).closed);
    expect_all_found(open_image(one), objects);

    std::mt19937_64 rng(8);
    for (int t = 0; t < 300; ++t) {
        std::vector<InputObject> many;
        for (int i = 0; i < 12; ++i)
            many.push_back({Key::from_u64(rng()), std::vector<std::uint8_t>(static_cast<std::size_t>(rng() % 3 == 0 ? 52 : rng() % 60), static_cast<std::uint8_t>(i))});
        auto built = build(many, opt);
        auto store = open_image(built);
        ASSERT_TRUE(store.audit().ok());
        expect_all_found(store, many);
        ASSERT_EQ(rebuild_index(store), built.index);
    }
}

TEST(Builder, RebuildIndexMatchesBuild) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto rs = oracle::random_store(seed);
        auto built = build(rs.objects, rs.options);
        auto store = open_image(built);
        ASSERT_EQ(rebuild_index(store), built.index) << "seed " << seed;
    }
}

TEST(Builder, RebuildCanChangeChunking) {
    auto objects = oracle::random_objects(3, 2000, 100);
    BuildOptions opt;
    opt.index = IndexKind::kEntropyCoded;
    opt.range_size = 64;
    opt.block_size = 256;
    auto built = build(objects, opt);
    auto store = open_image(built);
    EXPECT_EQ(rebuild_index(store).entropy_coded().range_size(), 64u);
    auto other = rebuild_index(store, 16);
    EXPECT_EQ(other.entropy_coded().range_size(), 16u);
    EXPECT_EQ(other.decode(), built.p);
}

TEST(Builder, IndexSequenceRules) {
    const std::uint32_t a = 4;
    const std::uint64_t bins = 12;
    // Hash values that land in a given bin of 12.
    auto hash_of_bin = [&](std::uint64_t b) {
        unsigned __int128 lo = (static_cast<unsigned __int128>(b - 1) << 64) / bins + 1;
        std::uint64_t h = static_cast<std::uint64_t>(lo);
        EXPECT_EQ(scale_to_bin(h, bins).value, b);
        return h;
    };
    std::vector<BlockSummary> blocks(3);
    blocks[0] = {2, false, hash_of_bin(2), hash_of_bin(4)};
    blocks[1] = {1, false, hash_of_bin(6), hash_of_bin(6)};   // bin 5 empty: store 5
    blocks[2] = {2, false, hash_of_bin(7), hash_of_bin(11)};  // bin 6 non-empty: store 7
    EXPECT_EQ(index_sequence(blocks, a), (std::vector<std::uint64_t>{1, 5, 7}));

    blocks[1] = {0, true, 0, 0};                              // inside an object of bin 4
    blocks[2] = {1, true, hash_of_bin(9), hash_of_bin(9)};   // still inside it
    EXPECT_EQ(index_sequence(blocks, a), (std::vector<std::uint64_t>{1, 4, 4}));
}

TEST(Builder, MergeEqualsBuildOfUnion) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto rs = oracle::random_store(seed, 150);
        std::size_t cut = rs.objects.empty() ? 0 : std::mt19937_64(seed)() % (rs.objects.size() + 1);
        std::vector<InputObject> a(rs.objects.begin(), rs.objects.begin() + cut);
        std::vector<InputObject> b(rs.objects.begin() + cut, rs.objects.end());
        auto sa = open_image(build(a, rs.options));
        auto sb = open_image(build(b, rs.options));
        auto merged = merge(sa, sb, rs.options);
        ASSERT_EQ(merged.file_image(), build(concat(a, b), rs.options).file_image()) << "seed " << seed;
    }
}

TEST(Builder, MergeWithEmptyIsIdentity) {
    auto objects = oracle::random_objects(4, 500, 200);
    BuildOptions opt;
    opt.block_size = 256;
    auto x = build(objects, opt);
    auto empty = build({}, opt);
    auto merged = merge(open_image(x), open_image(empty), opt);
    EXPECT_EQ(merged.file_image(), x.file_image());
    auto merged2 = merge(open_image(empty), open_image(x), opt);
    EXPECT_EQ(merged2.file_image(), x.file_image());
    expect_all_found(open_image(merged), objects);
}

TEST(Builder, MergeRejectsMismatchAndDuplicates) {
    auto objects = oracle::random_objects(5, 100, 50);
    BuildOptions opt;
    opt.block_size = 256;
    auto x = open_image(build(objects, opt));
    BuildOptions other_seed = opt;
    other_seed.seed = 1;
    EXPECT_THROW(merge(x, open_image(build({}, other_seed)), opt), InvalidArgument);
    BuildOptions other_a = opt;
    other_a.a = 4;
    EXPECT_THROW(merge(x, open_image(build({}, other_a)), opt), InvalidArgument);
    BuildOptions other_b = opt;
    other_b.block_size = 512;
    EXPECT_THROW(merge(x, open_image(build({}, other_b)), opt), InvalidArgument);
    std::vector<InputObject> overlap(objects.begin() + 10, objects.begin() + 20);
    EXPECT_THROW(merge(x, open_image(build(overlap, opt)), opt), InvalidArgument);
}

TEST(Builder, ExhaustiveSmallLocate) {
    std::uint64_t extra = 0, checked = 0;
    for (std::uint64_t seed = 1; seed <= 500; ++seed)
        for (std::uint32_t a : {1u, 2u, 4u}) {
            std::mt19937_64 rng(seed * 7 + a);
            BuildOptions opt;
            opt.a = a;
            opt.block_size = 64 << (rng() % 3);
            opt.seed = rng();
            std::uint64_t n = rng() % 51;
            // Sizes keep m at ten blocks or fewer.
            std::uint64_t budget = 10 * (opt.block_size - 13);
            std::uint64_t max_size = n == 0 ? 0 : std::min<std::uint64_t>(3 * opt.block_size, budget / n);
            max_size = max_size > 10 ? max_size - 10 : 0;
            auto objects = oracle::random_objects(rng(), n, max_size);
            auto built = build(objects, opt);
            ASSERT_LE(built.header.m, 10u);
            auto spans = oracle::bin_spans(built, objects);
            auto check = oracle::check_locate(built.index, spans, built.header.m);
            ASSERT_TRUE(check.violations.empty()) << "seed " << seed << " a " << a << ": " << check.violations.front();
            extra += check.one_extra;
            checked += check.nonempty_bins;
        }
    EXPECT_GT(checked, 10000u);
    EXPECT_GT(extra, 0u);
}
