#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "pachash/errors.hpp"
#include "pachash/workload.hpp"

using namespace pachash;

TEST(Workload, IdenticalSizes) {
    auto objects = generate(WorkloadSpec::parse(10, "identical:256", 1));
    ASSERT_EQ(objects.size(), 10u);
    std::set<Key> keys;
    for (const auto &x : objects) {
        EXPECT_EQ(x.value.size(), 256u);
        keys.insert(x.key);
    }
    EXPECT_EQ(keys.size(), 10u);
}

TEST(Workload, NormalSizesHaveTheRequestedMoments) {
    auto sizes = generate_sizes(WorkloadSpec::parse(200000, "normal:64", 2));
    double sum = 0, sq = 0;
    for (auto s : sizes) {
        ASSERT_GE(s, 1u);
        sum += double(s);
        sq += double(s) * double(s);
    }
    const double n = double(sizes.size());
    const double mean = sum / n, var = sq / n - mean * mean;
    EXPECT_NEAR(mean, 64.0, 0.02 * 64.0);
    // Rounding adds 1/12 to the variance of 64/5.
    EXPECT_NEAR(var, 64.0 / 5 + 1.0 / 12, 0.5);
}

TEST(Workload, UniformSizesStayInRange) {
    auto sizes = generate_sizes(WorkloadSpec::parse(50000, "uniform:10:20", 3));
    std::set<std::uint64_t> seen(sizes.begin(), sizes.end());
    EXPECT_EQ(*seen.begin(), 10u);
    EXPECT_EQ(*seen.rbegin(), 20u);
    EXPECT_EQ(seen.size(), 11u);
}

TEST(Workload, DeterministicPerSeed) {
    auto spec = WorkloadSpec::parse(1000, "normal:100", 9);
    auto a = generate(spec), b = generate(spec);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].key, b[i].key);
        ASSERT_EQ(a[i].value, b[i].value);
    }
    auto c = generate(WorkloadSpec::parse(1000, "normal:100", 10));
    EXPECT_NE(a[0].key, c[0].key);
    EXPECT_EQ(spec.describe(), "normal:100");
    EXPECT_EQ(WorkloadSpec::parse(1, "uniform:1:5", 1).describe(), "uniform:1:5");
}

TEST(Workload, ParseRejectsBadSpecs) {
    for (const char *bad : {"", "identical", "identical:", "identical:0", "identical:x", "normal:-3", "uniform:5",
                            "uniform:9:3", "uniform:0:3", "gamma:4", "identical:4:4", "identical:99999999999"})
        EXPECT_THROW(WorkloadSpec::parse(10, bad, 1), InvalidArgument) << bad;
}

TEST(Workload, BinaryRecordsRoundTrip) {
    auto objects = generate(WorkloadSpec::parse(500, "uniform:1:300", 4));
    objects[7].value.clear();
    std::stringstream buf;
    write_binary_records(buf, objects);
    auto back = read_binary_records(buf);
    ASSERT_EQ(back.size(), objects.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        ASSERT_EQ(back[i].key, objects[i].key);
        ASSERT_EQ(back[i].value, objects[i].value);
    }
}

TEST(Workload, TruncatedBinaryRecordsAreFormatErrors) {
    auto objects = generate(WorkloadSpec::parse(3, "identical:20", 5));
    std::stringstream buf;
    write_binary_records(buf, objects);
    const std::string full = buf.str();
    for (std::size_t cut : {full.size() - 1, full.size() - 20, full.size() - 25, std::size_t(3)}) {
        std::istringstream in(full.substr(0, cut));
        EXPECT_THROW(read_binary_records(in), FormatError) << cut;
    }
    std::istringstream empty("");
    EXPECT_TRUE(read_binary_records(empty).empty());
}

TEST(Workload, TextRecordsRoundTrip) {
    std::vector<InputObject> objects(3);
    objects[0].key = Key::from_u64(1);
    objects[0].value = {'h', 'i'};
    objects[1].key = Key::from_u64(0xFFEEDDCCBBAA9988ull);
    objects[2].key = Key::from_u64(7);
    objects[2].value = {'a', ' ', 'b'};
    std::stringstream buf;
    write_text_records(buf, objects);
    EXPECT_EQ(buf.str().substr(0, 19), "0100000000000000\thi");
    auto back = read_text_records(buf);
    ASSERT_EQ(back.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back[i].key, objects[i].key);
        EXPECT_EQ(back[i].value, objects[i].value);
    }

    std::istringstream crlf("0200000000000000\tx\r\n\n");
    auto one = read_text_records(crlf);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].value, std::vector<std::uint8_t>{'x'});

    std::istringstream no_tab("0200000000000000 x\n");
    EXPECT_THROW(read_text_records(no_tab), FormatError);
    std::istringstream bad_key("02zz000000000000\tx\n");
    EXPECT_THROW(read_text_records(bad_key), FormatError);

    std::vector<InputObject> tabbed(1);
    tabbed[0].value = {'\t'};
    std::ostringstream sink;
    EXPECT_THROW(write_text_records(sink, tabbed), InvalidArgument);
}

TEST(Workload, AbsentKeysAreAbsentAndDistinct) {
    auto objects = generate(WorkloadSpec::parse(20000, "identical:8", 6));
    std::set<Key> present;
    for (const auto &x : objects) present.insert(x.key);
    auto absent = generate_absent_keys(objects, 20000, 6);
    std::set<Key> seen;
    for (const auto &k : absent) {
        ASSERT_FALSE(present.count(k));
        ASSERT_TRUE(seen.insert(k).second);
    }
}
