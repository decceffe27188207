#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <thread>
#include <unistd.h>

#include "pachash/block_device.hpp"
#include "pachash/errors.hpp"

using namespace pachash;
namespace fs = std::filesystem;

namespace {

// Header block plus m data blocks; block i is filled with bytes derived from i.
std::vector<std::uint8_t> make_image(std::uint32_t bs, std::uint64_t m) {
    std::vector<std::uint8_t> img((m + 1) * bs);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint8_t>((i / bs) * 31 + i % 251);
    return img;
}

std::vector<std::uint8_t> slice(const std::vector<std::uint8_t> &img, std::uint32_t bs, BlockRange r) {
    return {img.begin() + r.first * bs, img.begin() + (r.last + 1) * bs};
}

class TempFile {
public:
    explicit TempFile(const std::vector<std::uint8_t> &bytes) {
        path_ = (fs::temp_directory_path() / ("pachash_dev_" + std::to_string(::getpid()) + "_" +
                                             std::to_string(counter_++)))
                    .string();
        std::ofstream out(path_, std::ios::binary);
        out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    ~TempFile() { fs::remove(path_); }
    const std::string &path() const { return path_; }

private:
    static inline int counter_ = 0;
    std::string path_;
};

}  // namespace

TEST(BlockDevice, MemoryReadsExactRanges) {
    auto img = make_image(64, 3);
    MemoryBlockDevice dev(std::make_shared<const std::vector<std::uint8_t>>(img), 64, 3);
    EXPECT_EQ(dev.backend_name(), "memory");
    auto two = dev.read_range({2, 3});
    EXPECT_EQ(two.size(), 128u);
    EXPECT_EQ(two, slice(img, 64, {2, 3}));
    auto one = dev.read_range({1, 1});
    EXPECT_EQ(one.size(), 64u);
    EXPECT_EQ(one, slice(img, 64, {1, 1}));
}

TEST(BlockDevice, CountersReplayScript) {
    auto img = make_image(128, 20);
    MemoryBlockDevice dev(std::make_shared<const std::vector<std::uint8_t>>(img), 128, 20);
    dev.set_range_log(true);
    std::mt19937_64 rng(3);
    std::vector<BlockRange> script;
    std::uint64_t blocks = 0;
    for (int i = 0; i < 500; ++i) {
        std::uint64_t a = 1 + rng() % 20, b = 1 + rng() % 20;
        BlockRange r{std::min(a, b), std::max(a, b)};
        script.push_back(r);
        blocks += r.size();
        ASSERT_EQ(dev.read_range(r), slice(img, 128, r));
    }
    auto c = dev.counters();
    EXPECT_EQ(c.reads, 500u);
    EXPECT_EQ(c.blocks, blocks);
    EXPECT_EQ(c.bytes, blocks * 128);
    EXPECT_EQ(dev.range_log(), script);
    dev.reset_counters();
    EXPECT_EQ(dev.counters().reads, 0u);
    EXPECT_TRUE(dev.range_log().empty());
}

TEST(BlockDevice, RejectsBadRanges) {
    auto img = make_image(64, 3);
    MemoryBlockDevice dev(std::make_shared<const std::vector<std::uint8_t>>(img), 64, 3);
    EXPECT_THROW(dev.read_range({0, 1}), InvalidArgument);
    EXPECT_THROW(dev.read_range({3, 2}), InvalidArgument);
    EXPECT_THROW(dev.read_range({1, 4}), InvalidArgument);
    std::vector<std::uint8_t> small(63);
    EXPECT_THROW(dev.read_range({1, 1}, small), InvalidArgument);
    EXPECT_EQ(dev.counters().reads, 0u);
    auto shortimg = std::make_shared<const std::vector<std::uint8_t>>(100);
    EXPECT_THROW(MemoryBlockDevice(shortimg, 64, 3), FormatError);
}

TEST(BlockDevice, FileBackendMatchesMemory) {
    for (bool direct : {false, true}) {
        auto img = make_image(4096, 10);
        TempFile f(img);
        FileBlockDevice dev(f.path(), 4096, 10, direct);
        std::mt19937_64 rng(direct);
        for (int i = 0; i < 100; ++i) {
            std::uint64_t a = 1 + rng() % 10, b = 1 + rng() % 10;
            BlockRange r{std::min(a, b), std::max(a, b)};
            ASSERT_EQ(dev.read_range(r), slice(img, 4096, r)) << dev.backend_name();
        }
        EXPECT_EQ(dev.counters().reads, 100u);
        if (!direct) {
            EXPECT_EQ(dev.backend_name(), "file");
        }
    }
}

TEST(BlockDevice, DirectRequestWithUnalignedBlocksStaysBuffered) {
    auto img = make_image(100, 4);
    TempFile f(img);
    FileBlockDevice dev(f.path(), 100, 4, true);
    EXPECT_FALSE(dev.direct());
    EXPECT_EQ(dev.read_range({2, 4}), slice(img, 100, {2, 4}));
}

TEST(BlockDevice, FileErrors) {
    EXPECT_THROW(FileBlockDevice("/nonexistent/pachash/file", 64, 1), IoError);
    auto img = make_image(64, 2);
    TempFile f(img);
    EXPECT_THROW(FileBlockDevice(f.path(), 64, 5), FormatError);

    FileBlockDevice dev(f.path(), 64, 2);
    fs::resize_file(f.path(), 64 + 10);
    try {
        dev.read_range({1, 2});
        FAIL() << "read past a truncated file";
    } catch (const IoError &e) {
        EXPECT_NE(std::string(e.what()).find("1..2"), std::string::npos) << e.what();
    }
}

TEST(BlockDevice, ConcurrentReads) {
    auto img = make_image(256, 64);
    TempFile f(img);
    FileBlockDevice file(f.path(), 256, 64);
    MemoryBlockDevice mem(std::make_shared<const std::vector<std::uint8_t>>(img), 256, 64);
    for (BlockDevice *dev : {static_cast<BlockDevice *>(&file), static_cast<BlockDevice *>(&mem)}) {
        std::atomic<std::uint64_t> blocks{0}, bad{0};
        std::vector<std::thread> threads;
        for (int t = 0; t < 8; ++t)
            threads.emplace_back([&, t] {
                std::mt19937_64 rng(t);
                for (int i = 0; i < 500; ++i) {
                    std::uint64_t a = 1 + rng() % 64, b = 1 + rng() % 64;
                    BlockRange r{std::min(a, b), std::max(a, b)};
                    if (dev->read_range(r) != slice(img, 256, r)) ++bad;
                    blocks += r.size();
                }
            });
        for (auto &th : threads) th.join();
        EXPECT_EQ(bad.load(), 0u);
        EXPECT_EQ(dev->counters().reads, 4000u);
        EXPECT_EQ(dev->counters().blocks, blocks.load());
    }
}
