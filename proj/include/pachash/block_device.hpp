#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pachash/params.hpp"

namespace pachash {

struct IoCounters {
    std::uint64_t reads = 0;
    std::uint64_t blocks = 0;
    std::uint64_t bytes = 0;
};

struct OpenOptions {
    bool direct_io = false;
};

/// Read-only view of the data blocks of a store. Block i (1..m) lives at
/// byte offset i * block_size of the underlying image; block 0 is the header.
///
/// read_range may be called from several threads at once.
class BlockDevice {
public:
    BlockDevice(std::uint32_t block_size, std::uint64_t data_blocks)
        : block_size_(block_size), data_blocks_(data_blocks) {}
    virtual ~BlockDevice() = default;
    BlockDevice(const BlockDevice &) = delete;
    BlockDevice &operator=(const BlockDevice &) = delete;

    std::uint32_t block_size() const { return block_size_; }
    std::uint64_t data_blocks() const { return data_blocks_; }

    /// One contiguous read of blocks r.first..r.last into out, which must hold
    /// exactly r.size() * block_size bytes. Throws InvalidArgument for ranges
    /// outside 1..m and IoError when the backend fails.
    void read_range(BlockRange r, std::span<std::uint8_t> out);
    std::vector<std::uint8_t> read_range(BlockRange r);

    IoCounters counters() const;
    void reset_counters();

    /// Keeps every issued range until disabled; for tests and replay checks.
    void set_range_log(bool enabled);
    std::vector<BlockRange> range_log() const;

    virtual std::string backend_name() const = 0;

protected:
    virtual void do_read(std::uint64_t offset, std::span<std::uint8_t> out) = 0;

private:
    std::uint32_t block_size_;
    std::uint64_t data_blocks_;
    std::atomic<std::uint64_t> reads_{0};
    std::atomic<std::uint64_t> blocks_{0};
    std::atomic<std::uint64_t> bytes_{0};
    std::atomic<bool> logging_{false};
    mutable std::mutex log_mutex_;
    std::vector<BlockRange> log_;
};

class MemoryBlockDevice final : public BlockDevice {
public:
    /// image holds the header block followed by the data blocks; anything past
    /// block m is ignored.
    MemoryBlockDevice(std::shared_ptr<const std::vector<std::uint8_t>> image, std::uint32_t block_size,
                      std::uint64_t data_blocks);
    std::string backend_name() const override { return "memory"; }

protected:
    void do_read(std::uint64_t offset, std::span<std::uint8_t> out) override;

private:
    std::shared_ptr<const std::vector<std::uint8_t>> image_;
};

class FileBlockDevice final : public BlockDevice {
public:
    /// With direct_io the file is opened with O_DIRECT when the platform and
    /// block size allow it; otherwise, or when the first direct read is
    /// rejected, reads go through the page cache.
    FileBlockDevice(const std::string &path, std::uint32_t block_size, std::uint64_t data_blocks,
                    bool direct_io = false);
    ~FileBlockDevice() override;

    bool direct() const { return direct_fd_ >= 0 && use_direct_.load(); }
    std::string backend_name() const override { return direct() ? "file-direct" : "file"; }

protected:
    void do_read(std::uint64_t offset, std::span<std::uint8_t> out) override;

private:
    void pread_all(int fd, std::uint64_t offset, std::span<std::uint8_t> out) const;

    std::string path_;
    int fd_ = -1;
    int direct_fd_ = -1;
    std::atomic<bool> use_direct_{true};
};

}  // namespace pachash
