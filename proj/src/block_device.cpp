#include "pachash/block_device.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "pachash/errors.hpp"

namespace pachash {

namespace {

constexpr std::size_t kDirectAlignment = 4096;

std::string range_text(BlockRange r) { return std::to_string(r.first) + ".." + std::to_string(r.last); }

struct AlignedBuffer {
    explicit AlignedBuffer(std::size_t n) : size(n) {
        data = static_cast<std::uint8_t *>(std::aligned_alloc(kDirectAlignment, n));
        if (!data) throw std::bad_alloc();
    }
    ~AlignedBuffer() { std::free(data); }
    AlignedBuffer(const AlignedBuffer &) = delete;
    AlignedBuffer &operator=(const AlignedBuffer &) = delete;
    std::uint8_t *data;
    std::size_t size;
};

}  // namespace

void BlockDevice::read_range(BlockRange r, std::span<std::uint8_t> out) {
    if (r.first < 1 || r.first > r.last || r.last > data_blocks_)
        throw InvalidArgument("block range " + range_text(r) + " outside 1.." + std::to_string(data_blocks_));
    if (out.size() != r.size() * block_size_) throw InvalidArgument("read buffer size does not match range " + range_text(r));
    try {
        do_read(r.first * block_size_, out);
    } catch (const IoError &e) {
        throw IoError("reading blocks " + range_text(r) + ": " + e.what());
    }
    reads_.fetch_add(1, std::memory_order_relaxed);
    blocks_.fetch_add(r.size(), std::memory_order_relaxed);
    bytes_.fetch_add(out.size(), std::memory_order_relaxed);
    if (logging_.load(std::memory_order_relaxed)) {
        std::lock_guard lock(log_mutex_);
        log_.push_back(r);
    }
}

std::vector<std::uint8_t> BlockDevice::read_range(BlockRange r) {
    std::vector<std::uint8_t> out(r.first <= r.last ? r.size() * block_size_ : 0);
    read_range(r, out);
    return out;
}

IoCounters BlockDevice::counters() const {
    return {reads_.load(), blocks_.load(), bytes_.load()};
}

void BlockDevice::reset_counters() {
    reads_ = 0;
    blocks_ = 0;
    bytes_ = 0;
    std::lock_guard lock(log_mutex_);
    log_.clear();
}

void BlockDevice::set_range_log(bool enabled) {
    logging_ = enabled;
    if (!enabled) {
        std::lock_guard lock(log_mutex_);
        log_.clear();
    }
}

std::vector<BlockRange> BlockDevice::range_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

MemoryBlockDevice::MemoryBlockDevice(std::shared_ptr<const std::vector<std::uint8_t>> image,
                                     std::uint32_t block_size, std::uint64_t data_blocks)
    : BlockDevice(block_size, data_blocks), image_(std::move(image)) {
    if (image_->size() < (data_blocks + 1) * block_size) throw FormatError("store image shorter than its data blocks");
}

void MemoryBlockDevice::do_read(std::uint64_t offset, std::span<std::uint8_t> out) {
    std::memcpy(out.data(), image_->data() + offset, out.size());
}

FileBlockDevice::FileBlockDevice(const std::string &path, std::uint32_t block_size, std::uint64_t data_blocks,
                                 bool direct_io)
    : BlockDevice(block_size, data_blocks), path_(path) {
    fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) throw IoError("cannot open " + path + ": " + std::strerror(errno));
    off_t size = ::lseek(fd_, 0, SEEK_END);
    if (size < 0 || std::uint64_t(size) < (data_blocks + 1) * block_size) {
        ::close(fd_);
        throw FormatError(path + " is shorter than its data blocks");
    }
#ifdef O_DIRECT
    if (direct_io && block_size % kDirectAlignment == 0) direct_fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC | O_DIRECT);
#else
    (void)direct_io;
#endif
}

FileBlockDevice::~FileBlockDevice() {
    if (direct_fd_ >= 0) ::close(direct_fd_);
    if (fd_ >= 0) ::close(fd_);
}

void FileBlockDevice::pread_all(int fd, std::uint64_t offset, std::span<std::uint8_t> out) const {
    std::size_t done = 0;
    while (done < out.size()) {
        ssize_t got = ::pread(fd, out.data() + done, out.size() - done, static_cast<off_t>(offset + done));
        if (got < 0 && errno == EINTR) continue;
        if (got < 0) throw IoError(std::string(std::strerror(errno)));
        if (got == 0) throw IoError("unexpected end of " + path_);
        done += static_cast<std::size_t>(got);
    }
}

void FileBlockDevice::do_read(std::uint64_t offset, std::span<std::uint8_t> out) {
    if (direct()) {
        AlignedBuffer buffer(out.size());
        try {
            pread_all(direct_fd_, offset, std::span(buffer.data, buffer.size));
            std::memcpy(out.data(), buffer.data, out.size());
            return;
        } catch (const IoError &) {
            // The file system refused unbuffered access; stay buffered from now on.
            use_direct_ = false;
        }
    }
    pread_all(fd_, offset, out);
}

}  // namespace pachash
