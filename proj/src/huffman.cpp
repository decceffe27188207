#include "pachash/huffman.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "pachash/errors.hpp"

namespace pachash {

void BitWriter::put(std::uint32_t code, unsigned length) {
    for (unsigned i = length; i-- > 0;) {
        acc_ = (acc_ << 1) | ((code >> i) & 1);
        if (++filled_ == 8) {
            out_.push_back(static_cast<std::uint8_t>(acc_));
            acc_ = 0;
            filled_ = 0;
        }
    }
}

void BitWriter::flush() {
    if (filled_ == 0) return;
    out_.push_back(static_cast<std::uint8_t>(acc_ << (8 - filled_)));
    acc_ = 0;
    filled_ = 0;
}

int BitReader::next() {
    if (pos_ >= 8 * in_.size()) return -1;
    int bit = (in_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return bit;
}

HuffmanCode HuffmanCode::from_frequencies(std::span<const std::uint64_t, 256> freq) {
    HuffmanCode code;
    std::vector<unsigned> used;
    for (unsigned s = 0; s < 256; ++s)
        if (freq[s] > 0) used.push_back(s);
    if (used.empty()) {
        code.assign_codes();
        return code;
    }
    if (used.size() == 1) {
        code.lengths_[used[0]] = 1;
        code.assign_codes();
        return code;
    }

    // Plain Huffman tree over (weight, node); leaves are 0..255, inner nodes follow.
    std::vector<int> parent(512, -1);
    using Item = std::pair<std::uint64_t, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (unsigned s : used) heap.push({freq[s], static_cast<int>(s)});
    int next_node = 256;
    while (heap.size() > 1) {
        auto [wa, a] = heap.top();
        heap.pop();
        auto [wb, b] = heap.top();
        heap.pop();
        parent[a] = parent[b] = next_node;
        heap.push({wa + wb, next_node++});
    }
    std::array<unsigned, 256> depth{};
    for (unsigned s : used) {
        unsigned d = 0;
        for (int n = static_cast<int>(s); parent[n] >= 0; n = parent[n]) ++d;
        depth[s] = d;
    }

    // Clamp to kMaxLength, then lengthen the cheapest codes until Kraft holds.
    constexpr std::uint64_t kFull = std::uint64_t(1) << kMaxLength;
    std::uint64_t kraft = 0;
    for (unsigned s : used) {
        depth[s] = std::min(depth[s], kMaxLength);
        kraft += std::uint64_t(1) << (kMaxLength - depth[s]);
    }
    while (kraft > kFull) {
        int pick = -1;
        for (unsigned s : used) {
            if (depth[s] >= kMaxLength) continue;
            if (pick < 0 || depth[s] > depth[pick] || (depth[s] == depth[pick] && freq[s] < freq[pick]))
                pick = static_cast<int>(s);
        }
        kraft -= std::uint64_t(1) << (kMaxLength - depth[pick] - 1);
        ++depth[pick];
    }
    for (unsigned s : used) code.lengths_[s] = static_cast<std::uint8_t>(depth[s]);
    code.assign_codes();
    return code;
}

HuffmanCode HuffmanCode::from_lengths(const std::array<std::uint8_t, 256> &lengths) {
    HuffmanCode code;
    std::uint64_t kraft = 0;
    for (auto l : lengths) {
        if (l > kMaxLength) throw FormatError("Huffman code length exceeds the limit");
        if (l > 0) kraft += std::uint64_t(1) << (kMaxLength - l);
    }
    if (kraft > (std::uint64_t(1) << kMaxLength)) throw FormatError("Huffman code lengths violate Kraft");
    code.lengths_ = lengths;
    code.assign_codes();
    return code;
}

void HuffmanCode::assign_codes() {
    sorted_.clear();
    count_.fill(0);
    for (unsigned s = 0; s < 256; ++s)
        if (lengths_[s] > 0) ++count_[lengths_[s]];
    for (unsigned l = 1; l <= kMaxLength; ++l)
        for (unsigned s = 0; s < 256; ++s)
            if (lengths_[s] == l) sorted_.push_back(static_cast<std::uint8_t>(s));

    std::uint32_t code = 0;
    std::uint32_t index = 0;
    for (unsigned l = 1; l <= kMaxLength; ++l) {
        first_code_[l] = code;
        first_index_[l] = index;
        code = (code + count_[l]) << 1;
        index += count_[l];
    }
    for (unsigned i = 0; i < sorted_.size(); ++i) {
        unsigned s = sorted_[i];
        unsigned l = lengths_[s];
        codes_[s] = first_code_[l] + (i - first_index_[l]);
    }
}

int HuffmanCode::decode(BitReader &in) const {
    std::uint32_t code = 0;
    for (unsigned l = 1; l <= kMaxLength; ++l) {
        int bit = in.next();
        if (bit < 0) return -1;
        code = (code << 1) | static_cast<std::uint32_t>(bit);
        if (code - first_code_[l] < count_[l] && code >= first_code_[l]) return sorted_[first_index_[l] + code - first_code_[l]];
    }
    return -1;
}

}  // namespace pachash
