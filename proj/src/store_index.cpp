#include "pachash/store_index.hpp"

namespace pachash {

StoreIndex StoreIndex::build(IndexKind kind, std::span<const std::uint64_t> p, std::uint64_t universe,
                             std::uint32_t range_size) {
    StoreIndex index;
    index.kind_ = kind;
    if (index.uses_ec())
        index.ec_ = EntropyCodedIndex::build(p, universe, range_size);
    else
        index.ef_ = EliasFanoIndex::build(p, universe);
    return index;
}

std::uint64_t StoreIndex::count() const { return uses_ec() ? ec_.count() : ef_.count(); }

std::uint64_t StoreIndex::universe() const { return uses_ec() ? ec_.universe() : ef_.universe(); }

BlockRange StoreIndex::locate(BinId b) const { return uses_ec() ? ec_.locate(b) : ef_.locate(b); }

std::vector<std::uint64_t> StoreIndex::decode() const { return uses_ec() ? ec_.decode() : ef_.decode(); }

std::uint64_t StoreIndex::size_bits() const { return uses_ec() ? ec_.size_bits() : ef_.size_bits(); }

void StoreIndex::serialize(detail::ByteWriter &out) const {
    if (uses_ec())
        ec_.serialize(out);
    else
        ef_.serialize(out);
}

StoreIndex StoreIndex::deserialize(IndexKind kind, detail::ByteReader &in) {
    StoreIndex index;
    index.kind_ = kind;
    if (index.uses_ec())
        index.ec_ = EntropyCodedIndex::deserialize(in);
    else
        index.ef_ = EliasFanoIndex::deserialize(in);
    return index;
}

bool operator==(const StoreIndex &x, const StoreIndex &y) {
    if (x.kind_ != y.kind_) return false;
    return x.uses_ec() ? x.ec_ == y.ec_ : x.ef_ == y.ef_;
}

}  // namespace pachash
