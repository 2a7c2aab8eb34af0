#pragma once

#include <cstdint>
#include <vector>

namespace pcm {

using VarId = std::uint32_t;  // 1-based variable index

// Small fixed-universe bitset for variable scopes.
class VarSet {
 public:
  VarSet() = default;
  explicit VarSet(VarId max_var) : blocks_((max_var + 64) / 64, 0) {}

  void add(VarId v) {
    ensure(v);
    blocks_[v >> 6] |= (1ULL << (v & 63));
  }

  bool contains(VarId v) const {
    std::size_t b = v >> 6;
    return b < blocks_.size() && (blocks_[b] >> (v & 63)) & 1ULL;
  }

  VarSet& operator|=(const VarSet& o) {
    if (o.blocks_.size() > blocks_.size()) blocks_.resize(o.blocks_.size(), 0);
    for (std::size_t i = 0; i < o.blocks_.size(); ++i) blocks_[i] |= o.blocks_[i];
    return *this;
  }

  bool intersects(const VarSet& o) const {
    std::size_t n = std::min(blocks_.size(), o.blocks_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (blocks_[i] & o.blocks_[i]) return true;
    return false;
  }

  bool subset_of(const VarSet& o) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      std::uint64_t other = i < o.blocks_.size() ? o.blocks_[i] : 0;
      if (blocks_[i] & ~other) return false;
    }
    return true;
  }

  bool operator==(const VarSet& o) const {
    std::size_t n = std::max(blocks_.size(), o.blocks_.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t a = i < blocks_.size() ? blocks_[i] : 0;
      std::uint64_t b = i < o.blocks_.size() ? o.blocks_[i] : 0;
      if (a != b) return false;
    }
    return true;
  }
  bool operator!=(const VarSet& o) const { return !(*this == o); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto b : blocks_) c += static_cast<std::size_t>(__builtin_popcountll(b));
    return c;
  }

  std::vector<VarId> to_vector() const {
    std::vector<VarId> out;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      for (int j = 0; j < 64; ++j)
        if ((blocks_[i] >> j) & 1ULL) out.push_back(static_cast<VarId>(i * 64 + j));
    return out;
  }

 private:
  void ensure(VarId v) {
    std::size_t need = (v >> 6) + 1;
    if (blocks_.size() < need) blocks_.resize(need, 0);
  }

  std::vector<std::uint64_t> blocks_;
};

}  // namespace pcm
