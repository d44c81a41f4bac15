#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmslab {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& what) : Error(what) {}
};

// Set of presentation vertices. Fixed capacity keeps subset operations cheap
// in the predecessor-set construction, where these are the hot objects.
class VertexSet {
 public:
  static constexpr std::size_t kCapacity = 256;
  static constexpr std::size_t kWords = kCapacity / 64;

  VertexSet() : words_{} {}

  static VertexSet full(std::size_t n) {
    VertexSet s;
    for (std::size_t i = 0; i < n; ++i) s.set(i);
    return s;
  }

  void set(std::size_t i) { words_[i >> 6] |= (uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1;
  }

  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  VertexSet& operator|=(const VertexSet& o) {
    for (std::size_t i = 0; i < kWords; ++i) words_[i] |= o.words_[i];
    return *this;
  }
  VertexSet& operator&=(const VertexSet& o) {
    for (std::size_t i = 0; i < kWords; ++i) words_[i] &= o.words_[i];
    return *this;
  }

  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }

  bool operator==(const VertexSet& o) const { return words_ == o.words_; }
  bool operator!=(const VertexSet& o) const { return !(*this == o); }

  bool is_subset_of(const VertexSet& o) const {
    for (std::size_t i = 0; i < kWords; ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  std::vector<uint32_t> members() const {
    std::vector<uint32_t> out;
    for (std::size_t w = 0; w < kWords; ++w) {
      uint64_t bits = words_[w];
      while (bits) {
        unsigned b = static_cast<unsigned>(__builtin_ctzll(bits));
        out.push_back(static_cast<uint32_t>(w * 64 + b));
        bits &= bits - 1;
      }
    }
    return out;
  }

  // Order by (cardinality, lexicographic member list); used for the
  // deterministic hvertex ordering of covers.
  static bool size_lex_less(const VertexSet& a, const VertexSet& b) {
    std::size_t ca = a.count(), cb = b.count();
    if (ca != cb) return ca < cb;
    return a.members() < b.members();
  }

  // Plain bit order, for map keys.
  bool operator<(const VertexSet& o) const { return words_ < o.words_; }

 private:
  std::array<uint64_t, kWords> words_;
};

}  // namespace kmslab
