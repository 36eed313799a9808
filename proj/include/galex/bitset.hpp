#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace galex {

/// Fixed-width packed bit vector. All binary operations require equal widths.
class BitSet {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitSet() = default;
  explicit BitSet(std::size_t width, bool full = false)
      : width_(width), words_((width + kWordBits - 1) / kWordBits, full ? ~Word{0} : Word{0}) {
    trim();
  }

  static BitSet full(std::size_t width) { return BitSet(width, true); }

  std::size_t width() const noexcept { return width_; }

  bool test(std::size_t i) const noexcept {
    return (words_[i / kWordBits] >> (i % kWordBits)) & Word{1};
  }
  void set(std::size_t i) noexcept { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
  void reset(std::size_t i) noexcept { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }

  void fill() noexcept {
    std::fill(words_.begin(), words_.end(), ~Word{0});
    trim();
  }
  void clear() noexcept { std::fill(words_.begin(), words_.end(), Word{0}); }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool none() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
  }
  bool all() const noexcept { return count() == width_; }

  BitSet& operator&=(const BitSet& o) noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  BitSet& operator|=(const BitSet& o) noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  /// Set difference.
  BitSet& operator-=(const BitSet& o) noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
    return *this;
  }
  friend BitSet operator&(BitSet a, const BitSet& b) noexcept { return a &= b; }
  friend BitSet operator|(BitSet a, const BitSet& b) noexcept { return a |= b; }
  friend BitSet operator-(BitSet a, const BitSet& b) noexcept { return a -= b; }

  BitSet complement() const {
    BitSet r = *this;
    for (Word& w : r.words_) w = ~w;
    r.trim();
    return r;
  }

  bool subset_of(const BitSet& o) const noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~o.words_[k]) return false;
    return true;
  }
  bool intersects(const BitSet& o) const noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & o.words_[k]) return true;
    return false;
  }

  /// True iff both sets agree on every index strictly below `limit`.
  bool equal_below(const BitSet& o, std::size_t limit) const noexcept {
    const std::size_t full_words = limit / kWordBits;
    for (std::size_t k = 0; k < full_words; ++k)
      if (words_[k] != o.words_[k]) return false;
    const std::size_t rem = limit % kWordBits;
    if (rem == 0) return true;
    const Word mask = (Word{1} << rem) - 1;
    return ((words_[full_words] ^ o.words_[full_words]) & mask) == 0;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      Word w = words_[k];
      while (w) {
        const int bit = std::countr_zero(w);
        f(k * kWordBits + static_cast<std::size_t>(bit));
        w &= w - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  /// Compares the ascending index sequences lexicographically.
  bool index_less(const BitSet& o) const noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      const Word diff = words_[k] ^ o.words_[k];
      if (!diff) continue;
      const Word low = diff & (~diff + 1);
      const Word above = ~(low | (low - 1));
      // Index d = first difference. The side owning d wins unless the other
      // side ends at d (then the other side is a proper prefix).
      const bool mine_owns = (words_[k] & low) != 0;
      const BitSet& other = mine_owns ? o : *this;
      bool other_continues = (other.words_[k] & above) != 0;
      for (std::size_t j = k + 1; j < words_.size() && !other_continues; ++j)
        other_continues = other.words_[j] != 0;
      return mine_owns ? other_continues : !other_continues;
    }
    return false;
  }

  std::size_t hash() const noexcept {
    std::size_t h = width_;
    for (Word w : words_) h ^= std::hash<Word>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

  friend bool operator==(const BitSet&, const BitSet&) = default;

 private:
  void trim() noexcept {
    const std::size_t rem = width_ % kWordBits;
    if (rem != 0 && !words_.empty()) words_.back() &= (Word{1} << rem) - 1;
  }

  std::size_t width_ = 0;
  std::vector<Word> words_;
};

struct BitSetHash {
  std::size_t operator()(const BitSet& b) const noexcept { return b.hash(); }
};

}  // namespace galex
