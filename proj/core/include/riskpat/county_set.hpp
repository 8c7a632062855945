#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace riskpat {

// Fixed-size bitset over county rows.
class CountySet {
 public:
  CountySet() = default;
  explicit CountySet(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  void insert(std::size_t row) { words_[row >> 6] |= std::uint64_t{1} << (row & 63); }
  bool contains(std::size_t row) const { return (words_[row >> 6] >> (row & 63)) & 1u; }

  std::size_t count() const {
    std::size_t n = 0;
    for (const auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  CountySet& operator&=(const CountySet& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }
  friend CountySet operator&(CountySet a, const CountySet& b) { return a &= b; }
  bool operator==(const CountySet&) const = default;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      for (std::uint64_t w = words_[i]; w; w &= w - 1) {
        fn(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
      }
    }
  }

  std::vector<std::size_t> rows() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t r) { out.push_back(r); });
    return out;
  }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace riskpat
