#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace mixer {

// Disjoint sets with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  // Component sizes, largest first.
  std::vector<std::uint64_t> component_sizes() {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < parent_.size(); ++i)
      if (find(i) == i) out.push_back(size_[i]);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint64_t> size_;
};

}  // namespace mixer
