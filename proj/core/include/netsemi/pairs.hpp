#pragma once

#include <cstddef>
#include <stdexcept>

namespace netsemi {

/// Unordered pair {i, j}, i < j, with its linear index in the fixed stacking
/// order (0,1),(0,2),...,(0,N-1),(1,2),... used everywhere a pair array is
/// laid out (links, kernel fields, moment sums).
struct PairIndex {
  int i = 0;
  int j = 1;
  std::size_t linear = 0;
};

inline std::size_t pair_count(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

inline std::size_t pair_linear(int i, int j, int n) {
  if (i > j) {
    const int t = i;
    i = j;
    j = t;
  }
  // rows 0..i-1 hold (n-1) + (n-2) + ... + (n-i) = i*(n-1) - i*(i-1)/2 pairs
  const std::size_t ui = static_cast<std::size_t>(i);
  const std::size_t row_offset =
      ui * static_cast<std::size_t>(n - 1) - ui * (ui - 1) / 2;
  return row_offset + static_cast<std::size_t>(j - i - 1);
}

inline PairIndex pair_from_linear(std::size_t l, int n) {
  if (l >= pair_count(n)) throw std::out_of_range("pair_from_linear: index");
  std::size_t remaining = l;
  for (int i = 0; i < n - 1; ++i) {
    const std::size_t row = static_cast<std::size_t>(n - 1 - i);
    if (remaining < row) {
      return PairIndex{i, i + 1 + static_cast<int>(remaining), l};
    }
    remaining -= row;
  }
  throw std::logic_error("pair_from_linear: unreachable");
}

/// Visits pairs in linear order; f(i, j, l).
template <typename F>
inline void for_each_pair(int n, F&& f) {
  std::size_t l = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++l) {
      f(i, j, l);
    }
  }
}

}  // namespace netsemi
