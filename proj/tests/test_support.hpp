#pragma once

// Random instance generators shared by the test suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "mpsls/maxplus.hpp"

namespace mpsls::testing {

/// Entries uniform in [lo, hi); each is bottom with probability bottom_fraction.
inline MaxPlusMatrix random_maxplus(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                    double bottom_fraction = 0.0, double lo = -5.0,
                                    double hi = 5.0) {
  std::uniform_real_distribution<double> value(lo, hi);
  std::bernoulli_distribution drop(bottom_fraction);
  MaxPlusMatrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = value(rng);
      if (!drop(rng)) m(i, j) = MaxPlus{v};
    }
  }
  return m;
}

/// Small integer entries, so equal-weight assignments are common.
inline MaxPlusMatrix random_integer_maxplus(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                            int lo, int hi, double bottom_fraction = 0.0) {
  std::uniform_int_distribution<int> value(lo, hi);
  std::bernoulli_distribution drop(bottom_fraction);
  MaxPlusMatrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const int v = value(rng);
      if (!drop(rng)) m(i, j) = MaxPlus{static_cast<double>(v)};
    }
  }
  return m;
}

inline std::vector<std::size_t> random_permutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline bool same_maxplus(MaxPlus a, MaxPlus b, double tol) {
  if (a.is_bottom() || b.is_bottom()) return a.is_bottom() && b.is_bottom();
  return std::abs(a.value() - b.value()) <= tol;
}

}  // namespace mpsls::testing
