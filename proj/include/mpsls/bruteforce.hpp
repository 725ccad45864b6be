#pragma once

// Enumeration oracles over all injections {0..d-1} -> {0..n-1}.
// Test ground truth only: inputs with more than kMaxOracleRows rows are
// refused.

#include <cstddef>
#include <functional>
#include <vector>

#include "mpsls/error.hpp"
#include "mpsls/maxplus.hpp"

namespace mpsls {

inline constexpr std::size_t kMaxOracleRows = 10;

/// An injection phi: column j -> row rows[j], with its weight sum_j a_{phi(j) j}.
struct Injection {
  std::vector<std::size_t> rows;
  MaxPlus weight;

  friend bool operator==(const Injection&, const Injection&) = default;
};

namespace detail {

template <MaxPlusMatrixLike M>
void check_oracle_shape(const M& a) {
  if (a.rows() < a.cols()) throw ShapeError("injections need rows >= cols");
  if (a.rows() > kMaxOracleRows) {
    throw CapacityError("enumeration oracle limited to " + std::to_string(kMaxOracleRows) +
                        " rows");
  }
}

/// Visits every injection in lexicographic order of (phi(0), ..., phi(d-1)).
template <MaxPlusMatrixLike M>
void for_each_injection(const M& a,
                        const std::function<void(const std::vector<std::size_t>&, MaxPlus)>& f) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  const MaxPlusMatrix dense = to_dense(a);
  std::vector<std::size_t> phi(d);
  std::vector<bool> used(n, false);
  // Partial weights are summed in column order so equal injections compare exactly.
  std::function<void(std::size_t, MaxPlus)> rec = [&](std::size_t j, MaxPlus w) {
    if (j == d) {
      f(phi, w);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      phi[j] = i;
      rec(j + 1, w * dense(i, j));
      used[i] = false;
    }
  };
  rec(0, MaxPlus::unit());
}

}  // namespace detail

/// perm(A) = max over injections of sum_j a_{phi(j) j}.
template <MaxPlusMatrixLike M>
MaxPlus permanent_bruteforce(const M& a) {
  detail::check_oracle_shape(a);
  MaxPlus best = MaxPlus::bottom();
  detail::for_each_injection(a, [&](const auto&, MaxPlus w) { best += w; });
  return best;
}

/// perm(A, i): best weight among injections that assign row i.
template <MaxPlusMatrixLike M>
MaxPlus obligated_permanent_bruteforce(const M& a, std::size_t i) {
  detail::check_oracle_shape(a);
  if (i >= a.rows()) throw DomainError("obligated permanent: row index out of range");
  MaxPlus best = MaxPlus::bottom();
  detail::for_each_injection(a, [&](const std::vector<std::size_t>& phi, MaxPlus w) {
    for (std::size_t r : phi) {
      if (r == i) {
        best += w;
        return;
      }
    }
  });
  return best;
}

/// All injections attaining the permanent, lexicographically ordered.
/// Empty when the permanent is bottom.
template <MaxPlusMatrixLike M>
std::vector<Injection> optimal_assignments_bruteforce(const M& a) {
  const MaxPlus perm = permanent_bruteforce(a);
  std::vector<Injection> out;
  if (perm.is_bottom()) return out;
  detail::for_each_injection(a, [&](const std::vector<std::size_t>& phi, MaxPlus w) {
    if (w == perm) out.push_back({phi, w});
  });
  return out;
}

/// Max-plus scores 2 (perm(A, i) - perm(A)) straight from the definition.
template <MaxPlusMatrixLike M>
std::vector<MaxPlus> maxplus_scores_bruteforce(const M& a) {
  const MaxPlus perm = permanent_bruteforce(a);
  if (perm.is_bottom()) throw StructuralRankError("permanent is -inf");
  std::vector<MaxPlus> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const MaxPlus diff = mp_difference(obligated_permanent_bruteforce(a, i), perm);
    out[i] = diff.is_bottom() ? diff : MaxPlus{2.0 * diff.value()};
  }
  return out;
}

/// (M^{(x)-1})_ij = perm(M without row j and column i) - perm(M), by enumeration.
inline MaxPlusMatrix mp_inverse_bruteforce(const MaxPlusMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("inverse needs a square matrix");
  const MaxPlus perm = permanent_bruteforce(m);
  if (perm.is_bottom()) throw StructuralRankError("permanent is -inf");
  const std::size_t d = m.rows();
  MaxPlusMatrix out(d, d);
  if (d == 1) {
    out(0, 0) = MaxPlus{-m(0, 0).value()};
    return out;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out(i, j) = mp_difference(permanent_bruteforce(delete_row_col(m, j, i)), perm);
    }
  }
  return out;
}

}  // namespace mpsls
