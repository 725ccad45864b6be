#pragma once

/// Statistical leverage scores: exact, max-plus, naive max-plus and CNRN,
/// plus the base-10 softmax that turns log-scale scores into distributions.
///
/// Numeric matrices are Eigen matrices (real or complex, any scalar type with
/// Eigen NumTraits, including boost::multiprecision numbers). Max-plus inputs
/// use log base 10 throughout.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string_view>
#include <type_traits>
#include <vector>

#include "mpsls/assignment.hpp"
#include "mpsls/error.hpp"
#include "mpsls/maxplus.hpp"
#include "mpsls/rng.hpp"

namespace mpsls {

using NumericMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

enum class ScoreKind { exact_probability, maxplus_log, naive_log, cnrn, softmax_distribution };

constexpr std::string_view to_string(ScoreKind k) {
  switch (k) {
    case ScoreKind::exact_probability: return "exact-probability";
    case ScoreKind::maxplus_log: return "maxplus-log";
    case ScoreKind::naive_log: return "naive-log";
    case ScoreKind::cnrn: return "cnrn";
    case ScoreKind::softmax_distribution: return "softmax-distribution";
  }
  return "unknown";
}

struct ScoreVector {
  ScoreKind kind = ScoreKind::exact_probability;
  std::vector<double> values;
  /// Sum of the values for exact (numerical rank k) and CNRN (column count d)
  /// scores; 0 for log-scale kinds.
  std::size_t rank = 0;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  /// values / rank, a probability distribution over rows.
  std::vector<double> distribution() const {
    if (kind == ScoreKind::softmax_distribution) return values;
    if (kind != ScoreKind::exact_probability && kind != ScoreKind::cnrn) {
      throw DomainError("distribution() needs exact, CNRN or softmax scores");
    }
    if (rank == 0) throw DomainError("zero-rank scores have no distribution");
    std::vector<double> out(values);
    for (double& v : out) v /= static_cast<double>(rank);
    return out;
  }
};

namespace detail {

template <class Derived>
void check_numeric(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() == 0 || a.cols() == 0) throw ShapeError("empty matrix");
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if constexpr (std::is_floating_point_v<Real>) {
    if (!a.allFinite()) throw DomainError("matrix entries must be finite");
  }
}

}  // namespace detail

/// p_i(A) = ||Q_i.||^2 where Q is an orthonormal basis of col(A) from a
/// column-pivoted Householder QR. Numerical rank uses the threshold
/// max(n, d) * eps * (largest column norm).
template <class Derived>
ScoreVector exact_scores(const Eigen::MatrixBase<Derived>& a) {
  detail::check_numeric(a);
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = a.rows();
  const Eigen::Index d = a.cols();

  Eigen::ColPivHouseholderQR<Mat> qr(a.derived().eval());
  qr.setThreshold(Real(static_cast<double>(std::max(n, d))) * Eigen::NumTraits<Real>::epsilon());
  const Eigen::Index k = qr.rank();

  ScoreVector out;
  out.kind = ScoreKind::exact_probability;
  out.rank = static_cast<std::size_t>(k);
  out.values.assign(static_cast<std::size_t>(n), 0.0);
  if (k == 0) return out;

  const Mat q = qr.householderQ() * Mat::Identity(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Real s(0);
    for (Eigen::Index c = 0; c < k; ++c) s += Eigen::numext::abs2(q(i, c));
    out.values[static_cast<std::size_t>(i)] = static_cast<double>(s);
  }
  return out;
}

/// Entrywise log10 |a_ij|; zero entries become -inf.
template <class Derived>
MaxPlusMatrix log_abs(const Eigen::MatrixBase<Derived>& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  const auto d = static_cast<std::size_t>(a.cols());
  MaxPlusMatrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      using std::abs;
      const double mag = static_cast<double>(abs(a(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(j))));
      if (!std::isfinite(mag)) throw DomainError("log_abs: non-finite entry");
      if (mag > 0.0) out(i, j) = MaxPlus{std::log10(mag)};
    }
  }
  return out;
}

/// Everything computed on the way to the max-plus scores.
struct MaxPlusScoreDetail {
  ScoreVector scores;
  AssignmentResult assignment;
  AssignedBlock block;          // M = A(phi, :) and its Hungarian scaling
  MaxPlusMatrix inverse;        // M^{(x)-1}
  std::vector<MaxPlus> x;       // M^{(x)-1} (x) 0
};

/// Max-plus leverage scores 2 (perm(A, i) - perm(A)):
/// 0 on rows of the computed optimal assignment phi and
/// 2 (A (x) M^{(x)-1} (x) 0)_i elsewhere, with M = A(phi, :).
template <MaxPlusMatrixLike M>
MaxPlusScoreDetail maxplus_scores_detailed(const M& a) {
  MaxPlusScoreDetail out;
  out.assignment = optimal_assignment(a);
  out.block = assigned_block(a, out.assignment);
  out.inverse = mp_inverse_from_scaled(out.block.scaled);

  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  out.x.assign(d, MaxPlus::bottom());
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = 0; j < d; ++j) out.x[k] += out.inverse(k, j);
  }

  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < d; ++k) {
    if (out.x[k].is_bottom()) continue;
    const double xk = out.x[k].value();
    a.for_each_finite_in_col(k, [&](std::size_t i, double v) { best[i] = std::max(best[i], v + xk); });
  }
  std::vector<char> assigned(n, 0);
  for (std::size_t r : out.assignment.phi) assigned[r] = 1;

  out.scores.kind = ScoreKind::maxplus_log;
  out.scores.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (assigned[i]) {
      out.scores.values[i] = 0.0;
    } else {
      // (A (x) x)_i <= 0 exactly; clip rounding noise.
      out.scores.values[i] = std::min(0.0, 2.0 * best[i]);
    }
  }
  return out;
}

template <MaxPlusMatrixLike M>
ScoreVector maxplus_scores(const M& a) {
  return maxplus_scores_detailed(a).scores;
}

/// Naive max-plus scores q_i = max_j (a_ij - max_k a_kj): the supremum over x
/// of (A (x) x)_i - ||A (x) x||_max, attained at a column indicator.
template <MaxPlusMatrixLike M>
ScoreVector naive_maxplus_scores(const M& a) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  std::vector<double> colmax(d, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < d; ++j) {
    a.for_each_finite_in_col(j, [&](std::size_t, double v) { colmax[j] = std::max(colmax[j], v); });
    if (std::isinf(colmax[j])) throw DomainError("naive scores: column without finite entries");
  }
  ScoreVector out;
  out.kind = ScoreKind::naive_log;
  out.values.assign(n, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < d; ++j) {
    a.for_each_finite_in_col(j, [&](std::size_t i, double v) {
      out.values[i] = std::max(out.values[i], v - colmax[j]);
    });
  }
  return out;
}

/// Column-normalised row norms q_i = ||C_i.||^2, C = A D^{-1}, d_jj = ||A_.j||_2.
template <class Derived>
ScoreVector cnrn_scores(const Eigen::MatrixBase<Derived>& a) {
  detail::check_numeric(a);
  const Eigen::Index n = a.rows();
  const Eigen::Index d = a.cols();
  std::vector<double> col_norm2(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index j = 0; j < d; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += static_cast<double>(Eigen::numext::abs2(a(i, j)));
    if (s == 0.0) throw DomainError("CNRN scores: zero column");
    col_norm2[static_cast<std::size_t>(j)] = s;
  }
  ScoreVector out;
  out.kind = ScoreKind::cnrn;
  out.rank = static_cast<std::size_t>(d);
  out.values.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      s += static_cast<double>(Eigen::numext::abs2(a(i, j))) / col_norm2[static_cast<std::size_t>(j)];
    }
    out.values[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

/// sigma(p)_i = 10^{p_i} / sum_j 10^{p_j}, evaluated with the maximum shifted out.
inline ScoreVector softmax(const ScoreVector& p) {
  if (p.kind != ScoreKind::maxplus_log && p.kind != ScoreKind::naive_log) {
    throw DomainError("softmax expects log-scale scores");
  }
  if (p.values.empty()) throw DomainError("softmax of an empty vector");
  double top = -std::numeric_limits<double>::infinity();
  for (double v : p.values) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw DomainError("softmax: scores must be finite or -inf");
    }
    top = std::max(top, v);
  }
  if (std::isinf(top)) throw DomainError("softmax: every score is -inf");
  ScoreVector out;
  out.kind = ScoreKind::softmax_distribution;
  out.values.resize(p.values.size());
  long double total = 0.0L;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    out.values[i] = std::isinf(p.values[i]) ? 0.0 : std::pow(10.0, p.values[i] - top);
    total += out.values[i];
  }
  for (double& v : out.values) v = static_cast<double>(v / total);
  return out;
}

/// sigma(p(log|A|)), an approximation of p(A)/k that ignores signs and phases.
template <class Derived>
ScoreVector heuristic_approximation(const Eigen::MatrixBase<Derived>& a) {
  return softmax(maxplus_scores(log_abs(a)));
}

struct PhaseEnsemble {
  std::vector<double> samples;  // log10(p_row / k) per trial
  double prediction = 0.0;      // log10 sigma(p(log|A|))_row
};

/// Re-draws the complex argument of every entry uniformly at random, keeping
/// the magnitudes, and records log10 of row `row`'s exact score distribution.
/// Trial t uses its own stream derived from (seed, t).
template <class Derived>
PhaseEnsemble random_phase_ensemble(const Eigen::MatrixBase<Derived>& magnitudes,
                                    std::size_t trials, std::uint64_t seed, std::size_t row) {
  detail::check_numeric(magnitudes);
  if (row >= static_cast<std::size_t>(magnitudes.rows())) {
    throw DomainError("phase ensemble: row out of range");
  }
  const RealMatrix mag = magnitudes.cwiseAbs().template cast<double>();
  PhaseEnsemble out;
  out.prediction = std::log10(heuristic_approximation(mag)[row]);
  out.samples.reserve(trials);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  NumericMatrix a(mag.rows(), mag.cols());
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, "phase-ensemble", {t});
    for (Eigen::Index i = 0; i < mag.rows(); ++i) {
      for (Eigen::Index j = 0; j < mag.cols(); ++j) a(i, j) = std::polar(mag(i, j), angle(rng));
    }
    out.samples.push_back(std::log10(exact_scores(a).distribution()[row]));
  }
  return out;
}

}  // namespace mpsls
