#pragma once

/// Row-sampling least squares: draw r rows with replacement from a
/// distribution p, rescale each by 1/sqrt(p_j), solve the small problem and
/// compare its residual on the full problem with the optimum.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mpsls/error.hpp"
#include "mpsls/rng.hpp"

namespace mpsls {

/// Vose's alias method over the strictly positive entries of p.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(std::span<const double> p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) support_.push_back(i);
    }
    const std::size_t m = support_.size();
    if (m == 0) throw DomainError("alias table needs a positive probability");
    long double total = 0.0L;
    for (std::size_t k : support_) total += p[k];

    prob_.assign(m, 0.0);
    alias_.assign(m, 0);
    std::vector<double> scaled(m);
    std::vector<std::size_t> small, large;
    for (std::size_t k = 0; k < m; ++k) {
      scaled[k] = static_cast<double>(p[support_[k]] * static_cast<long double>(m) / total);
      (scaled[k] < 1.0 ? small : large).push_back(k);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t k : large) prob_[k] = 1.0;
    for (std::size_t k : small) prob_[k] = 1.0;  // leftovers from rounding
  }

  template <class URBG>
  std::size_t operator()(URBG& rng) const {
    std::uniform_int_distribution<std::size_t> slot(0, prob_.size() - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const std::size_t k = slot(rng);
    return support_[coin(rng) < prob_[k] ? k : alias_[k]];
  }

  std::size_t support_size() const { return support_.size(); }

 private:
  std::vector<std::size_t> support_;
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

/// A validated sampling distribution with a draw count and a seed.
struct SamplingPlan {
  std::vector<double> p;
  std::size_t r = 1;
  std::uint64_t seed = 0;
};

/// Checks p_j >= 0, sum p = 1 within 1e-12 and r >= 1.
inline SamplingPlan make_plan(std::vector<double> p, std::size_t r, std::uint64_t seed) {
  if (p.empty()) throw DomainError("sampling distribution is empty");
  if (r == 0) throw DomainError("sample count must be at least 1");
  long double total = 0.0L;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("probabilities must be finite and >= 0");
    total += v;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-12) {
    throw DomainError("probabilities must sum to 1");
  }
  return SamplingPlan{std::move(p), r, seed};
}

/// Rescales nonnegative weights to sum to 1.
inline std::vector<double> normalise(std::span<const double> weights) {
  long double total = 0.0L;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weights must be finite and >= 0");
    total += w;
  }
  if (total == 0.0L) throw DomainError("weights sum to zero");
  std::vector<double> p(weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(weights[i] / total);
  return p;
}

inline std::vector<double> uniform_distribution(std::size_t n) {
  if (n == 0) throw DomainError("uniform distribution over zero rows");
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

/// One row of the sampling matrix: e_index^T / sqrt(p_index).
struct SampledRow {
  std::size_t index;
  double weight;
};

template <class URBG>
std::vector<SampledRow> sample_rows(const SamplingPlan& plan, const AliasTable& table, URBG& rng) {
  std::vector<SampledRow> rows;
  rows.reserve(plan.r);
  for (std::size_t t = 0; t < plan.r; ++t) {
    const std::size_t j = table(rng);
    rows.push_back({j, 1.0 / std::sqrt(plan.p[j])});
  }
  return rows;
}

/// r independent draws with replacement, seeded from plan.seed.
inline std::vector<SampledRow> sample_rows(const SamplingPlan& plan) {
  const AliasTable table(plan.p);
  Rng rng = make_rng(plan.seed, "sample-rows");
  return sample_rows(plan, table, rng);
}

/// min ||A x - y||_2 with its optimum precomputed.
template <class Scalar = double>
class LeastSquaresProblem {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LeastSquaresProblem(Matrix a, Vector y) : a_(std::move(a)), y_(std::move(y)) {
    if (a_.rows() == 0 || a_.cols() == 0) throw ShapeError("least squares: empty matrix");
    if (a_.rows() != y_.rows()) throw ShapeError("least squares: y length differs from rows of A");
    if (!a_.allFinite() || !y_.allFinite()) throw DomainError("least squares: non-finite data");
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a_);
    rank_ = cod.rank();
    x_opt_ = cod.solve(y_);
    residual_opt_ = static_cast<double>((a_ * x_opt_ - y_).norm());
    using Real = typename Eigen::NumTraits<Scalar>::Real;
    const double eps = static_cast<double>(Eigen::NumTraits<Real>::epsilon());
    const double scale = static_cast<double>(a_.norm() * x_opt_.norm() + y_.norm());
    residual_floor_ = 64.0 * eps * static_cast<double>(a_.rows()) * scale;
  }

  const Matrix& a() const { return a_; }
  const Vector& y() const { return y_; }
  const Vector& x_opt() const { return x_opt_; }
  double residual_opt() const { return residual_opt_; }
  /// Residuals at or below this level are rounding noise of a consistent system.
  double residual_floor() const { return residual_floor_; }
  Eigen::Index rank() const { return rank_; }
  std::size_t rows() const { return static_cast<std::size_t>(a_.rows()); }

 private:
  Matrix a_;
  Vector y_;
  Vector x_opt_;
  double residual_opt_ = 0.0;
  double residual_floor_ = 0.0;
  Eigen::Index rank_ = 0;
};

template <class Scalar = double>
struct SampledSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x_hat;
  std::vector<std::size_t> sampled_rows;
  double residual_full = 0.0;
  double residual_opt = 0.0;
  /// residual_full / residual_opt; 1 when both are rounding noise, +inf when only the optimum is.
  double ratio = 1.0;
  /// The sampled system has lower rank than A; x_hat is its minimum-norm solution.
  bool deficient = false;
};

template <class Scalar>
SampledSolution<Scalar> solve_sampled_rows(const LeastSquaresProblem<Scalar>& problem,
                                           std::span<const SampledRow> rows) {
  using Matrix = typename LeastSquaresProblem<Scalar>::Matrix;
  using Vector = typename LeastSquaresProblem<Scalar>::Vector;
  if (rows.empty()) throw DomainError("no sampled rows");
  const auto d = problem.a().cols();
  const auto r = static_cast<Eigen::Index>(rows.size());
  Matrix ma(r, d);
  Vector my(r);
  SampledSolution<Scalar> out;
  out.sampled_rows.reserve(rows.size());
  for (Eigen::Index t = 0; t < r; ++t) {
    const SampledRow& s = rows[static_cast<std::size_t>(t)];
    if (s.index >= problem.rows()) throw DomainError("sampled row out of range");
    ma.row(t) = problem.a().row(static_cast<Eigen::Index>(s.index)) * Scalar(s.weight);
    my(t) = problem.y()(static_cast<Eigen::Index>(s.index)) * Scalar(s.weight);
    out.sampled_rows.push_back(s.index);
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(ma);
  out.x_hat = cod.solve(my);
  out.deficient = cod.rank() < problem.rank();
  out.residual_full = static_cast<double>((problem.a() * out.x_hat - problem.y()).norm());
  out.residual_opt = problem.residual_opt();
  const double floor = problem.residual_floor();
  if (out.residual_opt > floor) {
    out.ratio = out.residual_full / out.residual_opt;
  } else {
    out.ratio = out.residual_full <= floor ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return out;
}

/// Draws the rows of plan and solves the sampled problem.
template <class Scalar>
SampledSolution<Scalar> sampled_solve(const LeastSquaresProblem<Scalar>& problem,
                                      const SamplingPlan& plan) {
  if (plan.p.size() != problem.rows()) throw ShapeError("plan length differs from rows of A");
  const auto rows = sample_rows(plan);
  return solve_sampled_rows(problem, std::span<const SampledRow>(rows));
}

/// Smallest integer r with r >= 8 (d+1) / eps^2 * ln((d+1) / delta).
inline std::size_t theorem_sample_bound(std::size_t d, double eps, double delta) {
  if (d == 0) throw DomainError("sample bound: d must be at least 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("sample bound: eps must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("sample bound: delta must lie in (0, 1)");
  const double k = static_cast<double>(d + 1);
  const double bound = 8.0 * k / (eps * eps) * std::log(k / delta);
  // Absorb rounding so that exact integer bounds are not pushed up by one.
  const double nearest = std::round(bound);
  if (std::abs(bound - nearest) <= 1e-9 * std::max(1.0, bound)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(bound));
}

struct NamedDistribution {
  std::string name;
  std::vector<double> p;
};

struct TrialRecord {
  std::string method;
  std::size_t r = 0;
  std::size_t trial = 0;
  double ratio = 0.0;
  bool deficient = false;
};

struct CurvePoint {
  std::string method;
  std::size_t r = 0;
  double geomean = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};

struct ErrorCurve {
  std::vector<TrialRecord> trials;  // method-major, then r, then trial
  std::vector<CurvePoint> points;   // method-major, then r
};

/// Linear interpolation between order statistics (Hyndman-Fan type 7).
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || values[lo] == values[hi]) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

inline double geometric_mean(std::span<const double> values) {
  if (values.empty()) throw DomainError("geometric mean of an empty sample");
  long double s = 0.0L;
  for (double v : values) {
    if (!(v > 0.0)) throw DomainError("geometric mean needs positive values");
    if (std::isinf(v)) return v;
    s += std::log(static_cast<long double>(v));
  }
  return static_cast<double>(std::exp(s / static_cast<long double>(values.size())));
}

/// Runs `trials` sampled solves for every (distribution, r) pair. Trial t of
/// method m at sample count r draws from its own stream, so the output does not
/// depend on `workers`.
template <class Scalar>
ErrorCurve error_curve(const LeastSquaresProblem<Scalar>& problem,
                       const std::vector<NamedDistribution>& distributions,
                       const std::vector<std::size_t>& r_grid, std::size_t trials,
                       std::uint64_t seed, unsigned workers = 1) {
  if (trials == 0) throw DomainError("error curve needs at least one trial");
  if (r_grid.empty()) throw DomainError("error curve needs a sample-count grid");
  std::vector<AliasTable> tables;
  for (const auto& dist : distributions) {
    if (dist.p.size() != problem.rows()) throw ShapeError("distribution length differs from rows of A");
    make_plan(dist.p, 1, 0);
    tables.emplace_back(dist.p);
  }

  ErrorCurve out;
  const std::size_t per_method = r_grid.size() * trials;
  out.trials.resize(distributions.size() * per_method);
  auto run = [&](std::size_t task) {
    const std::size_t m = task / per_method;
    const std::size_t g = (task % per_method) / trials;
    const std::size_t t = task % trials;
    const SamplingPlan plan{distributions[m].p, r_grid[g], seed};
    Rng rng = make_rng(seed, "error-curve/" + distributions[m].name, {r_grid[g], t});
    const auto rows = sample_rows(plan, tables[m], rng);
    const auto sol = solve_sampled_rows(problem, std::span<const SampledRow>(rows));
    out.trials[task] = {distributions[m].name, r_grid[g], t, sol.ratio, sol.deficient};
  };

  const std::size_t total = out.trials.size();
  const std::size_t nthreads = std::max<std::size_t>(1, std::min<std::size_t>(workers, total));
  if (nthreads == 1) {
    for (std::size_t task = 0; task < total; ++task) run(task);
  } else {
    std::vector<std::exception_ptr> failures(nthreads);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t task = w; task < total; task += nthreads) run(task);
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  for (std::size_t m = 0; m < distributions.size(); ++m) {
    for (std::size_t g = 0; g < r_grid.size(); ++g) {
      std::vector<double> ratios(trials);
      for (std::size_t t = 0; t < trials; ++t) ratios[t] = out.trials[m * per_method + g * trials + t].ratio;
      out.points.push_back({distributions[m].name, r_grid[g], geometric_mean(ratios),
                            quantile(ratios, 0.05), quantile(ratios, 0.95)});
    }
  }
  return out;
}

}  // namespace mpsls
