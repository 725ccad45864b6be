#pragma once

/// Synthetic data generation and the experiment drivers behind the command
/// line tool: score comparisons, sampled least-squares benchmarks, Puiseux
/// slope studies and random-phase ensembles.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mpsls/error.hpp"
#include "mpsls/leverage.hpp"
#include "mpsls/puiseux.hpp"
#include "mpsls/rng.hpp"
#include "mpsls/sampling.hpp"

namespace mpsls {

/// Row distributions: Gaussian, t with 3 and t with 1 degree of freedom.
enum class Regime { incoherent, semi_coherent, coherent };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::incoherent: return "incoherent";
    case Regime::semi_coherent: return "semi-coherent";
    case Regime::coherent: return "coherent";
  }
  return "unknown";
}

inline Regime parse_regime(std::string_view s) {
  if (s == "incoherent") return Regime::incoherent;
  if (s == "semi-coherent") return Regime::semi_coherent;
  if (s == "coherent") return Regime::coherent;
  throw DomainError("unknown regime '" + std::string(s) + "'");
}

/// Degrees of freedom of the row distribution; 0 means Gaussian.
constexpr int degrees_of_freedom(Regime r) {
  switch (r) {
    case Regime::incoherent: return 0;
    case Regime::semi_coherent: return 3;
    case Regime::coherent: return 1;
  }
  return 0;
}

struct ExperimentConfig {
  Regime regime = Regime::coherent;
  std::size_t n = 10000;
  std::size_t d = 21;
  std::uint64_t seed = 1;
  double sigma_base = 2.0;
  double sigma_decay = 0.5;
  std::vector<std::size_t> r_grid = {250, 500, 1000, 2000};
  std::size_t trials = 50;
  unsigned workers = 1;

  /// The large configuration: n = 100000 rows and d = 51 columns.
  void use_full_scale() {
    n = 100000;
    d = 51;
  }

  void validate() const {
    if (d < 2 || n < d) throw DomainError("need n >= d >= 2");
    if (!(sigma_base > 0.0) || !(std::abs(sigma_decay) < 1.0)) {
      throw DomainError("sigma_base must be positive and |sigma_decay| < 1");
    }
  }
};

/// Sigma_ij = sigma_base * sigma_decay^|i-j|.
inline RealMatrix covariance(const ExperimentConfig& c) {
  const auto d = static_cast<Eigen::Index>(c.d);
  RealMatrix s(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) s(i, j) = c.sigma_base * std::pow(c.sigma_decay, std::abs(i - j));
  return s;
}

/// n independent rows 1 + L g * sqrt(nu / chi2_nu) with Sigma = L L^T and g
/// standard normal; the chi-square factor is dropped in the Gaussian regime.
/// Rows are drawn in order from one stream labelled by the regime.
inline RealMatrix generate(const ExperimentConfig& c) {
  c.validate();
  const Eigen::LLT<RealMatrix> llt(covariance(c));
  if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
  const RealMatrix l = llt.matrixL();
  const int nu = degrees_of_freedom(c.regime);
  Rng rng = make_rng(c.seed, "generate/" + std::string(to_string(c.regime)));
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi2(nu > 0 ? nu : 1);
  const auto n = static_cast<Eigen::Index>(c.n), d = static_cast<Eigen::Index>(c.d);
  RealMatrix a(n, d);
  Eigen::VectorXd g(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(j) = normal(rng);
    const double scale = nu > 0 ? std::sqrt(static_cast<double>(nu) / chi2(rng)) : 1.0;
    a.row(i) = (l * g).transpose() * scale;
    a.row(i).array() += 1.0;
  }
  return a;
}

/// Per-row distributions over the rows of one matrix.
struct ScoresRecord {
  std::vector<double> exact;            // p_i / k
  std::vector<double> maxplus_log;      // p_i(log|A|)
  std::vector<double> maxplus_softmax;  // sigma(p(log|A|))
  std::vector<double> cnrn;             // q_i / d
  std::vector<double> uniform;
  std::size_t rank = 0;

  /// log10(approx_i / exact_i); -inf or +inf where one side is zero.
  static std::vector<double> log10_ratio(const std::vector<double>& approx, const std::vector<double>& exact) {
    std::vector<double> out(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) out[i] = std::log10(approx[i]) - std::log10(exact[i]);
    return out;
  }

  /// Fraction of rows with |log10(approx_i / exact_i)| <= decades.
  static double fraction_within(const std::vector<double>& approx, const std::vector<double>& exact, double decades) {
    std::size_t hits = 0;
    for (double r : log10_ratio(approx, exact)) hits += std::abs(r) <= decades;
    return static_cast<double>(hits) / static_cast<double>(exact.size());
  }
};

template <class Derived>
ScoresRecord run_scores(const Eigen::MatrixBase<Derived>& a) {
  ScoresRecord out;
  const ScoreVector exact = exact_scores(a);
  out.rank = exact.rank;
  out.exact = exact.distribution();
  const ScoreVector mp = maxplus_scores(log_abs(a));
  out.maxplus_log = mp.values;
  out.maxplus_softmax = softmax(mp).values;
  out.cnrn = cnrn_scores(a).distribution();
  out.uniform = uniform_distribution(static_cast<std::size_t>(a.rows()));
  return out;
}

struct LsqBenchmark {
  ScoresRecord scores;  // distributions of the full matrix [B, y]
  ErrorCurve curve;
  std::uint64_t curve_seed = 0;
};

/// Splits A into B (first d-1 columns) and y (last column) and runs the error
/// curve for the exact, maxplus, cnrn and uniform distributions of [B, y].
inline LsqBenchmark run_lsq_benchmark(const ExperimentConfig& c, const RealMatrix& a) {
  if (a.cols() < 2) throw ShapeError("benchmark needs at least two columns");
  LsqBenchmark out;
  out.scores = run_scores(a);
  const LeastSquaresProblem<double> problem(a.leftCols(a.cols() - 1), a.col(a.cols() - 1));
  const std::vector<NamedDistribution> dists = {{"exact", out.scores.exact},
                                                {"maxplus", out.scores.maxplus_softmax},
                                                {"cnrn", out.scores.cnrn},
                                                {"uniform", out.scores.uniform}};
  out.curve_seed = derive_seed(c.seed, "lsq-bench");
  out.curve = error_curve(problem, dists, c.r_grid, c.trials, out.curve_seed, c.workers);
  return out;
}

inline LsqBenchmark run_lsq_benchmark(const ExperimentConfig& c) { return run_lsq_benchmark(c, generate(c)); }

/// Geomean of `method` at every r of the curve, in grid order.
inline std::vector<double> geomeans(const ErrorCurve& curve, std::string_view method) {
  std::vector<double> out;
  for (const auto& p : curve.points)
    if (p.method == method) out.push_back(p.geomean);
  return out;
}

enum class CoefficientMode { as_given, random_gaussian };

inline CoefficientMode parse_coefficient_mode(std::string_view s) {
  if (s == "as-given") return CoefficientMode::as_given;
  if (s == "random-gaussian") return CoefficientMode::random_gaussian;
  throw DomainError("unknown coefficient mode '" + std::string(s) + "'");
}

struct PuiseuxConvergenceConfig {
  double z_max = 1e-2;
  double z_min = 1e-6;
  std::size_t points = 9;
  CoefficientMode mode = CoefficientMode::random_gaussian;
  std::uint64_t seed = 1;
};

inline ScoreSlopes run_puiseux_convergence(const PuiseuxMatrix& m, const PuiseuxConvergenceConfig& c) {
  const auto grid = geometric_grid(c.z_max, c.z_min, c.points);
  if (c.mode == CoefficientMode::as_given) return asymptotic_score_slopes(m, grid);
  return asymptotic_score_slopes(randomize_leading_coefficients(m, c.seed), grid);
}

/// Share of ensemble samples inside the one-decade band centred on the
/// prediction, and the share more than one decade below the prediction.
struct EnsembleSummary {
  double within = 0.0;
  double below = 0.0;
};

inline EnsembleSummary summarise(const PhaseEnsemble& e) {
  if (e.samples.empty()) throw DomainError("empty ensemble");
  EnsembleSummary s;
  for (double x : e.samples) {
    s.within += std::abs(x - e.prediction) <= 0.5;
    s.below += x < e.prediction - 1.0;
  }
  s.within /= static_cast<double>(e.samples.size());
  s.below /= static_cast<double>(e.samples.size());
  return s;
}

}  // namespace mpsls
