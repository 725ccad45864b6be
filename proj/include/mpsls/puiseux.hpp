#pragma once

/// Finite Puiseux series in z with rational exponents and complex
/// coefficients, matrices of them, and numerical checks of how their
/// valuations govern determinants, inverses and leverage scores as z -> 0.

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <boost/rational.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpsls/assignment.hpp"
#include "mpsls/error.hpp"
#include "mpsls/leverage.hpp"
#include "mpsls/maxplus.hpp"
#include "mpsls/rng.hpp"

namespace mpsls {

using Rational = boost::rational<std::int64_t>;
using Complex = std::complex<double>;
/// 50 decimal digits; keeps scores of order z^k accurate at z = 1e-6.
using HighPrecisionComplex = boost::multiprecision::cpp_complex_50;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// sum_k c_k z^{e_k} with strictly increasing exponents and nonzero coefficients.
class PuiseuxSeries {
 public:
  struct Term {
    Rational exponent;
    Complex coefficient;
  };

  /// Products keep this many lowest-order terms.
  static constexpr std::size_t kMaxTerms = 20;

  PuiseuxSeries() = default;

  /// Sorts, merges equal exponents and drops coefficients that cancel to
  /// within 1e-13 of the largest merged summand.
  explicit PuiseuxSeries(std::vector<Term> terms) {
    for (const Term& t : terms) {
      if (!std::isfinite(t.coefficient.real()) || !std::isfinite(t.coefficient.imag())) {
        throw DomainError("Puiseux coefficients must be finite");
      }
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
    for (std::size_t k = 0; k < terms.size();) {
      Complex sum = 0.0;
      double scale = 0.0;
      std::size_t m = k;
      for (; m < terms.size() && terms[m].exponent == terms[k].exponent; ++m) {
        sum += terms[m].coefficient;
        scale = std::max(scale, std::abs(terms[m].coefficient));
      }
      if (std::abs(sum) > 1e-13 * scale) terms_.push_back({terms[k].exponent, sum});
      k = m;
    }
  }

  static PuiseuxSeries monomial(Complex c, Rational exponent) {
    return PuiseuxSeries({{exponent, c}});
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Minus the lowest exponent.
  Rational valuation() const {
    if (is_zero()) throw DomainError("the zero series has no valuation");
    return -terms_.front().exponent;
  }

  /// Coefficient of the lowest-order term.
  Complex leading_coefficient() const {
    if (is_zero()) throw DomainError("the zero series has no leading coefficient");
    return terms_.front().coefficient;
  }

  /// Principal branch z^e = exp(e log z).
  template <class C = Complex>
  C evaluate(const C& z) const {
    using std::exp;
    using std::log;
    using Real = typename Eigen::NumTraits<C>::Real;
    if (z == C(0)) {
      C out(0);
      for (const Term& t : terms_) {
        if (t.exponent < Rational(0)) throw DomainError("evaluating a negative power at z = 0");
        if (t.exponent == Rational(0)) out += C(Real(t.coefficient.real()), Real(t.coefficient.imag()));
      }
      return out;
    }
    const C log_z = log(z);
    C out(0);
    for (const Term& t : terms_) {
      const Real e = Real(t.exponent.numerator()) / Real(t.exponent.denominator());
      out += C(Real(t.coefficient.real()), Real(t.coefficient.imag())) * exp(C(e) * log_z);
    }
    return out;
  }

  friend PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    std::vector<Term> t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return PuiseuxSeries(std::move(t));
  }

  friend PuiseuxSeries operator-(const PuiseuxSeries& a) {
    std::vector<Term> t = a.terms_;
    for (Term& x : t) x.coefficient = -x.coefficient;
    return PuiseuxSeries(std::move(t));
  }

  friend PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b) { return a + (-b); }

  friend PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    std::vector<Term> t;
    t.reserve(a.terms_.size() * b.terms_.size());
    for (const Term& x : a.terms_) {
      for (const Term& y : b.terms_) t.push_back({x.exponent + y.exponent, x.coefficient * y.coefficient});
    }
    PuiseuxSeries out(std::move(t));
    if (out.terms_.size() > kMaxTerms) out.terms_.resize(kMaxTerms);
    return out;
  }

  friend PuiseuxSeries operator*(Complex c, const PuiseuxSeries& a) {
    return PuiseuxSeries::monomial(c, Rational(0)) * a;
  }

 private:
  std::vector<Term> terms_;
};

/// Row-major matrix of nonzero Puiseux series.
class PuiseuxMatrix {
 public:
  PuiseuxMatrix() = default;
  PuiseuxMatrix(std::size_t rows, std::size_t cols, std::vector<PuiseuxSeries> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) throw ShapeError("Puiseux matrix entry count mismatch");
    for (const auto& e : entries_) {
      if (e.is_zero()) throw DomainError("Puiseux matrix entries must not be identically zero");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const PuiseuxSeries& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  PuiseuxSeries& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<PuiseuxSeries> entries_;
};

/// Entries c_ij z^{-v_ij}.
inline PuiseuxMatrix monomial_matrix(const std::vector<std::vector<Rational>>& valuations,
                                     const Eigen::MatrixXcd& coefficients) {
  const std::size_t n = valuations.size();
  const std::size_t d = n ? valuations[0].size() : 0;
  if (static_cast<std::size_t>(coefficients.rows()) != n ||
      static_cast<std::size_t>(coefficients.cols()) != d) {
    throw ShapeError("monomial_matrix: coefficient shape differs from valuations");
  }
  std::vector<PuiseuxSeries> e;
  e.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    if (valuations[i].size() != d) throw ShapeError("monomial_matrix: ragged valuations");
    for (std::size_t j = 0; j < d; ++j) {
      e.push_back(PuiseuxSeries::monomial(coefficients(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                          -valuations[i][j]));
    }
  }
  return PuiseuxMatrix(n, d, std::move(e));
}

inline std::vector<std::vector<Rational>> exact_valuation(const PuiseuxMatrix& m) {
  std::vector<std::vector<Rational>> v(m.rows(), std::vector<Rational>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) v[i][j] = m(i, j).valuation();
  return v;
}

/// Entrywise V, as a max-plus matrix.
inline MaxPlusMatrix valuation(const PuiseuxMatrix& m) {
  MaxPlusMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = MaxPlus{to_double(m(i, j).valuation())};
  return out;
}

/// Entrywise L.
inline Eigen::MatrixXcd leading_coefficients(const PuiseuxMatrix& m) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).leading_coefficient();
    }
  return out;
}

/// Replaces every leading coefficient with a standard complex Gaussian
/// (independent real and imaginary parts of variance 1/2).
inline PuiseuxMatrix randomize_leading_coefficients(const PuiseuxMatrix& m, std::uint64_t seed) {
  Rng rng = make_rng(seed, "puiseux-coefficients");
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  PuiseuxMatrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      auto terms = m(i, j).terms();
      Complex c;
      do {
        c = Complex(g(rng), g(rng));
      } while (c == Complex(0.0));
      terms.front().coefficient = c;
      out(i, j) = PuiseuxSeries(std::move(terms));
    }
  }
  return out;
}

/// Entrywise evaluation at z.
template <class C = Complex>
Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> evaluate(const PuiseuxMatrix& m, const C& z) {
  Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> out(static_cast<Eigen::Index>(m.rows()),
                                                       static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).template evaluate<C>(z);
    }
  return out;
}

inline constexpr std::size_t kMaxGoodCheckCols = 4;
inline constexpr std::size_t kMaxGoodCheckRows = 6;

namespace detail {

/// All permutations of 0..d-1 with their signs, in lexicographic order.
inline std::vector<std::pair<std::vector<std::size_t>, int>> signed_permutations(std::size_t d) {
  std::vector<std::size_t> p(d);
  for (std::size_t k = 0; k < d; ++k) p[k] = k;
  std::vector<std::pair<std::vector<std::size_t>, int>> out;
  do {
    int inversions = 0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a + 1; b < d; ++b) inversions += p[a] > p[b];
    out.emplace_back(p, inversions % 2 ? -1 : 1);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// All 2^k subset sums of the given values (bit b selects values[b]).
inline std::vector<Complex> subset_sums(const std::vector<Complex>& values) {
  std::vector<Complex> sums(std::size_t{1} << values.size());
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    sums[mask] = sums[mask & (mask - 1)] + values[low];
  }
  return sums;
}

/// True when some nonempty subset of terms sums to zero within tol,
/// by matching subset sums of the two halves.
inline bool has_vanishing_subset_sum(const std::vector<Complex>& terms, double tol) {
  const std::size_t half = terms.size() / 2;
  const std::vector<Complex> left(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(half));
  const std::vector<Complex> right(terms.begin() + static_cast<std::ptrdiff_t>(half), terms.end());
  const auto ls = subset_sums(left);
  auto rs = subset_sums(right);
  std::vector<std::pair<Complex, bool>> sorted;  // (sum, is the empty subset)
  sorted.reserve(rs.size());
  for (std::size_t k = 0; k < rs.size(); ++k) sorted.emplace_back(rs[k], k == 0);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first.real() < b.first.real(); });
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const Complex target = -ls[k];
    auto it = std::lower_bound(sorted.begin(), sorted.end(), target.real() - tol,
                               [](const auto& a, double x) { return a.first.real() < x; });
    for (; it != sorted.end() && it->first.real() <= target.real() + tol; ++it) {
      if (k == 0 && it->second) continue;  // both halves empty
      if (std::abs(it->first - target) <= tol) return true;
    }
  }
  return false;
}

template <class F>
void for_each_row_subset(std::size_t n, std::size_t d, F&& f) {
  std::vector<std::size_t> rows(d);
  for (std::size_t k = 0; k < d; ++k) rows[k] = k;
  while (true) {
    f(rows);
    std::size_t k = d;
    while (k > 0 && rows[k - 1] == n - d + k - 1) --k;
    if (k == 0) return;
    ++rows[k - 1];
    for (std::size_t m = k; m < d; ++m) rows[m] = rows[m - 1] + 1;
  }
}

}  // namespace detail

/// Genericity of a coefficient matrix: for every choice of d rows and every
/// nonempty set of permutations, the signed sum of the permutation products
/// is nonzero. Sums within 1e-12 of the total term magnitude count as zero.
inline bool good_coefficient_check(const Eigen::MatrixXcd& c) {
  const auto n = static_cast<std::size_t>(c.rows());
  const auto d = static_cast<std::size_t>(c.cols());
  if (n == 0 || d == 0) throw ShapeError("good_coefficient_check: empty matrix");
  if (n < d) throw ShapeError("good_coefficient_check needs rows >= cols");
  if (d > kMaxGoodCheckCols || n > kMaxGoodCheckRows) {
    throw CapacityError("good_coefficient_check limited to " + std::to_string(kMaxGoodCheckRows) +
                        " x " + std::to_string(kMaxGoodCheckCols));
  }
  const auto perms = detail::signed_permutations(d);
  bool good = true;
  detail::for_each_row_subset(n, d, [&](const std::vector<std::size_t>& rows) {
    if (!good) return;
    std::vector<Complex> terms;
    double scale = 0.0;
    for (const auto& [p, sign] : perms) {
      Complex t = static_cast<double>(sign);
      for (std::size_t j = 0; j < d; ++j) t *= c(static_cast<Eigen::Index>(rows[p[j]]), static_cast<Eigen::Index>(j));
      terms.push_back(t);
      scale += std::abs(t);
    }
    if (detail::has_vanishing_subset_sum(terms, 1e-12 * scale)) good = false;
  });
  return good;
}

inline constexpr std::size_t kMaxSymbolicDet = 6;

/// det by dynamic programming over column subsets, exact in the exponents.
inline PuiseuxSeries symbolic_determinant(const PuiseuxMatrix& m) {
  const std::size_t d = m.rows();
  if (m.cols() != d) throw ShapeError("determinant needs a square matrix");
  if (d == 0) throw ShapeError("determinant of an empty matrix");
  if (d > kMaxSymbolicDet) throw CapacityError("symbolic determinant limited to 6 x 6");
  std::vector<PuiseuxSeries> f(std::size_t{1} << d);
  f[0] = PuiseuxSeries::monomial(1.0, Rational(0));
  std::vector<char> seen(f.size(), 0);
  seen[0] = 1;
  for (std::size_t mask = 0; mask < f.size(); ++mask) {
    if (!seen[mask]) continue;
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    if (k == d) continue;
    for (std::size_t j = 0; j < d; ++j) {
      if (mask & (std::size_t{1} << j)) continue;
      // Rows already placed on larger columns each add an inversion.
      const int inversions = std::popcount(mask >> (j + 1));
      PuiseuxSeries term = f[mask] * m(k, j);
      if (inversions % 2) term = -term;
      const std::size_t next = mask | (std::size_t{1} << j);
      f[next] = seen[next] ? f[next] + term : term;
      seen[next] = 1;
    }
  }
  return f.back();
}

/// Max-plus permanent over exact rational weights, by subset dynamic programming.
inline Rational rational_permanent(const std::vector<std::vector<Rational>>& v) {
  const std::size_t d = v.size();
  if (d == 0 || v[0].size() != d) throw ShapeError("rational_permanent needs a square matrix");
  if (d > 20) throw CapacityError("rational_permanent limited to 20 x 20");
  std::vector<std::optional<Rational>> best(std::size_t{1} << d);
  best[0] = Rational(0);
  for (std::size_t mask = 0; mask + 1 < best.size(); ++mask) {
    if (!best[mask]) continue;
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t j = 0; j < d; ++j) {
      if (mask & (std::size_t{1} << j)) continue;
      const Rational w = *best[mask] + v[k][j];
      auto& slot = best[mask | (std::size_t{1} << j)];
      if (!slot || *slot < w) slot = w;
    }
  }
  return *best.back();
}

struct DetPermCorrespondence {
  PuiseuxSeries determinant;
  std::optional<Rational> det_valuation;  // empty when det cancels to zero
  Rational permanent_of_valuation;
  bool holds() const { return det_valuation && *det_valuation == permanent_of_valuation; }
};

inline DetPermCorrespondence det_perm_correspondence(const PuiseuxMatrix& m) {
  DetPermCorrespondence out;
  out.determinant = symbolic_determinant(m);
  if (!out.determinant.is_zero()) out.det_valuation = out.determinant.valuation();
  out.permanent_of_valuation = rational_permanent(exact_valuation(m));
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares line y = slope x + intercept.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("fit_line: length mismatch");
  if (x.size() < 2) throw DomainError("fit_line needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k] / n;
    my += y[k] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (f.slope * x[k] + f.intercept);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

/// `points` values spaced evenly in log10 between z_max and z_min, decreasing.
inline std::vector<double> geometric_grid(double z_max, double z_min, std::size_t points) {
  if (!(z_max > 0.0 && z_min > 0.0 && z_max < 1.0 && z_min < 1.0)) {
    throw DomainError("grid values must lie in (0, 1)");
  }
  if (z_min >= z_max) throw DomainError("z_min must be below z_max");
  if (points < 2) throw DomainError("a grid needs at least two points");
  std::vector<double> z(points);
  const double a = std::log10(z_max), b = std::log10(z_min);
  for (std::size_t k = 0; k < points; ++k) {
    z[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  z.back() = z_min;
  return z;
}

namespace detail {

inline void check_grid(const std::vector<double>& z_grid) {
  if (z_grid.size() < 3) throw DomainError("slope fits need at least three grid points");
  for (std::size_t k = 0; k < z_grid.size(); ++k) {
    if (!(z_grid[k] > 0.0 && z_grid[k] < 1.0)) throw DomainError("grid values must lie in (0, 1)");
    if (k && !(z_grid[k] < z_grid[k - 1])) throw DomainError("grid must be strictly decreasing");
  }
}

}  // namespace detail

inline constexpr std::size_t kMaxCramerSize = 5;

struct CramerInverseCheck {
  MaxPlusMatrix estimated;  // -slope of log10 |(M(z)^{-1})_ij| against log10 z
  MaxPlusMatrix predicted;  // V(M)^{(x)-1}
  bool generic = true;      // leading coefficients passed the check (or exceeded its capacity)
  bool compared = false;
  double max_abs_error = 0.0;
};

/// Estimates V(M^{-1}) from inverses of M(z) along the grid and compares it
/// with the max-plus inverse of V(M). Non-generic leading coefficients are
/// flagged and the comparison skipped.
inline CramerInverseCheck cramer_inverse_valuations(const PuiseuxMatrix& m,
                                                    const std::vector<double>& z_grid) {
  const std::size_t d = m.rows();
  if (m.cols() != d) throw ShapeError("inverse needs a square matrix");
  if (d == 0) throw ShapeError("inverse of an empty matrix");
  if (d > kMaxCramerSize) throw CapacityError("cramer_inverse_valuations limited to 5 x 5");
  detail::check_grid(z_grid);

  CramerInverseCheck out;
  out.predicted = mp_inverse(valuation(m));
  if (d <= kMaxGoodCheckCols) out.generic = good_coefficient_check(leading_coefficients(m));

  using HP = HighPrecisionComplex;
  using HPMatrix = Eigen::Matrix<HP, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<double> log_z;
  std::vector<std::vector<double>> log_inv(d * d);
  for (double z : z_grid) {
    log_z.push_back(std::log10(z));
    const HPMatrix mz = evaluate<HP>(m, HP(z));
    const Eigen::FullPivLU<HPMatrix> lu(mz);
    if (!lu.isInvertible()) throw DomainError("M(z) is singular at z = " + std::to_string(z));
    const HPMatrix inv = lu.inverse();
    for (std::size_t k = 0; k < d * d; ++k) {
      const auto mag = abs(inv(static_cast<Eigen::Index>(k / d), static_cast<Eigen::Index>(k % d)));
      if (mag == 0) throw DomainError("an entry of M(z)^{-1} vanishes at z = " + std::to_string(z));
      log_inv[k].push_back(static_cast<double>(log10(mag)));
    }
  }
  out.estimated = MaxPlusMatrix(d, d);
  for (std::size_t k = 0; k < d * d; ++k) {
    out.estimated(k / d, k % d) = MaxPlus{-fit_line(log_z, log_inv[k]).slope};
  }
  if (out.generic) {
    out.compared = true;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        out.max_abs_error = std::max(out.max_abs_error,
                                     std::abs(out.estimated(i, j).value() - out.predicted(i, j).value()));
      }
  }
  return out;
}

struct ScoreSlopes {
  std::vector<double> z;                     // the grid
  std::vector<std::vector<double>> log_p;    // log10 p_i(A(z)), indexed [grid point][row]
  std::vector<double> estimate;              // -slope of log10 p_i against log10 z
  std::vector<double> target;                // max-plus scores of V(A)
  std::vector<double> rms_residual;          // per-row line-fit residual
};

/// Exact leverage scores of A(z) along a decreasing grid of z in (0, 1),
/// with per-row growth rates fitted as z -> 0.
inline ScoreSlopes asymptotic_score_slopes(const PuiseuxMatrix& m, const std::vector<double>& z_grid) {
  detail::check_grid(z_grid);
  using HP = HighPrecisionComplex;
  const std::size_t n = m.rows();
  ScoreSlopes out;
  out.z = z_grid;
  out.target = maxplus_scores(valuation(m)).values;
  std::vector<double> log_z;
  for (double z : z_grid) {
    log_z.push_back(std::log10(z));
    const ScoreVector p = exact_scores(evaluate<HP>(m, HP(z)));
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = std::log10(p.values[i]);
    out.log_p.push_back(std::move(row));
  }
  out.estimate.resize(n);
  out.rms_residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> y;
    for (const auto& row : out.log_p) y.push_back(row[i]);
    const LineFit f = fit_line(log_z, y);
    out.estimate[i] = -f.slope;
    out.rms_residual[i] = f.rms_residual;
  }
  return out;
}

/// Text format: a header line `n d`, then one line per entry
/// `i j e1:re,im;e2:re,im;...` with 1-based indices and exponents `p` or `p/q`.
/// Blank lines and lines starting with '#' are ignored.
inline PuiseuxMatrix read_puiseux(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) {
    throw ParseError("Puiseux input line " + std::to_string(lineno) + ": " + what);
  };
  auto parse_integer = [&](const std::string& s) -> std::int64_t {
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::logic_error&) {
    }
    fail("bad exponent '" + s + "'");
    return 0;
  };
  auto parse_rational = [&](const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_integer(s));
    const std::int64_t q = parse_integer(s.substr(slash + 1));
    if (q <= 0) fail("exponent denominator must be positive");
    return Rational(parse_integer(s.substr(0, slash)), q);
  };

  if (!next_line()) throw ParseError("Puiseux input: missing header");
  std::size_t n = 0, d = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> d) || n == 0 || d == 0) fail("header must be 'n d' with positive sizes");
  }
  std::vector<PuiseuxSeries> entries(n * d);
  std::vector<char> filled(n * d, 0);
  while (next_line()) {
    std::istringstream ls(line);
    std::size_t i = 0, j = 0;
    std::string body;
    if (!(ls >> i >> j >> body)) fail("expected 'i j terms'");
    if (i == 0 || j == 0 || i > n || j > d) fail("index out of range");
    std::vector<PuiseuxSeries::Term> terms;
    std::istringstream bs(body);
    std::string item;
    while (std::getline(bs, item, ';')) {
      if (item.empty()) continue;
      const auto colon = item.find(':');
      const auto comma = item.find(',', colon);
      if (colon == std::string::npos || comma == std::string::npos) fail("term must be 'exp:re,im'");
      const Rational e = parse_rational(item.substr(0, colon));
      double re = 0.0, im = 0.0;
      try {
        re = std::stod(item.substr(colon + 1, comma - colon - 1));
        im = std::stod(item.substr(comma + 1));
      } catch (const std::logic_error&) {
        fail("bad coefficient in '" + item + "'");
      }
      terms.push_back({e, Complex(re, im)});
    }
    const std::size_t k = (i - 1) * d + (j - 1);
    if (filled[k]) fail("duplicate entry");
    filled[k] = 1;
    entries[k] = PuiseuxSeries(std::move(terms));
    if (entries[k].is_zero()) fail("entry is identically zero");
  }
  for (char f : filled) {
    if (!f) throw ParseError("Puiseux input: every entry must be given");
  }
  return PuiseuxMatrix(n, d, std::move(entries));
}

inline void write_puiseux(std::ostream& out, const PuiseuxMatrix& m) {
  const auto old = out.precision(17);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out << i + 1 << ' ' << j + 1 << ' ';
      const auto& terms = m(i, j).terms();
      for (std::size_t k = 0; k < terms.size(); ++k) {
        if (k) out << ';';
        out << to_string(terms[k].exponent) << ':' << terms[k].coefficient.real() << ','
            << terms[k].coefficient.imag();
      }
      out << '\n';
    }
  }
  out.precision(old);
}

}  // namespace mpsls
