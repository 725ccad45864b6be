#pragma once

/// Max-plus semiring R_max = (R u {-inf}, max, +) and matrices over it.
///
/// The bottom element -inf is kept as IEEE negative infinity inside the
/// MaxPlus wrapper. Construction rejects NaN and +inf, so every stored value
/// is either finite or exactly bottom.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mpsls/error.hpp"

namespace mpsls {

class MaxPlus {
 public:
  /// Default value is bottom (the additive identity of the semiring).
  constexpr MaxPlus() = default;

  constexpr MaxPlus(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw DomainError("max-plus value must be finite or -inf");
    }
  }

  static constexpr MaxPlus bottom() { return MaxPlus{}; }
  static constexpr MaxPlus unit() { return MaxPlus{0.0}; }

  constexpr bool is_bottom() const {
    return v_ == -std::numeric_limits<double>::infinity();
  }
  constexpr bool is_finite() const { return !is_bottom(); }
  constexpr double value() const { return v_; }

  /// a (+) b = max(a, b)
  friend constexpr MaxPlus operator+(MaxPlus a, MaxPlus b) {
    return a.v_ >= b.v_ ? a : b;
  }
  /// a (x) b = a + b, bottom absorbs.
  friend constexpr MaxPlus operator*(MaxPlus a, MaxPlus b) {
    if (a.is_bottom() || b.is_bottom()) return bottom();
    MaxPlus r;
    r.v_ = a.v_ + b.v_;
    return r;
  }
  MaxPlus& operator+=(MaxPlus o) { return *this = *this + o; }
  MaxPlus& operator*=(MaxPlus o) { return *this = *this * o; }

  friend constexpr bool operator==(MaxPlus a, MaxPlus b) { return a.v_ == b.v_; }
  friend constexpr auto operator<=>(MaxPlus a, MaxPlus b) { return a.v_ <=> b.v_; }

 private:
  double v_ = -std::numeric_limits<double>::infinity();
};

/// Difference a - b of two max-plus values; bottom - bottom is bottom.
/// b must be finite unless a is bottom.
inline MaxPlus mp_difference(MaxPlus a, MaxPlus b) {
  if (a.is_bottom()) return MaxPlus::bottom();
  if (b.is_bottom()) throw DomainError("subtracting bottom from a finite value");
  return MaxPlus{a.value() - b.value()};
}

inline std::string to_string(MaxPlus a) {
  if (a.is_bottom()) return "-inf";
  return std::to_string(a.value());
}

inline std::ostream& operator<<(std::ostream& os, MaxPlus a) {
  if (a.is_bottom()) return os << "-inf";
  return os << a.value();
}

/// Dense row-major n x d max-plus matrix.
class MaxPlusMatrix {
 public:
  MaxPlusMatrix() = default;
  MaxPlusMatrix(std::size_t rows, std::size_t cols, MaxPlus fill = MaxPlus::bottom())
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  MaxPlusMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw ShapeError("ragged max-plus initializer");
      for (double v : row) data_.emplace_back(v);
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  MaxPlus operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  MaxPlus& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const MaxPlus> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  template <class F>
  void for_each_finite_in_col(std::size_t j, F&& f) const {
    for (std::size_t i = 0; i < rows_; ++i) {
      const MaxPlus v = data_[i * cols_ + j];
      if (v.is_finite()) f(i, v.value());
    }
  }

  std::size_t finite_count() const {
    return static_cast<std::size_t>(
        std::count_if(data_.begin(), data_.end(), [](MaxPlus v) { return v.is_finite(); }));
  }

  friend bool operator==(const MaxPlusMatrix&, const MaxPlusMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<MaxPlus> data_;
};

inline std::ostream& operator<<(std::ostream& os, const MaxPlusMatrix& m) {
  os << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
    os << ']';
  }
  return os << ']';
}

/// Column-compressed max-plus matrix; only finite entries are stored.
/// Entries inside a column keep the order they were inserted in.
class SparseMaxPlusMatrix {
 public:
  struct Entry {
    std::size_t row;
    double value;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SparseMaxPlusMatrix() = default;

  /// columns[j] lists the finite entries of column j.
  SparseMaxPlusMatrix(std::size_t rows, std::vector<std::vector<Entry>> columns)
      : rows_(rows), cols_(columns.size()) {
    col_start_.reserve(cols_ + 1);
    for (auto& col : columns) {
      for (const Entry& e : col) {
        if (e.row >= rows_) throw ShapeError("sparse entry row out of range");
        if (!std::isfinite(e.value)) throw DomainError("sparse entries must be finite");
        entries_.push_back(e);
      }
      col_start_.push_back(entries_.size());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return entries_.size(); }

  std::span<const Entry> column(std::size_t j) const {
    return {entries_.data() + col_start_[j], col_start_[j + 1] - col_start_[j]};
  }

  MaxPlus operator()(std::size_t i, std::size_t j) const {
    for (const Entry& e : column(j)) {
      if (e.row == i) return MaxPlus{e.value};
    }
    return MaxPlus::bottom();
  }

  template <class F>
  void for_each_finite_in_col(std::size_t j, F&& f) const {
    for (const Entry& e : column(j)) f(e.row, e.value);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> col_start_{0};
  std::vector<Entry> entries_;
};

template <class M>
concept MaxPlusMatrixLike = requires(const M& m, std::size_t i, std::size_t j) {
  { m.rows() } -> std::convertible_to<std::size_t>;
  { m.cols() } -> std::convertible_to<std::size_t>;
  { m(i, j) } -> std::convertible_to<MaxPlus>;
  m.for_each_finite_in_col(j, [](std::size_t, double) {});
};

template <MaxPlusMatrixLike M>
MaxPlusMatrix to_dense(const M& m) {
  MaxPlusMatrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    m.for_each_finite_in_col(j, [&](std::size_t i, double v) { out(i, j) = MaxPlus{v}; });
  }
  return out;
}

/// Sparse copy with entries of each column in increasing row order.
template <MaxPlusMatrixLike M>
SparseMaxPlusMatrix to_sparse(const M& m) {
  std::vector<std::vector<SparseMaxPlusMatrix::Entry>> cols(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    m.for_each_finite_in_col(j, [&](std::size_t i, double v) { cols[j].push_back({i, v}); });
    std::sort(cols[j].begin(), cols[j].end(),
              [](const auto& a, const auto& b) { return a.row < b.row; });
  }
  return SparseMaxPlusMatrix(m.rows(), std::move(cols));
}

/// d x d max-plus identity: 0 on the diagonal, bottom elsewhere.
inline MaxPlusMatrix mp_identity(std::size_t d) {
  MaxPlusMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) out(i, i) = MaxPlus::unit();
  return out;
}

/// Max-plus diagonal matrix with the given diagonal.
inline MaxPlusMatrix mp_diagonal(std::span<const double> diag) {
  MaxPlusMatrix out(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) out(i, i) = MaxPlus{diag[i]};
  return out;
}

/// (A (x) B)_ij = max_k a_ik + b_kj.
template <MaxPlusMatrixLike A, MaxPlusMatrixLike B>
MaxPlusMatrix mp_matmul(const A& a, const B& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("mp_matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + ")");
  }
  const MaxPlusMatrix bd = to_dense(b);
  MaxPlusMatrix out(a.rows(), b.cols());
  for (std::size_t k = 0; k < a.cols(); ++k) {
    a.for_each_finite_in_col(k, [&](std::size_t i, double aik) {
      for (std::size_t j = 0; j < bd.cols(); ++j) {
        out(i, j) += MaxPlus{aik} * bd(k, j);
      }
    });
  }
  return out;
}

/// Matrix-vector product A (x) x.
template <MaxPlusMatrixLike A>
std::vector<MaxPlus> mp_matvec(const A& a, std::span<const MaxPlus> x) {
  if (a.cols() != x.size()) throw ShapeError("mp_matvec: dimension mismatch");
  std::vector<MaxPlus> out(a.rows(), MaxPlus::bottom());
  for (std::size_t k = 0; k < a.cols(); ++k) {
    if (x[k].is_bottom()) continue;
    a.for_each_finite_in_col(k, [&](std::size_t i, double aik) {
      out[i] += MaxPlus{aik + x[k].value()};
    });
  }
  return out;
}

/// ||y||_max = max_i y_i.
inline MaxPlus max_norm(std::span<const MaxPlus> y) {
  if (y.empty()) throw DomainError("max_norm of an empty vector");
  MaxPlus acc = MaxPlus::bottom();
  for (MaxPlus v : y) acc += v;
  return acc;
}

/// Rows `rows` (in the given order) and all columns of m.
template <MaxPlusMatrixLike M>
MaxPlusMatrix select_rows(const M& m, std::span<const std::size_t> rows) {
  MaxPlusMatrix out(rows.size(), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= m.rows()) throw ShapeError("select_rows: index out of range");
    for (std::size_t j = 0; j < m.cols(); ++j) out(r, j) = m(rows[r], j);
  }
  return out;
}

/// m with row `row` and column `col` removed.
inline MaxPlusMatrix delete_row_col(const MaxPlusMatrix& m, std::size_t row, std::size_t col) {
  MaxPlusMatrix out(m.rows() - 1, m.cols() - 1);
  for (std::size_t i = 0, oi = 0; i < m.rows(); ++i) {
    if (i == row) continue;
    for (std::size_t j = 0, oj = 0; j < m.cols(); ++j) {
      if (j == col) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

}  // namespace mpsls
