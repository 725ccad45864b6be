#pragma once

/// Matrix Market reading and writing for numeric and max-plus matrices.
///
/// Numeric files may use the real, integer or complex field in coordinate or
/// array layout, with general or symmetric storage; absent coordinate entries
/// are 0. Max-plus files use the real or integer field; absent coordinate
/// entries are -inf and array files may spell bottom as "-inf". Values are
/// written with 17 significant digits so a write/read cycle is exact.

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <complex>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mpsls/error.hpp"
#include "mpsls/leverage.hpp"
#include "mpsls/maxplus.hpp"

namespace mpsls {

enum class MarketLayout { coordinate, array };
enum class MarketField { real, integer, complex };
enum class MarketSymmetry { general, symmetric };

struct MarketHeader {
  MarketLayout layout = MarketLayout::array;
  MarketField field = MarketField::real;
  MarketSymmetry symmetry = MarketSymmetry::general;
};

namespace detail {

/// Splits a line on whitespace.
inline std::vector<std::string> split_words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

/// Strict decimal parse; accepts "inf", "-inf" and "nan" as from_chars does.
inline double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line) + ": not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::size_t parse_index(std::string_view s, std::size_t line) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line) + ": not an index: '" + std::string(s) + "'");
  }
  return v;
}

/// Reads the banner, skips comments and returns the size line's words.
struct MarketPreamble {
  MarketHeader header;
  std::vector<std::string> size_words;
  std::size_t line = 0;
};

inline MarketPreamble read_preamble(std::istream& in) {
  MarketPreamble out;
  std::string text;
  if (!std::getline(in, text)) throw ParseError("line 1: empty Matrix Market stream");
  out.line = 1;
  const auto banner = split_words(lower(text));
  if (banner.size() != 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix") {
    throw ParseError("line 1: expected '%%MatrixMarket matrix <layout> <field> <symmetry>'");
  }
  if (banner[2] == "coordinate") {
    out.header.layout = MarketLayout::coordinate;
  } else if (banner[2] == "array") {
    out.header.layout = MarketLayout::array;
  } else {
    throw ParseError("line 1: unsupported layout '" + banner[2] + "'");
  }
  if (banner[3] == "real" || banner[3] == "double") {
    out.header.field = MarketField::real;
  } else if (banner[3] == "integer") {
    out.header.field = MarketField::integer;
  } else if (banner[3] == "complex") {
    out.header.field = MarketField::complex;
  } else {
    throw ParseError("line 1: unsupported field '" + banner[3] + "'");
  }
  if (banner[4] == "general") {
    out.header.symmetry = MarketSymmetry::general;
  } else if (banner[4] == "symmetric") {
    out.header.symmetry = MarketSymmetry::symmetric;
  } else {
    throw ParseError("line 1: unsupported symmetry '" + banner[4] + "'");
  }
  while (std::getline(in, text)) {
    ++out.line;
    const auto words = split_words(text);
    if (words.empty() || words[0][0] == '%') continue;
    out.size_words = words;
    return out;
  }
  throw ParseError("line " + std::to_string(out.line) + ": missing size line");
}

/// Calls f(i, j, words) for every data line, with 0-based indices. Array
/// layouts are column-major and symmetric arrays list the lower triangle.
template <class F>
void for_each_market_entry(std::istream& in, MarketPreamble& pre, std::size_t rows, std::size_t cols,
                           std::size_t values_per_entry, F&& f) {
  const bool coordinate = pre.header.layout == MarketLayout::coordinate;
  const bool symmetric = pre.header.symmetry == MarketSymmetry::symmetric;
  if (symmetric && rows != cols) throw ParseError("symmetric storage needs a square matrix");
  std::size_t expected = 0;
  if (coordinate) {
    if (pre.size_words.size() != 3) throw ParseError("line " + std::to_string(pre.line) + ": expected 'rows cols nnz'");
    expected = parse_index(pre.size_words[2], pre.line);
  } else {
    if (pre.size_words.size() != 2) throw ParseError("line " + std::to_string(pre.line) + ": expected 'rows cols'");
    expected = symmetric ? rows * (rows + 1) / 2 : rows * cols;
  }
  std::size_t seen = 0, ai = 0, aj = 0;
  std::string text;
  while (std::getline(in, text)) {
    ++pre.line;
    const auto words = split_words(text);
    if (words.empty() || words[0][0] == '%') continue;
    if (seen == expected) throw ParseError("line " + std::to_string(pre.line) + ": more entries than declared");
    std::size_t i = 0, j = 0;
    std::vector<std::string> values;
    if (coordinate) {
      if (words.size() != 2 + values_per_entry) {
        throw ParseError("line " + std::to_string(pre.line) + ": wrong number of fields");
      }
      i = parse_index(words[0], pre.line);
      j = parse_index(words[1], pre.line);
      if (i == 0 || j == 0 || i > rows || j > cols) {
        throw ParseError("line " + std::to_string(pre.line) + ": index out of range");
      }
      --i;
      --j;
      values.assign(words.begin() + 2, words.end());
    } else {
      if (words.size() != values_per_entry) {
        throw ParseError("line " + std::to_string(pre.line) + ": wrong number of fields");
      }
      i = ai;
      j = aj;
      if (++ai == rows) {
        ++aj;
        ai = symmetric ? aj : 0;
      }
      values = words;
    }
    if (symmetric && j > i) throw ParseError("line " + std::to_string(pre.line) + ": symmetric entry above the diagonal");
    f(i, j, values, pre.line);
    if (symmetric && i != j) f(j, i, values, pre.line);
    ++seen;
  }
  if (seen != expected) {
    throw ParseError("expected " + std::to_string(expected) + " entries, found " + std::to_string(seen));
  }
}

inline std::pair<std::size_t, std::size_t> market_extents(const MarketPreamble& pre) {
  if (pre.size_words.size() < 2) throw ParseError("line " + std::to_string(pre.line) + ": malformed size line");
  const std::size_t rows = parse_index(pre.size_words[0], pre.line);
  const std::size_t cols = parse_index(pre.size_words[1], pre.line);
  if (rows == 0 || cols == 0) throw ParseError("line " + std::to_string(pre.line) + ": empty matrix");
  return {rows, cols};
}

inline std::string format_double(double v) {
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

inline std::ifstream open_for_reading(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

/// Reads a numeric matrix. Real and integer files give zero imaginary parts.
inline NumericMatrix read_market_numeric(std::istream& in) {
  auto pre = detail::read_preamble(in);
  const auto [rows, cols] = detail::market_extents(pre);
  const bool complex = pre.header.field == MarketField::complex;
  NumericMatrix a = NumericMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  detail::for_each_market_entry(in, pre, rows, cols, complex ? 2 : 1,
                                [&](std::size_t i, std::size_t j, const std::vector<std::string>& v, std::size_t line) {
                                  const double re = detail::parse_double(v[0], line);
                                  const double im = complex ? detail::parse_double(v[1], line) : 0.0;
                                  if (!std::isfinite(re) || !std::isfinite(im)) {
                                    throw ParseError("line " + std::to_string(line) + ": non-finite entry");
                                  }
                                  a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {re, im};
                                });
  return a;
}

/// Writes a numeric matrix in array layout, using the real field when every
/// imaginary part is zero.
inline void write_market_numeric(std::ostream& out, const NumericMatrix& a) {
  const bool complex = (a.array().imag() != 0.0).any();
  out << "%%MatrixMarket matrix array " << (complex ? "complex" : "real") << " general\n";
  out << a.rows() << ' ' << a.cols() << '\n';
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out << detail::format_double(a(i, j).real());
      if (complex) out << ' ' << detail::format_double(a(i, j).imag());
      out << '\n';
    }
  }
}

/// Reads a max-plus matrix; absent coordinate entries are -inf.
inline MaxPlusMatrix read_market_maxplus(std::istream& in) {
  auto pre = detail::read_preamble(in);
  if (pre.header.field == MarketField::complex) throw ParseError("max-plus matrices cannot be complex");
  const auto [rows, cols] = detail::market_extents(pre);
  MaxPlusMatrix m(rows, cols);
  detail::for_each_market_entry(in, pre, rows, cols, 1,
                                [&](std::size_t i, std::size_t j, const std::vector<std::string>& v, std::size_t line) {
                                  const double x = detail::parse_double(v[0], line);
                                  if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) {
                                    throw ParseError("line " + std::to_string(line) + ": entry must be finite or -inf");
                                  }
                                  m(i, j) = MaxPlus{x};
                                });
  return m;
}

/// Writes the finite entries of a max-plus matrix in coordinate layout.
inline void write_market_maxplus(std::ostream& out, const MaxPlusMatrix& m) {
  std::size_t nnz = 0;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) nnz += m(i, j).is_finite();
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << "% absent entries are -inf\n";
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (m(i, j).is_finite()) out << i + 1 << ' ' << j + 1 << ' ' << detail::format_double(m(i, j).value()) << '\n';
    }
}

inline NumericMatrix load_market_numeric(const std::string& path) {
  auto in = detail::open_for_reading(path);
  return read_market_numeric(in);
}

inline void save_market_numeric(const std::string& path, const NumericMatrix& a) {
  auto out = detail::open_for_writing(path);
  write_market_numeric(out, a);
}

inline MaxPlusMatrix load_market_maxplus(const std::string& path) {
  auto in = detail::open_for_reading(path);
  return read_market_maxplus(in);
}

inline void save_market_maxplus(const std::string& path, const MaxPlusMatrix& m) {
  auto out = detail::open_for_writing(path);
  write_market_maxplus(out, m);
}

}  // namespace mpsls
