#pragma once

/// Plot-ready CSV tables. Row indices are 1-based to match Matrix Market
/// files, reals carry 17 significant digits and bottom is written as -inf.

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mpsls/error.hpp"
#include "mpsls/leverage.hpp"
#include "mpsls/matrix_market.hpp"
#include "mpsls/puiseux.hpp"
#include "mpsls/sampling.hpp"

namespace mpsls {

/// A header row followed by equally long numeric columns, led by `row_index`.
inline void write_indexed_columns(std::ostream& out, const std::vector<std::string>& names,
                                  const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size()) throw ShapeError("one name per column");
  const std::size_t n = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns)
    if (c.size() != n) throw ShapeError("CSV columns differ in length");
  out << "row_index";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << i + 1;
    for (const auto& c : columns) out << ',' << detail::format_double(c[i]);
    out << '\n';
  }
}

/// `row_index,score`
inline void write_scores_csv(std::ostream& out, const std::vector<double>& scores) {
  write_indexed_columns(out, {"score"}, {scores});
}

/// Inverse of write_scores_csv; rows must appear in order.
inline std::vector<double> read_scores_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "row_index,score") throw ParseError("line 1: expected header 'row_index,score'");
  std::vector<double> out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("line " + std::to_string(number) + ": expected two fields");
    if (detail::parse_index(line.substr(0, comma), number) != out.size() + 1) {
      throw ParseError("line " + std::to_string(number) + ": row indices must be consecutive from 1");
    }
    out.push_back(detail::parse_double(line.substr(comma + 1), number));
  }
  return out;
}

/// `method,r,trial,ratio,deficient`
inline void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials) {
  out << "method,r,trial,ratio,deficient\n";
  for (const auto& t : trials) {
    out << t.method << ',' << t.r << ',' << t.trial << ',' << detail::format_double(t.ratio) << ','
        << (t.deficient ? 1 : 0) << '\n';
  }
}

/// `method,r,geomean,q05,q95`
inline void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points) {
  out << "method,r,geomean,q05,q95\n";
  for (const auto& p : points) {
    out << p.method << ',' << p.r << ',' << detail::format_double(p.geomean) << ','
        << detail::format_double(p.q05) << ',' << detail::format_double(p.q95) << '\n';
  }
}

/// `row,z_min,slope,target,abs_err`, one line per row for the full grid.
inline void write_slopes_csv(std::ostream& out, const ScoreSlopes& s) {
  out << "row,z_min,slope,target,abs_err\n";
  const double z_min = s.z.empty() ? 0.0 : s.z.back();
  for (std::size_t i = 0; i < s.estimate.size(); ++i) {
    out << i + 1 << ',' << detail::format_double(z_min) << ',' << detail::format_double(s.estimate[i]) << ','
        << detail::format_double(s.target[i]) << ',' << detail::format_double(std::abs(s.estimate[i] - s.target[i]))
        << '\n';
  }
}

/// `z,row,log10_p`, the curves behind the slope fits.
inline void write_slope_curves_csv(std::ostream& out, const ScoreSlopes& s) {
  out << "z,row,log10_p\n";
  for (std::size_t g = 0; g < s.z.size(); ++g)
    for (std::size_t i = 0; i < s.log_p[g].size(); ++i) {
      out << detail::format_double(s.z[g]) << ',' << i + 1 << ',' << detail::format_double(s.log_p[g][i]) << '\n';
    }
}

}  // namespace mpsls
