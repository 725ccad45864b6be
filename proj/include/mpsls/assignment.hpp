#pragma once

/// Optimal assignment for tall max-plus matrices.
///
/// The pipeline is
///   1. truncate_columns: keep the d largest finite entries of every column
///      (std::nth_element, average O(n) per column),
///   2. successive shortest paths on the truncated bipartite graph, which
///      yields an optimal injection together with LP duals u, v such that
///      u_i + v_j >= a_ij with equality on the assignment,
///   3. canonicalisation to the lexicographically smallest optimal injection
///      using the tight edges of those duals.
///
/// The duals double as Hungarian scaling coefficients, and the max-plus
/// inverse of a square matrix is read off from all-pairs maximal paths in the
/// graph of its Hungarian scaling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "mpsls/error.hpp"
#include "mpsls/maxplus.hpp"

namespace mpsls {

/// Diagnostics of one assignment solve.
struct AssignmentReport {
  std::size_t kept_entries = 0;   // finite entries handed to the SSP solver
  std::size_t heap_pops = 0;      // Dijkstra label settlements, all phases
  std::size_t augmentations = 0;  // one per column
  bool canonical = false;         // lexicographic canonicalisation succeeded
};

struct AssignmentResult {
  std::vector<std::size_t> phi;   // column j -> row phi[j]
  std::vector<double> row_duals;  // u, one per row of the input (0 when unassigned)
  std::vector<double> col_duals;  // v, one per column
  double weight = 0.0;            // sum_j a_{phi(j) j}
  bool truncated = false;
  AssignmentReport report;
};

struct AssignmentOptions {
  bool truncate = true;
  bool canonical = true;
};

/// H = P_pi (x) D1 (x) M (x) D2 with h_ij <= 0 and h_ii = 0.
struct HungarianScaledMatrix {
  MaxPlusMatrix h;
  std::vector<std::size_t> phi;  // optimal assignment of M used for the scaling
  std::vector<std::size_t> pi;   // inverse of phi; (P_pi)_{ij} = 0 iff i = pi[j]
  std::vector<double> d1;        // row coefficients (-u)
  std::vector<double> d2;        // column coefficients (-v)
};

namespace detail {

inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Orders candidate entries: larger value first, then smaller row.
inline bool entry_before(const SparseMaxPlusMatrix::Entry& a, const SparseMaxPlusMatrix::Entry& b) {
  return a.value > b.value || (a.value == b.value && a.row < b.row);
}

template <MaxPlusMatrixLike M>
double max_abs_entry(const M& a) {
  double scale = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    a.for_each_finite_in_col(j, [&](std::size_t, double v) { scale = std::max(scale, std::abs(v)); });
  }
  return scale;
}

inline double tightness_tolerance(double max_abs) { return 1e-9 * (1.0 + max_abs); }

/// Successive shortest paths in the minimisation form c = -a with row
/// potentials pr and column potentials pc keeping c - pc[j] - pr[i] >= 0.
/// Row potentials only ever decrease and stay 0 on free rows, so
/// u = -pr >= 0 vanishes on unassigned rows: (u, v) is LP-optimal.
inline AssignmentResult solve_ssp(const SparseMaxPlusMatrix& s) {
  const std::size_t n = s.rows();
  const std::size_t d = s.cols();
  AssignmentResult res;
  res.report.kept_entries = s.nnz();

  std::vector<std::size_t> row_of_col(d, kNone);
  std::vector<std::size_t> col_of_row(n, kNone);
  std::vector<double> pr(n, 0.0);
  std::vector<double> pc(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    if (s.column(j).empty()) {
      throw StructuralRankError("column " + std::to_string(j) + " has no finite entry");
    }
    double best = -kInf;
    for (const auto& e : s.column(j)) best = std::max(best, e.value);
    pc[j] = -best;
  }

  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> pred(n, kNone);
  std::vector<char> settled(n, 0);
  std::vector<double> col_dist(d, kInf);
  std::vector<std::size_t> touched;
  std::vector<std::size_t> finalized;
  std::vector<std::size_t> reached_cols;
  using Label = std::pair<double, std::size_t>;

  for (std::size_t source = 0; source < d; ++source) {
    std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
    auto relax = [&](std::size_t j, double base) {
      for (const auto& e : s.column(j)) {
        const std::size_t i = e.row;
        if (settled[i]) continue;
        double reduced = -e.value - pc[j] - pr[i];
        if (reduced < 0.0) reduced = 0.0;  // rounding only
        const double nd = base + reduced;
        if (dist[i] == kInf) touched.push_back(i);
        if (nd < dist[i]) {
          dist[i] = nd;
          pred[i] = j;
          heap.emplace(nd, i);
        }
      }
    };

    col_dist[source] = 0.0;
    reached_cols.push_back(source);
    relax(source, 0.0);

    std::size_t free_row = kNone;
    double delta = 0.0;
    while (!heap.empty()) {
      const auto [dd, i] = heap.top();
      heap.pop();
      if (settled[i] || dd > dist[i]) continue;
      settled[i] = 1;
      finalized.push_back(i);
      ++res.report.heap_pops;
      if (col_of_row[i] == kNone) {
        free_row = i;
        delta = dd;
        break;
      }
      const std::size_t j = col_of_row[i];
      col_dist[j] = dd;
      reached_cols.push_back(j);
      relax(j, dd);
    }
    if (free_row == kNone) {
      throw StructuralRankError("no injection avoids the -inf entries");
    }

    for (std::size_t i : finalized) pr[i] -= delta - dist[i];
    for (std::size_t j : reached_cols) pc[j] += delta - col_dist[j];

    for (std::size_t i = free_row;;) {
      const std::size_t j = pred[i];
      const std::size_t prev = row_of_col[j];
      row_of_col[j] = i;
      col_of_row[i] = j;
      if (j == source) break;
      i = prev;
    }
    ++res.report.augmentations;

    for (std::size_t i : touched) {
      dist[i] = kInf;
      pred[i] = kNone;
      settled[i] = 0;
    }
    for (std::size_t j : reached_cols) col_dist[j] = kInf;
    touched.clear();
    finalized.clear();
    reached_cols.clear();
  }

  res.phi = std::move(row_of_col);
  res.row_duals.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.row_duals[i] = pr[i] == 0.0 ? 0.0 : -pr[i];
  res.col_duals.resize(d);
  for (std::size_t j = 0; j < d; ++j) res.col_duals[j] = -pc[j];
  return res;
}

/// Bipartite matching by augmenting paths (Kuhn). adj[x] lists right vertices.
/// Returns the number of matched left vertices among `left`.
inline std::size_t kuhn_matching(const std::vector<std::vector<std::size_t>>& adj,
                                 std::span<const std::size_t> left, std::size_t right_size,
                                 const std::vector<char>& right_blocked) {
  std::vector<std::size_t> match_right(right_size, kNone);
  std::vector<char> seen(right_size, 0);
  std::function<bool(std::size_t)> try_kuhn = [&](std::size_t x) {
    for (std::size_t y : adj[x]) {
      if (right_blocked[y] || seen[y]) continue;
      seen[y] = 1;
      if (match_right[y] == kNone || try_kuhn(match_right[y])) {
        match_right[y] = x;
        return true;
      }
    }
    return false;
  };
  std::size_t matched = 0;
  for (std::size_t x : left) {
    std::fill(seen.begin(), seen.end(), 0);
    if (try_kuhn(x)) ++matched;
  }
  return matched;
}

/// Replaces res.phi by the lexicographically smallest optimal injection.
/// An injection is optimal iff it only uses tight edges and assigns every row
/// with a positive dual; a partial choice is completable iff the remaining
/// columns and the remaining positive-dual rows can each be saturated by a
/// tight matching (Mendelsohn-Dulmage).
inline bool canonicalise(const SparseMaxPlusMatrix& s, AssignmentResult& res) {
  const std::size_t d = s.cols();
  const double tol = tightness_tolerance(max_abs_entry(s));

  // Compact ids for rows that carry a tight edge.
  std::vector<std::size_t> rows_used;
  std::vector<std::vector<std::size_t>> tight_rows(d);  // global row ids, ascending
  for (std::size_t j = 0; j < d; ++j) {
    for (const auto& e : s.column(j)) {
      if (std::abs(e.value - res.row_duals[e.row] - res.col_duals[j]) <= tol) {
        tight_rows[j].push_back(e.row);
        rows_used.push_back(e.row);
      }
    }
    std::sort(tight_rows[j].begin(), tight_rows[j].end());
  }
  std::sort(rows_used.begin(), rows_used.end());
  rows_used.erase(std::unique(rows_used.begin(), rows_used.end()), rows_used.end());
  auto compact = [&](std::size_t row) {
    return static_cast<std::size_t>(std::lower_bound(rows_used.begin(), rows_used.end(), row) -
                                    rows_used.begin());
  };
  const std::size_t m = rows_used.size();

  std::vector<std::vector<std::size_t>> col_adj(d);  // column -> compact rows
  std::vector<std::vector<std::size_t>> row_adj(m);  // compact row -> columns
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t row : tight_rows[j]) {
      col_adj[j].push_back(compact(row));
      row_adj[compact(row)].push_back(j);
    }
  }
  std::vector<std::size_t> must;  // compact ids of rows with positive dual
  for (std::size_t r = 0; r < m; ++r) {
    if (res.row_duals[rows_used[r]] > tol) must.push_back(r);
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (res.row_duals[res.phi[j]] > tol &&
        !std::binary_search(rows_used.begin(), rows_used.end(), res.phi[j])) {
      return false;
    }
  }

  std::vector<char> row_fixed(m, 0);
  std::vector<char> col_fixed(d, 0);
  std::vector<std::size_t> phi(d, kNone);

  auto completable = [&](std::size_t next) {
    std::vector<std::size_t> cols;
    for (std::size_t j = next; j < d; ++j) cols.push_back(j);
    if (kuhn_matching(col_adj, cols, m, row_fixed) != cols.size()) return false;
    std::vector<std::size_t> open_must;
    for (std::size_t r : must) {
      if (!row_fixed[r]) open_must.push_back(r);
    }
    return kuhn_matching(row_adj, open_must, d, col_fixed) == open_must.size();
  };

  for (std::size_t j = 0; j < d; ++j) {
    bool placed = false;
    col_fixed[j] = 1;
    for (std::size_t r : col_adj[j]) {
      if (row_fixed[r]) continue;
      row_fixed[r] = 1;
      if (completable(j + 1)) {
        phi[j] = rows_used[r];
        placed = true;
        break;
      }
      row_fixed[r] = 0;
    }
    if (!placed) return false;
  }
  res.phi = std::move(phi);
  double w = 0.0;
  for (std::size_t j = 0; j < d; ++j) w += s(res.phi[j], j).value();
  res.weight = w;
  return true;
}

}  // namespace detail

/// Keeps the d largest finite entries of each column of an n x d matrix,
/// stored per column in decreasing order (ties: smaller row first).
template <MaxPlusMatrixLike M>
SparseMaxPlusMatrix truncate_columns(const M& a) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  if (n < d) throw ShapeError("truncate_columns needs rows >= cols");
  std::vector<std::vector<SparseMaxPlusMatrix::Entry>> cols(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto& col = cols[j];
    a.for_each_finite_in_col(j, [&](std::size_t i, double v) { col.push_back({i, v}); });
    if (col.size() > d) {
      std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(d), col.end(),
                       detail::entry_before);
      col.resize(d);
    }
    std::sort(col.begin(), col.end(), detail::entry_before);
  }
  return SparseMaxPlusMatrix(n, std::move(cols));
}

/// Optimal injection of columns into rows with LP duals.
/// Throws StructuralRankError when every injection hits a -inf entry.
template <MaxPlusMatrixLike M>
AssignmentResult optimal_assignment(const M& a, AssignmentOptions opt = {}) {
  if (a.cols() == 0) throw ShapeError("optimal_assignment: matrix has no columns");
  if (a.rows() < a.cols()) throw ShapeError("optimal_assignment needs rows >= cols");
  const SparseMaxPlusMatrix s = opt.truncate ? truncate_columns(a) : to_sparse(a);
  AssignmentResult res = detail::solve_ssp(s);
  res.truncated = opt.truncate;
  double w = 0.0;
  for (std::size_t j = 0; j < s.cols(); ++j) w += s(res.phi[j], j).value();
  res.weight = w;
  if (opt.canonical) {
    AssignmentResult saved = res;
    res.report.canonical = detail::canonicalise(s, res);
    if (!res.report.canonical) {
      saved.report.canonical = false;
      res = std::move(saved);
    }
  }
  return res;
}

/// Max-plus permutation matrix with (P)_{ij} = 0 iff i = pi[j].
inline MaxPlusMatrix permutation_matrix(std::span<const std::size_t> pi) {
  MaxPlusMatrix p(pi.size(), pi.size());
  for (std::size_t j = 0; j < pi.size(); ++j) p(pi[j], j) = MaxPlus::unit();
  return p;
}

/// Hungarian scaling of a square matrix from an optimal assignment and its
/// duals (row_duals indexed by rows of m). Throws ConsistencyError if the
/// duals are not feasible or not tight on the assignment.
inline HungarianScaledMatrix hungarian_scale(const MaxPlusMatrix& m, const AssignmentResult& res) {
  const std::size_t d = m.rows();
  if (m.cols() != d) throw ShapeError("hungarian_scale needs a square matrix");
  if (res.phi.size() != d || res.row_duals.size() != d || res.col_duals.size() != d) {
    throw ShapeError("hungarian_scale: assignment does not match the matrix");
  }
  const std::vector<double>& u = res.row_duals;
  const std::vector<double>& v = res.col_duals;
  const double tol = detail::tightness_tolerance(detail::max_abs_entry(m));

  HungarianScaledMatrix out;
  out.phi = res.phi;
  out.pi.assign(d, detail::kNone);
  for (std::size_t k = 0; k < d; ++k) {
    if (res.phi[k] >= d || out.pi[res.phi[k]] != detail::kNone) {
      throw ConsistencyError("hungarian_scale: assignment is not a permutation");
    }
    out.pi[res.phi[k]] = k;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const MaxPlus mij = m(i, j);
      if (mij.is_finite() && mij.value() - u[i] - v[j] > tol) {
        throw ConsistencyError("hungarian_scale: duals are infeasible");
      }
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    const MaxPlus diag = m(res.phi[k], k);
    if (diag.is_bottom() || std::abs(diag.value() - u[res.phi[k]] - v[k]) > tol) {
      throw ConsistencyError("hungarian_scale: duals are not tight on the assignment");
    }
  }

  out.h = MaxPlusMatrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t row = res.phi[k];
    for (std::size_t j = 0; j < d; ++j) {
      const MaxPlus mij = m(row, j);
      if (mij.is_bottom()) continue;
      out.h(k, j) = MaxPlus{std::min(0.0, mij.value() - u[row] - v[j])};
    }
    out.h(k, k) = MaxPlus::unit();
  }
  out.d1.resize(d);
  out.d2.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.d1[i] = -u[i];
  for (std::size_t j = 0; j < d; ++j) out.d2[j] = -v[j];
  return out;
}

/// Maximal path weights between all vertex pairs of G(H), where H has
/// nonpositive entries and an edge i -> j of weight h_ij for finite h_ij.
/// One binary-heap Dijkstra sweep per source on the negated weights.
inline MaxPlusMatrix max_path_weights(const MaxPlusMatrix& h) {
  const std::size_t d = h.rows();
  MaxPlusMatrix out(d, d);
  using Label = std::pair<double, std::size_t>;
  std::vector<double> dist(d);
  std::vector<char> settled(d);
  for (std::size_t src = 0; src < d; ++src) {
    std::fill(dist.begin(), dist.end(), detail::kInf);
    std::fill(settled.begin(), settled.end(), 0);
    std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      const auto [dd, i] = heap.top();
      heap.pop();
      if (settled[i] || dd > dist[i]) continue;
      settled[i] = 1;
      for (std::size_t j = 0; j < d; ++j) {
        const MaxPlus hij = h(i, j);
        if (j == i || hij.is_bottom() || settled[j]) continue;
        const double nd = dd - std::min(0.0, hij.value());
        if (nd < dist[j]) {
          dist[j] = nd;
          heap.emplace(nd, j);
        }
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (dist[j] != detail::kInf) out(src, j) = MaxPlus{dist[j] == 0.0 ? 0.0 : -dist[j]};
    }
  }
  return out;
}

/// Undoes the scaling: (M^{(x)-1})_ij = d2_i + (H^{(x)-1})_{i, pi[j]} + d1_j.
inline MaxPlusMatrix mp_inverse_from_scaled(const HungarianScaledMatrix& scaled) {
  const std::size_t d = scaled.h.rows();
  const MaxPlusMatrix hinv = max_path_weights(scaled.h);
  MaxPlusMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const MaxPlus p = hinv(i, scaled.pi[j]);
      if (p.is_finite()) out(i, j) = MaxPlus{scaled.d2[i] + p.value() + scaled.d1[j]};
    }
  }
  return out;
}

/// Max-plus (Cramer) inverse of a square matrix with finite permanent.
inline MaxPlusMatrix mp_inverse(const MaxPlusMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("mp_inverse needs a square matrix");
  if (m.rows() == 0) throw ShapeError("mp_inverse of an empty matrix");
  if (m.rows() == 1) {
    if (m(0, 0).is_bottom()) throw StructuralRankError("permanent is -inf");
    MaxPlusMatrix out(1, 1);
    out(0, 0) = MaxPlus{-m(0, 0).value()};
    return out;
  }
  const AssignmentResult res = optimal_assignment(m, {.truncate = false, .canonical = false});
  return mp_inverse_from_scaled(hungarian_scale(m, res));
}

/// Square submatrix of the rows chosen by an assignment of a tall matrix,
/// scaled with the duals of that assignment when they remain feasible on it.
struct AssignedBlock {
  MaxPlusMatrix m;  // row k = row phi[k] of the tall matrix
  HungarianScaledMatrix scaled;
  bool duals_reused = false;
};

template <MaxPlusMatrixLike M>
AssignedBlock assigned_block(const M& a, const AssignmentResult& res) {
  AssignedBlock out;
  out.m = select_rows(a, res.phi);
  const std::size_t d = a.cols();
  AssignmentResult local;
  local.phi.resize(d);
  local.row_duals.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    local.phi[k] = k;
    local.row_duals[k] = res.row_duals[res.phi[k]];
  }
  local.col_duals = res.col_duals;
  try {
    out.scaled = hungarian_scale(out.m, local);
    out.duals_reused = true;
  } catch (const ConsistencyError&) {
    // Truncation dropped an entry of the block that violates the duals.
    const AssignmentResult fresh =
        optimal_assignment(out.m, {.truncate = false, .canonical = false});
    out.scaled = hungarian_scale(out.m, fresh);
  }
  return out;
}

}  // namespace mpsls
