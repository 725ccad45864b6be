#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "mpsls/assignment.hpp"
#include "mpsls/bruteforce.hpp"
#include "test_support.hpp"

using namespace mpsls;
using mpsls::testing::random_integer_maxplus;
using mpsls::testing::random_maxplus;
using mpsls::testing::same_maxplus;

namespace {

MaxPlusMatrix well_approximated() { return {{3, 3}, {0, 2}, {1, 0}}; }

double injection_weight(const MaxPlusMatrix& a, const std::vector<std::size_t>& phi) {
  double w = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) w += a(phi[j], j).value();
  return w;
}

void expect_same_matrix(const MaxPlusMatrix& got, const MaxPlusMatrix& want, double tol) {
  ASSERT_EQ(got.rows(), want.rows());
  ASSERT_EQ(got.cols(), want.cols());
  for (std::size_t i = 0; i < got.rows(); ++i) {
    for (std::size_t j = 0; j < got.cols(); ++j) {
      EXPECT_TRUE(same_maxplus(got(i, j), want(i, j), tol))
          << "(" << i << "," << j << "): " << to_string(got(i, j)) << " vs " << to_string(want(i, j));
    }
  }
}

}  // namespace

TEST(TruncateColumns, KeepsTopEntriesPerColumn) {
  const SparseMaxPlusMatrix t = truncate_columns(well_approximated());
  ASSERT_EQ(t.column(0).size(), 2u);
  ASSERT_EQ(t.column(1).size(), 2u);
  EXPECT_EQ(t.column(0)[0].row, 0u);
  EXPECT_EQ(t.column(0)[0].value, 3.0);
  EXPECT_EQ(t.column(0)[1].row, 2u);
  EXPECT_EQ(t.column(0)[1].value, 1.0);
  EXPECT_EQ(t.column(1)[0].row, 0u);
  EXPECT_EQ(t.column(1)[1].row, 1u);
  EXPECT_TRUE(t(1, 0).is_bottom());
  EXPECT_TRUE(t(2, 1).is_bottom());
}

TEST(TruncateColumns, SquareMatrixUnchanged) {
  std::mt19937_64 rng(1);
  const MaxPlusMatrix a = random_maxplus(rng, 4, 4, 0.25);
  EXPECT_EQ(to_dense(truncate_columns(a)), a);
  EXPECT_THROW(truncate_columns(MaxPlusMatrix(2, 3, 0.0)), ShapeError);
}

TEST(TruncateColumns, TiesBrokenByRowIndex) {
  const SparseMaxPlusMatrix t = truncate_columns(MaxPlusMatrix(5, 2, 1.0));
  for (std::size_t j = 0; j < 2; ++j) {
    ASSERT_EQ(t.column(j).size(), 2u);
    EXPECT_EQ(t.column(j)[0].row, 0u);
    EXPECT_EQ(t.column(j)[1].row, 1u);
  }
}

TEST(TruncateColumns, PreservesPermanent) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + rng() % 4;
    const std::size_t n = d + rng() % (10 - d);
    const MaxPlusMatrix a = t % 2 ? random_maxplus(rng, n, d, 0.3)
                                  : random_integer_maxplus(rng, n, d, -2, 2, 0.3);
    EXPECT_EQ(permanent_bruteforce(truncate_columns(a)), permanent_bruteforce(a));
  }
}

TEST(TruncateColumns, TallRandomWeightMatchesFullSolve) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const MaxPlusMatrix a = random_maxplus(rng, 50, 4, 0.1);
    const auto full = optimal_assignment(a, {.truncate = false});
    const auto cut = optimal_assignment(a);
    EXPECT_NEAR(full.weight, cut.weight, 1e-12);
    EXPECT_LE(cut.report.kept_entries, 16u);
  }
}

TEST(OptimalAssignment, SmallExample) {
  const auto res = optimal_assignment(well_approximated());
  EXPECT_EQ(res.phi, (std::vector<std::size_t>{0, 1}));
  EXPECT_DOUBLE_EQ(res.weight, 5.0);
  EXPECT_TRUE(res.truncated);
  EXPECT_EQ(res.report.augmentations, 2u);
}

TEST(OptimalAssignment, UniqueFinitePermutation) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 1 + rng() % 8;
    const auto p = mpsls::testing::random_permutation(rng, d);
    MaxPlusMatrix a(d, d);
    for (std::size_t j = 0; j < d; ++j) a(p[j], j) = MaxPlus{static_cast<double>(rng() % 100) - 50.0};
    EXPECT_EQ(optimal_assignment(a).phi, p);
  }
}

TEST(OptimalAssignment, MatchesEnumerationOnRandomInstances) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const MaxPlusMatrix a = random_maxplus(rng, 7, 3, 0.2);
    const MaxPlus perm = permanent_bruteforce(a);
    if (perm.is_bottom()) {
      EXPECT_THROW(optimal_assignment(a), StructuralRankError);
      continue;
    }
    const auto res = optimal_assignment(a);
    EXPECT_NEAR(res.weight, perm.value(), 1e-12);
    EXPECT_NEAR(injection_weight(a, res.phi), perm.value(), 1e-12);
  }
}

TEST(OptimalAssignment, LexicographicallySmallestAmongTies) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 150; ++t) {
    const std::size_t d = 2 + rng() % 3;
    const std::size_t n = d + rng() % (9 - d);
    const MaxPlusMatrix a = random_integer_maxplus(rng, n, d, 0, 2, 0.15);
    const auto opt = optimal_assignments_bruteforce(a);
    if (opt.empty()) continue;
    const auto res = optimal_assignment(a);
    EXPECT_TRUE(res.report.canonical);
    EXPECT_EQ(res.phi, opt.front().rows);
  }
}

TEST(OptimalAssignment, StructuralRankErrors) {
  const double b = -std::numeric_limits<double>::infinity();
  EXPECT_THROW(optimal_assignment(MaxPlusMatrix{{1, b}, {2, b}, {3, b}}), StructuralRankError);
  EXPECT_THROW(optimal_assignment(MaxPlusMatrix{{1, 1}, {b, b}, {b, b}}), StructuralRankError);
  EXPECT_THROW(optimal_assignment(MaxPlusMatrix(2, 3, 0.0)), ShapeError);
}

TEST(OptimalAssignment, DualsCertifyOptimality) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const MaxPlusMatrix a = t % 2 ? random_maxplus(rng, 7, 3, 0.2)
                                  : random_integer_maxplus(rng, 7, 3, -3, 3, 0.2);
    if (permanent_bruteforce(a).is_bottom()) continue;
    const auto res = optimal_assignment(a, {.truncate = false});
    const auto& u = res.row_duals;
    const auto& v = res.col_duals;
    ASSERT_EQ(u.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) {
      EXPECT_GE(u[i], 0.0);
      for (std::size_t j = 0; j < 3; ++j) {
        if (!a(i, j).is_bottom()) {
          EXPECT_GE(u[i] + v[j], a(i, j).value() - 1e-9);
        }
      }
    }
    double dual = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(u[res.phi[j]] + v[j], a(res.phi[j], j).value(), 1e-9);
      dual += u[res.phi[j]] + v[j];
    }
    EXPECT_NEAR(dual, res.weight, 1e-9);
    detail::for_each_injection(a, [&](const std::vector<std::size_t>& rows, MaxPlus w) {
      if (w.is_bottom()) return;
      double bound = 0.0;
      for (std::size_t j = 0; j < 3; ++j) bound += u[rows[j]] + v[j];
      EXPECT_LE(w.value(), bound + 1e-9);
    });
  }
}

TEST(OptimalAssignment, RowPermutationInvariance) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const MaxPlusMatrix a = random_maxplus(rng, 8, 3);
    const auto p = mpsls::testing::random_permutation(rng, 8);
    const MaxPlusMatrix pa = select_rows(a, p);
    const auto r1 = optimal_assignment(a, {.truncate = false});
    const auto r2 = optimal_assignment(pa, {.truncate = false});
    EXPECT_NEAR(r1.weight, r2.weight, 1e-12);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(p[r2.phi[j]], r1.phi[j]);
    for (std::size_t r = 0; r < 8; ++r) EXPECT_NEAR(r2.row_duals[r], r1.row_duals[p[r]], 1e-9);
  }
}

TEST(HungarianScale, SmallExample) {
  const MaxPlusMatrix m = {{3, 3}, {0, 2}};
  AssignmentResult res;
  res.phi = {0, 1};
  res.row_duals = {3, 2};
  res.col_duals = {0, 0};
  const auto s = hungarian_scale(m, res);
  EXPECT_EQ(s.h, (MaxPlusMatrix{{0, 0}, {-2, 0}}));
  EXPECT_EQ(s.pi, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s.d1, (std::vector<double>{-3, -2}));
  EXPECT_EQ(s.d2, (std::vector<double>{0, 0}));
}

TEST(HungarianScale, DiagonalMatrix) {
  const std::vector<double> diag = {1.5, -2.0, 4.0};
  const MaxPlusMatrix m = mp_diagonal(diag);
  const auto s = hungarian_scale(m, optimal_assignment(m, {.truncate = false}));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) {
        EXPECT_EQ(s.h(i, j), MaxPlus::unit());
      }
      else { EXPECT_TRUE(s.h(i, j).is_bottom()); }
    }
  }
}

TEST(HungarianScale, RejectsInfeasibleDuals) {
  const MaxPlusMatrix m = {{3, 3}, {0, 2}};
  AssignmentResult res;
  res.phi = {0, 1};
  res.row_duals = {3, 0};
  res.col_duals = {0, 0};
  EXPECT_THROW(hungarian_scale(m, res), ConsistencyError);
  res.row_duals = {3, 2};
  res.phi = {1, 0};
  EXPECT_THROW(hungarian_scale(m, res), ConsistencyError);
}

TEST(HungarianScale, ReconstructsFromFactors) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 2 + rng() % 5;
    const MaxPlusMatrix m = random_maxplus(rng, d, d, t % 2 ? 0.3 : 0.0);
    if (permanent_bruteforce(m).is_bottom()) continue;
    const auto s = hungarian_scale(m, optimal_assignment(m, {.truncate = false}));
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_EQ(s.h(i, i), MaxPlus::unit());
      for (std::size_t j = 0; j < d; ++j) EXPECT_LE(s.h(i, j), MaxPlus::unit());
    }
    const MaxPlusMatrix rebuilt =
        mp_matmul(mp_matmul(permutation_matrix(s.pi), mp_diagonal(s.d1)), mp_matmul(m, mp_diagonal(s.d2)));
    expect_same_matrix(s.h, rebuilt, 1e-9);

    const MaxPlusMatrix hinv = max_path_weights(s.h);
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_EQ(hinv(i, i), MaxPlus::unit());
      for (std::size_t j = 0; j < d; ++j) EXPECT_LE(hinv(i, j), MaxPlus::unit());
    }
  }
}

TEST(MaxPathWeights, MatchesFloydWarshall) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + rng() % 7;
    MaxPlusMatrix h = random_maxplus(rng, d, d, 0.4, -5.0, 0.0);
    for (std::size_t i = 0; i < d; ++i) h(i, i) = MaxPlus::unit();
    MaxPlusMatrix fw = h;
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) fw(i, j) += fw(i, k) * fw(k, j);
    expect_same_matrix(max_path_weights(h), fw, 1e-12);
  }
}

TEST(MpInverse, SmallExample) {
  expect_same_matrix(mp_inverse(MaxPlusMatrix{{3, 3}, {0, 2}}), MaxPlusMatrix{{-3, -2}, {-5, -2}}, 1e-12);
}

TEST(MpInverse, IdentityIsItsOwnInverse) {
  for (std::size_t d = 1; d <= 6; ++d) EXPECT_EQ(mp_inverse(mp_identity(d)), mp_identity(d));
}

TEST(MpInverse, ScalarCase) {
  EXPECT_EQ(mp_inverse(MaxPlusMatrix{{2.5}}), (MaxPlusMatrix{{-2.5}}));
  EXPECT_THROW(mp_inverse(MaxPlusMatrix(1, 1)), StructuralRankError);
}

TEST(MpInverse, MatchesMinorOracle) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int t = 0; t < 120; ++t) {
    const std::size_t d = 5 + t % 2;
    const double drop = t % 3 == 0 ? 0.4 : 0.0;
    const MaxPlusMatrix m = t % 4 == 1 ? random_integer_maxplus(rng, d, d, -2, 2, drop)
                                       : random_maxplus(rng, d, d, drop);
    if (permanent_bruteforce(m).is_bottom()) {
      EXPECT_THROW(mp_inverse(m), StructuralRankError);
      continue;
    }
    expect_same_matrix(mp_inverse(m), mp_inverse_bruteforce(m), 1e-9);
    ++checked;
  }
  EXPECT_GE(checked, 100);
}

TEST(AssignedBlock, ReusesDualsOnTallInstances) {
  std::mt19937_64 rng(12);
  int reused = 0;
  for (int t = 0; t < 50; ++t) {
    const MaxPlusMatrix a = random_maxplus(rng, 30, 4);
    const auto res = optimal_assignment(a);
    const auto block = assigned_block(a, res);
    if (block.duals_reused) ++reused;
    EXPECT_EQ(block.m, select_rows(a, res.phi));
    expect_same_matrix(mp_inverse_from_scaled(block.scaled), mp_inverse(block.m), 1e-9);
  }
  EXPECT_GT(reused, 0);
}
