#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "mpsls/bruteforce.hpp"
#include "mpsls/maxplus.hpp"
#include "test_support.hpp"

using namespace mpsls;
using mpsls::testing::random_maxplus;

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

MaxPlusMatrix well_approximated() { return {{3, 3}, {0, 2}, {1, 0}}; }

// Reference product written against raw doubles.
MaxPlusMatrix triple_loop(const MaxPlusMatrix& a, const MaxPlusMatrix& b) {
  MaxPlusMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double best = kNegInf;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const double x = a(i, k).value();
        const double y = b(k, j).value();
        if (x == kNegInf || y == kNegInf) continue;
        best = std::max(best, x + y);
      }
      out(i, j) = MaxPlus{best};
    }
  }
  return out;
}

}  // namespace

TEST(MaxPlusScalar, SemiringLaws) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  std::bernoulli_distribution bottom(0.2);
  auto draw = [&] { return bottom(rng) ? MaxPlus::bottom() : MaxPlus{u(rng)}; };
  for (int t = 0; t < 500; ++t) {
    const MaxPlus a = draw(), b = draw(), c = draw();
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + a, a);
    EXPECT_EQ(MaxPlus::bottom() + a, a);
    EXPECT_EQ(MaxPlus::bottom() * a, MaxPlus::bottom());
    EXPECT_EQ(MaxPlus::unit() * a, a);
    EXPECT_EQ(a * b, b * a);
    // Associativity and distributivity hold up to rounding of finite sums.
    EXPECT_TRUE(mpsls::testing::same_maxplus((a * b) * c, a * (b * c), 1e-12));
    EXPECT_TRUE(mpsls::testing::same_maxplus(a * (b + c), (a * b) + (a * c), 1e-12));
  }
}

TEST(MaxPlusScalar, RejectsNaNAndPositiveInfinity) {
  EXPECT_THROW(MaxPlus{std::numeric_limits<double>::quiet_NaN()}, DomainError);
  EXPECT_THROW(MaxPlus{std::numeric_limits<double>::infinity()}, DomainError);
  EXPECT_TRUE(MaxPlus{kNegInf}.is_bottom());
}

TEST(MaxPlusMatrix, MatmulExamples) {
  const MaxPlusMatrix x = {{0}, {0}};
  const MaxPlusMatrix prod = mp_matmul(well_approximated(), x);
  EXPECT_EQ(prod, (MaxPlusMatrix{{3}, {2}, {1}}));
  EXPECT_EQ(mp_matmul(well_approximated(), mp_identity(2)), well_approximated());
  EXPECT_THROW(mp_matmul(well_approximated(), well_approximated()), ShapeError);
}

TEST(MaxPlusMatrix, MatmulMatchesTripleLoop) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const MaxPlusMatrix a = random_maxplus(rng, 5, 4, 0.3);
    const MaxPlusMatrix b = random_maxplus(rng, 4, 3, 0.3);
    EXPECT_EQ(mp_matmul(a, b), triple_loop(a, b));
    EXPECT_EQ(mp_matmul(to_sparse(a), b), triple_loop(a, b));
  }
}

TEST(MaxPlusMatrix, MaxNorm) {
  const std::vector<MaxPlus> a = {3.0, 2.0, 1.0};
  const std::vector<MaxPlus> b = {MaxPlus::bottom(), MaxPlus::bottom()};
  const std::vector<MaxPlus> c = {0.0, -2.0, 5.0, MaxPlus::bottom()};
  EXPECT_EQ(max_norm(a), MaxPlus{3.0});
  EXPECT_TRUE(max_norm(b).is_bottom());
  EXPECT_EQ(max_norm(c), MaxPlus{5.0});
  EXPECT_THROW(max_norm(std::vector<MaxPlus>{}), DomainError);
}

TEST(BruteForce, Permanents) {
  EXPECT_EQ(permanent_bruteforce(well_approximated()), MaxPlus{5.0});
  EXPECT_EQ(permanent_bruteforce(MaxPlusMatrix{{3, 2}, {2, 0}}), MaxPlus{4.0});
  EXPECT_EQ(permanent_bruteforce(MaxPlusMatrix{{-1.5}}), MaxPlus{-1.5});
  EXPECT_THROW(permanent_bruteforce(MaxPlusMatrix{{1, 2}}), ShapeError);
  EXPECT_THROW(permanent_bruteforce(MaxPlusMatrix(11, 2, 0.0)), CapacityError);
}

TEST(BruteForce, ObligatedPermanents) {
  EXPECT_EQ(obligated_permanent_bruteforce(well_approximated(), 2), MaxPlus{4.0});
  EXPECT_EQ(obligated_permanent_bruteforce(well_approximated(), 0), MaxPlus{5.0});
  EXPECT_THROW(obligated_permanent_bruteforce(well_approximated(), 3), DomainError);
}

TEST(BruteForce, ObligatedMatchesConstrainedEnumeration) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const MaxPlusMatrix a = random_maxplus(rng, 6, 3, 0.2);
    for (std::size_t i = 0; i < 6; ++i) {
      // Independent enumeration: three nested loops over distinct rows.
      MaxPlus best = MaxPlus::bottom();
      for (std::size_t r0 = 0; r0 < 6; ++r0)
        for (std::size_t r1 = 0; r1 < 6; ++r1)
          for (std::size_t r2 = 0; r2 < 6; ++r2) {
            if (r0 == r1 || r0 == r2 || r1 == r2) continue;
            if (r0 != i && r1 != i && r2 != i) continue;
            best += a(r0, 0) * a(r1, 1) * a(r2, 2);
          }
      EXPECT_TRUE(mpsls::testing::same_maxplus(obligated_permanent_bruteforce(a, i), best, 1e-12));
    }
  }
}

TEST(BruteForce, OptimalAssignmentSets) {
  const auto opt = optimal_assignments_bruteforce(well_approximated());
  ASSERT_EQ(opt.size(), 1u);
  EXPECT_EQ(opt[0].rows, (std::vector<std::size_t>{0, 1}));

  const auto ident = optimal_assignments_bruteforce(mp_identity(3));
  ASSERT_EQ(ident.size(), 1u);
  EXPECT_EQ(ident[0].rows, (std::vector<std::size_t>{0, 1, 2}));

  const auto zeros = optimal_assignments_bruteforce(MaxPlusMatrix(3, 2, 0.0));
  ASSERT_EQ(zeros.size(), 6u);
  EXPECT_TRUE(std::is_sorted(zeros.begin(), zeros.end(),
                             [](const Injection& a, const Injection& b) { return a.rows < b.rows; }));
}

TEST(BruteForce, PermanentInvariants) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const MaxPlusMatrix a = mpsls::testing::random_integer_maxplus(rng, 6, 3, -3, 3, 0.2);
    const MaxPlus perm = permanent_bruteforce(a);
    const auto opt = optimal_assignments_bruteforce(a);
    if (perm.is_bottom()) {
      EXPECT_TRUE(opt.empty());
      continue;
    }
    ASSERT_FALSE(opt.empty());
    for (const auto& inj : opt) EXPECT_EQ(inj.weight, perm);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const MaxPlus ob = obligated_permanent_bruteforce(a, i);
      EXPECT_LE(ob, perm);
      const bool assigned_somewhere = std::any_of(opt.begin(), opt.end(), [&](const Injection& inj) {
        return std::find(inj.rows.begin(), inj.rows.end(), i) != inj.rows.end();
      });
      EXPECT_EQ(ob == perm, assigned_somewhere);
    }
    // Row permutation invariance.
    const auto p = mpsls::testing::random_permutation(rng, a.rows());
    const MaxPlusMatrix pa = select_rows(a, p);
    EXPECT_EQ(permanent_bruteforce(pa), perm);
    for (std::size_t r = 0; r < p.size(); ++r) {
      EXPECT_EQ(obligated_permanent_bruteforce(pa, r), obligated_permanent_bruteforce(a, p[r]));
    }
  }
}

TEST(MaxPlusMatrix, SparseAndDenseAgree) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    const MaxPlusMatrix a = random_maxplus(rng, 6, 3, 0.5);
    const SparseMaxPlusMatrix s = to_sparse(a);
    EXPECT_EQ(to_dense(s), a);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(s(i, j), a(i, j));
    EXPECT_EQ(permanent_bruteforce(s), permanent_bruteforce(a));
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_EQ(obligated_permanent_bruteforce(s, i), obligated_permanent_bruteforce(a, i));
    }
    EXPECT_EQ(optimal_assignments_bruteforce(s), optimal_assignments_bruteforce(a));
    const MaxPlusMatrix b = random_maxplus(rng, 3, 2, 0.5);
    EXPECT_EQ(mp_matmul(s, to_sparse(b)), mp_matmul(a, b));
    EXPECT_EQ(s.nnz(), a.finite_count());
  }
}
