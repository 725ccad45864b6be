// Walkthrough of the library on a 3 x 2 matrix whose entries span three
// orders of magnitude: exact leverage scores, max-plus scores and their
// softmax, one sampled least-squares solve, and the Puiseux slope study of
// the same valuation pattern.

#include <cstdio>
#include <sstream>
#include <vector>

#include "mpsls/mpsls.hpp"

namespace {

void print_row(const char* label, const std::vector<double>& v) {
  std::printf("  %-26s", label);
  for (double x : v) std::printf(" %12.6g", x);
  std::printf("\n");
}

}  // namespace

int main() {
  using namespace mpsls;

  RealMatrix a(3, 2);
  a << 1000, 1000, 1, 100, 10, 1;
  std::printf("A = [[1000, 1000], [1, 100], [10, 1]]\n\n");

  const MaxPlusMatrix log_a = log_abs(a);
  const auto assignment = optimal_assignment(log_a);
  std::ostringstream shown;
  shown << log_a;
  std::printf("log10|A| = %s\n", shown.str().c_str());
  std::printf("optimal assignment: rows (%zu, %zu), weight %g\n\n", assignment.phi[0] + 1, assignment.phi[1] + 1,
              assignment.weight);

  const auto exact = exact_scores(a);
  const auto mp = maxplus_scores(log_a);
  const auto naive = naive_maxplus_scores(log_a);
  std::printf("row scores\n");
  print_row("exact p / k", exact.distribution());
  print_row("max-plus p(log|A|)", mp.values);
  print_row("softmax of max-plus", softmax(mp).values);
  print_row("naive q(log|A|)", naive.values);
  print_row("softmax of naive", softmax(naive).values);
  print_row("CNRN q / d", cnrn_scores(a).distribution());

  // Regress the second column on the first with max-plus sampling.
  const LeastSquaresProblem<double> problem(a.leftCols(1), a.col(1));
  const auto plan = make_plan(softmax(mp).values, 50, 42);
  const auto sol = sampled_solve(problem, plan);
  std::printf("\nsampled solve, r = 50: x_hat = %.6g, x* = %.6g, residual ratio %.6g\n", sol.x_hat(0),
              problem.x_opt()(0), sol.ratio);

  // The same valuation pattern as a matrix of monomials z^{-v}.
  const std::vector<std::vector<Rational>> v = {{3, 3}, {0, 2}, {1, 0}};
  const auto m = randomize_leading_coefficients(monomial_matrix(v, Eigen::MatrixXcd::Ones(3, 2)), 7);
  const auto slopes = asymptotic_score_slopes(m, geometric_grid(1e-2, 1e-6, 9));
  std::printf("\nslopes of log10 p_i(A(z)) as z -> 0 (random leading coefficients)\n");
  print_row("estimate", slopes.estimate);
  print_row("max-plus target", slopes.target);
  return 0;
}
