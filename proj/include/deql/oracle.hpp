#pragma once

#include <cstdint>
#include <vector>

#include "deql/gram.hpp"
#include "deql/interactions.hpp"
#include "deql/solvers.hpp"

namespace deql {

struct LossEstimate {
  double mean = 0;
  double std_error = 0;  // sample standard deviation / sqrt(num_samples)
  std::size_t num_samples = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const LossEstimate&, const LossEstimate&) = default;
};

// Monte-Carlo estimate of E ||A ⊙ (R - (Δ ⊙ R) W)||_F^2 with Δ_zi ~
// Bernoulli(1-p) and A = a on dropped cells, b on retained ones. Each Δ draw
// is a pure function of (seed, sample, user, item), and the per-sample losses
// are reduced with a fixed pairwise tree, so the result does not depend on the
// thread count.
LossEstimate sample_loss(const InteractionMatrix& r, const Matrix& w, const Hyperparameters& hp,
                         std::size_t num_samples, std::uint64_t seed,
                         Execution exec = Execution::parallel);

// Analytic value of the same expectation:
//   sum_i  w_i^T H^(i) w_i - 2 w_i^T v^(i) + c0 * gram(i,i).
double expected_loss(const GramBundle& gram, const Matrix& w, const Hyperparameters& hp);

// ||R - R W||_F^2 + lambda ||W||_F^2 written in terms of the Gram matrix.
double ease_objective(const GramBundle& gram, const Matrix& w, double lambda);

// Objective the variant's solver minimises: the expected loss plus the ridge
// term where present, or the EASE objective.
double variant_objective(const GramBundle& gram, const Matrix& w, const Hyperparameters& hp);

struct ProbeReport {
  bool passed = true;
  double min_margin = 0;
  std::vector<double> margins;
  std::vector<std::uint64_t> failing_direction_seeds;
};

// Perturbs W* along random unit-Frobenius directions and checks that the
// variant objective does not decrease by more than 1e-12. Directions have a
// zero diagonal for zero-diagonal variants; for low_rank they are W* B or B W*
// so that the rank constraint is preserved.
ProbeReport minimality_probe(const GramBundle& gram, const WeightMatrix& w_star,
                             const Hyperparameters& hp, std::size_t num_perturbations,
                             double epsilon, std::uint64_t seed);

struct PdCertificate {
  bool is_pd = false;
  double min_pivot = 0;
};

// Unblocked Cholesky that records every pivot; positive definite iff all
// pivots exceed 1e-12 * max(diag).
PdCertificate pd_certificate(const Matrix& h);

// Pairwise (fixed-tree) summation.
double pairwise_sum(const double* values, std::size_t count);

}  // namespace deql
