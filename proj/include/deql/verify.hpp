#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "deql/gram.hpp"
#include "deql/solvers.hpp"

namespace deql {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0;
  double tolerance = 0;
};

struct VerifyOptions {
  std::size_t n = 30;
  std::size_t m = 50;
  double density = 0.2;
  std::uint64_t seed = 0;
  bool inject_fault = false;  // breaks the fast solver's second update
  std::size_t mc_samples = 100000;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  nlohmann::ordered_json to_json(const VerifyOptions& options) const;
};

// Randomised property battery over the solvers and oracles.
VerifyReport run_verify(const VerifyOptions& options);

double max_abs_diff(const Matrix& x, const Matrix& y);

// Largest first-order optimality residual of W, relative to max_i ||v^(i)||_inf:
// (H^(i) + lambda I) W_{*i} - v^(i), with component i excluded for
// zero-diagonal variants (where it is absorbed by the multiplier).
double stationarity_residual(const GramBundle& gram, const Matrix& w, const Hyperparameters& hp);

// Max elementwise |(P + c r^T)^{-1}_miller * (P + c r^T) - I| for one random
// SPD P and random c, r.
double miller_identity_error(std::size_t n, std::uint64_t seed);

struct LowRankCheck {
  double full_rank_gap = 0;      // |W(k = n) - solve_direct(plain)|_max
  double max_loss_increase = 0;  // max_k loss(k+1) - loss(k), relative to |loss(1)|
  double max_tail_ratio = 0;     // max_k sigma_{k+1}(W_k) / sigma_1(W_k)
};

LowRankCheck check_low_rank(const GramBundle& gram, const Hyperparameters& hp);

}  // namespace deql
