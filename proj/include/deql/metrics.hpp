#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "deql/interactions.hpp"
#include "deql/parallel.hpp"
#include "deql/spd.hpp"

namespace deql {

// Score of masked (already-seen) items.
inline constexpr double kMaskedScore = -std::numeric_limits<double>::infinity();

// input_row * W with the input items masked out.
Vector score_user(std::span<const std::uint32_t> input_items, const Matrix& w);

// Indices of the K highest scores; ties go to the smaller item index.
std::vector<std::size_t> top_k(const Vector& scores, std::size_t k);

// |top-K ∩ target| / min(K, |target|).
double recall_at_k(const Vector& scores, std::span<const std::uint32_t> target, std::size_t k);

// DCG over the top-K with binary gains and log2(rank + 1) discount, divided by
// the ideal DCG of min(K, |target|) hits.
double ndcg_at_k(const Vector& scores, std::span<const std::uint32_t> target, std::size_t k);

// ||(1-Δ) ⊙ (R - (Δ ⊙ R) W)||_F^2 / ||Δ||_F^2 where Δ retains every cell of R
// except the held-out ones. Throws when no cell is retained.
double mse(const InteractionMatrix& r, const Matrix& w, const std::vector<Entry>& holdout);

struct HistogramBin {
  double lower;
  std::size_t count;
};

// Uniform bins of diag(W) over [lo, hi]; values outside land in the end bins.
std::vector<HistogramBin> diag_histogram(const Matrix& w, std::size_t num_bins, double lo,
                                         double hi);

struct EvalReport {
  std::map<std::size_t, double> recall_at_k;
  std::map<std::size_t, double> ndcg_at_k;
  std::optional<double> mse;
  std::size_t num_users_evaluated = 0;
  std::size_t skipped_users = 0;  // users with an empty target
};

// Scores every user of `input` and averages the metrics over users with a
// nonempty target. Per-user results are summed in user order.
EvalReport evaluate(const Matrix& w, const InteractionMatrix& input,
                    const InteractionMatrix& target, const std::vector<std::size_t>& ks,
                    Execution exec = Execution::parallel);

}  // namespace deql
