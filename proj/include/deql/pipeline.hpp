#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "deql/config.hpp"
#include "deql/interactions.hpp"
#include "deql/metrics.hpp"
#include "deql/solvers.hpp"
#include "deql/split.hpp"

namespace deql {

struct TrainOutcome {
  WeightMatrix model;
  // Original item index of each model row/column (all items unless zero
  // columns were dropped).
  std::vector<std::size_t> kept_items;
  double wall_seconds = 0;
};

// Gram + solve on in-memory data. With `drop_zero_items`, items without
// interactions are removed first; otherwise solvers that need every column
// raise ZeroColumnError.
TrainOutcome train_matrix(const InteractionMatrix& train, const Hyperparameters& hp,
                          SolverChoice solver, bool drop_zero_items,
                          const SolveOptions& options = {});

// Loads config.train (mapped onto config.items when given) and trains.
// `items_out` receives the item table of the model rows.
TrainOutcome train_files(const RunConfig& config, IdTable& items_out);

// Writes model.deqlw, model.items.tsv and train.json into `dir`.
void write_training(const std::filesystem::path& dir, const TrainOutcome& outcome,
                    const IdTable& items);

// Loads test_input/test_target against the model's item table and evaluates,
// including the held-out MSE.
EvalReport evaluate_files(const RunConfig& config, const WeightMatrix& model,
                          const IdTable& model_items);

nlohmann::ordered_json eval_report_json(const EvalReport& report, const Provenance& provenance,
                                        const std::vector<std::size_t>& ks);

struct GridRow {
  double b = 0, lambda = 0, p = 0;
  bool ok = false;
  double recall_at_20 = 0, ndcg_at_20 = 0;
  std::string error;
};

struct GridOutcome {
  std::vector<GridRow> rows;  // leaderboard order
  std::optional<TrainOutcome> best;
  bool all_failed() const;
};

// Split of `train` used for grid validation: config.split settings with a
// seed derived from config.seed.
SplitResult validation_split(const InteractionMatrix& train, const RunConfig& config);

// Carves a validation split from `train` (same split settings, derived seed),
// trains every grid point on the remainder and ranks by NDCG@20, then
// Recall@20, then smaller (b, lambda, p). The best point is retrained on all
// of `train`.
GridOutcome run_grid(const InteractionMatrix& train, const RunConfig& config);

std::string leaderboard_tsv(const std::vector<GridRow>& rows);

struct BenchRow {
  std::size_t n = 0;
  double t_direct = 0, t_fast = 0, ratio = 0;
};

// Median-of-`repeats` wall time of the direct and fast solvers on random
// Gram matrices (2n users, the given density).
std::vector<BenchRow> run_bench(const std::vector<std::size_t>& ns, double density,
                                const Hyperparameters& hp, std::uint64_t seed,
                                std::size_t repeats = 3);

std::string bench_tsv(const std::vector<BenchRow>& rows);

}  // namespace deql
