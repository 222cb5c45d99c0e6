#include "deql/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "deql/errors.hpp"
#include "deql/gram.hpp"
#include "deql/model_io.hpp"
#include "deql/random.hpp"
#include "deql/split.hpp"
#include "deql/synthetic.hpp"
#include "deql/version.hpp"

namespace deql {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

constexpr std::uint64_t kValidationStream = 0x76616c6964ULL;

}  // namespace

TrainOutcome train_matrix(const InteractionMatrix& train, const Hyperparameters& hp,
                          SolverChoice solver, bool drop_zero_items, const SolveOptions& options) {
  const auto start = Clock::now();
  TrainOutcome out;
  auto zero = check_no_zero_columns(train);
  const InteractionMatrix* data = &train;
  InteractionMatrix reduced;
  if (drop_zero_items && !zero.empty()) {
    reduced = remove_items(train, zero);
    data = &reduced;
  } else {
    zero.clear();
  }
  std::vector<bool> dropped(train.num_items(), false);
  for (auto i : zero) dropped[i] = true;
  for (std::size_t i = 0; i < train.num_items(); ++i)
    if (!dropped[i]) out.kept_items.push_back(i);

  const auto g = gram(*data, options.exec);
  out.model = solve(g, hp, solver, options);
  out.wall_seconds = seconds_since(start);
  return out;
}

TrainOutcome train_files(const RunConfig& config, IdTable& items_out) {
  if (config.train.empty()) throw InvalidArgument("train: no training file given");
  LoadOptions load;
  if (!config.items.empty()) {
    load.items = IdTable::load(config.items);
    load.freeze_items = true;
  }
  auto data = load_interactions(config.train, InteractionFormat::pair_tsv, std::move(load));
  auto outcome = train_matrix(data.matrix, config.hp, config.solver, config.drop_zero_items);
  items_out = IdTable();
  for (auto i : outcome.kept_items) items_out.intern(data.items.id(i));
  return outcome;
}

void write_training(const std::filesystem::path& dir, const TrainOutcome& outcome,
                    const IdTable& items) {
  std::filesystem::create_directories(dir);
  save_model(dir / "model.deqlw", outcome.model);
  items.save(dir / "model.items.tsv");
  nlohmann::ordered_json record;
  record["spec_version"] = kSpecVersion;
  record["model"] = provenance_to_json(outcome.model.provenance);
  record["solver_used"] = to_string(outcome.model.provenance.solver);
  record["fallback_count"] = outcome.model.provenance.fallback_columns.size();
  record["num_items"] = outcome.model.n();
  record["wall_time_seconds"] = outcome.wall_seconds;
  write_text(dir / "train.json", record.dump(2) + "\n");
}

EvalReport evaluate_files(const RunConfig& config, const WeightMatrix& model,
                          const IdTable& model_items) {
  if (config.test_input.empty() || config.test_target.empty())
    throw InvalidArgument("evaluate: test_input and test_target are required");
  if (model_items.size() != model.n())
    throw InvalidArgument("evaluate: item table does not match the model dimension");
  LoadOptions load;
  load.items = model_items;
  load.freeze_items = true;
  auto input = load_interactions(config.test_input, InteractionFormat::pair_tsv, load);
  LoadOptions target_load;
  target_load.users = input.users;
  target_load.items = model_items;
  target_load.freeze_items = true;
  auto target = load_interactions(config.test_target, InteractionFormat::pair_tsv, std::move(target_load));

  const std::size_t m = target.users.size();
  const std::size_t n = model.n();
  // Re-shape the fold-in rows onto the combined user table.
  InteractionMatrix in(m, n, input.matrix.entries());
  auto report = evaluate(model.w, in, target.matrix, config.ks);

  auto combined = in.entries();
  auto held = target.matrix.entries();
  combined.insert(combined.end(), held.begin(), held.end());
  InteractionMatrix full(m, n, std::move(combined));
  report.mse = mse(full, model.w, held);
  return report;
}

nlohmann::ordered_json eval_report_json(const EvalReport& report, const Provenance& provenance,
                                        const std::vector<std::size_t>& ks) {
  nlohmann::ordered_json j;
  j["spec_version"] = kSpecVersion;
  j["variant"] = to_string(provenance.variant);
  j["hyperparameters"] = provenance_to_json(provenance);
  j["k"] = ks;
  nlohmann::ordered_json recall, ndcg;
  for (auto k : ks) {
    recall[std::to_string(k)] = report.recall_at_k.at(k);
    ndcg[std::to_string(k)] = report.ndcg_at_k.at(k);
  }
  j["recall"] = recall;
  j["ndcg"] = ndcg;
  if (report.mse) j["mse"] = *report.mse;
  j["num_users_evaluated"] = report.num_users_evaluated;
  j["skipped_users"] = report.skipped_users;
  return j;
}

bool GridOutcome::all_failed() const {
  return std::none_of(rows.begin(), rows.end(), [](const GridRow& r) { return r.ok; });
}

SplitResult validation_split(const InteractionMatrix& train, const RunConfig& config) {
  SplitSpec spec = config.split;
  spec.seed = counter_hash(config.seed, kValidationStream, 0, 0);
  return split(train, spec);
}

GridOutcome run_grid(const InteractionMatrix& train, const RunConfig& config) {
  const auto validation = validation_split(train, config);

  // Validation matrices share the item space of the sub-training matrix.
  InteractionMatrix sub_train = validation.train;
  InteractionMatrix val_input = validation.test_input;
  InteractionMatrix val_target = validation.test_target;
  if (config.drop_zero_items) {
    auto zero = check_no_zero_columns(sub_train);
    if (!zero.empty()) {
      sub_train = remove_items(sub_train, zero);
      val_input = remove_items(val_input, zero);
      val_target = remove_items(val_target, zero);
    }
  }
  const auto g = gram(sub_train);

  auto axis = [](const std::vector<double>& grid, double fallback) {
    return grid.empty() ? std::vector<double>{fallback} : grid;
  };
  const auto bs = axis(config.b_grid, config.hp.b);
  const auto lambdas = axis(config.lambda_grid, config.hp.lambda);
  const auto ps = axis(config.p_grid, config.hp.p);
  const std::vector<std::size_t> ks{20};

  GridOutcome outcome;
  for (double b : bs) {
    for (double lambda : lambdas) {
      for (double p : ps) {
        GridRow row;
        row.b = b;
        row.lambda = lambda;
        row.p = p;
        try {
          Hyperparameters hp = config.hp;
          hp.b = b;
          hp.lambda = lambda;
          hp.p = p;
          const auto model = solve(g, hp, config.solver);
          const auto report = evaluate(model.w, val_input, val_target, ks);
          row.recall_at_20 = report.recall_at_k.at(20);
          row.ndcg_at_20 = report.ndcg_at_k.at(20);
          row.ok = true;
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        outcome.rows.push_back(std::move(row));
      }
    }
  }

  std::stable_sort(outcome.rows.begin(), outcome.rows.end(), [](const GridRow& x, const GridRow& y) {
    if (x.ok != y.ok) return x.ok;
    if (x.ok) {
      if (x.ndcg_at_20 != y.ndcg_at_20) return x.ndcg_at_20 > y.ndcg_at_20;
      if (x.recall_at_20 != y.recall_at_20) return x.recall_at_20 > y.recall_at_20;
    }
    return std::tie(x.b, x.lambda, x.p) < std::tie(y.b, y.lambda, y.p);
  });

  if (!outcome.all_failed()) {
    const auto& top = outcome.rows.front();
    Hyperparameters hp = config.hp;
    hp.b = top.b;
    hp.lambda = top.lambda;
    hp.p = top.p;
    outcome.best = train_matrix(train, hp, config.solver, config.drop_zero_items);
  }
  return outcome;
}

std::string leaderboard_tsv(const std::vector<GridRow>& rows) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "rank\tb\tlambda\tp\tstatus\trecall@20\tndcg@20\terror\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    std::string error = r.error;
    std::replace(error.begin(), error.end(), '\t', ' ');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out << k + 1 << '\t' << r.b << '\t' << r.lambda << '\t' << r.p << '\t'
        << (r.ok ? "ok" : "failed") << '\t';
    if (r.ok)
      out << r.recall_at_20 << '\t' << r.ndcg_at_20;
    else
      out << "nan\tnan";
    out << '\t' << error << '\n';
  }
  return out.str();
}

std::vector<BenchRow> run_bench(const std::vector<std::size_t>& ns, double density,
                                const Hyperparameters& hp, std::uint64_t seed,
                                std::size_t repeats) {
  std::vector<BenchRow> rows;
  for (std::size_t n : ns) {
    const auto r = random_interactions(2 * n, n, density, seed + n);
    const auto g = gram(r);
    auto time_median = [&](auto&& fn) {
      std::vector<double> times;
      for (std::size_t k = 0; k < std::max<std::size_t>(repeats, 1); ++k) {
        const auto start = Clock::now();
        fn();
        times.push_back(seconds_since(start));
      }
      std::sort(times.begin(), times.end());
      return times[times.size() / 2];
    };
    BenchRow row;
    row.n = n;
    row.t_direct = time_median([&] { (void)solve_direct(g, hp); });
    row.t_fast = time_median([&] { (void)solve_fast(g, hp); });
    row.ratio = row.t_direct / row.t_fast;
    rows.push_back(row);
  }
  return rows;
}

std::string bench_tsv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "n\tt_direct\tt_fast\tratio\n";
  for (const auto& r : rows)
    out << r.n << '\t' << r.t_direct << '\t' << r.t_fast << '\t' << r.ratio << '\n';
  return out.str();
}

}  // namespace deql
