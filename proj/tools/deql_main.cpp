// Command-line front end: ingest, split, train, evaluate, grid, verify, bench.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deql/config.hpp"
#include "deql/errors.hpp"
#include "deql/interactions.hpp"
#include "deql/metrics.hpp"
#include "deql/model_io.hpp"
#include "deql/parallel.hpp"
#include "deql/pipeline.hpp"
#include "deql/split.hpp"
#include "deql/verify.hpp"
#include "deql/version.hpp"

namespace fs = std::filesystem;
using deql::RunConfig;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw deql::Error("cannot write " + path.string());
  out << text;
}

// Flags double as config keys: a flag given on the command line overrides the
// same key from --config.
struct KeyedFlags {
  CLI::App* app;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;

  explicit KeyedFlags(CLI::App* sub) : app(sub) {
    sub->add_option("--config", config_path, "key=value configuration file");
  }

  CLI::Option* add(const std::string& key, const std::string& flag, const std::string& help) {
    return options[key] = app->add_option(flag, values[key], help);
  }

  void add_switch(const std::string& key, const std::string& flag, const std::string& help) {
    options[key] = app->add_flag(flag, help);
  }

  RunConfig build() const {
    RunConfig config;
    if (!config_path.empty()) deql::apply_config(config, deql::parse_key_values(config_path));
    std::map<std::string, std::string> given;
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      auto it = values.find(key);
      given[key] = it != values.end() && !it->second.empty() ? it->second : "true";
    }
    deql::apply_config(config, given);
    return config;
  }
};

void add_common(KeyedFlags& f) {
  f.add("seed", "--seed", "random seed (u64)");
  f.add("out", "--out", "output directory");
}

void add_hyper(KeyedFlags& f) {
  f.add("variant", "--variant", "plain|l2|zero_diag_l2|b_zero|ease|low_rank");
  f.add("a", "--a", "weight on dropped entries");
  f.add("b", "--b", "weight on retained entries");
  f.add("p", "--p", "dropout probability");
  f.add("lambda", "--lambda", "L2 coefficient");
  f.add("rank_k", "--rank", "rank for low_rank");
  f.add("solver", "--solver", "direct|fast|auto");
  f.add_switch("drop_zero_items", "--drop-zero-items", "remove items without training interactions");
}

int cmd_ingest(const RunConfig& c) {
  auto data = deql::load_interactions(c.input);
  if (c.drop_zero_items) data = deql::drop_items(data, deql::check_no_zero_columns(data.matrix));
  fs::create_directories(c.out);
  data.users.save(c.out / "users.tsv");
  data.items.save(c.out / "items.tsv");
  deql::save_interactions(c.out / "interactions.tsv", data.matrix, data.users, data.items);
  nlohmann::ordered_json j;
  j["spec_version"] = deql::kSpecVersion;
  j["num_users"] = data.matrix.num_users();
  j["num_items"] = data.matrix.num_items();
  j["num_entries"] = data.matrix.num_entries();
  j["zero_items"] = deql::check_no_zero_columns(data.matrix);
  write_text(c.out / "ingest.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_split(const RunConfig& c) {
  auto data = deql::load_interactions(c.input);
  deql::SplitSpec spec = c.split;
  spec.seed = c.seed;
  auto result = deql::split(data.matrix, spec);
  deql::save_split(c.out, result, spec, data.users, data.items);
  std::cerr << "split: train=" << result.train.num_entries()
            << " test_input=" << result.test_input.num_entries()
            << " test_target=" << result.test_target.num_entries()
            << " skipped_users=" << result.skipped_users << "\n";
  return 0;
}

int cmd_train(const RunConfig& c) {
  deql::IdTable items;
  auto outcome = deql::train_files(c, items);
  deql::write_training(c.out, outcome, items);
  std::cerr << "train: " << deql::to_string(outcome.model.provenance.variant) << " via "
            << deql::to_string(outcome.model.provenance.solver) << " in " << outcome.wall_seconds
            << " s, fallback columns " << outcome.model.provenance.fallback_columns.size() << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& c, std::size_t hist_bins, double hist_lo, double hist_hi) {
  fs::path model_path = c.model;
  if (fs::is_directory(model_path)) model_path /= "model.deqlw";
  const auto model = deql::load_model(model_path);
  fs::path items_path = c.items;
  if (items_path.empty()) items_path = model_path.parent_path() / "model.items.tsv";
  const auto items = deql::IdTable::load(items_path);
  const auto report = deql::evaluate_files(c, model, items);
  const auto j = deql::eval_report_json(report, model.provenance, c.ks);
  fs::create_directories(c.out);
  write_text(c.out / "eval.json", j.dump(2) + "\n");
  if (hist_bins > 0) {
    std::string tsv = "bin_lower\tcount\n";
    for (const auto& bin : deql::diag_histogram(model.w, hist_bins, hist_lo, hist_hi))
      tsv += std::to_string(bin.lower) + "\t" + std::to_string(bin.count) + "\n";
    write_text(c.out / "diag_histogram.tsv", tsv);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_grid(const RunConfig& c) {
  if (c.train.empty()) throw deql::InvalidArgument("grid: no training file given");
  deql::LoadOptions load;
  if (!c.items.empty()) {
    load.items = deql::IdTable::load(c.items);
    load.freeze_items = true;
  }
  auto data = deql::load_interactions(c.train, deql::InteractionFormat::pair_tsv, std::move(load));
  auto outcome = deql::run_grid(data.matrix, c);
  fs::create_directories(c.out);
  write_text(c.out / "leaderboard.tsv", deql::leaderboard_tsv(outcome.rows));
  if (outcome.best) {
    deql::IdTable items;
    for (auto i : outcome.best->kept_items) items.intern(data.items.id(i));
    deql::write_training(c.out, *outcome.best, items);
  }
  std::cout << deql::leaderboard_tsv(outcome.rows);
  return outcome.all_failed() ? 1 : 0;
}

int cmd_verify(const deql::VerifyOptions& o, const fs::path& out) {
  const auto report = deql::run_verify(o);
  const auto j = report.to_json(o);
  if (!out.empty()) write_text(out / "verify.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  if (!report.all_passed()) {
    std::cerr << "verify: failing checks:";
    for (const auto& c : report.checks)
      if (!c.pass) std::cerr << " " << c.name;
    std::cerr << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form linear autoencoder recommenders"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "thread cap (overrides DEQL_THREADS)");

  auto* ingest = app.add_subcommand("ingest", "load pair_tsv data and persist id tables");
  KeyedFlags ingest_f(ingest);
  ingest_f.add("input", "--input", "pair_tsv interaction file")->required();
  add_common(ingest_f);
  ingest_f.add_switch("drop_zero_items", "--drop-zero-items", "remove items without interactions");

  auto* split = app.add_subcommand("split", "strong or weak generalisation split");
  KeyedFlags split_f(split);
  split_f.add("input", "--input", "pair_tsv interaction file");
  split_f.add("mode", "--mode", "strong|weak");
  split_f.add("test_fraction", "--test-fraction", "fraction of users (strong) or entries (weak)");
  split_f.add("holdout_fraction", "--holdout-fraction", "held-out share of each test user (strong)");
  add_common(split_f);

  auto* train = app.add_subcommand("train", "fit one hyperparameter point");
  KeyedFlags train_f(train);
  train_f.add("train", "--train", "training pair_tsv");
  train_f.add("items", "--items", "item id table");
  add_hyper(train_f);
  add_common(train_f);

  auto* evaluate = app.add_subcommand("evaluate", "Recall/NDCG/MSE of a trained model");
  KeyedFlags eval_f(evaluate);
  eval_f.add("model", "--model", "model file or training output directory");
  eval_f.add("items", "--items", "item table of the model (default: next to the model)");
  eval_f.add("test_input", "--test-input", "fold-in rows (training rows in weak mode)");
  eval_f.add("test_target", "--test-target", "held-out rows");
  eval_f.add("k", "--k", "comma-separated cutoffs");
  add_common(eval_f);
  std::size_t hist_bins = 0;
  double hist_lo = -0.1, hist_hi = 0.5;
  evaluate->add_option("--hist-bins", hist_bins, "diagonal histogram bins (0 disables)");
  evaluate->add_option("--hist-lo", hist_lo, "histogram range start");
  evaluate->add_option("--hist-hi", hist_hi, "histogram range end");

  auto* grid = app.add_subcommand("grid", "grid search over b, lambda and p");
  KeyedFlags grid_f(grid);
  grid_f.add("train", "--train", "training pair_tsv");
  grid_f.add("items", "--items", "item id table");
  grid_f.add("b_grid", "--b-grid", "comma-separated b values");
  grid_f.add("lambda_grid", "--lambda-grid", "comma-separated lambda values");
  grid_f.add("p_grid", "--p-grid", "comma-separated p values");
  grid_f.add("mode", "--mode", "validation split mode");
  grid_f.add("test_fraction", "--test-fraction", "validation fraction");
  grid_f.add("holdout_fraction", "--holdout-fraction", "validation holdout fraction");
  add_hyper(grid_f);
  add_common(grid_f);

  auto* verify = app.add_subcommand("verify", "randomised property battery");
  deql::VerifyOptions vopts;
  std::string verify_out;
  verify->add_option("--n", vopts.n, "items");
  verify->add_option("--m", vopts.m, "users");
  verify->add_option("--density", vopts.density, "interaction density");
  verify->add_option("--seed", vopts.seed, "seed");
  verify->add_option("--samples", vopts.mc_samples, "Monte-Carlo samples");
  verify->add_flag("--inject-fault", vopts.inject_fault, "break the fast solver (negative test)");
  verify->add_option("--out", verify_out, "directory for verify.json");

  auto* bench = app.add_subcommand("bench", "time direct vs fast solvers");
  std::string bench_ns = "100,200,400", bench_out;
  double bench_density = 0.1;
  std::size_t bench_repeats = 3;
  std::uint64_t bench_seed = 0;
  deql::Hyperparameters bench_hp{1.0, 0.5, 0.3, 0.0, deql::Variant::plain};
  std::string bench_variant = "plain";
  bench->add_option("--n", bench_ns, "comma-separated item counts");
  bench->add_option("--density", bench_density, "interaction density");
  bench->add_option("--repeats", bench_repeats, "timings per solver (median reported)");
  bench->add_option("--seed", bench_seed, "seed");
  bench->add_option("--variant", bench_variant, "plain|l2|zero_diag_l2");
  bench->add_option("--a", bench_hp.a, "a");
  bench->add_option("--b", bench_hp.b, "b");
  bench->add_option("--p", bench_hp.p, "p");
  bench->add_option("--lambda", bench_hp.lambda, "lambda");
  bench->add_option("--out", bench_out, "directory for bench.tsv");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) deql::set_max_threads(threads);

  try {
    if (*ingest) return cmd_ingest(ingest_f.build());
    if (*split) return cmd_split(split_f.build());
    if (*train) return cmd_train(train_f.build());
    if (*evaluate) return cmd_evaluate(eval_f.build(), hist_bins, hist_lo, hist_hi);
    if (*grid) return cmd_grid(grid_f.build());
    if (*verify) return cmd_verify(vopts, verify_out);
    if (*bench) {
      bench_hp.variant = deql::parse_variant(bench_variant);
      const auto rows = deql::run_bench(deql::parse_size_list(bench_ns), bench_density, bench_hp,
                                        bench_seed, bench_repeats);
      const auto tsv = deql::bench_tsv(rows);
      if (!bench_out.empty()) write_text(fs::path(bench_out) / "bench.tsv", tsv);
      std::cout << tsv;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
