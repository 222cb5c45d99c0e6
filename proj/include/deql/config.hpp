#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "deql/hyperparameters.hpp"
#include "deql/solvers.hpp"
#include "deql/split.hpp"

namespace deql {

struct RunConfig {
  // Data.
  std::filesystem::path input;        // full interaction file (split)
  std::filesystem::path train;        // training interactions
  std::filesystem::path items;        // item id table shared by all files
  std::filesystem::path test_input;   // fold-in rows (train rows in weak mode)
  std::filesystem::path test_target;  // held-out rows
  std::filesystem::path model;        // model file (evaluate)
  bool drop_zero_items = false;

  SplitSpec split;
  Hyperparameters hp;
  // Grid axes; `a` stays fixed at hp.a.
  std::vector<double> b_grid, lambda_grid, p_grid;
  std::vector<std::size_t> ks{5, 10, 20};
  SolverChoice solver = SolverChoice::automatic;
  std::filesystem::path out = ".";
  std::uint64_t seed = 0;
};

// Parses flat `key=value` lines; '#' starts a comment line. Throws ParseError
// on lines without '=' or duplicate keys.
std::map<std::string, std::string> parse_key_values(const std::filesystem::path& path);

// Applies recognised keys to `config`; unknown keys are an error.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& values);

std::vector<double> parse_double_list(const std::string& s);
std::vector<std::size_t> parse_size_list(const std::string& s);

}  // namespace deql
