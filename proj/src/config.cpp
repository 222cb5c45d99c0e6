#include "deql/config.hpp"

#include <fstream>
#include <sstream>

#include "deql/errors.hpp"

namespace deql {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    auto d = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "': expected an unsigned integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw InvalidArgument("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double("list", item));
  }
  if (out.empty()) throw InvalidArgument("empty list '" + s + "'");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<std::size_t>(to_u64("list", item)));
  }
  if (out.empty()) throw InvalidArgument("empty list '" + s + "'");
  return out;
}

std::map<std::string, std::string> parse_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(path.string(), line_no, "expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ParseError(path.string(), line_no, "empty key");
    if (!out.emplace(key, trim(t.substr(eq + 1))).second)
      throw ParseError(path.string(), line_no, "duplicate key '" + key + "'");
  }
  return out;
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& values) {
  for (const auto& [key, v] : values) {
    if (key == "input") c.input = v;
    else if (key == "train") c.train = v;
    else if (key == "items") c.items = v;
    else if (key == "test_input") c.test_input = v;
    else if (key == "test_target") c.test_target = v;
    else if (key == "model") c.model = v;
    else if (key == "drop_zero_items") c.drop_zero_items = to_bool(key, v);
    else if (key == "mode") c.split.mode = parse_split_mode(v);
    else if (key == "test_fraction") c.split.test_fraction = to_double(key, v);
    else if (key == "holdout_fraction") c.split.holdout_fraction = to_double(key, v);
    else if (key == "variant") c.hp.variant = parse_variant(v);
    else if (key == "a") c.hp.a = to_double(key, v);
    else if (key == "b") c.hp.b = to_double(key, v);
    else if (key == "p") c.hp.p = to_double(key, v);
    else if (key == "lambda") c.hp.lambda = to_double(key, v);
    else if (key == "rank_k") c.hp.rank_k = static_cast<std::size_t>(to_u64(key, v));
    else if (key == "b_grid") c.b_grid = parse_double_list(v);
    else if (key == "lambda_grid") c.lambda_grid = parse_double_list(v);
    else if (key == "p_grid") c.p_grid = parse_double_list(v);
    else if (key == "k") c.ks = parse_size_list(v);
    else if (key == "solver") c.solver = parse_solver_choice(v);
    else if (key == "out") c.out = v;
    else if (key == "seed") c.seed = c.split.seed = to_u64(key, v);
    else throw InvalidArgument("unknown config key '" + key + "'");
  }
}

}  // namespace deql
