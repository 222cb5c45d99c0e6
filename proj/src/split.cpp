#include "deql/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "deql/errors.hpp"
#include "deql/random.hpp"
#include "deql/version.hpp"

namespace deql {

std::string to_string(SplitMode mode) { return mode == SplitMode::strong ? "strong" : "weak"; }

SplitMode parse_split_mode(const std::string& s) {
  if (s == "strong") return SplitMode::strong;
  if (s == "weak") return SplitMode::weak;
  throw InvalidArgument("unknown split mode '" + s + "' (expected strong or weak)");
}

void SplitSpec::validate() const {
  auto inside = [](double f) { return f > 0.0 && f < 1.0; };
  if (!inside(test_fraction)) throw InvalidArgument("test_fraction must lie in (0,1)");
  if (mode == SplitMode::strong && !inside(holdout_fraction))
    throw InvalidArgument("holdout_fraction must lie in (0,1)");
}

namespace {

// Stream tags keep the user-selection, per-user and weak-mode draws
// independent for one global seed.
constexpr std::uint64_t kUserStream = 0x75736572;
constexpr std::uint64_t kHoldoutStream = 0x686f6c64;
constexpr std::uint64_t kEntryStream = 0x656e7472;

SplitResult split_strong(const InteractionMatrix& r, const SplitSpec& spec) {
  const std::size_t m = r.num_users();
  std::vector<std::uint32_t> users(m);
  std::iota(users.begin(), users.end(), 0u);
  std::mt19937_64 rng(counter_hash(spec.seed, kUserStream, 0, 0));
  seeded_shuffle(std::span<std::uint32_t>(users), rng);

  auto num_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(m)));
  num_test = std::min(num_test, m);
  std::vector<bool> is_test(m, false);
  for (std::size_t k = 0; k < num_test; ++k) is_test[users[k]] = true;

  SplitResult out;
  std::vector<Entry> train, input, target;
  for (std::uint32_t u = 0; u < m; ++u) {
    auto row = r.row(u);
    if (!is_test[u]) {
      for (auto i : row) train.emplace_back(u, i);
      continue;
    }
    if (row.size() < 2) {
      ++out.skipped_users;
      for (auto i : row) train.emplace_back(u, i);
      continue;
    }
    std::vector<std::uint32_t> items(row.begin(), row.end());
    std::mt19937_64 user_rng(counter_hash(spec.seed, kHoldoutStream, u, 0));
    seeded_shuffle(std::span<std::uint32_t>(items), user_rng);
    auto held = static_cast<std::size_t>(
        std::llround(spec.holdout_fraction * static_cast<double>(items.size())));
    held = std::clamp<std::size_t>(held, 1, items.size() - 1);
    for (std::size_t k = 0; k < items.size(); ++k)
      (k < held ? target : input).emplace_back(u, items[k]);
  }
  const std::size_t n = r.num_items();
  out.train = InteractionMatrix(m, n, std::move(train));
  out.test_input = InteractionMatrix(m, n, std::move(input));
  out.test_target = InteractionMatrix(m, n, std::move(target));
  return out;
}

SplitResult split_weak(const InteractionMatrix& r, const SplitSpec& spec) {
  auto entries = r.entries();
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(counter_hash(spec.seed, kEntryStream, 0, 0));
  seeded_shuffle(std::span<std::size_t>(order), rng);

  auto num_test = static_cast<std::size_t>(
      std::llround(spec.test_fraction * static_cast<double>(entries.size())));
  num_test = std::min(num_test, entries.size());
  std::vector<Entry> train, target;
  std::vector<bool> held(entries.size(), false);
  for (std::size_t k = 0; k < num_test; ++k) held[order[k]] = true;
  for (std::size_t k = 0; k < entries.size(); ++k) (held[k] ? target : train).push_back(entries[k]);

  SplitResult out;
  out.train = InteractionMatrix(r.num_users(), r.num_items(), std::move(train));
  out.test_input = out.train;
  out.test_target = InteractionMatrix(r.num_users(), r.num_items(), std::move(target));
  return out;
}

}  // namespace

SplitResult split(const InteractionMatrix& r, const SplitSpec& spec) {
  spec.validate();
  if (r.num_entries() == 0) throw InvalidArgument("split: interaction matrix is empty");
  return spec.mode == SplitMode::strong ? split_strong(r, spec) : split_weak(r, spec);
}

void save_split(const std::filesystem::path& dir, const SplitResult& result,
                const SplitSpec& spec, const IdTable& users, const IdTable& items) {
  std::filesystem::create_directories(dir);
  save_interactions(dir / "train.tsv", result.train, users, items);
  save_interactions(dir / "test_input.tsv", result.test_input, users, items);
  save_interactions(dir / "test_target.tsv", result.test_target, users, items);
  users.save(dir / "users.tsv");
  items.save(dir / "items.tsv");

  nlohmann::ordered_json meta;
  meta["spec_version"] = kSpecVersion;
  meta["mode"] = to_string(spec.mode);
  meta["test_fraction"] = spec.test_fraction;
  if (spec.mode == SplitMode::strong) meta["holdout_fraction"] = spec.holdout_fraction;
  meta["seed"] = spec.seed;
  meta["skipped_users"] = result.skipped_users;
  meta["train_entries"] = result.train.num_entries();
  meta["test_input_entries"] = result.test_input.num_entries();
  meta["test_target_entries"] = result.test_target.num_entries();
  std::ofstream out(dir / "split.json", std::ios::binary);
  out << meta.dump(2) << '\n';
}

}  // namespace deql
