#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "deql/interactions.hpp"

namespace deql {

enum class SplitMode { strong, weak };

std::string to_string(SplitMode mode);
SplitMode parse_split_mode(const std::string& s);

struct SplitSpec {
  SplitMode mode = SplitMode::strong;
  double test_fraction = 0.2;
  double holdout_fraction = 0.2;  // strong mode only
  std::uint64_t seed = 0;

  // Throws InvalidArgument unless both fractions lie strictly inside (0, 1).
  void validate() const;
};

// All three matrices keep the full m x n shape of the input.
struct SplitResult {
  InteractionMatrix train;
  InteractionMatrix test_input;
  InteractionMatrix test_target;
  // Strong mode: test users with fewer than two interactions. Their rows stay
  // in `train`.
  std::size_t skipped_users = 0;
};

SplitResult split(const InteractionMatrix& r, const SplitSpec& spec);

// Writes train.tsv, test_input.tsv, test_target.tsv, users.tsv, items.tsv and
// split.json into `dir`.
void save_split(const std::filesystem::path& dir, const SplitResult& result,
                const SplitSpec& spec, const IdTable& users, const IdTable& items);

}  // namespace deql
