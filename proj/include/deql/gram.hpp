#pragma once

#include <cstdint>
#include <vector>

#include "deql/interactions.hpp"
#include "deql/parallel.hpp"
#include "deql/spd.hpp"

namespace deql {

// Dense item-item co-occurrence matrix R^T R. Entries are exact integer
// counts stored as doubles; gram(i,i) == item_counts[i].
struct GramBundle {
  Matrix gram;
  std::vector<std::int64_t> item_counts;

  std::size_t n() const { return static_cast<std::size_t>(gram.rows()); }

  // Items whose diagonal is zero.
  std::vector<std::size_t> zero_items() const;
};

// Parallel kernel: rows of the upper triangle are partitioned across threads
// via a column-compressed copy of R, then mirrored.
GramBundle gram(const InteractionMatrix& r, Execution exec = Execution::parallel);

// Serial reference: pairwise counting over each user's sorted item list.
GramBundle gram_reference(const InteractionMatrix& r);

// Wraps an arbitrary symmetric matrix (used by benchmarks and tests that
// synthesise Gram matrices directly).
GramBundle gram_from_matrix(const Matrix& g);

}  // namespace deql
