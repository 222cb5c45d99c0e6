#pragma once

#include <cstdint>

#include "deql/interactions.hpp"
#include "deql/spd.hpp"

namespace deql {

// Bernoulli(density) interaction pattern. With `cover_items`, every item
// receives at least one interaction so the Gram diagonal is positive.
InteractionMatrix random_interactions(std::size_t num_users, std::size_t num_items, double density,
                                      std::uint64_t seed, bool cover_items = true);

// Interaction data with latent user/item clusters: users interact mostly with
// items of their own cluster, with popularity skew. Used as a stand-in for
// small public datasets.
InteractionMatrix clustered_interactions(std::size_t num_users, std::size_t num_items,
                                         std::size_t num_clusters, double mean_items_per_user,
                                         double in_cluster_share, std::uint64_t seed);

// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
Matrix random_spd(std::size_t n, double lo, double hi, std::uint64_t seed);

}  // namespace deql
