#include "deql/synthetic.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "deql/random.hpp"

namespace deql {

InteractionMatrix random_interactions(std::size_t num_users, std::size_t num_items, double density,
                                      std::uint64_t seed, bool cover_items) {
  std::mt19937_64 rng(mix64(seed));
  std::vector<Entry> entries;
  for (std::size_t u = 0; u < num_users; ++u)
    for (std::size_t i = 0; i < num_items; ++i)
      if (to_unit(rng()) < density)
        entries.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(i));
  if (cover_items && num_users > 0) {
    for (std::size_t i = 0; i < num_items; ++i)
      entries.emplace_back(static_cast<std::uint32_t>(uniform_below(rng, num_users)),
                           static_cast<std::uint32_t>(i));
  }
  return InteractionMatrix(num_users, num_items, std::move(entries));
}

InteractionMatrix clustered_interactions(std::size_t num_users, std::size_t num_items,
                                         std::size_t num_clusters, double mean_items_per_user,
                                         double in_cluster_share, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed ^ 0x636c7573ULL));
  // Zipf-like popularity inside each cluster.
  std::vector<std::vector<std::uint32_t>> members(num_clusters);
  for (std::size_t i = 0; i < num_items; ++i)
    members[i % num_clusters].push_back(static_cast<std::uint32_t>(i));
  auto pick = [&](const std::vector<std::uint32_t>& pool) {
    // Inverse-CDF draw from weights 1/(rank+1)^0.8 over the pool.
    double total = 0.0;
    for (std::size_t r = 0; r < pool.size(); ++r) total += std::pow(static_cast<double>(r + 1), -0.8);
    double x = to_unit(rng()) * total;
    for (std::size_t r = 0; r < pool.size(); ++r) {
      x -= std::pow(static_cast<double>(r + 1), -0.8);
      if (x <= 0.0) return pool[r];
    }
    return pool.back();
  };
  std::vector<std::uint32_t> all(num_items);
  for (std::size_t i = 0; i < num_items; ++i) all[i] = static_cast<std::uint32_t>(i);

  std::vector<Entry> entries;
  for (std::size_t u = 0; u < num_users; ++u) {
    const auto& home = members[uniform_below(rng, num_clusters)];
    // Uniform on [3, 2*mean - 3], so the mean is `mean_items_per_user`.
    std::size_t count = 3 + uniform_below(rng, static_cast<std::uint64_t>(2.0 * (mean_items_per_user - 3.0)) + 1);
    for (std::size_t k = 0; k < count; ++k) {
      const bool inside = to_unit(rng()) < in_cluster_share;
      entries.emplace_back(static_cast<std::uint32_t>(u), inside ? pick(home) : pick(all));
    }
  }
  for (std::size_t i = 0; i < num_items; ++i)
    entries.emplace_back(static_cast<std::uint32_t>(uniform_below(rng, num_users)),
                         static_cast<std::uint32_t>(i));
  return InteractionMatrix(num_users, num_items, std::move(entries));
}

Matrix random_spd(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed));
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix a(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) a(r, c) = 2.0 * to_unit(rng()) - 1.0;
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Vector d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d(i) = lo + (hi - lo) * to_unit(rng());
  Matrix spd = q * d.asDiagonal() * q.transpose();
  return 0.5 * (spd + spd.transpose());
}

}  // namespace deql
