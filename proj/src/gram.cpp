#include "deql/gram.hpp"

#include <cmath>

#include "deql/errors.hpp"

namespace deql {

std::vector<std::size_t> GramBundle::zero_items() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < item_counts.size(); ++i)
    if (item_counts[i] == 0) out.push_back(i);
  return out;
}

namespace {

GramBundle from_counts(const std::vector<std::int64_t>& upper, std::size_t n) {
  GramBundle out;
  out.gram.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  out.item_counts.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.item_counts[k] = upper[k * n + k];
    for (std::size_t l = k; l < n; ++l) {
      const auto v = static_cast<double>(upper[k * n + l]);
      out.gram(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = v;
      out.gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = v;
    }
  }
  return out;
}

}  // namespace

GramBundle gram(const InteractionMatrix& r, Execution exec) {
  const std::size_t n = r.num_items();
  const std::size_t m = r.num_users();

  // Column-compressed view: users of each item, ascending.
  std::vector<std::size_t> col_ptr(n + 1, 0);
  for (std::size_t u = 0; u < m; ++u)
    for (auto i : r.row(u)) ++col_ptr[i + 1];
  for (std::size_t i = 0; i < n; ++i) col_ptr[i + 1] += col_ptr[i];
  std::vector<std::uint32_t> col_users(col_ptr[n]);
  {
    std::vector<std::size_t> fill(col_ptr.begin(), col_ptr.end() - 1);
    for (std::size_t u = 0; u < m; ++u)
      for (auto i : r.row(u)) col_users[fill[i]++] = static_cast<std::uint32_t>(u);
  }

  std::vector<std::int64_t> upper(n * n, 0);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(max_threads()) if (exec == Execution::parallel)
  for (std::ptrdiff_t k = 0; k < rows; ++k) {
    std::int64_t* out = upper.data() + k * rows;
    for (std::size_t p = col_ptr[k]; p < col_ptr[k + 1]; ++p) {
      for (auto l : r.row(col_users[p]))
        if (static_cast<std::ptrdiff_t>(l) >= k) ++out[l];
    }
  }
  return from_counts(upper, n);
}

GramBundle gram_reference(const InteractionMatrix& r) {
  const std::size_t n = r.num_items();
  std::vector<std::int64_t> upper(n * n, 0);
  for (std::size_t u = 0; u < r.num_users(); ++u) {
    auto row = r.row(u);
    for (std::size_t a = 0; a < row.size(); ++a)
      for (std::size_t b = a; b < row.size(); ++b) ++upper[row[a] * n + row[b]];
  }
  return from_counts(upper, n);
}

GramBundle gram_from_matrix(const Matrix& g) {
  if (g.rows() != g.cols()) throw InvalidArgument("gram_from_matrix: matrix not square");
  GramBundle out;
  out.gram = 0.5 * (g + g.transpose());
  out.item_counts.resize(static_cast<std::size_t>(g.rows()));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    out.item_counts[static_cast<std::size_t>(i)] = std::llround(out.gram(i, i));
  return out;
}

}  // namespace deql
