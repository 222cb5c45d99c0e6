#include "deql/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deql/errors.hpp"

namespace deql {

using Index = Eigen::Index;

Vector score_user(std::span<const std::uint32_t> input_items, const Matrix& w) {
  Vector scores = Vector::Zero(w.cols());
  for (auto k : input_items) scores += w.row(static_cast<Index>(k)).transpose();
  for (auto k : input_items) scores(static_cast<Index>(k)) = kMaskedScore;
  return scores;
}

std::vector<std::size_t> top_k(const Vector& scores, std::size_t k) {
  std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  k = std::min(k, order.size());
  auto better = [&](std::size_t x, std::size_t y) {
    const double sx = scores(static_cast<Index>(x));
    const double sy = scores(static_cast<Index>(y));
    return sx > sy || (sx == sy && x < y);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);
  order.resize(k);
  return order;
}

namespace {

bool in_target(std::span<const std::uint32_t> target, std::size_t item) {
  return std::find(target.begin(), target.end(), item) != target.end();
}

}  // namespace

double recall_at_k(const Vector& scores, std::span<const std::uint32_t> target, std::size_t k) {
  if (k < 1) throw InvalidArgument("recall_at_k: K must be at least 1");
  if (target.empty()) throw InvalidArgument("recall_at_k: empty target");
  std::size_t hits = 0;
  for (auto item : top_k(scores, k)) hits += in_target(target, item);
  return static_cast<double>(hits) / static_cast<double>(std::min(k, target.size()));
}

double ndcg_at_k(const Vector& scores, std::span<const std::uint32_t> target, std::size_t k) {
  if (k < 1) throw InvalidArgument("ndcg_at_k: K must be at least 1");
  if (target.empty()) throw InvalidArgument("ndcg_at_k: empty target");
  const auto ranked = top_k(scores, k);
  double dcg = 0.0;
  for (std::size_t r = 0; r < ranked.size(); ++r)
    if (in_target(target, ranked[r])) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  double idcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, target.size()); ++r)
    idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / idcg;
}

double mse(const InteractionMatrix& r, const Matrix& w, const std::vector<Entry>& holdout) {
  const std::size_t m = r.num_users();
  const std::size_t n = r.num_items();
  std::vector<std::vector<std::uint32_t>> held(m);
  for (const auto& [u, i] : holdout) {
    if (!r.contains(u, i)) throw InvalidArgument("mse: held-out cell is not an interaction");
    held[u].push_back(i);
  }
  std::size_t num_held = 0;
  for (auto& h : held) {
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
    num_held += h.size();
  }
  const double retained = static_cast<double>(m) * static_cast<double>(n) - static_cast<double>(num_held);
  if (!(retained > 0.0)) throw InvalidArgument("mse: no retained cells");

  double numerator = 0.0;
  for (std::size_t u = 0; u < m; ++u) {
    if (held[u].empty()) continue;
    Vector x = Vector::Zero(static_cast<Index>(n));
    for (auto k : r.row(u))
      if (!std::binary_search(held[u].begin(), held[u].end(), k)) x += w.row(static_cast<Index>(k)).transpose();
    // Held-out cells are interactions, so R = 1 there.
    for (auto i : held[u]) {
      const double resid = 1.0 - x(static_cast<Index>(i));
      numerator += resid * resid;
    }
  }
  return numerator / retained;
}

std::vector<HistogramBin> diag_histogram(const Matrix& w, std::size_t num_bins, double lo,
                                         double hi) {
  if (num_bins < 1) throw InvalidArgument("diag_histogram: need at least one bin");
  if (!(hi > lo)) throw InvalidArgument("diag_histogram: empty range");
  const double width = (hi - lo) / static_cast<double>(num_bins);
  std::vector<HistogramBin> bins(num_bins);
  for (std::size_t b = 0; b < num_bins; ++b) bins[b] = {lo + width * static_cast<double>(b), 0};
  for (Index i = 0; i < w.rows(); ++i) {
    const double d = w(i, i);
    auto b = static_cast<std::ptrdiff_t>(std::floor((d - lo) / width));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(num_bins) - 1);
    ++bins[static_cast<std::size_t>(b)].count;
  }
  return bins;
}

EvalReport evaluate(const Matrix& w, const InteractionMatrix& input,
                    const InteractionMatrix& target, const std::vector<std::size_t>& ks,
                    Execution exec) {
  if (input.num_users() != target.num_users() || input.num_items() != target.num_items() ||
      static_cast<std::size_t>(w.rows()) != input.num_items())
    throw InvalidArgument("evaluate: dimension mismatch");
  if (ks.empty()) throw InvalidArgument("evaluate: no K values");
  const std::size_t m = input.num_users();
  const std::size_t nk = ks.size();
  std::vector<double> recall(m * nk, 0.0), ndcg(m * nk, 0.0);
  std::vector<char> evaluated(m, 0);

  const auto users = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic, 16) num_threads(max_threads()) if (exec == Execution::parallel)
  for (std::ptrdiff_t u = 0; u < users; ++u) {
    auto tgt = target.row(static_cast<std::size_t>(u));
    if (tgt.empty()) continue;
    evaluated[static_cast<std::size_t>(u)] = 1;
    const Vector scores = score_user(input.row(static_cast<std::size_t>(u)), w);
    for (std::size_t j = 0; j < nk; ++j) {
      recall[static_cast<std::size_t>(u) * nk + j] = recall_at_k(scores, tgt, ks[j]);
      ndcg[static_cast<std::size_t>(u) * nk + j] = ndcg_at_k(scores, tgt, ks[j]);
    }
  }

  EvalReport report;
  for (std::size_t u = 0; u < m; ++u) {
    if (evaluated[u]) {
      ++report.num_users_evaluated;
    } else if (!input.row(u).empty()) {
      ++report.skipped_users;
    }
  }
  for (std::size_t j = 0; j < nk; ++j) {
    double rs = 0.0, ns = 0.0;
    for (std::size_t u = 0; u < m; ++u) {
      if (!evaluated[u]) continue;
      rs += recall[u * nk + j];
      ns += ndcg[u * nk + j];
    }
    const double denom = report.num_users_evaluated ? static_cast<double>(report.num_users_evaluated) : 1.0;
    report.recall_at_k[ks[j]] = rs / denom;
    report.ndcg_at_k[ks[j]] = ns / denom;
  }
  return report;
}

}  // namespace deql
