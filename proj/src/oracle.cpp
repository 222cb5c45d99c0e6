#include "deql/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "deql/errors.hpp"
#include "deql/random.hpp"

namespace deql {

using Index = Eigen::Index;

double pairwise_sum(const double* values, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) s += values[k];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

LossEstimate sample_loss(const InteractionMatrix& r, const Matrix& w, const Hyperparameters& hp,
                         std::size_t num_samples, std::uint64_t seed, Execution exec) {
  const std::size_t n = r.num_items();
  if (static_cast<std::size_t>(w.rows()) != n || static_cast<std::size_t>(w.cols()) != n)
    throw InvalidArgument("sample_loss: W does not match the item count");
  if (num_samples < 2) throw InvalidArgument("sample_loss: need at least two samples");

  const Matrix wt = w.transpose();  // column k of wt is row k of W
  const double keep = 1.0 - hp.p;
  const double a2 = hp.a * hp.a;
  const double b2 = hp.b * hp.b;
  std::vector<double> losses(num_samples);

  const auto samples = static_cast<std::ptrdiff_t>(num_samples);
#pragma omp parallel num_threads(max_threads()) if (exec == Execution::parallel)
  {
    Vector x(static_cast<Index>(n));
    std::vector<char> retained(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t s = 0; s < samples; ++s) {
      double total = 0.0;
      for (std::size_t u = 0; u < r.num_users(); ++u) {
        auto row = r.row(u);
        if (row.empty()) continue;  // R_z = 0 gives a zero residual everywhere
        for (std::size_t i = 0; i < n; ++i)
          retained[i] = to_unit(counter_hash(seed, static_cast<std::uint64_t>(s), u, i)) < keep;
        x.setZero();
        for (auto k : row)
          if (retained[k]) x += wt.col(static_cast<Index>(k));
        std::size_t next = 0;
        for (std::size_t i = 0; i < n; ++i) {
          double target = 0.0;
          if (next < row.size() && row[next] == i) {
            target = 1.0;
            ++next;
          }
          const double resid = target - x(static_cast<Index>(i));
          total += (retained[i] ? b2 : a2) * resid * resid;
        }
      }
      losses[static_cast<std::size_t>(s)] = total;
    }
  }

  const double mean = pairwise_sum(losses.data(), losses.size()) / static_cast<double>(num_samples);
  std::vector<double> sq(num_samples);
  for (std::size_t k = 0; k < num_samples; ++k) sq[k] = (losses[k] - mean) * (losses[k] - mean);
  const double var = pairwise_sum(sq.data(), sq.size()) / static_cast<double>(num_samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(num_samples)), num_samples, seed};
}

double expected_loss(const GramBundle& gram, const Matrix& w, const Hyperparameters& hp) {
  const std::size_t n = gram.n();
  if (static_cast<std::size_t>(w.rows()) != n || static_cast<std::size_t>(w.cols()) != n)
    throw InvalidArgument("expected_loss: W does not match the Gram matrix");
  const auto c = coefficients(hp);
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [h, v] = build_H_v(gram, c, i);
    const auto wi = w.col(static_cast<Index>(i));
    terms[i] = wi.dot(h * wi) - 2.0 * wi.dot(v) +
               c.c0 * gram.gram(static_cast<Index>(i), static_cast<Index>(i));
  }
  return pairwise_sum(terms.data(), terms.size());
}

double ease_objective(const GramBundle& gram, const Matrix& w, double lambda) {
  const Matrix& g = gram.gram;
  const Matrix gw = g * w;
  return g.trace() - 2.0 * (w.array() * g.array()).sum() + (w.array() * gw.array()).sum() +
         lambda * w.squaredNorm();
}

double variant_objective(const GramBundle& gram, const Matrix& w, const Hyperparameters& hp) {
  if (hp.variant == Variant::ease) return ease_objective(gram, w, hp.lambda);
  double value = expected_loss(gram, w, hp);
  if (hp.regularized()) value += hp.lambda * w.squaredNorm();
  return value;
}

ProbeReport minimality_probe(const GramBundle& gram, const WeightMatrix& w_star,
                             const Hyperparameters& hp, std::size_t num_perturbations,
                             double epsilon, std::uint64_t seed) {
  const Index n = w_star.w.rows();
  const double base = variant_objective(gram, w_star.w, hp);
  ProbeReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < num_perturbations; ++k) {
    const std::uint64_t direction_seed = counter_hash(seed, k, 0x70726f6265, 0);
    std::mt19937_64 rng(direction_seed);
    std::normal_distribution<double> normal;
    Matrix e(n, n);
    for (Index c = 0; c < n; ++c)
      for (Index r = 0; r < n; ++r) e(r, c) = normal(rng);
    if (hp.variant == Variant::low_rank) {
      e = (k % 2 == 0) ? Matrix(w_star.w * e) : Matrix(e * w_star.w);
    } else if (hp.zero_diagonal()) {
      e.diagonal().setZero();
    }
    const double norm = e.norm();
    if (norm > 0.0) e /= norm;
    const double margin = variant_objective(gram, w_star.w + epsilon * e, hp) - base;
    report.margins.push_back(margin);
    report.min_margin = std::min(report.min_margin, margin);
    if (margin < -1e-12) {
      report.passed = false;
      report.failing_direction_seeds.push_back(direction_seed);
    }
  }
  if (num_perturbations == 0) report.min_margin = 0.0;
  return report;
}

PdCertificate pd_certificate(const Matrix& h) {
  const Index n = h.rows();
  PdCertificate cert;
  if (n == 0) return {true, 0.0};
  const double max_diag = h.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) return {false, max_diag};
  const double threshold = kPivotTolerance * max_diag;

  Matrix l = Matrix::Zero(n, n);
  cert.min_pivot = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j) {
    double pivot = h(j, j);
    for (Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    cert.min_pivot = std::min(cert.min_pivot, pivot);
    if (!(pivot > threshold)) {
      cert.is_pd = false;
      return cert;
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double s = h(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  cert.is_pd = true;
  return cert;
}

}  // namespace deql
