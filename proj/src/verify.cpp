#include "deql/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "deql/oracle.hpp"
#include "deql/random.hpp"
#include "deql/synthetic.hpp"
#include "deql/version.hpp"

namespace deql {

using Index = Eigen::Index;

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

nlohmann::ordered_json VerifyReport::to_json(const VerifyOptions& options) const {
  nlohmann::ordered_json j;
  j["spec_version"] = kSpecVersion;
  j["seed"] = options.seed;
  j["n"] = options.n;
  j["m"] = options.m;
  j["density"] = options.density;
  j["inject_fault"] = options.inject_fault;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["measured"] = c.measured;
    e["tolerance"] = c.tolerance;
    arr.push_back(e);
  }
  j["checks"] = arr;
  j["all_passed"] = all_passed();
  return j;
}

double max_abs_diff(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) return std::numeric_limits<double>::infinity();
  if (x.size() == 0) return 0.0;
  return (x - y).cwiseAbs().maxCoeff();
}

double stationarity_residual(const GramBundle& gram, const Matrix& w, const Hyperparameters& hp) {
  const auto c = coefficients(hp);
  const double lambda = hp.variant == Variant::plain ? 0.0 : hp.lambda;
  const bool zero_diag = hp.zero_diagonal();
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < gram.n(); ++i) {
    auto [h, v] = build_H_v(gram, c, i);
    if (lambda > 0.0) h.diagonal().array() += lambda;
    Vector r = h * w.col(static_cast<Index>(i)) - v;
    if (zero_diag) r(static_cast<Index>(i)) = 0.0;
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
    scale = std::max(scale, v.cwiseAbs().maxCoeff());
  }
  return scale > 0.0 ? worst / scale : worst;
}

double miller_identity_error(std::size_t n, std::uint64_t seed) {
  const Matrix p = random_spd(n, 0.5, 5.0, seed);
  std::mt19937_64 rng(mix64(seed ^ 0x6d696c6cULL));
  Vector col(static_cast<Index>(n)), row(static_cast<Index>(n));
  for (Index k = 0; k < col.size(); ++k) {
    col(k) = 2.0 * to_unit(rng()) - 1.0;
    row(k) = 2.0 * to_unit(rng()) - 1.0;
  }
  const Matrix updated = p + col * row.transpose();
  const Matrix inv = miller_update(p.inverse(), col, row);
  return max_abs_diff(inv * updated, Matrix::Identity(updated.rows(), updated.cols()));
}

LowRankCheck check_low_rank(const GramBundle& gram, const Hyperparameters& hp) {
  LowRankCheck out;
  const std::size_t n = gram.n();
  Hyperparameters plain = hp;
  plain.variant = Variant::plain;
  plain.lambda = 0.0;
  const Matrix reference = solve_direct(gram, plain).w;

  double previous = 0.0, first = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    Hyperparameters lr = hp;
    lr.variant = Variant::low_rank;
    lr.rank_k = k;
    const auto w = solve_low_rank(gram, lr);
    const double loss = expected_loss(gram, w.w, lr);
    if (k == 1) first = std::abs(loss);
    else out.max_loss_increase = std::max(out.max_loss_increase, (loss - previous) / std::max(first, 1e-300));
    previous = loss;
    if (k < n) {
      Eigen::JacobiSVD<Matrix> svd(w.w);
      const auto& sv = svd.singularValues();
      out.max_tail_ratio = std::max(out.max_tail_ratio, sv(static_cast<Index>(k)) / sv(0));
    } else {
      out.full_rank_gap = max_abs_diff(w.w, reference);
    }
  }
  return out;
}

namespace {

CheckResult upper_check(std::string name, double measured, double tolerance) {
  return {std::move(name), measured <= tolerance, measured, tolerance};
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& o) {
  VerifyReport report;
  const std::uint64_t seed = o.seed;
  SolveOptions fault;
  fault.inject_miller_fault = o.inject_fault;

  // Solver equivalence and stationarity over a small sweep.
  double equiv = 0.0, station = 0.0, scalar = 0.0, probe_min = std::numeric_limits<double>::infinity();
  const double bs[] = {0.25, 1.0, 1.5};
  const double ps[] = {0.1, 0.5};
  const double lambdas[] = {0.0, 10.0};
  std::size_t instance = 0;
  for (double b : bs) {
    for (double p : ps) {
      for (double lambda : lambdas) {
        const auto r = random_interactions(o.m, o.n, o.density, counter_hash(seed, 1, instance++, 0));
        const auto g = gram(r);
        for (auto variant : {Variant::plain, Variant::l2, Variant::zero_diag_l2}) {
          if (variant == Variant::plain && lambda > 0.0) continue;
          Hyperparameters hp{1.0, b, p, lambda, variant};
          const auto direct = solve_direct(g, hp);
          const auto fast = solve_fast(g, hp, fault);
          equiv = std::max(equiv, max_abs_diff(direct.w, fast.w));
          station = std::max(station, stationarity_residual(g, direct.w, hp));
          Hyperparameters scaled = hp;
          scaled.a *= 2.0;
          scaled.b *= 2.0;
          scaled.lambda *= 4.0;
          scalar = std::max(scalar, max_abs_diff(solve_direct(g, scaled).w, direct.w));
          auto probe = minimality_probe(g, direct, hp, 5, 1e-3, counter_hash(seed, 2, instance, 0));
          probe_min = std::min(probe_min, probe.min_margin);
        }
      }
    }
  }
  report.checks.push_back(upper_check("fast_equals_direct", equiv, 1e-8));
  report.checks.push_back(upper_check("stationarity", station, 1e-9));
  report.checks.push_back(upper_check("scalar_invariance", scalar, 1e-10));
  report.checks.push_back({"minimality_probe", probe_min >= -1e-12, probe_min, -1e-12});

  // b = 0: closed form vs reduced systems, and diagonal independence.
  double thm2 = 0.0, diag_gap = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto r = random_interactions(o.m, o.n, o.density, counter_hash(seed, 3, k, 0));
    const auto g = gram(r);
    const double p = (k == 0) ? 0.1 : (k == 1 ? 0.5 : 0.8);
    Hyperparameters hp{1.0, 0.0, p, 0.0, Variant::b_zero};
    const auto sub = solve_b_zero(g, hp);
    thm2 = std::max(thm2, max_abs_diff(solve_steck(g, p).w, sub.w));
    const double base = expected_loss(g, sub.w, hp);
    Matrix w = sub.w;
    std::mt19937_64 rng(counter_hash(seed, 4, k, 0));
    for (Index i = 0; i < w.rows(); ++i) w(i, i) = 4.0 * to_unit(rng()) - 2.0;
    diag_gap = std::max(diag_gap, std::abs(expected_loss(g, w, hp) - base) / std::abs(base));
  }
  report.checks.push_back(upper_check("b0_closed_form_equivalence", thm2, 1e-8));
  report.checks.push_back(upper_check("diagonal_independence_b0", diag_gap, 1e-10));

  // Positive definiteness of every H^(i) for b > 0, and singular full system at b = 0.
  {
    const auto g = gram(random_interactions(o.m, o.n, o.density, counter_hash(seed, 5, 0, 0)));
    std::size_t failures = 0;
    const auto c = coefficients(Hyperparameters{1.0, 0.5, 0.3, 0.0, Variant::plain});
    for (std::size_t i = 0; i < g.n(); ++i) failures += !pd_certificate(build_H_v(g, c, i).first).is_pd;
    const auto c0 = coefficients(Hyperparameters{1.0, 0.0, 0.3, 0.0, Variant::b_zero});
    for (std::size_t i = 0; i < g.n(); ++i) failures += pd_certificate(build_H_v(g, c0, i).first).is_pd;
    report.checks.push_back(upper_check("pd_certificates", static_cast<double>(failures), 0.0));
  }

  {
    double worst = 0.0;
    for (std::size_t k = 0; k < 20; ++k) worst = std::max(worst, miller_identity_error(10, counter_hash(seed, 6, k, 0)));
    report.checks.push_back(upper_check("miller_identity", worst, 1e-10));
  }

  // Monte-Carlo agreement on a small instance with a solver-produced W.
  {
    const auto r = random_interactions(12, 6, 0.3, counter_hash(seed, 7, 0, 0));
    const auto g = gram(r);
    Hyperparameters hp{1.0, 0.5, 0.3, 0.0, Variant::plain};
    const auto w = solve_fast(g, hp);
    const auto est = sample_loss(r, w.w, hp, o.mc_samples, counter_hash(seed, 8, 0, 0));
    const double analytic = expected_loss(g, w.w, hp);
    const double z = std::abs(est.mean - analytic) / est.std_error;
    report.checks.push_back(upper_check("monte_carlo_agreement", z, 4.0));
  }

  {
    const auto g = gram(random_interactions(o.m, std::min<std::size_t>(o.n, 12), o.density, counter_hash(seed, 9, 0, 0)));
    Hyperparameters hp{0.7, 0.7, 0.4, 0.0, Variant::low_rank, 1};
    const auto lr = check_low_rank(g, hp);
    report.checks.push_back(upper_check("low_rank_full_rank_match", lr.full_rank_gap, 1e-7));
    report.checks.push_back(upper_check("low_rank_monotonicity", lr.max_loss_increase, 1e-10));
    report.checks.push_back(upper_check("low_rank_rank_bound", lr.max_tail_ratio, 1e-8));
  }
  return report;
}

}  // namespace deql
