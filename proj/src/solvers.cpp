#include "deql/solvers.hpp"

#include <cmath>
#include <exception>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "deql/errors.hpp"

namespace deql {

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::direct: return "direct";
    case SolverKind::fast: return "fast";
    case SolverKind::closed_form: return "closed_form";
  }
  return "unknown";
}

SolverKind parse_solver_kind(const std::string& s) {
  for (auto k : {SolverKind::direct, SolverKind::fast, SolverKind::closed_form})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown solver kind '" + s + "'");
}

SolverChoice parse_solver_choice(const std::string& s) {
  if (s == "direct") return SolverChoice::direct;
  if (s == "fast") return SolverChoice::fast;
  if (s == "auto") return SolverChoice::automatic;
  throw InvalidArgument("unknown solver '" + s + "' (expected direct, fast or auto)");
}

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

Provenance make_provenance(const Hyperparameters& hp, SolverKind kind) {
  Provenance prov;
  prov.variant = hp.variant;
  prov.a = hp.a;
  prov.b = hp.b;
  prov.p = hp.p;
  prov.lambda = hp.lambda;
  if (hp.variant == Variant::low_rank) prov.rank_k = hp.rank_k;
  prov.solver = kind;
  return prov;
}

// gram with its diagonal scaled by `diag` and off-diagonal by `off`.
Matrix hadamard_pattern(const Matrix& gram, double diag, double off) {
  Matrix out = off * gram;
  out.diagonal() = diag * gram.diagonal();
  return out;
}

bool zero_diag_path(const Hyperparameters& hp) {
  return hp.variant == Variant::zero_diag_l2 || hp.variant == Variant::b_zero;
}

void require_iterative_variant(const Hyperparameters& hp, const char* who) {
  switch (hp.variant) {
    case Variant::plain:
    case Variant::l2:
    case Variant::zero_diag_l2: break;
    case Variant::b_zero:
      if (hp.lambda > 0.0) break;
      [[fallthrough]];
    default:
      throw InvalidArgument(std::string(who) + ": variant " + to_string(hp.variant) +
                            " is not handled by this solver");
  }
}

double ridge(const Hyperparameters& hp) {
  return hp.variant == Variant::plain ? 0.0 : hp.lambda;
}

void require_nonzero_columns(const GramBundle& gram, double lambda) {
  if (lambda > 0.0) return;
  auto zero = gram.zero_items();
  if (!zero.empty()) throw ZeroColumnError(std::move(zero));
}

// Runs body(i) for every column, parallel when requested. Exceptions are
// collected and the one from the lowest column is rethrown.
template <class Body>
void for_each_column(std::size_t n, Execution exec, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto cols = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(max_threads()) if (exec == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < cols; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Direct solve of one column (plain / l2 / zero-diagonal with ridge).
Vector direct_column(const GramBundle& gram, const EmphasisCoefficients& coeffs, double lambda,
                     bool zero_diag, std::size_t i) {
  auto [h, v] = build_H_v(gram, coeffs, i);
  if (lambda > 0.0) h.diagonal().array() += lambda;
  auto llt = factor_spd(h);
  if (!llt) throw NotPositiveDefinite("solve_direct", i);
  Vector s = llt->solve(v);
  if (!zero_diag) return s;

  Vector t = llt->solve(Vector::Unit(h.rows(), idx(i)));
  const double ti = t(idx(i));
  if (!(std::abs(ti) > 0.0) || !std::isfinite(ti))
    throw Error("solve_direct: degenerate zero-diagonal pivot in column " + std::to_string(i));
  Vector x = s - (s(idx(i)) / ti) * t;
  x(idx(i)) = 0.0;
  return x;
}

}  // namespace

std::pair<Matrix, Vector> build_H_v(const GramBundle& gram, const EmphasisCoefficients& c,
                                    std::size_t i) {
  const Index n = gram.gram.rows();
  const Index ii = idx(i);
  if (ii < 0 || ii >= n) throw InvalidArgument("build_H_v: item index out of range");
  const Matrix& g = gram.gram;

  Matrix h = hadamard_pattern(g, c.g0_diag, c.g0_off);
  for (Index k = 0; k < n; ++k) {
    if (k == ii) continue;
    h(k, ii) = c.g_cross * g(k, ii);
    h(ii, k) = c.g_cross * g(ii, k);
  }
  h(ii, ii) = c.g_self * g(ii, ii);

  Vector v = c.u_off * g.col(ii);
  v(ii) = c.u_diag * g(ii, ii);
  return {std::move(h), std::move(v)};
}

WeightMatrix solve_direct(const GramBundle& gram, const Hyperparameters& hp,
                          const SolveOptions& options) {
  hp.validate(gram.n());
  require_iterative_variant(hp, "solve_direct");
  const double lambda = ridge(hp);
  require_nonzero_columns(gram, lambda);

  const auto coeffs = coefficients(hp);
  const bool zero_diag = zero_diag_path(hp);
  const std::size_t n = gram.n();
  WeightMatrix out{Matrix(idx(n), idx(n)), make_provenance(hp, SolverKind::direct)};
  for_each_column(n, options.exec, [&](std::size_t i) {
    out.w.col(idx(i)) = direct_column(gram, coeffs, lambda, zero_diag, i);
  });
  return out;
}

WeightMatrix solve_fast(const GramBundle& gram, const Hyperparameters& hp,
                        const SolveOptions& options) {
  hp.validate(gram.n());
  require_iterative_variant(hp, "solve_fast");
  const double lambda = ridge(hp);
  require_nonzero_columns(gram, lambda);

  const auto c = coefficients(hp);
  const bool zero_diag = zero_diag_path(hp);
  const std::size_t n = gram.n();
  const Matrix& g = gram.gram;

  // Shared precomputation.
  Matrix h0 = hadamard_pattern(g, c.g0_diag, c.g0_off);
  if (lambda > 0.0) h0.diagonal().array() += lambda;
  auto h0_inv_opt = invert_spd(h0);
  if (!h0_inv_opt) throw Error("solve_fast: shared matrix H0 is not positive definite");
  const Matrix& h0_inv = *h0_inv_opt;
  const Matrix h0_inv_v = h0_inv * hadamard_pattern(g, c.u_diag, c.u_off);
  const Matrix h0_inv_e1 = h0_inv * hadamard_pattern(g, c.g1_diag, c.g1_off);
  const Matrix e2_all = hadamard_pattern(g, 0.0, c.g2_off);

  WeightMatrix out{Matrix(idx(n), idx(n)), make_provenance(hp, SolverKind::fast)};
  std::vector<char> fallback(n, 0);
  const double sign = options.inject_miller_fault ? -1.0 : 1.0;

  for_each_column(n, options.exec, [&](std::size_t col) {
    const Index i = idx(col);
    // e2 is row i of G2 ⊙ R^T R; by symmetry that is column i.
    const auto e2 = e2_all.col(i);
    const auto r = h0_inv_v.col(i);
    const auto w = h0_inv_e1.col(i);

    const double d1 = 1.0 + w(i);
    if (!(std::abs(d1) >= kMillerGuard)) {
      fallback[col] = 1;
      return;
    }
    const Vector s = r - (r(i) / d1) * w;
    const Vector t = h0_inv.col(i) - (h0_inv(i, i) / d1) * w;
    const double e2t = e2.dot(t);
    const double d2 = 1.0 + sign * e2t;
    if (!(std::abs(d2) >= kMillerGuard)) {
      fallback[col] = 1;
      return;
    }
    Vector x = s - (e2.dot(s) / d2) * t;
    if (zero_diag) {
      // Same two updates applied to the unit vector l^(i): the first step
      // reproduces t, the second scales it.
      const Vector xl = t - (e2t / d2) * t;
      const double xl_i = xl(i);
      if (!(std::abs(xl_i) > 0.0) || !std::isfinite(xl_i)) {
        fallback[col] = 1;
        return;
      }
      x -= (x(i) / xl_i) * xl;
      x(i) = 0.0;
    }
    out.w.col(i) = x;
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (!fallback[i]) continue;
    out.w.col(idx(i)) = direct_column(gram, c, lambda, zero_diag, i);
    out.provenance.fallback_columns.push_back(i);
  }
  return out;
}

Matrix miller_update(const Matrix& p_inv, const Vector& col, const Vector& row) {
  if (p_inv.rows() != p_inv.cols() || col.size() != p_inv.rows() || row.size() != p_inv.rows())
    throw InvalidArgument("miller_update: dimension mismatch");
  const Vector p_col = p_inv * col;                  // P^{-1} c
  const Vector row_p = p_inv.transpose() * row;      // (r^T P^{-1})^T
  const double trace = row.dot(p_col);               // tr(P^{-1} c r^T)
  const double denom = 1.0 + trace;
  if (!(std::abs(denom) >= kMillerGuard))
    throw SingularUpdate("miller_update: 1 + tr(P^-1 E) = " + std::to_string(denom));
  return p_inv - (p_col * row_p.transpose()) / denom;
}

WeightMatrix solve_b_zero(const GramBundle& gram, const Hyperparameters& hp,
                          const std::optional<Vector>& diag_values, const SolveOptions& options) {
  Hyperparameters checked = hp;
  checked.variant = Variant::b_zero;
  checked.validate(gram.n());
  require_nonzero_columns(gram, 0.0);
  const std::size_t n = gram.n();
  if (diag_values && static_cast<std::size_t>(diag_values->size()) != n)
    throw InvalidArgument("solve_b_zero: diag_values has wrong length");

  const auto c = coefficients(checked);
  const Matrix& g = gram.gram;
  WeightMatrix out{Matrix::Zero(idx(n), idx(n)), make_provenance(checked, SolverKind::direct)};
  out.provenance.lambda = 0.0;

  for_each_column(n, options.exec, [&](std::size_t col) {
    const Index i = idx(col);
    const Index r = idx(n) - 1;
    auto full = [i](Index k) { return k < i ? k : k + 1; };
    Matrix h(r, r);
    Vector v(r);
    for (Index l = 0; l < r; ++l) {
      const Index fl = full(l);
      for (Index k = 0; k < r; ++k) {
        const Index fk = full(k);
        h(k, l) = (k == l ? c.g_minus_diag : c.g_minus_off) * g(fk, fl);
      }
      v(l) = c.u_minus * g(fl, i);
    }
    Vector x = Vector::Zero(r);
    if (r > 0) {
      auto llt = factor_spd(h);
      if (!llt) throw NotPositiveDefinite("solve_b_zero", col);
      x = llt->solve(v);
    }
    for (Index k = 0; k < r; ++k) out.w(full(k), i) = x(k);
    out.w(i, i) = diag_values ? (*diag_values)(i) : 0.0;
  });
  return out;
}

WeightMatrix solve_steck(const GramBundle& gram, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("solve_steck: p must lie in (0,1)");
  require_nonzero_columns(gram, 0.0);
  const Index n = gram.gram.rows();
  Matrix system = gram.gram;
  system.diagonal() *= 1.0 + p / (1.0 - p);
  auto c = invert_spd(system);
  if (!c) throw Error("solve_steck: system matrix is not positive definite");

  Hyperparameters hp;
  hp.variant = Variant::b_zero;
  hp.a = 1.0;
  hp.b = 0.0;
  hp.p = p;
  WeightMatrix out{Matrix(n, n), make_provenance(hp, SolverKind::closed_form)};
  const double scale = 1.0 / (1.0 - p);
  for (Index i = 0; i < n; ++i) {
    const double cii = (*c)(i, i);
    for (Index j = 0; j < n; ++j)
      out.w(j, i) = scale * ((j == i ? 1.0 : 0.0) - (*c)(j, i) / cii);
  }
  return out;
}

WeightMatrix solve_ease(const GramBundle& gram, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("solve_ease: lambda must be positive");
  const Index n = gram.gram.rows();
  Matrix system = gram.gram;
  system.diagonal().array() += lambda;
  auto p = invert_spd(system);
  if (!p) throw Error("solve_ease: system matrix is not positive definite");

  Hyperparameters hp;
  hp.variant = Variant::ease;
  hp.lambda = lambda;
  hp.a = hp.b = hp.p = 0.0;
  WeightMatrix out{Matrix(n, n), make_provenance(hp, SolverKind::closed_form)};
  for (Index i = 0; i < n; ++i) {
    const double pii = (*p)(i, i);
    for (Index j = 0; j < n; ++j) out.w(j, i) = j == i ? 0.0 : -(*p)(j, i) / pii;
  }
  return out;
}

WeightMatrix solve_low_rank(const GramBundle& gram, const Hyperparameters& hp) {
  Hyperparameters checked = hp;
  checked.variant = Variant::low_rank;
  checked.validate(gram.n());
  const auto c = coefficients(checked);

  // With a == b every H^(i) coincides: diag (1-p) b^2 g_kk, off (1-p)^2 b^2 g_kl.
  const Matrix sxx = hadamard_pattern(gram.gram, c.g_self, c.g_cross);
  const Matrix sxy = c.u_diag * gram.gram;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sxx);
  if (eig.info() != Eigen::Success) throw Error("solve_low_rank: eigendecomposition failed");
  const Vector& evals = eig.eigenvalues();
  const double lmax = evals.maxCoeff();
  if (!(evals.minCoeff() > 1e-10 * lmax))
    throw Error("solve_low_rank: Sigma_xx is near singular");
  const Matrix& q = eig.eigenvectors();
  const Matrix inv_sqrt = q * evals.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();

  const Matrix m = inv_sqrt * sxy;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto k = idx(checked.rank_k);
  const Matrix truncated = svd.matrixU().leftCols(k) *
                           svd.singularValues().head(k).asDiagonal() *
                           svd.matrixV().leftCols(k).transpose();
  return {inv_sqrt * truncated, make_provenance(checked, SolverKind::closed_form)};
}

WeightMatrix solve(const GramBundle& gram, const Hyperparameters& hp, SolverChoice choice,
                   const SolveOptions& options, const std::optional<Vector>& diag_values) {
  hp.validate(gram.n());
  switch (hp.variant) {
    case Variant::plain:
    case Variant::l2:
    case Variant::zero_diag_l2:
      return choice == SolverChoice::direct ? solve_direct(gram, hp, options)
                                            : solve_fast(gram, hp, options);
    case Variant::b_zero: {
      if (hp.lambda > 0.0)
        return choice == SolverChoice::direct ? solve_direct(gram, hp, options)
                                              : solve_fast(gram, hp, options);
      if (choice == SolverChoice::direct) return solve_b_zero(gram, hp, diag_values, options);
      WeightMatrix w = solve_steck(gram, hp.p);
      w.provenance.a = hp.a;
      if (diag_values) {
        if (static_cast<std::size_t>(diag_values->size()) != gram.n())
          throw InvalidArgument("diag_values has wrong length");
        w.w.diagonal() = *diag_values;
      }
      return w;
    }
    case Variant::ease: return solve_ease(gram, hp.lambda);
    case Variant::low_rank: return solve_low_rank(gram, hp);
  }
  throw InvalidArgument("unhandled variant");
}

}  // namespace deql
