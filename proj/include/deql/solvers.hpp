#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deql/gram.hpp"
#include "deql/hyperparameters.hpp"
#include "deql/parallel.hpp"
#include "deql/spd.hpp"

namespace deql {

enum class SolverKind { direct, fast, closed_form };
enum class SolverChoice { direct, fast, automatic };

std::string to_string(SolverKind k);
SolverKind parse_solver_kind(const std::string& s);
SolverChoice parse_solver_choice(const std::string& s);

struct Provenance {
  Variant variant = Variant::plain;
  double a = 0, b = 0, p = 0, lambda = 0;
  std::optional<std::size_t> rank_k;
  SolverKind solver = SolverKind::direct;
  // Columns the fast solver handed back to the direct solver.
  std::vector<std::size_t> fallback_columns;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Learned item-item model; predictions are R * w.
struct WeightMatrix {
  Matrix w;
  Provenance provenance;

  std::size_t n() const { return static_cast<std::size_t>(w.rows()); }
};

struct SolveOptions {
  Execution exec = Execution::parallel;
  // Test hook: flips the sign of the second rank-1 denominator in the fast
  // solver so that verification can be shown to catch a broken update.
  bool inject_miller_fault = false;
};

// Denominators of the rank-1 updates below this magnitude send the column to
// the direct solver.
inline constexpr double kMillerGuard = 1e-12;

// The per-column system (H^(i), v^(i)).
std::pair<Matrix, Vector> build_H_v(const GramBundle& gram, const EmphasisCoefficients& coeffs,
                                    std::size_t i);

// Reference solver: one SPD factorisation per column, O(n^4) overall.
// Handles plain, l2 and zero_diag_l2 (and b_zero with lambda > 0, which is
// solved as zero_diag_l2 at b = 0).
WeightMatrix solve_direct(const GramBundle& gram, const Hyperparameters& hp,
                          const SolveOptions& options = {});

// O(n^3) solver: one SPD inversion of H0 (+ lambda I) shared by all columns,
// then two rank-1 inverse updates per column. Same variant coverage and
// results as solve_direct.
WeightMatrix solve_fast(const GramBundle& gram, const Hyperparameters& hp,
                        const SolveOptions& options = {});

// Inverse of (P + col * row^T) given P^{-1}. Throws SingularUpdate when
// |1 + row^T P^{-1} col| < kMillerGuard.
Matrix miller_update(const Matrix& p_inv, const Vector& col, const Vector& row);

// b = 0: off-diagonals from the (n-1)x(n-1) reduced systems; the diagonal is
// free and set from `diag_values` (zeros when omitted).
WeightMatrix solve_b_zero(const GramBundle& gram, const Hyperparameters& hp,
                          const std::optional<Vector>& diag_values = std::nullopt,
                          const SolveOptions& options = {});

// Closed form for b = 0 with zero diagonal via a single SPD inversion.
WeightMatrix solve_steck(const GramBundle& gram, double p);

WeightMatrix solve_ease(const GramBundle& gram, double lambda);

// Rank-constrained solution for a == b, via the symmetric inverse square root
// of the shared system matrix and a truncated SVD.
WeightMatrix solve_low_rank(const GramBundle& gram, const Hyperparameters& hp);

// Routes a validated hyperparameter point to its solver. `automatic` picks the
// fast or closed-form path whenever one exists.
WeightMatrix solve(const GramBundle& gram, const Hyperparameters& hp, SolverChoice choice,
                   const SolveOptions& options = {},
                   const std::optional<Vector>& diag_values = std::nullopt);

}  // namespace deql
