#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace deql {

enum class Variant { plain, l2, zero_diag_l2, b_zero, ease, low_rank };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

// Weights of the emphasised denoising objective: `a` on dropped cells, `b` on
// retained cells, dropout probability `p`, ridge `lambda`.
struct Hyperparameters {
  double a = 1.0;
  double b = 1.0;
  double p = 0.5;
  double lambda = 0.0;
  Variant variant = Variant::plain;
  std::size_t rank_k = 0;  // low_rank only

  // Throws InvalidArgument when the combination has no closed-form solver.
  // `n` (when known) bounds rank_k.
  void validate(std::optional<std::size_t> n = std::nullopt) const;

  // True when the variant carries a ridge term in its objective.
  bool regularized() const;
  // True when the solution is constrained to diag(W) = 0.
  bool zero_diagonal() const;
};

// Scalar constants of the expected Gram systems. H^(i) = G^(i) ⊙ R^T R where
// G^(i) = G0 + (G1 restricted to column i) + (G2 restricted to row i), and
// v^(i) = u^(i) ⊙ (R^T R)_{*i} with u^(i)_i = u_diag, u^(i)_k = u_off.
struct EmphasisCoefficients {
  double g0_diag = 0, g0_off = 0;
  double g1_diag = 0, g1_off = 0;
  double g2_off = 0;
  double u_diag = 0, u_off = 0;
  double g_minus_diag = 0, g_minus_off = 0;
  double u_minus = 0;
  double c0 = 0;  // E[A_zi^2]; the constant term of column i is c0 * gram(i,i)

  // Entries of G^(i) touching index i, in their unexpanded form so that they
  // vanish exactly at b = 0.
  double g_self = 0;   // G^(i)_ii   = (1-p) b^2
  double g_cross = 0;  // G^(i)_ki, G^(i)_ik (k != i) = (1-p)^2 b^2
};

EmphasisCoefficients coefficients(const Hyperparameters& hp);

}  // namespace deql
