#pragma once

#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace deql {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative pivot threshold for declaring a symmetric matrix positive definite:
// every Cholesky pivot must exceed kPivotTolerance * max(diag).
inline constexpr double kPivotTolerance = 1e-12;

// Cholesky factorisation that rejects matrices whose smallest pivot falls
// below the relative threshold.
std::optional<Eigen::LLT<Matrix>> factor_spd(const Matrix& h);

// Inverse of an SPD matrix, symmetrised. Empty when factorisation fails.
std::optional<Matrix> invert_spd(const Matrix& h);

}  // namespace deql
