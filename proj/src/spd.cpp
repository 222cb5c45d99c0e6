#include "deql/spd.hpp"

namespace deql {

std::optional<Eigen::LLT<Matrix>> factor_spd(const Matrix& h) {
  if (h.rows() == 0) return Eigen::LLT<Matrix>(h);
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const double max_diag = h.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) return std::nullopt;
  // Pivots of the factorisation are the squared diagonal of L.
  const double min_pivot = llt.matrixLLT().diagonal().array().square().minCoeff();
  if (!(min_pivot > kPivotTolerance * max_diag)) return std::nullopt;
  return llt;
}

std::optional<Matrix> invert_spd(const Matrix& h) {
  auto llt = factor_spd(h);
  if (!llt) return std::nullopt;
  Matrix inv = llt->solve(Matrix::Identity(h.rows(), h.cols()));
  return Matrix(0.5 * (inv + inv.transpose()));
}

}  // namespace deql
