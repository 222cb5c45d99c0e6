#include "deql/hyperparameters.hpp"

#include <cmath>

#include "deql/errors.hpp"

namespace deql {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::plain: return "plain";
    case Variant::l2: return "l2";
    case Variant::zero_diag_l2: return "zero_diag_l2";
    case Variant::b_zero: return "b_zero";
    case Variant::ease: return "ease";
    case Variant::low_rank: return "low_rank";
  }
  return "unknown";
}

Variant parse_variant(const std::string& s) {
  for (auto v : {Variant::plain, Variant::l2, Variant::zero_diag_l2, Variant::b_zero,
                 Variant::ease, Variant::low_rank})
    if (to_string(v) == s) return v;
  throw InvalidArgument("unknown variant '" + s + "'");
}

bool Hyperparameters::regularized() const {
  switch (variant) {
    case Variant::l2:
    case Variant::zero_diag_l2:
    case Variant::ease: return true;
    case Variant::b_zero: return lambda > 0.0;
    default: return false;
  }
}

bool Hyperparameters::zero_diagonal() const {
  return variant == Variant::zero_diag_l2 || variant == Variant::b_zero ||
         variant == Variant::ease;
}

void Hyperparameters::validate(std::optional<std::size_t> n) const {
  auto fail = [&](const std::string& why) {
    throw InvalidArgument("invalid hyperparameters for variant " + to_string(variant) + ": " + why);
  };
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(p) || !std::isfinite(lambda))
    fail("non-finite value");
  if (a < 0.0 || b < 0.0) fail("a and b must be nonnegative");
  if (lambda < 0.0) fail("lambda must be nonnegative");
  if (variant != Variant::ease && !(p > 0.0 && p < 1.0)) fail("p must lie in (0,1)");

  switch (variant) {
    case Variant::plain:
      if (!(b > 0.0)) fail("b must be positive");
      break;
    case Variant::l2:
    case Variant::zero_diag_l2:
      // b = 0 is admitted only when the ridge term restores definiteness.
      if (!(b > 0.0) && !(lambda > 0.0 && a > 0.0)) fail("b must be positive unless a > 0 and lambda > 0");
      break;
    case Variant::b_zero:
      if (b != 0.0) fail("b must be zero");
      if (!(a > 0.0)) fail("a must be positive");
      break;
    case Variant::ease:
      if (!(lambda > 0.0)) fail("lambda must be positive");
      break;
    case Variant::low_rank:
      if (!(b > 0.0) || a != b) fail("requires a == b > 0");
      if (rank_k < 1) fail("rank_k must be at least 1");
      if (n && rank_k > *n) fail("rank_k exceeds the number of items");
      break;
  }
}

EmphasisCoefficients coefficients(const Hyperparameters& hp) {
  const double a2 = hp.a * hp.a;
  const double b2 = hp.b * hp.b;
  const double p = hp.p;
  const double q = 1.0 - p;
  const double d2 = a2 - b2;

  EmphasisCoefficients c;
  c.g0_diag = q * p * a2 + q * q * b2;
  c.g0_off = q * q * p * a2 + q * q * q * b2;
  c.g1_diag = -q * p * d2;
  c.g1_off = -q * q * p * d2;
  c.g2_off = -q * q * p * d2;
  c.u_diag = q * b2;
  c.u_off = q * p * a2 + q * q * b2;
  c.g_minus_diag = q * p * a2;
  c.g_minus_off = q * q * p * a2;
  c.u_minus = q * p * a2;
  c.c0 = p * a2 + q * b2;
  c.g_self = q * b2;
  c.g_cross = q * q * b2;
  return c;
}

}  // namespace deql
