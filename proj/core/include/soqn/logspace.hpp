#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace soqn {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; -inf stands in for zero.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum(std::span<const double> xs) {
  double acc = kNegInf;
  for (double x : xs) acc = log_add(acc, x);
  return acc;
}

}  // namespace soqn
