#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>

namespace bayalign {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Rng = std::mt19937_64;

inline double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == kNegInf) return kNegInf;
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(double a, double b, double c) {
  const double hi = std::max({a, b, c});
  if (hi == kNegInf) return kNegInf;
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi) + std::exp(c - hi));
}

inline double log_sum_exp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

/// Draws an index with probability proportional to exp(logw[i]).
inline std::size_t sample_log_categorical(std::span<const double> logw, Rng& rng) {
  const double total = log_sum_exp(logw);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  std::size_t last_finite = 0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    if (logw[i] == kNegInf) continue;
    last_finite = i;
    u -= std::exp(logw[i] - total);
    if (u < 0.0) return i;
  }
  return last_finite;
}

}  // namespace bayalign
