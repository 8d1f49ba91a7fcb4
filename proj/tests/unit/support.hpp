#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dbn/mp.hpp"

namespace testsupport {

// Deterministic generator for the hand-rolled property checks.
struct Gen {
  explicit Gen(std::uint64_t seed = 20240917) : eng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  long integer(long a, long b) { return std::uniform_int_distribution<long>(a, b)(eng); }
  std::mt19937_64 eng;
};

inline double rel_err(const dbn::Complex& a, const dbn::Complex& b) {
  dbn::Real d = dbn::abs(a - b);
  dbn::Real m = dbn::max(dbn::abs(a), dbn::abs(b));
  if (m.is_zero()) return d.to_double();
  return (d / m).to_double();
}

inline double rel_err(const dbn::Real& a, const dbn::Real& b) {
  return rel_err(dbn::Complex(a), dbn::Complex(b));
}

}  // namespace testsupport
