#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "dbn/mp.hpp"

namespace dbn {

// (x/4pi) log(x/4pi) - x/4pi + 11/8 + (t/16) log(x/4pi). Throws std::domain_error for x < 4pi.
Real g_function(const Real& x, const Real& t);
// d/dx of the above
Real g_derivative(const Real& x, const Real& t);

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Least n admitted by solve_xn: ceil(g(4 pi e, t)).
long xn_min_index(const Real& t);
// The x >= 4 pi e with g(x, t) = n, by bracketed Newton to |g - n| <= 1e-20.
// Throws std::invalid_argument for n < xn_min_index(t).
Real solve_xn(long n, const Real& t);

class UncertifiableZero : public std::runtime_error {
 public:
  explicit UncertifiableZero(const std::string& what, double x) : std::runtime_error(what), x(x) {}
  double x;
};

struct ZeroScanOptions {
  double step = 0.25;       // sign-scan grid
  double x_tolerance = 1e-12;
  mpfr_prec_t bits = 128;   // for the A + B detector
  double bound_safety = 1.000001;
  bool confirm_with_oracle = true;
};

struct LocatedZero {
  Real x;                 // bisection midpoint
  Real bracket_lo, bracket_hi;
  double budget = 0;      // eA + eB + eC0 at the bracket ends (worst)
  bool via_oracle = false;  // budget too large, signs taken from the oracle
  bool oracle_confirmed = false;
};

// Real part of (A + B)/|B_t| at y = 0 (the imaginary part vanishes there).
Real ab_real(const Real& x, const Real& t, mpfr_prec_t bits);

// Zeros of H_t on [x_lo, x_hi], x_lo >= 200, by sign changes of (A + B)/|B_t|. A sign is accepted
// when |A + B|/|B_t| exceeds eA + eB + eC0 at that point; otherwise the oracle decides, and
// UncertifiableZero is thrown if neither is conclusive.
std::vector<LocatedZero> locate_real_zeros(const Real& t, const Real& x_lo, const Real& x_hi,
                                           const ZeroScanOptions& opts = {});

// Sign changes of H_t(x) on [x_lo, x_hi] from the oracle alone (x_lo >= 0). Each returned
// bracket has certified opposite signs.
std::vector<std::pair<double, double>> oracle_sign_changes(const Real& t, double x_lo, double x_hi,
                                                           double step = 0.25);

struct ZeroCount {
  Real estimate;                // g(X, t)
  std::optional<long> located;  // oracle count on [0, 200] plus detector count on [200, X]
};

ZeroCount count_zeros(const Real& X, const Real& t, bool locate = true, const ZeroScanOptions& opts = {});

}  // namespace dbn
