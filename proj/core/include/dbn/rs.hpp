#pragma once

#include <stdexcept>

#include "dbn/mp.hpp"

namespace dbn {

struct ModelParams {
  Real x, y, t;

  // 0 <= t <= 1/2, 0 <= y <= 1, x >= 200. t = 0 is admitted (the barrier starts there).
  void validate() const;
  static ModelParams from_strings(const std::string& x, const std::string& y, const std::string& t,
                                  mpfr_prec_t bits = 0);
};

class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct RSTerms {
  long N = 0;
  Complex s_star, kappa, gamma;
  Real Tprime, a, p;
  Complex U;
  // intermediates shared by the other computations
  Complex s_plus, s_minus, alpha_plus, alpha_minus;
  Complex log_mt_plus, log_mt_minus;
};

// floor(sqrt(x/4pi + t/16))
long rs_cutoff(const Real& x, const Real& t);

RSTerms compute_rs_terms(const ModelParams& params);
// Throws ConsistencyError if a bound on gamma, kappa or Re s_* fails.
void check_rs_invariants(const ModelParams& params, const RSTerms& terms);

Complex compute_ft(const ModelParams& params, const RSTerms& terms);

struct ErrorBounds {
  // definitional values, inflated by bound_safety
  Real eA, eB, eC0, eC;
  // closed forms
  Real eA_closed, eB_closed;  // estimates (iv), (v)
  Real eAB_closed;            // the summed form with (1 + |gamma| N^|kappa| n^y)
  Real eC0_closed, eC_closed; // estimate (vi)
  Real eC0_theorem;           // the relaxed exponential form
};

ErrorBounds compute_error_bounds(const ModelParams& params, const RSTerms& terms, double bound_safety = 1.000001);

// ((t^2/16) log^2(x/4pi) + 0.626)/(x - 6.66), the n = 1 error factor of the closed forms
Real delta1(const Real& x, const Real& t);

// C_0(p) with the removable singularities at p = +-1/2 handled by series
Complex c0(const Real& p);
Complex compute_ct(const ModelParams& params, const RSTerms& terms);
// C_t/B_t evaluated in log space; C_t alone is of size exp(-pi x/8)
Complex compute_ct_over_bt(const ModelParams& params, const RSTerms& terms);

struct ApproxResult {
  Complex f;
  Real eA, eB, eC0, eC;
  Complex Ct_over_Bt;
  bool has_ct = false;
  RSTerms terms;
  ErrorBounds bounds;
  mpfr_prec_t bits = 0;
};

struct ApproxOptions {
  PrecisionPolicy precision;
  bool with_ct = true;
  bool check_invariants = true;
};

ApproxResult approximate(const ModelParams& params, const ApproxOptions& opts = {});

struct NonvanishingResult {
  bool passed = false;
  Real margin;  // |f_t| - (eA + eB + eC0)
  ApproxResult approx;
};

NonvanishingResult nonvanishing_test(const ModelParams& params, const ApproxOptions& opts = {});

// (A_{t,N} + B_{t,N})/|B_t| = f_t B_t/|B_t|; real when y = 0.
Complex ab_normalized(const ModelParams& params, const RSTerms& terms, const Complex& f);

}  // namespace dbn
