#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "dbn/mp.hpp"

namespace dbn {

struct QuadratureSpec {
  double u_max = 5.0;
  int panels = 0;  // 0: chosen from x so that each panel spans about 2/x
  int rule_order = 40;
  PrecisionPolicy precision;
  // Points with Re z above this need allow_large_x.
  double x_limit = 2000.0;
  bool allow_large_x = false;

  // Smallest spec satisfying the precision and oscillation preconditions at x.
  static QuadratureSpec for_point(double x, PrecisionPolicy base = {});
  // ceil(pi x/8 log10 e) + 30
  static int required_digits(double x);
};

class InsufficientPrecision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  Complex value;
  Real error;  // refinement difference + truncation tail + rounding
  int panels = 0;  // panel count of the reported (finer) rule over [0, u_max]
  int active_panels = 0;
  mpfr_prec_t bits = 0;
};

// Gauss-Legendre nodes and weights on [-1, 1] at the given precision.
void gauss_legendre(int order, mpfr_prec_t bits, std::vector<Real>& nodes, std::vector<Real>& weights);

// Kernel e^{tu^2} Phi(u) sampled on composite Gauss rules at P and 2P panels.
// Reusable across every z at one (t, spec).
class HtKernel {
 public:
  HtKernel(const Real& t, double y_max, int panels, const QuadratureSpec& spec, mpfr_prec_t bits);
  OracleResult integrate(const Complex& z) const;
  mpfr_prec_t bits() const { return bits_; }

 private:
  struct Rule {
    std::vector<Real> u;
    std::vector<Real> w;  // weight times kernel
  };
  Complex apply(const Rule& r, const Complex& z, Real& abs_sum) const;
  mpfr_prec_t bits_;
  int panels_;
  int active_;
  double y_max_;
  Real tail_;
  Rule coarse_, fine_;
};

// Integral of e^{tu^2} Phi(u) cos(zu) over [0, inf).
OracleResult ht_direct(const Complex& z, const Real& t, const QuadratureSpec& spec);
// ht_direct(x+iy)/B_t(x+iy); error scaled by 1/|B_t|.
OracleResult ht_ratio(const Real& x, const Real& y, const Real& t, const QuadratureSpec& spec);

// Tail of the integrand envelope beyond u_c (u_c >= 0.5).
Real ht_tail_bound(const Real& t, double y, const Real& u_c);

}  // namespace dbn
