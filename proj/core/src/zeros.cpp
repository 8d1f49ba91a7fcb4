#include "dbn/zeros.hpp"

#include <algorithm>
#include <cmath>

#include "dbn/oracle.hpp"
#include "dbn/rs.hpp"

namespace dbn {

namespace {

mpfr_prec_t work_bits() { return std::max<mpfr_prec_t>(mp::default_prec(), 128); }

struct SignSample {
  int sign = 0;  // 0: inconclusive
  double budget = 0;
  bool via_oracle = false;
};

class OracleSigner {
 public:
  OracleSigner(const Real& t, double x_hi) : t_(t) {
    spec_ = QuadratureSpec::for_point(std::max(x_hi, 1.0));
    spec_.panels = std::max(50, static_cast<int>(std::ceil(1.25 * x_hi)) + 1);
  }
  int sign(double x) const {
    OracleResult r = ht_direct(Complex(Real(x, spec_.precision.working_bits)), t_, spec_);
    mp::ScopedPrecision prec(r.bits);
    Real v = r.value.re();
    if (abs(v) > r.error) return v.sign();
    return 0;
  }

 private:
  Real t_;
  QuadratureSpec spec_;
};

SignSample detector_sign(double x, const Real& t, const ZeroScanOptions& opts) {
  mp::ScopedPrecision prec(opts.bits);
  ModelParams P{Real(x), Real(0L), Real(t, opts.bits)};
  RSTerms terms = compute_rs_terms(P);
  Complex f = compute_ft(P, terms);
  ErrorBounds eb = compute_error_bounds(P, terms, opts.bound_safety);
  Real v = ab_normalized(P, terms, f).re();
  SignSample s;
  s.budget = (eb.eA + eb.eB + eb.eC0).to_double();
  if (abs(v) > eb.eA + eb.eB + eb.eC0) s.sign = v.sign();
  return s;
}

}  // namespace

Real g_function(const Real& x, const Real& t) {
  mp::ScopedPrecision prec(work_bits());
  Real four_pi = 4L * Real::pi();
  if (x < four_pi) throw std::domain_error("g(x, t) needs x >= 4 pi");
  Real u = x / four_pi;
  Real L = log(u);
  return u * L - u + Real("1.375") + t / 16L * L;
}

Real g_derivative(const Real& x, const Real& t) {
  mp::ScopedPrecision prec(work_bits());
  Real four_pi = 4L * Real::pi();
  if (x < four_pi) throw std::domain_error("g(x, t) needs x >= 4 pi");
  return log(x / four_pi) / four_pi + t / (16L * x);
}

long xn_min_index(const Real& t) {
  mp::ScopedPrecision prec(work_bits());
  Real e = exp(Real(1L));
  return ceil(g_function(4L * Real::pi() * e, t)).to_long_floor();
}

Real solve_xn(long n, const Real& t) {
  if (n < xn_min_index(t)) throw std::invalid_argument("solve_xn: n below the monotone range");
  mp::ScopedPrecision prec(work_bits());
  const Real target(n);
  Real lo = 4L * Real::pi() * exp(Real(1L));
  Real hi = 2L * lo;
  while (g_function(hi, t) < target) hi *= 2L;
  Real x = (lo + hi) / 2L;
  const Real tol("1e-20");
  for (int it = 0; it < 400; ++it) {
    Real gx = g_function(x, t) - target;
    if (abs(gx) <= tol) return x;
    if (gx.sign() > 0)
      hi = x;
    else
      lo = x;
    Real nx = x - gx / g_derivative(x, t);
    x = (nx > lo && nx < hi) ? nx : (lo + hi) / 2L;
  }
  throw NonConvergence("solve_xn did not converge");
}

Real ab_real(const Real& x, const Real& t, mpfr_prec_t bits) {
  mp::ScopedPrecision prec(bits);
  ModelParams P{Real(x, bits), Real(0L), Real(t, bits)};
  RSTerms terms = compute_rs_terms(P);
  return ab_normalized(P, terms, compute_ft(P, terms)).re();
}

std::vector<LocatedZero> locate_real_zeros(const Real& t, const Real& x_lo, const Real& x_hi,
                                           const ZeroScanOptions& opts) {
  const double a = x_lo.to_double(), b = x_hi.to_double();
  if (a < 200 || b <= a) throw std::invalid_argument("locate_real_zeros needs 200 <= x_lo < x_hi");
  if (t.sign() <= 0 || t > Real("0.5")) throw std::invalid_argument("locate_real_zeros needs 0 < t <= 1/2");
  if (!(opts.step > 0)) throw std::invalid_argument("scan step must be positive");

  OracleSigner oracle(t, b);
  auto sample = [&](double x) {
    SignSample s = detector_sign(x, t, opts);
    if (s.sign == 0) {
      s.sign = oracle.sign(x);
      s.via_oracle = true;
    }
    return s;
  };
  // a grid point too close to a zero is nudged before giving up
  auto sample_grid = [&](double& x) {
    SignSample s = sample(x);
    for (double d : {opts.step / 8, -opts.step / 8, opts.step / 4}) {
      if (s.sign != 0) break;
      const double y = std::clamp(x + d, a, b);
      s = sample(y);
      if (s.sign != 0) x = y;
    }
    if (s.sign == 0) throw UncertifiableZero("neither the detector nor the oracle fixes the sign", x);
    return s;
  };

  const long steps = static_cast<long>(std::ceil((b - a) / opts.step));
  std::vector<LocatedZero> out;
  double x_prev = a;
  SignSample s_prev = sample_grid(x_prev);
  for (long k = 1; k <= steps; ++k) {
    double x = std::min(b, a + k * opts.step);
    SignSample s = sample_grid(x);
    if (s.sign != s_prev.sign) {
      LocatedZero z;
      double clo = x_prev, chi = x;
      z.budget = std::max(s.budget, s_prev.budget);
      z.via_oracle = s.via_oracle || s_prev.via_oracle;
      // bisect on certified signs only; stop early if neither source decides
      while (chi - clo > opts.x_tolerance * std::max(1.0, chi)) {
        const double mid = (clo + chi) / 2;
        if (mid <= clo || mid >= chi) break;
        SignSample c = sample(mid);
        if (c.sign == 0) break;
        z.via_oracle = z.via_oracle || c.via_oracle;
        if (c.sign == s_prev.sign)
          clo = mid;
        else
          chi = mid;
      }
      z.x = Real((clo + chi) / 2);
      z.bracket_lo = Real(clo);
      z.bracket_hi = Real(chi);
      if (opts.confirm_with_oracle) {
        const int so = oracle.sign(clo), sh = oracle.sign(chi);
        z.oracle_confirmed = so != 0 && sh != 0 && so != sh;
      } else {
        z.oracle_confirmed = z.via_oracle;
      }
      out.push_back(z);
    }
    x_prev = x;
    s_prev = s;
  }
  return out;
}

std::vector<std::pair<double, double>> oracle_sign_changes(const Real& t, double x_lo, double x_hi, double step) {
  if (x_lo < 0 || x_hi <= x_lo || !(step > 0)) throw std::invalid_argument("oracle scan needs 0 <= x_lo < x_hi");
  OracleSigner oracle(t, x_hi);
  auto sample = [&](double& x) {
    int s = oracle.sign(x);
    for (double d : {step / 8, -step / 8, step / 4}) {
      if (s != 0) break;
      const double y = std::clamp(x + d, x_lo, x_hi);
      s = oracle.sign(y);
      if (s != 0) x = y;
    }
    if (s == 0) throw UncertifiableZero("oracle sign inconclusive", x);
    return s;
  };
  std::vector<std::pair<double, double>> out;
  double xp = x_lo;
  int sp = sample(xp);
  const long steps = static_cast<long>(std::ceil((x_hi - x_lo) / step));
  for (long k = 1; k <= steps; ++k) {
    double x = std::min(x_hi, x_lo + k * step);
    const int s = sample(x);
    if (s != sp) out.emplace_back(xp, x);
    xp = x;
    sp = s;
  }
  return out;
}

ZeroCount count_zeros(const Real& X, const Real& t, bool locate, const ZeroScanOptions& opts) {
  ZeroCount c;
  c.estimate = g_function(X, t);
  const double x = X.to_double();
  if (!locate || x > QuadratureSpec{}.x_limit) return c;
  long n = static_cast<long>(oracle_sign_changes(t, 0.0, std::min(x, 200.0), opts.step).size());
  if (x > 200) n += static_cast<long>(locate_real_zeros(t, Real(200L), X, opts).size());
  c.located = n;
  return c;
}

}  // namespace dbn
