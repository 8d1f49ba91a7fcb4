#include "dbn/special.hpp"

#include <cmath>
#include <stdexcept>

namespace dbn {

int phi_terms(const Real& u, mpfr_prec_t bits) {
  const double need = std::max(5.0, static_cast<double>(bits) * 0.69314718055994531 + 10.0);
  Real e4u = exp(4L * u);
  Real pi = Real::pi(u.prec());
  for (int n = 1;; ++n) {
    if ((pi * (long)n * (long)n * e4u).to_double() >= need) return n;
    if (n > 1000000) throw std::domain_error("phi: u too negative");
  }
}

PhiValue phi(const Real& u, int n_max) {
  if (n_max < 1) throw std::invalid_argument("phi: n_max must be >= 1");
  const mpfr_prec_t p = u.prec();
  Real pi = Real::pi(p);
  Real e4u = exp(4L * u);
  Real e5u = exp(5L * u);
  Real e9u = exp(9L * u);
  // Tail validity: from n_max + 1 on the terms are dominated by
  // T_m = 2 pi^2 m^4 e^{9u} exp(-pi m^2 e^{4u}) with ratio r <= 1/2.
  const long m = n_max + 1;
  if ((pi * (m * m) * e4u).to_double() < 5.0)
    throw std::domain_error("phi: n_max too small for a certified tail at this u");
  Real sum = Real::zero(p);
  for (long n = 1; n <= n_max; ++n) {
    Real n2(static_cast<long>(n * n));
    Real g = exp(-(pi * n2 * e4u));
    Real term = (2L * sqr(pi) * sqr(n2) * e9u - 3L * pi * n2 * e5u) * g;
    sum += term;
  }
  Real tm = 2L * sqr(pi) * Real(static_cast<long>(m * m * m * m)) * e9u * exp(-(pi * (m * m) * e4u));
  Real ratio = pow(Real(static_cast<long>(m + 1)) / Real(m), 4L) * exp(-(pi * (2 * m + 1) * e4u));
  if (ratio.to_double() >= 0.5) throw std::domain_error("phi: n_max too small for a certified tail at this u");
  Real tail = tm / (1L - ratio);
  return {sum, tail};
}

PhiValue phi(const Real& u) { return phi(u, phi_terms(u, u.prec())); }

void check_branch(const Complex& s) {
  if (s.im().is_zero() && s.re() <= Real(1L)) throw std::domain_error("argument on the branch cut (-inf, 1]");
}

Complex alpha(const Complex& s) {
  check_branch(s);
  const mpfr_prec_t p = s.bits();
  Real two_pi = 2L * Real::pi(p);
  Complex one(Real::make(1, p), Real::make(0, p));
  Complex r = one / (s * Real(2L)) + one / (s - Real(1L));
  r += log(s / two_pi) * Real("0.5", p);
  return r;
}

Complex alpha_prime(const Complex& s) {
  check_branch(s);
  const mpfr_prec_t p = s.bits();
  Complex one(Real::make(1, p), Real::make(0, p));
  Complex s1 = s - Real(1L);
  return -(one / (sqr(s) * Real(2L))) - one / sqr(s1) + one / (s * Real(2L));
}

Real alpha_prime_bound(const Complex& s) {
  if (!(s.im() > Real(3L))) throw std::domain_error("alpha' bound needs Im s > 3");
  return 1L / (2L * s.im() - 6L);
}

Complex log_m0(const Complex& s) {
  check_branch(s);
  const mpfr_prec_t p = s.bits();
  Real pi = Real::pi(p);
  Real half("0.5", p);
  Complex r = log(s) + log(s - Real(1L));
  r -= s * (half * log(pi));
  r += log(sqrt(2L * pi) / 16L);
  r += (s * half - half) * log(s * half);
  r -= s * half;
  return r;
}

Complex m0(const Complex& s) { return exp(log_m0(s)); }

Complex log_mt(const Real& t, const Complex& s) {
  if (t.sign() < 0) throw std::domain_error("M_t needs t >= 0");
  Complex a = alpha(s);
  return sqr(a) * (t / 4L) + log_m0(s);
}

Complex mt(const Real& t, const Complex& s) { return exp(log_mt(t, s)); }

Complex s_plus(const Real& x, const Real& y) { return {(1L + y) / 2L, -x / 2L}; }
Complex s_minus(const Real& x, const Real& y) { return {(1L - y) / 2L, x / 2L}; }

Complex log_bt(const Real& x, const Real& y, const Real& t) { return log_mt(t, s_plus(x, y)); }
Complex bt(const Real& x, const Real& y, const Real& t) { return exp(log_bt(x, y, t)); }

Real bnt(const Real& t, unsigned long n) {
  Real ln = log(Real(static_cast<unsigned long>(n), t.prec()));
  return exp(t / 4L * sqr(ln));
}

long double bnt_ld(long double t, long double n) {
  const long double l = std::log(n);
  return std::exp(t / 4 * l * l);
}

}  // namespace dbn
