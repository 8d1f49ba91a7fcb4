#pragma once

#include "dbn/mp.hpp"

namespace dbn {

struct PhiValue {
  Real value;
  Real tail;  // bound on the omitted terms n > n_max
};

// Least n_max with pi n^2 e^{4u} >= max(5, bits log 2 + 10).
int phi_terms(const Real& u, mpfr_prec_t bits);
PhiValue phi(const Real& u, int n_max);
PhiValue phi(const Real& u);  // n_max from phi_terms at the precision of u

// Throws std::domain_error when s lies on (-inf, 1].
void check_branch(const Complex& s);

Complex alpha(const Complex& s);
Complex alpha_prime(const Complex& s);
// |alpha'(s)| <= 1/(2 Im s - 6), valid for Im s > 3.
Real alpha_prime_bound(const Complex& s);

Complex log_m0(const Complex& s);
Complex m0(const Complex& s);
// log M_t(s) = (t/4) alpha(s)^2 + log M_0(s)
Complex log_mt(const Real& t, const Complex& s);
Complex mt(const Real& t, const Complex& s);

// s_+ = (1 + y - i x)/2
Complex s_plus(const Real& x, const Real& y);
// s_- = (1 - y + i x)/2
Complex s_minus(const Real& x, const Real& y);
Complex log_bt(const Real& x, const Real& y, const Real& t);
Complex bt(const Real& x, const Real& y, const Real& t);

Real bnt(const Real& t, unsigned long n);
long double bnt_ld(long double t, long double n);

}  // namespace dbn
