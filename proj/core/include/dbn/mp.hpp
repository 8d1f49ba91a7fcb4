#pragma once

#include <cstdint>
// stdint before mpfr.h enables the intmax_t entry points
#include <mpfr.h>

#include <string>
#include <utility>

namespace dbn {

struct PrecisionPolicy {
  int working_bits = 128;
  int guard_digits = 10;
  // Multiplicative inflation applied to rigorous bounds after evaluation.
  double bound_safety = 1.000001;

  void validate() const;
  // Bits needed for `digits` significant decimals plus the guard digits.
  static int bits_for_digits(double digits, int guard_digits = 10);
};

namespace mp {

// MPFR exponent range is widened once per thread so that quantities of size
// exp(-pi x / 8) with x ~ 1e20 stay representable.
void init_thread();

// Precision used for values constructed without an explicit precision.
mpfr_prec_t default_prec();
void set_default_prec(mpfr_prec_t bits);

class ScopedPrecision {
 public:
  explicit ScopedPrecision(mpfr_prec_t bits);
  ~ScopedPrecision();
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  mpfr_prec_t saved_;
};

}  // namespace mp

class Real {
 public:
  Real();
  Real(double v);                        // NOLINT(google-explicit-constructor)
  Real(int v);                           // NOLINT
  Real(long v);                          // NOLINT
  Real(long long v);                     // NOLINT
  Real(unsigned long v);                 // NOLINT
  Real(long double v);                   // NOLINT
  Real(const char* dec);                 // NOLINT
  Real(const std::string& dec);          // NOLINT
  Real(const std::string& dec, mpfr_prec_t bits);
  Real(const char* dec, mpfr_prec_t bits) : Real(std::string(dec), bits) {}
  Real(const Real& o);
  Real(const Real& o, mpfr_prec_t bits);
  Real(Real&& o) noexcept;
  ~Real();

  Real& operator=(const Real& o);
  Real& operator=(Real&& o) noexcept;
  Real& operator=(double v);
  Real& operator=(long v);

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  void set_prec_keep(mpfr_prec_t bits);

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_ld() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  long to_long_floor() const { return mpfr_get_si(v_, MPFR_RNDD); }
  // Exact integer conversion for values below 2^63.
  std::int64_t to_int64_floor() const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  // Decimal string with `digits` significant digits (0 = enough to round-trip).
  std::string str(int digits = 0) const;
  // Fixed-point decimal string with `decimals` after the point.
  std::string fixed(int decimals) const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator*=(long o);
  Real& operator/=(long o);

  static Real zero(mpfr_prec_t bits);
  static Real make(long v, mpfr_prec_t bits);
  static Real pi(mpfr_prec_t bits = 0);
  static Real log2(mpfr_prec_t bits = 0);

 private:
  struct PrecTag {};
  Real(PrecTag, mpfr_prec_t bits);
  void init(mpfr_prec_t bits);
  mpfr_t v_;
};

Real operator-(const Real& a);
Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator+(const Real& a, long b);
Real operator-(const Real& a, long b);
Real operator*(const Real& a, long b);
Real operator/(const Real& a, long b);
Real operator+(long a, const Real& b);
Real operator-(long a, const Real& b);
Real operator*(long a, const Real& b);
Real operator/(long a, const Real& b);
inline Real operator+(const Real& a, int b) { return a + static_cast<long>(b); }
inline Real operator-(const Real& a, int b) { return a - static_cast<long>(b); }
inline Real operator*(const Real& a, int b) { return a * static_cast<long>(b); }
inline Real operator/(const Real& a, int b) { return a / static_cast<long>(b); }
inline Real operator+(int a, const Real& b) { return static_cast<long>(a) + b; }
inline Real operator-(int a, const Real& b) { return static_cast<long>(a) - b; }
inline Real operator*(int a, const Real& b) { return static_cast<long>(a) * b; }
inline Real operator/(int a, const Real& b) { return static_cast<long>(a) / b; }
inline Real operator+(const Real& a, double b) { return a + Real(b); }
inline Real operator-(const Real& a, double b) { return a - Real(b); }
inline Real operator*(const Real& a, double b) { return a * Real(b); }
inline Real operator/(const Real& a, double b) { return a / Real(b); }
inline Real operator+(double a, const Real& b) { return Real(a) + b; }
inline Real operator-(double a, const Real& b) { return Real(a) - b; }
inline Real operator*(double a, const Real& b) { return Real(a) * b; }
inline Real operator/(double a, const Real& b) { return Real(a) / b; }

bool operator<(const Real& a, const Real& b);
bool operator<=(const Real& a, const Real& b);
bool operator>(const Real& a, const Real& b);
bool operator>=(const Real& a, const Real& b);
bool operator==(const Real& a, const Real& b);
bool operator!=(const Real& a, const Real& b);

Real abs(const Real& a);
Real sqrt(const Real& a);
Real exp(const Real& a);
Real expm1(const Real& a);
Real log(const Real& a);
Real log1p(const Real& a);
Real sin(const Real& a);
Real cos(const Real& a);
void sin_cos(const Real& a, Real& s, Real& c);
Real sinh(const Real& a);
Real cosh(const Real& a);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& a, const Real& b);
Real pow(const Real& a, long n);
Real floor(const Real& a);
Real ceil(const Real& a);
Real frac(const Real& a);  // a - floor(a)
Real hypot(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
Real sqr(const Real& a);
Real factorial(unsigned long n, mpfr_prec_t bits = 0);

class Complex {
 public:
  Complex() = default;
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
  Complex(const Real& re) : re_(re), im_(0L) { im_.set_prec_keep(re.prec()); }  // NOLINT
  Complex(double re, double im) : re_(re), im_(im) {}

  const Real& re() const { return re_; }
  const Real& im() const { return im_; }
  Real& re() { return re_; }
  Real& im() { return im_; }
  mpfr_prec_t bits() const;

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator*=(const Real& o);
  Complex& operator/=(const Complex& o);

 private:
  Real re_;
  Real im_;
};

Complex operator-(const Complex& a);
Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);
Complex operator+(const Complex& a, const Real& b);
Complex operator-(const Complex& a, const Real& b);
Complex operator+(const Real& a, const Complex& b);
Complex operator-(const Real& a, const Complex& b);

Complex conj(const Complex& z);
Real abs(const Complex& z);
Real norm(const Complex& z);  // |z|^2
Real arg(const Complex& z);   // principal, in (-pi, pi]
Complex exp(const Complex& z);
Complex log(const Complex& z);  // principal branch; log 0 throws
Complex sqr(const Complex& z);
Complex cos(const Complex& z);
Complex polar(const Real& r, const Real& theta);
// n^{-s} = exp(-s log n) for positive real n.
Complex pow_neg(const Real& log_n, const Complex& s);
Complex pow(const Complex& z, const Complex& w);  // exp(w Log z)
Complex mul_i(const Complex& z);                  // i z

}  // namespace dbn
