#include "dbn/mp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dbn {

void PrecisionPolicy::validate() const {
  if (working_bits < 64) throw std::invalid_argument("working_bits must be >= 64");
  if (guard_digits < 0) throw std::invalid_argument("guard_digits must be >= 0");
  if (!(bound_safety >= 1.0)) throw std::invalid_argument("bound_safety must be >= 1");
}

int PrecisionPolicy::bits_for_digits(double digits, int guard_digits) {
  return static_cast<int>(std::ceil((digits + guard_digits) * 3.3219280948873623)) + 8;
}

namespace mp {
namespace {
thread_local mpfr_prec_t g_default_prec = 128;
thread_local bool g_inited = false;

struct StaticInit {
  StaticInit() { init_thread(); }
};
const StaticInit g_static_init;
}  // namespace

void init_thread() {
  if (g_inited) return;
  mpfr_set_emin(mpfr_get_emin_min());
  mpfr_set_emax(mpfr_get_emax_max());
  g_inited = true;
}

mpfr_prec_t default_prec() { return g_default_prec; }
void set_default_prec(mpfr_prec_t bits) {
  init_thread();
  g_default_prec = bits;
}

ScopedPrecision::ScopedPrecision(mpfr_prec_t bits) : saved_(g_default_prec) {
  init_thread();
  g_default_prec = bits;
}
ScopedPrecision::~ScopedPrecision() { g_default_prec = saved_; }

}  // namespace mp

namespace {
mpfr_prec_t pmax(const Real& a, const Real& b) { return std::max(a.prec(), b.prec()); }
}  // namespace

void Real::init(mpfr_prec_t bits) {
  mp::init_thread();
  mpfr_init2(v_, bits);
}

Real::Real() {
  init(mp::default_prec());
  mpfr_set_zero(v_, 1);
}
Real::Real(PrecTag, mpfr_prec_t bits) {
  init(bits);
  mpfr_set_zero(v_, 1);
}
Real::Real(double v) {
  init(mp::default_prec());
  mpfr_set_d(v_, v, MPFR_RNDN);
}
Real::Real(int v) {
  init(mp::default_prec());
  mpfr_set_si(v_, v, MPFR_RNDN);
}
Real::Real(long v) {
  init(mp::default_prec());
  mpfr_set_si(v_, v, MPFR_RNDN);
}
Real::Real(long long v) {
  init(mp::default_prec());
  mpfr_set_sj(v_, static_cast<intmax_t>(v), MPFR_RNDN);
}
Real::Real(unsigned long v) {
  init(mp::default_prec());
  mpfr_set_ui(v_, v, MPFR_RNDN);
}
Real::Real(long double v) {
  init(mp::default_prec());
  mpfr_set_ld(v_, v, MPFR_RNDN);
}
Real::Real(const char* dec) : Real(std::string(dec)) {}
Real::Real(const std::string& dec) : Real(dec, mp::default_prec()) {}
Real::Real(const std::string& dec, mpfr_prec_t bits) {
  init(bits);
  if (mpfr_set_str(v_, dec.c_str(), 10, MPFR_RNDN) != 0) {
    // mpfr_set_str returns nonzero only when the whole string is not a number
    mpfr_clear(v_);
    throw std::invalid_argument("not a decimal number: '" + dec + "'");
  }
}
Real::Real(const Real& o) {
  init(o.prec());
  mpfr_set(v_, o.v_, MPFR_RNDN);
}
Real::Real(const Real& o, mpfr_prec_t bits) {
  init(bits);
  mpfr_set(v_, o.v_, MPFR_RNDN);
}
Real::Real(Real&& o) noexcept {
  v_[0] = o.v_[0];
  o.v_[0]._mpfr_d = nullptr;
}
Real::~Real() {
  if (v_[0]._mpfr_d != nullptr) mpfr_clear(v_);
}

Real& Real::operator=(const Real& o) {
  if (this == &o) return *this;
  if (v_[0]._mpfr_d == nullptr) {
    init(o.prec());
  } else if (prec() != o.prec()) {
    mpfr_set_prec(v_, o.prec());
  }
  mpfr_set(v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator=(Real&& o) noexcept {
  if (this == &o) return *this;
  std::swap(v_[0], o.v_[0]);
  return *this;
}
Real& Real::operator=(double v) {
  if (v_[0]._mpfr_d == nullptr) init(mp::default_prec());
  mpfr_set_d(v_, v, MPFR_RNDN);
  return *this;
}
Real& Real::operator=(long v) {
  if (v_[0]._mpfr_d == nullptr) init(mp::default_prec());
  mpfr_set_si(v_, v, MPFR_RNDN);
  return *this;
}

void Real::set_prec_keep(mpfr_prec_t bits) { mpfr_prec_round(v_, bits, MPFR_RNDN); }

std::int64_t Real::to_int64_floor() const {
  intmax_t r = mpfr_get_sj(v_, MPFR_RNDD);
  return static_cast<std::int64_t>(r);
}

std::string Real::str(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (digits <= 0) digits = static_cast<int>(std::ceil(prec() * 0.30102999566398120)) + 1;
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

std::string Real::fixed(int decimals) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rf", decimals, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

Real& Real::operator+=(const Real& o) {
  if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(long o) {
  mpfr_mul_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(long o) {
  mpfr_div_si(v_, v_, o, MPFR_RNDN);
  return *this;
}

Real Real::zero(mpfr_prec_t bits) { return Real(PrecTag{}, bits); }
Real Real::make(long v, mpfr_prec_t bits) {
  Real r(PrecTag{}, bits);
  mpfr_set_si(r.v_, v, MPFR_RNDN);
  return r;
}

Real Real::pi(mpfr_prec_t bits) {
  Real r = Real::zero(bits > 0 ? bits : mp::default_prec());
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}
Real Real::log2(mpfr_prec_t bits) {
  Real r = Real::zero(bits > 0 ? bits : mp::default_prec());
  mpfr_const_log2(r.get(), MPFR_RNDN);
  return r;
}

Real operator-(const Real& a) {
  Real r = Real::zero(a.prec());
  mpfr_neg(r.get(), a.get(), MPFR_RNDN);
  return r;
}

#define DBN_BINOP(OP, FN)                              \
  Real operator OP(const Real& a, const Real& b) {     \
    Real r = Real::zero(pmax(a, b));                             \
    FN(r.get(), a.get(), b.get(), MPFR_RNDN);          \
    return r;                                          \
  }
DBN_BINOP(+, mpfr_add)
DBN_BINOP(-, mpfr_sub)
DBN_BINOP(*, mpfr_mul)
DBN_BINOP(/, mpfr_div)
#undef DBN_BINOP

Real operator+(const Real& a, long b) {
  Real r = Real::zero(a.prec());
  mpfr_add_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, long b) {
  Real r = Real::zero(a.prec());
  mpfr_sub_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, long b) {
  Real r = Real::zero(a.prec());
  mpfr_mul_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, long b) {
  Real r = Real::zero(a.prec());
  mpfr_div_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator+(long a, const Real& b) { return b + a; }
Real operator-(long a, const Real& b) {
  Real r = Real::zero(b.prec());
  mpfr_si_sub(r.get(), a, b.get(), MPFR_RNDN);
  return r;
}
Real operator*(long a, const Real& b) { return b * a; }
Real operator/(long a, const Real& b) {
  Real r = Real::zero(b.prec());
  mpfr_si_div(r.get(), a, b.get(), MPFR_RNDN);
  return r;
}

bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.get(), b.get()) != 0; }
bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }
bool operator!=(const Real& a, const Real& b) { return !(a == b); }

#define DBN_UNARY(NAME, FN)              \
  Real NAME(const Real& a) {             \
    Real r = Real::zero(a.prec());                 \
    FN(r.get(), a.get(), MPFR_RNDN);     \
    return r;                            \
  }
DBN_UNARY(abs, mpfr_abs)
DBN_UNARY(sqrt, mpfr_sqrt)
DBN_UNARY(exp, mpfr_exp)
DBN_UNARY(expm1, mpfr_expm1)
DBN_UNARY(log, mpfr_log)
DBN_UNARY(log1p, mpfr_log1p)
DBN_UNARY(sin, mpfr_sin)
DBN_UNARY(cos, mpfr_cos)
DBN_UNARY(sinh, mpfr_sinh)
DBN_UNARY(cosh, mpfr_cosh)
DBN_UNARY(sqr, mpfr_sqr)
#undef DBN_UNARY

Real floor(const Real& a) {
  Real r = Real::zero(a.prec());
  mpfr_floor(r.get(), a.get());
  return r;
}
Real ceil(const Real& a) {
  Real r = Real::zero(a.prec());
  mpfr_ceil(r.get(), a.get());
  return r;
}
Real frac(const Real& a) { return a - floor(a); }

void sin_cos(const Real& a, Real& s, Real& c) {
  if (s.prec() != a.prec()) s = Real::zero(a.prec());
  if (c.prec() != a.prec()) c = Real::zero(a.prec());
  mpfr_sin_cos(s.get(), c.get(), a.get(), MPFR_RNDN);
}

Real atan2(const Real& y, const Real& x) {
  Real r = Real::zero(pmax(y, x));
  mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
  return r;
}
Real pow(const Real& a, const Real& b) {
  Real r = Real::zero(pmax(a, b));
  mpfr_pow(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
Real pow(const Real& a, long n) {
  Real r = Real::zero(a.prec());
  mpfr_pow_si(r.get(), a.get(), n, MPFR_RNDN);
  return r;
}
Real hypot(const Real& a, const Real& b) {
  Real r = Real::zero(pmax(a, b));
  mpfr_hypot(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }
Real factorial(unsigned long n, mpfr_prec_t bits) {
  Real r = Real::zero(bits > 0 ? bits : mp::default_prec());
  mpfr_fac_ui(r.get(), n, MPFR_RNDN);
  return r;
}

// ---------------------------------------------------------------- Complex

mpfr_prec_t Complex::bits() const { return std::max(re_.prec(), im_.prec()); }

Complex& Complex::operator+=(const Complex& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}
Complex& Complex::operator-=(const Complex& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}
Complex& Complex::operator*=(const Complex& o) {
  *this = *this * o;
  return *this;
}
Complex& Complex::operator*=(const Real& o) {
  re_ *= o;
  im_ *= o;
  return *this;
}
Complex& Complex::operator/=(const Complex& o) {
  *this = *this / o;
  return *this;
}

Complex operator-(const Complex& a) { return {-a.re(), -a.im()}; }
Complex operator+(const Complex& a, const Complex& b) { return {a.re() + b.re(), a.im() + b.im()}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re() - b.re(), a.im() - b.im()}; }
Complex operator*(const Complex& a, const Complex& b) {
  return {a.re() * b.re() - a.im() * b.im(), a.re() * b.im() + a.im() * b.re()};
}
Complex operator/(const Complex& a, const Complex& b) {
  // scaled to avoid overflow in |b|^2 for the wide exponent range
  Real d = norm(b);
  return {(a.re() * b.re() + a.im() * b.im()) / d, (a.im() * b.re() - a.re() * b.im()) / d};
}
Complex operator*(const Complex& a, const Real& b) { return {a.re() * b, a.im() * b}; }
Complex operator*(const Real& a, const Complex& b) { return {b.re() * a, b.im() * a}; }
Complex operator/(const Complex& a, const Real& b) { return {a.re() / b, a.im() / b}; }
Complex operator+(const Complex& a, const Real& b) { return {a.re() + b, a.im()}; }
Complex operator-(const Complex& a, const Real& b) { return {a.re() - b, a.im()}; }
Complex operator+(const Real& a, const Complex& b) { return {a + b.re(), b.im()}; }
Complex operator-(const Real& a, const Complex& b) { return {a - b.re(), -b.im()}; }

Complex conj(const Complex& z) { return {z.re(), -z.im()}; }
Real abs(const Complex& z) { return hypot(z.re(), z.im()); }
Real norm(const Complex& z) { return sqr(z.re()) + sqr(z.im()); }
Real arg(const Complex& z) { return atan2(z.im(), z.re()); }

Complex exp(const Complex& z) {
  Real m = exp(z.re());
  Real s, c;
  sin_cos(Real(z.im(), z.bits()), s, c);
  return {m * c, m * s};
}

Complex log(const Complex& z) {
  if (z.re().is_zero() && z.im().is_zero()) throw std::domain_error("log(0)");
  Real lr = Real::zero(z.bits());
  // log|z| computed as log of hypot keeps relative accuracy for tiny/huge z
  Real h = abs(z);
  mpfr_log(lr.get(), h.get(), MPFR_RNDN);
  return {lr, arg(z)};
}

Complex sqr(const Complex& z) {
  return {sqr(z.re()) - sqr(z.im()), 2L * z.re() * z.im()};
}

Complex cos(const Complex& z) {
  Real s, c;
  sin_cos(Real(z.re(), z.bits()), s, c);
  return {c * cosh(z.im()), -(s * sinh(z.im()))};
}

Complex polar(const Real& r, const Real& theta) {
  Real s, c;
  sin_cos(theta, s, c);
  return {r * c, r * s};
}

Complex pow_neg(const Real& log_n, const Complex& s) {
  Real mag = exp(-(s.re() * log_n));
  Real ph = -(s.im() * log_n);
  return polar(mag, ph);
}

Complex pow(const Complex& z, const Complex& w) { return exp(w * log(z)); }

Complex mul_i(const Complex& z) { return {-z.im(), z.re()}; }

}  // namespace dbn
