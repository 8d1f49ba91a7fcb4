#include "dbn/oracle.hpp"

#include <cmath>
#include <mutex>

#include "dbn/special.hpp"

namespace dbn {

int QuadratureSpec::required_digits(double x) {
  return static_cast<int>(std::ceil(M_PI * std::abs(x) / 8.0 * 0.43429448190325182)) + 30;
}

QuadratureSpec QuadratureSpec::for_point(double x, PrecisionPolicy base) {
  QuadratureSpec s;
  s.precision = base;
  int need = PrecisionPolicy::bits_for_digits(required_digits(x), base.guard_digits);
  s.precision.working_bits = std::max(base.working_bits, need);
  return s;
}

void gauss_legendre(int order, mpfr_prec_t bits, std::vector<Real>& nodes, std::vector<Real>& weights) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<std::pair<int, mpfr_prec_t>, std::pair<std::vector<Real>, std::vector<Real>>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({order, bits});
    if (it != cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  mp::ScopedPrecision prec(bits + 32);
  nodes.clear();
  weights.clear();
  Real pi = Real::pi();
  Real tol = Real::make(1, bits + 32);
  mpfr_mul_2si(tol.get(), tol.get(), -static_cast<long>(bits) - 8, MPFR_RNDN);
  for (int i = 1; i <= order; ++i) {
    Real x = cos(pi * (4L * i - 1) / (4L * order + 2));
    Real dp;
    for (int iter = 0; iter < 200; ++iter) {
      // three-term recurrence for P_order and its derivative
      Real p0(1L), p1 = x;
      for (int k = 2; k <= order; ++k) {
        Real p2 = ((2L * k - 1) * x * p1 - (long)(k - 1) * p0) / (long)k;
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      dp = (long)order * (x * p1 - p0) / (sqr(x) - 1L);
      Real dx = p1 / dp;
      x -= dx;
      if (abs(dx) < tol) break;
    }
    {
      Real p0(1L), p1 = x;
      for (int k = 2; k <= order; ++k) {
        Real p2 = ((2L * k - 1) * x * p1 - (long)(k - 1) * p0) / (long)k;
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      dp = (long)order * (x * p1 - p0) / (sqr(x) - 1L);
    }
    Real w = 2L / ((1L - sqr(x)) * sqr(dp));
    nodes.emplace_back(x, bits);
    weights.emplace_back(w, bits);
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[{order, bits}] = {nodes, weights};
}

Real ht_tail_bound(const Real& t, double y, const Real& u_c) {
  if (u_c < Real("0.5")) throw std::invalid_argument("ht_tail_bound: u_c must be >= 0.5");
  Real pi = Real::pi(u_c.prec());
  Real e4 = exp(4L * u_c);
  Real D = 4L * pi * e4 - 9L - Real(std::abs(y)) - 2L * t * u_c;
  if (D.sign() <= 0) throw std::domain_error("ht_tail_bound: envelope not yet decreasing");
  Real g = 4L * sqr(pi) * exp(t * sqr(u_c) + (9L + Real(std::abs(y))) * u_c - pi * e4);
  return g / D;
}

HtKernel::HtKernel(const Real& t, double y_max, int panels, const QuadratureSpec& spec, mpfr_prec_t bits)
    : bits_(bits), panels_(panels), y_max_(y_max) {
  if (panels < 1) throw std::invalid_argument("HtKernel: panels must be >= 1");
  if (t.sign() < 0 || t > Real("0.5")) throw std::domain_error("HtKernel: t must lie in [0, 1/2]");
  mp::ScopedPrecision prec(bits);
  Real tt(t, bits);
  Real umax(spec.u_max);
  Real h = umax / (long)panels;
  Real target = Real::make(1, bits);
  mpfr_mul_2si(target.get(), target.get(), -static_cast<long>(bits), MPFR_RNDN);
  // Cull panels whose whole contribution lies under the certified envelope.
  active_ = panels;
  for (int k = 1; k < panels; ++k) {
    Real uc = h * (long)k;
    if (uc < Real("0.5")) continue;
    if (ht_tail_bound(tt, y_max, uc) < target) {
      active_ = k;
      break;
    }
  }
  Real uc = h * (long)active_;
  tail_ = active_ < panels || uc >= Real("0.5") ? ht_tail_bound(tt, y_max, uc) : Real::zero(bits);

  std::vector<Real> xi, wi;
  gauss_legendre(spec.rule_order, bits, xi, wi);
  auto build = [&](Rule& r, int sub) {
    Real hh = h / (long)sub;
    Real half = hh / 2L;
    for (int k = 0; k < active_ * sub; ++k) {
      Real c = hh * (long)k + half;
      for (size_t j = 0; j < xi.size(); ++j) {
        Real u = c + half * xi[j];
        Real ker = exp(tt * sqr(u)) * phi(u).value;
        r.u.push_back(u);
        r.w.push_back(half * wi[j] * ker);
      }
    }
  };
  build(coarse_, 1);
  build(fine_, 2);
}

Complex HtKernel::apply(const Rule& r, const Complex& z, Real& abs_sum) const {
  Real re = Real::zero(bits_), im = Real::zero(bits_);
  abs_sum = Real::zero(bits_);
  Real s = Real::zero(bits_), c = Real::zero(bits_), sh = Real::zero(bits_), ch = Real::zero(bits_);
  Real a = Real::zero(bits_), b = Real::zero(bits_);
  const bool real_z = z.im().is_zero();
  for (size_t k = 0; k < r.u.size(); ++k) {
    // cos((x+iy)u) = cos(xu)cosh(yu) - i sin(xu)sinh(yu)
    mpfr_mul(a.get(), z.re().get(), r.u[k].get(), MPFR_RNDN);
    mpfr_sin_cos(s.get(), c.get(), a.get(), MPFR_RNDN);
    if (real_z) {
      mpfr_mul(a.get(), c.get(), r.w[k].get(), MPFR_RNDN);
      re += a;
      abs_sum += abs(r.w[k]);
      continue;
    }
    mpfr_mul(b.get(), z.im().get(), r.u[k].get(), MPFR_RNDN);
    mpfr_sinh_cosh(sh.get(), ch.get(), b.get(), MPFR_RNDN);
    mpfr_mul(a.get(), c.get(), ch.get(), MPFR_RNDN);
    mpfr_mul(a.get(), a.get(), r.w[k].get(), MPFR_RNDN);
    re += a;
    mpfr_mul(a.get(), s.get(), sh.get(), MPFR_RNDN);
    mpfr_mul(a.get(), a.get(), r.w[k].get(), MPFR_RNDN);
    im -= a;
    abs_sum += abs(r.w[k]) * ch;
  }
  return {re, im};
}

OracleResult HtKernel::integrate(const Complex& z) const {
  if (abs(z.im()).to_double() > y_max_) throw std::invalid_argument("HtKernel: |Im z| exceeds the kernel's y_max");
  mp::ScopedPrecision prec(bits_);
  Complex zz(Real(z.re(), bits_), Real(z.im(), bits_));
  Real s1, s2;
  Complex i1 = apply(coarse_, zz, s1);
  Complex i2 = apply(fine_, zz, s2);
  Real rounding = s2 * Real(static_cast<long>(fine_.u.size() + 16));
  mpfr_mul_2si(rounding.get(), rounding.get(), -static_cast<long>(bits_), MPFR_RNDU);
  OracleResult out;
  out.value = i2;
  out.error = abs(i1 - i2) + tail_ + rounding;
  out.panels = 2 * panels_;
  out.active_panels = 2 * active_;
  out.bits = bits_;
  return out;
}

namespace {

int auto_panels(const QuadratureSpec& spec, double x) {
  double by_width = spec.u_max * std::max(std::abs(x), 1.0) / 4.0;
  double by_osc = 8.0 * std::abs(x) * spec.u_max / (2 * M_PI) / spec.rule_order;
  return std::max(50, static_cast<int>(std::ceil(std::max(by_width, by_osc))));
}

struct KernelKey {
  std::string t;
  int panels, order;
  mpfr_prec_t bits;
  double u_max, y_max;
  bool operator<(const KernelKey& o) const {
    return std::tie(t, panels, order, bits, u_max, y_max) < std::tie(o.t, o.panels, o.order, o.bits, o.u_max, o.y_max);
  }
};

std::shared_ptr<const HtKernel> kernel_for(const Real& t, const QuadratureSpec& spec, int panels, double y_max) {
  thread_local std::map<KernelKey, std::shared_ptr<const HtKernel>> cache;
  KernelKey key{t.str(40), panels, spec.rule_order, spec.precision.working_bits, spec.u_max, y_max};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() >= 6) cache.clear();
  auto k = std::make_shared<const HtKernel>(t, y_max, panels, spec, spec.precision.working_bits);
  cache[key] = k;
  return k;
}

}  // namespace

OracleResult ht_direct(const Complex& z, const Real& t, const QuadratureSpec& spec) {
  spec.precision.validate();
  const double x = std::abs(z.re().to_double());
  if (x > spec.x_limit && !spec.allow_large_x)
    throw std::domain_error("oracle: |Re z| beyond the oracle domain; pass allow_large_x to override");
  const int need = PrecisionPolicy::bits_for_digits(QuadratureSpec::required_digits(x), spec.precision.guard_digits);
  if (spec.precision.working_bits < need)
    throw InsufficientPrecision("insufficient precision for relative accuracy at this x (need " +
                                std::to_string(need) + " bits)");
  const int panels = spec.panels > 0 ? spec.panels : auto_panels(spec, x);
  if (static_cast<double>(panels) * spec.rule_order < 8.0 * x * spec.u_max / (2 * M_PI))
    throw std::invalid_argument("oracle: panels * rule_order does not resolve the oscillation");
  const double y = std::abs(z.im().to_double());
  const double y_max = y <= 1.0 ? 1.0 : std::ceil(y);
  return kernel_for(t, spec, panels, y_max)->integrate(z);
}

OracleResult ht_ratio(const Real& x, const Real& y, const Real& t, const QuadratureSpec& spec) {
  OracleResult r = ht_direct(Complex(x, y), t, spec);
  mp::ScopedPrecision prec(r.bits);
  Complex lb = log_bt(Real(x, r.bits), Real(y, r.bits), Real(t, r.bits));
  Complex inv = exp(-lb);
  r.value = r.value * inv;
  r.error = r.error * abs(inv);
  return r;
}

}  // namespace dbn
