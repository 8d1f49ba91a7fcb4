#include "dbn/rs.hpp"

#include <cmath>
#include <vector>

#include "dbn/special.hpp"

namespace dbn {

void ModelParams::validate() const {
  if (t.sign() < 0 || t > Real("0.5")) throw std::domain_error("t must lie in [0, 1/2]");
  if (y.sign() < 0 || y > Real(1L)) throw std::domain_error("y must lie in [0, 1]");
  if (x < Real(200L)) throw std::domain_error("x must be >= 200");
}

ModelParams ModelParams::from_strings(const std::string& x, const std::string& y, const std::string& t,
                                      mpfr_prec_t bits) {
  if (bits == 0) bits = mp::default_prec();
  return {Real(x, bits), Real(y, bits), Real(t, bits)};
}

long rs_cutoff(const Real& x, const Real& t) {
  Real v = sqrt(x / (4L * Real::pi(x.prec())) + t / 16L);
  return floor(v).to_long_floor();
}

RSTerms compute_rs_terms(const ModelParams& params) {
  params.validate();
  const mpfr_prec_t p = mp::default_prec();
  Real x(params.x, p), y(params.y, p), t(params.t, p);
  Real pi = Real::pi(p);
  RSTerms r;
  r.N = rs_cutoff(x, t);
  r.s_plus = s_plus(x, y);
  r.s_minus = s_minus(x, y);
  r.alpha_plus = alpha(r.s_plus);
  r.alpha_minus = alpha(r.s_minus);
  Real half_t = t / 2L;
  r.s_star = r.s_plus + r.alpha_plus * half_t;
  r.kappa = (r.alpha_minus - conj(r.alpha_plus)) * half_t;
  r.log_mt_plus = log_mt(t, r.s_plus);
  r.log_mt_minus = log_mt(t, r.s_minus);
  r.gamma = exp(r.log_mt_minus - r.log_mt_plus);
  r.Tprime = x / 2L + pi * t / 8L;
  r.a = sqrt(r.Tprime / (2L * pi));
  r.p = 1L - 2L * (r.a - Real(r.N));
  Real phase = r.Tprime / 2L * log(r.Tprime / (2L * pi)) - r.Tprime / 2L - pi / 8L;
  r.U = polar(Real::make(1, p), -phase);
  return r;
}

void check_rs_invariants(const ModelParams& params, const RSTerms& r) {
  const mpfr_prec_t p = mp::default_prec();
  Real x(params.x, p), y(params.y, p), t(params.t, p);
  Real pi = Real::pi(p);
  // relative slack for rounding only; the bounds themselves are theorems
  Real slack = Real(1L) + Real("1e-25");
  if (floor(r.a).to_long_floor() != r.N) throw ConsistencyError("N differs from floor(a)");
  if (r.p < Real(-1L) || r.p > Real(1L)) throw ConsistencyError("p outside [-1, 1]");
  if (abs(abs(r.U) - 1L) > Real("1e-25")) throw ConsistencyError("|U| != 1");
  Real xr = x / (4L * pi);
  Real gb = exp(Real("0.02") * y) * exp(-(y / 2L) * log(xr));
  if (abs(r.gamma) > gb * slack) throw ConsistencyError("gamma bound violated");
  Real kb = t * y / (2L * (x - 6L));
  if (abs(r.kappa) > kb * slack + Real("1e-30")) throw ConsistencyError("kappa bound violated");
  Real corr = 1L - 3L * y + 4L * y * (1L + y) / sqr(x);
  if (corr.sign() < 0) corr = Real::zero(p);
  Real sb = (1L + y) / 2L + t / 4L * log(xr) - t / (2L * sqr(x)) * corr;
  if (r.s_star.re() < sb - Real("1e-25")) throw ConsistencyError("Re s_* bound violated");
}

Complex compute_ft(const ModelParams& params, const RSTerms& r) {
  const mpfr_prec_t p = mp::default_prec();
  Real y(params.y, p), t(params.t, p);
  Real t4 = t / 4L;
  Complex e1 = -r.s_star;
  Complex e2 = Complex(y, Real::zero(p)) - conj(r.s_star) - r.kappa;
  Real s1r = Real::zero(p), s1i = Real::zero(p), s2r = Real::zero(p), s2i = Real::zero(p);
  Real ln, lb, m, ph, sn, cs;
  for (long n = 1; n <= r.N; ++n) {
    ln = log(Real::make(n, p));
    lb = t4 * sqr(ln);
    m = exp(lb + e1.re() * ln);
    ph = e1.im() * ln;
    sin_cos(ph, sn, cs);
    s1r += m * cs;
    s1i += m * sn;
    m = exp(lb + e2.re() * ln);
    ph = e2.im() * ln;
    sin_cos(ph, sn, cs);
    s2r += m * cs;
    s2i += m * sn;
  }
  return Complex(s1r, s1i) + r.gamma * Complex(s2r, s2i);
}

Real delta1(const Real& x, const Real& t) {
  Real l = log(x / (4L * Real::pi(x.prec())));
  return (sqr(t) / 16L * sqr(l) + Real("0.626")) / (x - Real("6.66"));
}

namespace {

Real eps_tilde(const Real& sigma, const Real& T, const Real& a) {
  Real v = Real("0.397") * exp(sigma * log(Real(9L))) / (a - Real("0.865")) + Real(5L) / (3L * (T - 6L));
  return v * exp(Real("3.49") / (T - 4L));
}

void require_positive(const Real& v, const char* what) {
  if (v.sign() <= 0) throw std::domain_error(std::string("non-positive denominator: ") + what);
}

}  // namespace

ErrorBounds compute_error_bounds(const ModelParams& params, const RSTerms& r, double bound_safety) {
  const mpfr_prec_t p = mp::default_prec();
  Real x(params.x, p), y(params.y, p), t(params.t, p);
  Real pi = Real::pi(p);
  Real T = x / 2L;
  require_positive(x - Real("6.66"), "x - 6.66");
  require_positive(x - 12L, "x - 12");
  require_positive(Real(r.N) - Real("0.125"), "N - 0.125");
  require_positive(r.a - Real("0.865"), "a - 0.865");
  require_positive(T - 6L, "T - 6");
  Real safety(bound_safety);

  Real t4 = t / 4L;
  Real t2_8 = sqr(t) / 8L;
  Real eps_const = t / 4L + Real(1L) / Real(6L);
  Real eps_den = T - Real("3.33");
  Real re_sstar = r.s_star.re();
  Real re_a_exp = r.s_star.re() + r.kappa.re() - y;  // exponent of the A-side sum
  Real ap_re = r.alpha_plus.re(), ap_im2 = sqr(r.alpha_plus.im());
  Real am_re = r.alpha_minus.re(), am_im2 = sqr(r.alpha_minus.im());
  Real lx = log(x / (4L * pi));
  Real cl_den = x - Real("6.66");
  Real t2_16 = sqr(t) / 16L;

  Real sA = Real::zero(p), sB = Real::zero(p), cA = Real::zero(p), cB = Real::zero(p);
  Real ln, lb, w, epsp, epsm, dl;
  for (long n = 1; n <= r.N; ++n) {
    ln = log(Real::make(n, p));
    lb = t4 * sqr(ln);
    epsp = expm1((t2_8 * (sqr(ap_re - ln) + ap_im2) + eps_const) / eps_den);
    epsm = expm1((t2_8 * (sqr(am_re - ln) + am_im2) + eps_const) / eps_den);
    dl = expm1((t2_16 * sqr(lx - 2L * ln) + Real("0.626")) / cl_den);
    w = exp(lb - re_sstar * ln);
    sB += w * epsp;
    cB += w * dl;
    cA += exp(lb - (re_sstar - y) * ln) * dl;
    sA += exp(lb - re_a_exp * ln) * epsm;
  }
  ErrorBounds b;
  Real gabs = abs(r.gamma);
  b.eA = gabs * sA * safety;
  b.eB = sB * safety;
  b.eB_closed = cB;
  b.eA_closed = gabs * exp(abs(r.kappa) * log(Real(r.N))) * cA;
  b.eAB_closed = b.eA_closed + b.eB_closed;

  Complex lm0 = log_m0(Complex(Real::zero(p), r.Tprime));
  Real pref = exp(t * sqr(pi) / 64L + lm0.re() - r.log_mt_plus.re());
  Real et = eps_tilde((1L - y) / 2L, T, r.a) + eps_tilde((1L + y) / 2L, T, r.a);
  b.eC0 = pref * (1L + et) * safety;
  b.eC = pref * et * safety;

  Real lcomp = hypot(lx, pi / 2L);
  Real base = exp(-(1L + y) / 4L * lx - t / 16L * sqr(lx));
  Real three_y = exp(y * log(Real(3L)));
  Real nterm = Real("1.24") * (three_y + 1L / three_y) / (Real(r.N) - Real("0.125"));
  Real vi = base * exp((3L * lcomp + Real("3.58")) / (x - Real("8.52")));
  Real tail6 = Real("6.92") / (x - 12L);
  b.eC0_closed = vi * (1L + nterm + tail6);
  b.eC_closed = vi * (nterm + tail6);
  b.eC0_theorem = base * exp(nterm + (3L * lcomp + Real("10.44")) / (x - 12L));
  return b;
}

namespace {

// Truncated power series in d.
using Series = std::vector<Complex>;

Series mul(const Series& a, const Series& b, size_t K) {
  Series c(K, Complex(Real::zero(mp::default_prec()), Real::zero(mp::default_prec())));
  for (size_t i = 0; i < K && i < a.size(); ++i)
    for (size_t j = 0; i + j < K && j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// exp(c d^m) as a series in d
Series exp_series(const Complex& c, int m, size_t K) {
  const mpfr_prec_t p = mp::default_prec();
  Series s(K, Complex(Real::zero(p), Real::zero(p)));
  Complex term(Real::make(1, p), Real::zero(p));
  for (size_t k = 0; k * m < K; ++k) {
    s[k * m] = term;
    term = term * c / Real(static_cast<long>(k + 1));
  }
  return s;
}

Complex c0_series(const Real& p0, const Real& d) {
  const mpfr_prec_t bits = mp::default_prec();
  Real pi = Real::pi(bits);
  const size_t K = std::max<size_t>(8, static_cast<size_t>(bits / 9 + 4));
  Complex ipi(Real::zero(bits), pi);
  // e^{pi i (p0^2/2 + 3/8)} e^{pi i p0 d} e^{pi i d^2/2}
  Complex lead = exp(ipi * (sqr(p0) / 2L + Real(3L) / 8L));
  Series num = mul(exp_series(ipi * p0, 1, K), exp_series(ipi / 2L, 2, K), K);
  for (auto& c : num) c = lead * c;
  // - i sqrt2 (cos(pi p0/2) cos(pi d/2) - sin(pi p0/2) sin(pi d/2))
  Real cp = cos(pi * p0 / 2L), sp = sin(pi * p0 / 2L);
  Real sq2 = sqrt(Real::make(2, bits));
  Real w = pi / 2L;
  Real powk = Real::make(1, bits);
  for (size_t k = 0; k < K; ++k) {
    // d^k coefficient of cos(w d) and sin(w d)
    Real fk = powk / factorial(k, bits);
    Real cosk = Real::zero(bits), sink = Real::zero(bits);
    if (k % 2 == 0) cosk = (k / 2) % 2 == 0 ? fk : -fk;
    else sink = ((k - 1) / 2) % 2 == 0 ? fk : -fk;
    Real coef = cp * cosk - sp * sink;
    num[k] -= Complex(Real::zero(bits), sq2 * coef);
    powk *= w;
  }
  // 2 cos(pi p0 + pi d) = -2 sin(pi p0) sin(pi d) since cos(pi p0) = 0
  Real spp = sin(pi * p0);
  Series den(K, Complex(Real::zero(bits), Real::zero(bits)));
  powk = Real::make(1, bits);
  for (size_t k = 0; k < K; ++k) {
    if (k % 2 == 1) {
      Real fk = powk / factorial(k, bits);
      Real sink = ((k - 1) / 2) % 2 == 0 ? fk : -fk;
      den[k] = Complex(-2L * spp * sink, Real::zero(bits));
    }
    powk *= pi;
  }
  // both vanish at d = 0; divide out one power of d
  Complex nn(Real::zero(bits), Real::zero(bits)), dd(Real::zero(bits), Real::zero(bits));
  Complex dk(Real::make(1, bits), Real::zero(bits));
  for (size_t k = 1; k < K; ++k) {
    nn += num[k] * dk;
    dd += den[k] * dk;
    dk = dk * d;
  }
  return nn / dd;
}

}  // namespace

Complex c0(const Real& p) {
  const mpfr_prec_t bits = mp::default_prec();
  Real pp(p, bits);
  Real half("0.5", bits);
  Real cut("1e-3", bits);
  if (abs(pp - half) < cut) return c0_series(half, pp - half);
  if (abs(pp + half) < cut) return c0_series(-half, pp + half);
  Real pi = Real::pi(bits);
  Complex e = polar(Real::make(1, bits), pi * (sqr(pp) / 2L + Real(3L) / 8L));
  Real c = sqrt(Real::make(2, bits)) * cos(pi * pp / 2L);
  Complex num = e - Complex(Real::zero(bits), c);
  return num / (2L * cos(pi * pp));
}

namespace {

// 2 (-1)^N e^{t pi^2/64} Re(e^{i arg M0(iT')} C0(p) U e^{pi i/8}) and log|M0(iT')|
void ct_parts(const ModelParams& params, const RSTerms& r, Real& real_part, Real& log_m0_abs) {
  const mpfr_prec_t p = mp::default_prec();
  Real t(params.t, p);
  Real pi = Real::pi(p);
  Complex lm0 = log_m0(Complex(Real::zero(p), r.Tprime));
  Complex rot = polar(Real::make(1, p), lm0.im() + pi / 8L);
  Complex inner = rot * c0(r.p) * r.U;
  real_part = 2L * exp(t * sqr(pi) / 64L) * inner.re();
  if (r.N % 2 != 0) real_part = -real_part;
  log_m0_abs = lm0.re();
}

}  // namespace

Complex compute_ct(const ModelParams& params, const RSTerms& r) {
  const mpfr_prec_t p = mp::default_prec();
  Real y(params.y, p);
  Real rp, lm;
  ct_parts(params, r, rp, lm);
  return polar(rp * exp(lm), -Real::pi(p) * y / 8L);
}

Complex compute_ct_over_bt(const ModelParams& params, const RSTerms& r) {
  const mpfr_prec_t p = mp::default_prec();
  Real y(params.y, p);
  Real rp, lm;
  ct_parts(params, r, rp, lm);
  Complex phase(lm, -Real::pi(p) * y / 8L);
  return exp(phase - r.log_mt_plus) * rp;
}

Complex ab_normalized(const ModelParams& params, const RSTerms& r, const Complex& f) {
  (void)params;
  return f * polar(Real::make(1, mp::default_prec()), r.log_mt_plus.im());
}

ApproxResult approximate(const ModelParams& params, const ApproxOptions& opts) {
  opts.precision.validate();
  mp::ScopedPrecision prec(opts.precision.working_bits);
  ApproxResult out;
  out.bits = opts.precision.working_bits;
  out.terms = compute_rs_terms(params);
  if (opts.check_invariants) check_rs_invariants(params, out.terms);
  out.f = compute_ft(params, out.terms);
  out.bounds = compute_error_bounds(params, out.terms, opts.precision.bound_safety);
  out.eA = out.bounds.eA;
  out.eB = out.bounds.eB;
  out.eC0 = out.bounds.eC0;
  out.eC = out.bounds.eC;
  if (opts.with_ct) {
    out.Ct_over_Bt = compute_ct_over_bt(params, out.terms);
    out.has_ct = true;
  }
  return out;
}

NonvanishingResult nonvanishing_test(const ModelParams& params, const ApproxOptions& opts) {
  NonvanishingResult r;
  r.approx = approximate(params, opts);
  mp::ScopedPrecision prec(r.approx.bits);
  r.margin = abs(r.approx.f) - (r.approx.eA + r.approx.eB + r.approx.eC0);
  r.passed = r.margin.sign() > 0;
  return r;
}

}  // namespace dbn
