#include "dbn/region.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dbn/mp.hpp"

namespace dbn {

namespace {

constexpr long kBlock = 1L << 20;
constexpr long kDirectSpan = 1L << 16;
const long double kPi = std::numbers::pi_v<long double>;

inline long double g_term(long double t, long double sigma, long double l) { return std::exp(l * (t / 4 * l - sigma)); }

long double bt_ld(long double t, long double n) {
  const long double l = std::log(n);
  return std::exp(t / 4 * l * l);
}

// sum over [a, b] of a per-n function, blocked with a fixed merge order
template <class F>
long double blocked_sum(long a, long b, F&& f) {
  long double total = 0;
  for (long lo = a; lo <= b; lo += kBlock) {
    const long hi = std::min(b, lo + kBlock - 1);
    long double s = 0;
    for (long n = lo; n <= hi; ++n) s += f(n);
    total += s;
  }
  return total;
}

// Euler-Maclaurin for sum_{n=A}^{B} g(n), g(u) = exp((t/4) log^2 u - sigma log u), through the g' term.
long double em_sum(long double t, long double sigma, long A, long B) {
  auto integrand = [&](long double v) { return std::exp(v * (t / 4 * v + 1 - sigma)); };
  const long double va = std::log(static_cast<long double>(A)), vb = std::log(static_cast<long double>(B));
  long double integral =
      boost::math::quadrature::gauss_kronrod<long double, 61>::integrate(integrand, va, vb, 12, 1e-16L);
  auto g = [&](long double u) { return g_term(t, sigma, std::log(u)); };
  auto gp = [&](long double u) { return g(u) * (t / 2 * std::log(u) - sigma) / u; };
  const long double a = A, b = B;
  return integral + (g(a) + g(b)) / 2 + (gp(b) - gp(a)) / 12;
}

}  // namespace

long double bt_power_sum_direct(long double t, long double sigma, long a, long b) {
  if (b < a) return 0;
  return blocked_sum(a, b, [&](long n) { return g_term(t, sigma, std::log(static_cast<long double>(n))); });
}

long double bt_power_sum(long double t, long double sigma, long a, long b) {
  if (a < 1) throw std::invalid_argument("sum starts below 1");
  if (b < a) return 0;
  if (b - a < kDirectSpan) return bt_power_sum_direct(t, sigma, a, b);
  const long mid = a + kDirectSpan;
  return bt_power_sum_direct(t, sigma, a, mid - 1) + em_sum(t, sigma, mid, b);
}

long double lemma_largen_bound(long N, long N0, long double sigma, long double t) {
  if (N0 < 1 || N < N0) throw std::invalid_argument("lemma needs N >= N0 >= 1");
  if (!(sigma > t / 2 * std::log(static_cast<long double>(N))))
    throw std::invalid_argument("lemma needs sigma > (t/2) log N");
  const long double head = bt_power_sum(t, sigma, 1, N0);
  auto edge = [&](long m) {
    const long double l = std::log(static_cast<long double>(m));
    return std::exp((1 - sigma) * l + t / 4 * l * l);
  };
  return head + std::max(edge(N0), edge(N)) * std::log(static_cast<long double>(N) / N0);
}

namespace {

long double sigma1_at(long N) { return 0.6L + 0.1L * std::log(static_cast<long double>(N)) - 5.1e-29L; }
long double sigma2_at(long N) { return 0.4L + 0.1L * std::log(static_cast<long double>(N)) - 7.09e-16L; }

long double x_of_N(long N, long double t) {
  const long double n = N;
  return 4 * kPi * n * n - kPi * t / 4;
}

}  // namespace

long double claim_c_A(long N, long N0, long double t) {
  const long double xN = x_of_N(N, t);
  return bt_power_sum(t, sigma1_at(N), 1, N0) +
         1.006L * std::pow(xN / (4 * kPi), -0.1L) * bt_power_sum(t, sigma2_at(N), 1, N0);
}

long double claim_c_B(long N, long N0, long double t) {
  auto edge = [&](long m, long double s) {
    const long double l = std::log(static_cast<long double>(m));
    return std::exp((1 - s) * l + t / 4 * l * l);
  };
  const long double s1 = sigma1_at(N), s2 = sigma2_at(N);
  const long double m1 = std::max(edge(N0, s1), edge(N, s1));
  const long double m2 = std::max(edge(N0, s2), edge(N, s2));
  return (m1 + 1.006L * std::pow(static_cast<long double>(N), -0.2L) * m2) *
         std::log(static_cast<long double>(N) / N0);
}

ClaimCResult verify_claim_c(long double t, long N1, long N0) {
  ClaimCResult r;
  r.N0 = N0;
  r.N1 = N1;
  r.t = t;
  r.sigma1 = sigma1_at(N1);
  r.sigma2 = sigma2_at(N1);
  r.A = claim_c_A(N1, N0, t);
  r.B = claim_c_B(N1, N0, t);
  r.x_N1 = x_of_N(N1, t);
  for (long k : {1L, 2L, 4L}) r.B_at.emplace_back(k * N1, claim_c_B(k * N1, N0, t));
  r.B_decreasing = r.B_at[0].second > r.B_at[1].second && r.B_at[1].second > r.B_at[2].second;
  r.deviation = r.A + r.B - 1;
  r.nonvanishing = r.deviation < 1 - 1.25e-3L;
  r.passed = r.A + r.B < 1.955L;
  return r;
}

MollifierTableau::MollifierTableau(long double t, long N, int D, long double alpha_const, long double alpha_exp)
    : t_(t), ac_(alpha_const), ae_(alpha_exp), N_(N), D_(D) {
  if (N < 1 || D < 1) throw std::invalid_argument("tableau needs N, D >= 1");
  std::vector<int> primes;
  int rest = D;
  for (int p = 2; p <= rest; ++p) {
    if (rest % p) continue;
    primes.push_back(p);
    rest /= p;
    if (rest % p == 0) throw std::invalid_argument("D must be squarefree");
  }
  for (int d = 1; d <= D; ++d) {
    if (D % d) continue;
    long double lam = 1;
    for (int p : primes)
      if (d % p == 0) lam *= -bt_ld(t, p);
    divs_.push_back(d);
    lam_.push_back(lam);
  }
  b_.resize(static_cast<size_t>(N) + 1);
  w_.resize(static_cast<size_t>(N) + 1);
  for (long m = 1; m <= N; ++m) {
    const long double l = std::log(static_cast<long double>(m));
    b_[m] = std::exp(t / 4 * l * l);
    w_[m] = std::exp(ae_ * l) * b_[m];
  }
}

long double MollifierTableau::lambda(int d) const {
  for (size_t k = 0; k < divs_.size(); ++k)
    if (divs_[k] == d) return lam_[k];
  throw std::invalid_argument("not a divisor of D");
}

void MollifierTableau::coeffs(long n, long double& beta, long double& alpha) const {
  beta = 0;
  alpha = 0;
  for (size_t k = 0; k < divs_.size(); ++k) {
    const int d = divs_[k];
    if (n % d) continue;
    const long m = n / d;
    if (m > N_) continue;
    beta += lam_[k] * b_[m];
    alpha += lam_[k] * w_[m];
  }
  alpha *= ac_;
}

long double MollifierTableau::beta(long n) const {
  long double b, a;
  coeffs(n, b, a);
  return b;
}

long double MollifierTableau::alpha(long n) const {
  long double b, a;
  coeffs(n, b, a);
  return a;
}

long double improved_triangle_lower(const MollifierTableau& tab, long N_minus, long double sigma) {
  const long double c = std::pow(static_cast<long double>(N_minus), -0.2L);
  const long double ca1 = c * tab.alpha(1);
  const long double ratio = (1 - ca1) / (1 + ca1);
  const long top = static_cast<long>(tab.D()) * tab.N();
  long double y = blocked_sum(2, top, [&](long n) {
    long double b, a;
    tab.coeffs(n, b, a);
    if (b == 0 && a == 0) return 0.0L;
    const long double m = std::max(std::fabs(b - c * a), ratio * std::fabs(b + c * a));
    return m * std::exp(-sigma * std::log(static_cast<long double>(n)));
  });
  return 1 - ca1 - y;
}

long double naive_triangle_lower(const MollifierTableau& tab, long N_minus, long double sigma) {
  const long double c = std::pow(static_cast<long double>(N_minus), -0.2L);
  const long top = static_cast<long>(tab.D()) * tab.N();
  long double y = blocked_sum(2, top, [&](long n) {
    long double b, a;
    tab.coeffs(n, b, a);
    return (std::fabs(b) + c * std::fabs(a)) * std::exp(-sigma * std::log(static_cast<long double>(n)));
  });
  return 1 - c * tab.alpha(1) - y;
}

long double sigma_floor(long N_minus, long double offset) { return offset + 0.1L * std::log(static_cast<long double>(N_minus)); }

long double z_term(long N, long double sigma, long double t, long double kappa) {
  const long double invN = 1.0L / N;
  return 1.644L * blocked_sum(1, N, [&](long n) {
           const long double l = std::log(static_cast<long double>(n));
           return std::exp(0.2L * std::log(n * invN) + l * (t / 4 * l - sigma)) * std::expm1(kappa * l);
         });
}

long double z_crude(long N1, long double t, long double kappa) {
  return 1.644L * blocked_sum(1, N1, [&](long n) {
           const long double l = std::log(static_cast<long double>(n));
           return g_term(t, 1.714L, l) * std::expm1(kappa * l);
         });
}

IntervalBoundResult interval_bound(long double t, long N_minus, long N_plus, long double Z, long double sigma_offset,
                                   bool with_naive) {
  if (N_minus < 1 || N_plus < N_minus) throw std::invalid_argument("interval needs 1 <= N- <= N+");
  IntervalBoundResult r;
  r.N_minus = N_minus;
  r.N_plus = N_plus;
  r.sigma_floor = sigma_floor(N_minus, sigma_offset);
  MollifierTableau tab(t, N_plus);
  r.F_value = improved_triangle_lower(tab, N_minus, r.sigma_floor);
  if (with_naive) r.F_naive = naive_triangle_lower(tab, N_minus, r.sigma_floor);
  r.Z_value = Z;
  r.passed = r.F_value - Z >= 2.14e-3L;
  r.passed_strict = r.F_value >= 2.15e-3L;
  return r;
}

MollifierEnvelope mollifier_envelope(long double t, long double sigma, int D) {
  MollifierEnvelope e;
  e.sigma = sigma;
  e.upper = 1;
  e.lower = 1;
  for (int p = 2; p <= D; ++p) {
    if (D % p) continue;
    bool prime = true;
    for (int q = 2; q * q <= p; ++q)
      if (p % q == 0) prime = false;
    if (!prime) continue;
    const long double r = bt_ld(t, p) * std::pow(static_cast<long double>(p), -sigma);
    e.upper *= 1 + r;
    e.lower *= 1 - r;
    e.phase += std::asin(r);
  }
  return e;
}

namespace {

// distance from r e^{i theta} to (-inf, 0] for the worst theta with |theta| <= arg_upper
long double dist_neg_axis(long double mag, long double arg_upper) {
  if (arg_upper >= kPi) return 0;
  if (arg_upper <= kPi / 2) return mag;
  return mag * std::sin(kPi - arg_upper);
}

EdgeCheck edge_from(const std::string& name, long double f_mag, long double f_arg, const MollifierEnvelope& env,
                    long double need) {
  EdgeCheck e;
  e.edge = name;
  e.magnitude_lower = f_mag * env.lower;
  e.arg_upper = f_arg + env.phase;
  e.dist_lower = dist_neg_axis(e.magnitude_lower, e.arg_upper);
  e.passed = e.dist_lower > need;
  return e;
}

void split_interval(long double t, long lo, long hi, long double Z, long double so, int depth, int max_depth,
                    std::vector<IntervalBoundResult>& out) {
  IntervalBoundResult r = interval_bound(t, lo, hi, Z, so);
  r.depth = depth;
  if (r.passed || depth >= max_depth || hi - lo < 2) {
    out.push_back(r);
    return;
  }
  const long mid = static_cast<long>(std::llround(std::sqrt(static_cast<long double>(lo) * hi)));
  const long m = std::clamp(mid, lo + 1, hi - 1);
  split_interval(t, lo, m, Z, so, depth + 1, max_depth, out);
  split_interval(t, m, hi, Z, so, depth + 1, max_depth, out);
}

}  // namespace

std::vector<std::pair<long, long>> default_claim_b_intervals() {
  return {{69098, 80000}, {80000, 110000}, {110000, 220000}, {220000, 1500000}};
}

RegionReport verify_claim_b(long double t, long N0, long N1, const std::vector<std::pair<long, long>>& intervals,
                            const LeftEdgeData& left, long double right_deviation, int max_depth,
                            long double sigma_offset) {
  RegionReport rep;
  rep.N0 = N0;
  rep.N1 = N1;
  rep.t = t;
  const long double need = 2.05e-3L;

  // intervals must cover [N0, N1]
  auto sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  long reach = N0;
  for (const auto& [a, b] : sorted) {
    if (a > reach) break;
    reach = std::max(reach, b);
  }
  if (sorted.empty() || sorted.front().first > N0 || reach < N1) {
    rep.failure = "intervals do not cover [N0, N1]";
    return rep;
  }

  // Re s_* >= 0.6 + 0.1 log N0 on the bottom edge, 1 + 0.1 log N0 on the top edge
  const long double lnN0 = std::log(static_cast<long double>(N0));
  rep.envelope = mollifier_envelope(t, 0.6L + 0.1L * lnN0);

  rep.edges.push_back(right_deviation < 1
                          ? edge_from("right", 1 - right_deviation, std::asin(right_deviation), rep.envelope, need)
                          : EdgeCheck{"right", false, 0, kPi, 0});
  rep.edges.push_back(edge_from("left", left.min_abs_f, left.max_abs_arg, rep.envelope, need));

  const long double s_top = 1 + 0.1L * lnN0;
  rep.top_sum_B = bt_power_sum(t, s_top, 2, N1);
  rep.top_sum_A = 1.03L / N0 * bt_power_sum(t, s_top - 1 - 1e-4L, 1, N0) +
                  1.03L * bt_power_sum(t, s_top - 1e-4L, N0 + 1, N1);
  const long double top_dev = rep.top_sum_B + rep.top_sum_A;
  rep.edges.push_back(top_dev < 1 ? edge_from("top", 1 - top_dev, std::asin(top_dev), rep.envelope, need)
                                  : EdgeCheck{"top", false, 0, kPi, 0});

  rep.Z = z_crude(N1, t);
  rep.Z_ok = rep.Z <= 1e-10L;
  for (const auto& [a, b] : intervals) split_interval(t, a, b, rep.Z, sigma_offset, 0, max_depth, rep.intervals);
  bool bottom = true;
  for (const auto& r : rep.intervals) bottom = bottom && r.passed;
  EdgeCheck be;
  be.edge = "bottom";
  be.passed = bottom && rep.Z_ok;
  be.dist_lower = 1e300L;
  for (const auto& r : rep.intervals) be.dist_lower = std::min(be.dist_lower, r.F_value - r.Z_value);
  rep.edges.push_back(be);

  rep.passed = true;
  for (const auto& e : rep.edges) {
    if (!e.passed) {
      rep.passed = false;
      rep.failure = e.edge + " edge";
      break;
    }
  }
  if (rep.passed) {
    for (const auto& r : rep.intervals) {
      if (!r.passed) {
        rep.passed = false;
        rep.failure = "interval [" + std::to_string(r.N_minus) + ", " + std::to_string(r.N_plus) + "]";
        break;
      }
    }
  }
  return rep;
}

std::pair<long double, long double> trib2_bounds(const std::vector<std::complex<long double>>& alphas,
                                                 std::complex<long double> beta2, long double tol) {
  const size_t N = alphas.size();
  if (N == 0) throw std::invalid_argument("trib2 needs at least one term");
  for (size_t n = 2; n <= N; n += 2) {
    const auto an = alphas[n - 1];
    const auto v = beta2 * alphas[n / 2 - 1];
    const long double scale = std::max<long double>(std::abs(an), 1e-300L);
    if (std::abs(an) == 0) {
      if (std::abs(v) > tol) throw std::domain_error("segment condition fails at n = " + std::to_string(n));
      continue;
    }
    const auto theta = v / an;
    if (std::fabs(theta.imag()) * scale > tol * scale + tol || theta.real() < -tol || theta.real() > 1 + tol)
      throw std::domain_error("segment condition fails at n = " + std::to_string(n));
  }
  long double all = 0, upper_half = 0;
  for (size_t n = 1; n <= N; ++n) {
    const long double a = std::abs(alphas[n - 1]);
    all += a;
    if (2 * n > N) upper_half += a;
  }
  const long double b2 = std::abs(beta2);
  const long double dev = (1 - b2) * all + 2 * b2 * upper_half;
  return {2 * std::abs(alphas[0]) - dev, dev};
}

EnvelopePoint mollified_lower_bound(long N0, long double t0, long double y0) {
  EnvelopePoint p;
  p.N0 = N0;
  p.t0 = t0;
  p.y0 = y0;
  p.x = x_of_N(N0, t0);
  p.Lambda = t0 + y0 * y0 / 2;
  const long double L = std::log(p.x / (4 * kPi));
  const long double sigma = (1 + y0) / 2 + t0 / 4 * L;
  const long double b2 = bt_ld(t0, 2) * std::pow(2.0L, -sigma);
  const long half = N0 / 2 + 1;
  // two-term mollifier lemma on sum b_n n^{-s} (lower) and sum n^{y0} b_n n^{-s} (upper)
  const long double sb = bt_power_sum(t0, sigma, 1, N0), sbh = bt_power_sum(t0, sigma, half, N0);
  const long double sa = bt_power_sum(t0, sigma - y0, 1, N0), sah = bt_power_sum(t0, sigma - y0, half, N0);
  const long double lower = 2 - (1 - b2) * sb - 2 * b2 * sbh;
  const long double upper = (1 - b2) * sa + 2 * b2 * sah;
  const long double gamma = std::pow(p.x / (4 * kPi), -y0 / 2);
  p.lower_bound = lower - gamma * upper;
  return p;
}

std::vector<EnvelopePoint> envelope_scan(const std::vector<long double>& t_grid,
                                         const std::vector<long double>& y_grid, const std::vector<long>& N_grid,
                                         long double target) {
  std::vector<EnvelopePoint> out;
  for (long N : N_grid)
    for (long double t : t_grid)
      for (long double y : y_grid) {
        EnvelopePoint p = mollified_lower_bound(N, t, y);
        if (p.lower_bound >= target) out.push_back(p);
      }
  return out;
}

const std::vector<Table1Row>& table1_rows() {
  static const std::vector<Table1Row> rows = {
      {"2000000129093", 0.198L, 0.15492L, 0.21L, 398942, 0.0341L},
      {"5000000194858", 0.186L, 0.16733L, 0.20L, 630783, 0.0376L},
      {"20000000131252", 0.180L, 0.14142L, 0.19L, 1261566, 0.0349L},
      {"60000000123375", 0.168L, 0.15492L, 0.18L, 2185096, 0.0377L},
      {"300000000188911", 0.161L, 0.13416L, 0.17L, 4886025, 0.0369L},
      {"2000000000122014", 0.153L, 0.11832L, 0.16L, 12615662, 0.0532L},
      {"7000000000068886", 0.139L, 0.14832L, 0.15L, 23601743, 0.0350L},
      {"60000000000156984", 0.132L, 0.12649L, 0.14L, 69098829, 0.0307L},
      {"600000000000088525", 0.122L, 0.12649L, 0.13L, 218509686, 0.0347L},
      {"9000000000000035785", 0.113L, 0.11832L, 0.12L, 846284375, 0.0318L},
      {"200000000000000066447", 0.102L, 0.12649L, 0.11L, 3989422804, 0.0305L},
      {"9000000000000000070686", 0.093L, 0.11832L, 0.10L, 26761861742, 0.0321L},
  };
  return rows;
}

Table1Check check_table1_row(const Table1Row& row) {
  Table1Check c;
  c.row = row;
  {
    mp::ScopedPrecision prec(192);
    Real X(row.X), t(static_cast<long double>(row.t0));
    c.N0_computed = static_cast<long>(floor(sqrt(X / (4L * Real::pi()) + t / 16L)).to_int64_floor());
  }
  c.Lambda_computed = row.t0 + row.y0 * row.y0 / 2;
  c.point = mollified_lower_bound(c.N0_computed, row.t0, row.y0);
  return c;
}

}  // namespace dbn
