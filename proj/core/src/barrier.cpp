#include "dbn/barrier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "dbn/special.hpp"

namespace dbn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// W_k = sum_{n <= N} exp(b ln^2 n - sigma ln n) ln^k n, k = 0, 1, 2
struct Moments3 {
  long double w0 = 0, w1 = 0, w2 = 0;
};

Moments3 weighted_sums(long N, long double t, long double sigma) {
  Moments3 m;
  const long double b = t / 4;
  for (long n = 1; n <= N; ++n) {
    const long double l = std::log(static_cast<long double>(n));
    const long double w = std::exp(l * (b * l - sigma));
    m.w0 += w;
    m.w1 += w * l;
    m.w2 += w * l * l;
  }
  return m;
}

struct PointScalars {
  long N = 0;
  long double sigmaB = 0, sigmaA = 0;  // Re s_*, Re s_* - y
  long double G = 0;                   // |gamma| N^|kappa|
  long double Lc = 0;                  // log(|1+y+ix|/4pi) + pi + 3/x
};

PointScalars scalars_at(const Real& x, const Real& y, const Real& t) {
  ModelParams P{x, y, t};
  RSTerms r = compute_rs_terms(P);
  PointScalars s;
  s.N = r.N;
  s.sigmaB = r.s_star.re().to_ld();
  s.sigmaA = (r.s_star.re() - y).to_ld();
  Real lg = log(abs(r.gamma)) + abs(r.kappa) * log(Real(r.N));
  s.G = std::exp(lg.to_ld());
  const mpfr_prec_t p = x.prec();
  Real pi = Real::pi(p);
  s.Lc = (log(hypot(1L + y, x) / (4L * pi)) + pi + 3L / x).to_ld();
  return s;
}

struct Factors {
  long double x6, Lx, t;
};

DerivativeBounds combine(const Moments3& B, const Moments3& A, long double G, long double Lc, const Factors& f) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double tf = f.t / (4 * f.x6);
  DerivativeBounds d;
  long double dz = B.w1 * (0.5L + tf) + G * (A.w1 * tf + A.w0 * Lc * (0.5L + tf));
  long double dtB = (f.Lx * B.w1 - B.w2) / 4 + pi / 8 * B.w1 + 2 * B.w1 / f.x6;
  long double dtA = (f.Lx * A.w1 - A.w2) / 4 + pi / 8 * A.w1 + 2 * A.w1 / f.x6 +
                    A.w0 * (pi / 2 + 8 / f.x6) * (f.Lx + 8 / f.x6) / 4;
  d.Dz = static_cast<double>(dz);
  d.Dt = static_cast<double>(dtB + G * dtA);
  return d;
}

}  // namespace

void BarrierSpec::validate() const {
  if (!(y_lo < y_hi) || y_lo.sign() < 0 || y_hi > Real(1L)) throw BarrierSpecError("need 0 <= y_lo < y_hi <= 1");
  if (t_lo.sign() < 0 || t_hi < t_lo || t_hi > Real("0.5")) throw BarrierSpecError("need 0 <= t_lo <= t_hi <= 1/2");
  if (!(threshold.sign() > 0)) throw BarrierSpecError("threshold must be positive");
  if (!(conservative_factor >= 1.0)) throw BarrierSpecError("conservative_factor must be >= 1");
  if (!(step_fraction > 0 && step_fraction < 1)) throw BarrierSpecError("step_fraction must lie in (0, 1)");
  if (X < Real(200L)) throw BarrierSpecError("X must be >= 200");
}

DerivativeBounds derivative_bounds(const ModelParams& params, double bound_safety) {
  params.validate();
  if (!(params.x > Real(6L))) throw std::domain_error("derivative bounds need x > 6");
  const mpfr_prec_t p = std::max<mpfr_prec_t>(params.x.prec(), 128);
  mp::ScopedPrecision prec(p);
  PointScalars s = scalars_at(params.x, params.y, params.t);
  const long double t = params.t.to_ld();
  Moments3 B = weighted_sums(s.N, t, s.sigmaB);
  Moments3 A = weighted_sums(s.N, t, s.sigmaA);
  Factors f{(params.x - 6L).to_ld(), log(params.x / (4L * Real::pi(p))).to_ld(), t};
  DerivativeBounds d = combine(B, A, s.G, s.Lc, f);
  d.Dz *= bound_safety;
  d.Dt *= bound_safety;
  return d;
}

DerivativeBounds derivative_bounds_box(const Real& x_lo, const Real& x_hi, const Real& y_lo, const Real& y_hi,
                                       const Real& t_lo, const Real& t_hi, double bound_safety, int y_cells) {
  if (y_cells < 1) throw std::invalid_argument("y_cells must be >= 1");
  if (!(x_lo > Real(6L))) throw std::domain_error("derivative bounds need x > 6");
  const mpfr_prec_t p = std::max<mpfr_prec_t>(x_lo.prec(), 128);
  mp::ScopedPrecision prec(p);
  const Real xs[2] = {Real(x_lo, p), Real(x_hi, p)};
  const Real ts[2] = {Real(t_lo, p), Real(t_hi, p)};
  Real h = (Real(y_hi, p) - Real(y_lo, p)) / static_cast<long>(y_cells);

  // per grid row k: min sigmaB, min sigmaA (both at t_lo), max G, max Lc, common N
  const int K = y_cells + 1;
  std::vector<long double> sB(K, 1e300L), sA(K, 1e300L), G(K, 0), Lc(K, 0);
  long N = -1;
  for (int k = 0; k < K; ++k) {
    Real y = Real(y_lo, p) + h * static_cast<long>(k);
    if (k == y_cells) y = Real(y_hi, p);
    for (const Real& x : xs) {
      for (int ti = 0; ti < 2; ++ti) {
        PointScalars s = scalars_at(x, y, ts[ti]);
        if (N < 0) N = s.N;
        if (s.N != N) throw std::domain_error("N is not constant on the box");
        if (ti == 0) {
          sB[k] = std::min(sB[k], s.sigmaB);
          sA[k] = std::min(sA[k], s.sigmaA);
        }
        G[k] = std::max(G[k], s.G);
        Lc[k] = std::max(Lc[k], s.Lc);
      }
    }
  }
  const long double tt = t_hi.to_ld();
  Factors f{(xs[0] - 6L).to_ld(), log(xs[1] / (4L * Real::pi(p))).to_ld(), tt};
  std::vector<Moments3> WB(K), WA(K);
  for (int k = 0; k < K; ++k) {
    WB[k] = weighted_sums(N, tt, sB[k]);
    WA[k] = weighted_sums(N, tt, sA[k]);
  }
  DerivativeBounds out;
  for (int k = 0; k < y_cells; ++k) {
    // Re s_* grows with y, Re s_* - y and |gamma| fall with y
    DerivativeBounds d = combine(WB[k], WA[k + 1], G[k], Lc[k + 1], f);
    out.Dz = std::max(out.Dz, d.Dz);
    out.Dt = std::max(out.Dt, d.Dt);
  }
  out.Dz *= bound_safety;
  out.Dt *= bound_safety;
  return out;
}

long mesh_size(double Dz, double expected_min, double threshold, double conservative_factor) {
  if (!(Dz > 0)) throw std::invalid_argument("Dz must be positive");
  const double room = (expected_min - threshold) / conservative_factor;
  if (!(room > 0)) throw std::invalid_argument("expected minimum is below the threshold");
  return std::max<long>(1, static_cast<long>(std::ceil(Dz / (2 * room))));
}

Mesh mesh_rectangle(const BarrierSpec& spec, long n) {
  if (n < 1) throw std::invalid_argument("mesh needs n >= 1");
  const mpfr_prec_t p = std::max<mpfr_prec_t>(spec.X.prec(), 128);
  mp::ScopedPrecision prec(p);
  Real x0(spec.X, p), x1 = Real(spec.X, p) + 1L;
  const Real cx[5] = {x0, x1, x1, x0, x0};
  const Real cy[5] = {spec.y_lo, spec.y_lo, spec.y_hi, spec.y_hi, spec.y_lo};
  Mesh m;
  m.n = n;
  m.points.reserve(static_cast<size_t>(4 * n));
  for (int e = 0; e < 4; ++e) {
    Real dx = (cx[e + 1] - cx[e]) / n, dy = (cy[e + 1] - cy[e]) / n;
    for (long j = 0; j < n; ++j) m.points.push_back({cx[e] + dx * j, cy[e] + dy * j});
  }
  return m;
}

Mesh mesh_rectangle(const BarrierSpec& spec, double Dz, double expected_min) {
  return mesh_rectangle(spec, mesh_size(Dz, expected_min, spec.threshold.to_double(), spec.conservative_factor));
}

MeshTooCoarse::MeshTooCoarse(size_t i)
    : std::runtime_error("mesh too coarse: argument jump >= pi/2 after point " + std::to_string(i)), index(i) {}

namespace {

double arg_step(const Complex& a, const Complex& b) { return arg(conj(a) * b).to_double(); }

}  // namespace

WindingResult winding_number(const std::vector<Complex>& values) {
  if (values.empty()) throw std::invalid_argument("winding number of an empty polygon");
  for (const auto& v : values)
    if (v.re().is_zero() && v.im().is_zero()) throw std::domain_error("polygon passes through zero");
  WindingResult w;
  double sum = 0;
  const size_t m = values.size();
  for (size_t j = 0; j < m; ++j) {
    double d = arg_step(values[j], values[(j + 1) % m]);
    if (std::fabs(d) >= std::numbers::pi / 2) throw MeshTooCoarse(j);
    w.max_jump = std::max(w.max_jump, std::fabs(d));
    sum += d;
  }
  w.raw = sum / (2 * std::numbers::pi);
  w.winding = std::lround(w.raw);
  if (std::fabs(w.raw - static_cast<double>(w.winding)) > 1e-6)
    throw std::domain_error("winding sum not within 1e-6 of an integer");
  return w;
}

double worst_corner_budget(const BarrierSpec& spec, const Real& t, double bound_safety, mpfr_prec_t bits,
                           bool lower_corners_only) {
  mp::ScopedPrecision prec(bits);
  double worst = 0;
  for (int c = 0; c < 4; ++c) {
    if (lower_corners_only && c >= 2) break;
    Real x = (c % 2 == 0) ? Real(spec.X, bits) : Real(spec.X, bits) + 1L;
    Real y = c < 2 ? Real(spec.y_lo, bits) : Real(spec.y_hi, bits);
    ModelParams P{x, y, Real(t, bits)};
    RSTerms r = compute_rs_terms(P);
    ErrorBounds e = compute_error_bounds(P, r, bound_safety);
    worst = std::max(worst, (e.eA + e.eB + e.eC0).to_double());
  }
  return worst;
}

namespace {

struct Evaluator {
  const StoredSums& sums;
  long fallbacks = 0;

  Complex operator()(const MeshPoint& q) {
    bool fast = true;
    Complex v = fast_or_direct(sums, q.x, q.y, &fast);
    if (!fast) ++fallbacks;
    return v;
  }
};

std::vector<Complex> evaluate_all(const StoredSums& sums, const std::vector<MeshPoint>& pts, int threads,
                                  long& fallbacks) {
  std::vector<Complex> out(pts.size());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(pts.size())));
  std::vector<long> fb(threads, 0);
  auto work = [&](int k) {
    mp::init_thread();
    Evaluator ev{sums};
    for (size_t i = k; i < pts.size(); i += threads) out[i] = ev(pts[i]);
    fb[k] = ev.fallbacks;
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work, k);
    for (auto& th : pool) th.join();
  }
  for (long v : fb) fallbacks += v;
  return out;
}

// Inserts midpoints between neighbours whose argument jump is >= pi/2.
void refine_between(const MeshPoint& a, const Complex& va, const MeshPoint& b, const Complex& vb, int depth,
                    Evaluator& ev, std::vector<Complex>& out, long& evals, size_t where) {
  if (std::fabs(arg_step(va, vb)) < std::numbers::pi / 2) return;
  if (depth == 0) throw MeshTooCoarse(where);
  MeshPoint mid{(a.x + b.x) / 2L, (a.y + b.y) / 2L};
  Complex vm = ev(mid);
  ++evals;
  refine_between(a, va, mid, vm, depth - 1, ev, out, evals, where);
  out.push_back(vm);
  refine_between(mid, vm, b, vb, depth - 1, ev, out, evals, where);
}

}  // namespace

WindingReport adaptive_t_schedule(const BarrierSpec& spec, const BarrierRunOptions& opts) {
  spec.validate();
  const auto t_start = Clock::now();
  const mpfr_prec_t bits = opts.bits;
  mp::ScopedPrecision prec(bits);
  WindingReport rep;
  rep.E = opts.E;
  rep.bits = bits;
  rep.step_fraction = spec.step_fraction;
  rep.conservative_factor = spec.conservative_factor;

  Real X(spec.X, bits);
  long N = rs_cutoff(X, Real(spec.t_lo, bits));
  if (rs_cutoff(X + 1L, Real(spec.t_hi, bits)) != N) throw BarrierSpecError("N is not constant on the barrier box");
  rep.N = N;
  const double thr = spec.threshold.to_double();

  // threshold invariant at the four corners
  double lower = worst_corner_budget(spec, spec.t_lo, opts.bound_safety, bits, true);
  rep.initial_budget = std::max(lower, worst_corner_budget(spec, spec.t_lo, opts.bound_safety, bits, false));
  if (!(rep.initial_budget <= thr))
    throw BarrierSpecError("threshold " + spec.threshold.str(6) + " below the error budget " +
                           std::to_string(rep.initial_budget));
  const bool lower_only = lower >= rep.initial_budget;

  TableauAnchor anchor{X + Real("0.5", bits), (Real(spec.y_lo, bits) + Real(spec.y_hi, bits)) / 2L};
  TableauCache cache(opts.cache_dir);
  TaylorMoments moments = cache.get_or_build(anchor, N, opts.E, bits);

  std::mt19937_64 rng(opts.seed);
  Real t(spec.t_lo, bits);
  const Real t_hi(spec.t_hi, bits);

  // coarse pass for the first expected minimum
  double expected;
  {
    StoredSums s0 = build_stored_sums(moments, t);
    Mesh coarse = mesh_rectangle(spec, 16L);
    long fb = 0;
    auto v = evaluate_all(s0, coarse.points, opts.threads, fb);
    expected = 1e300;
    for (auto& z : v) expected = std::min(expected, abs(z).to_double());
  }
  if (!(expected > thr)) {
    rep.failure = "coarse mesh already within the threshold at t = " + t.str(8);
    rep.seconds = seconds_since(t_start);
    return rep;
  }
  double h = 0;  // width of the derivative box beyond t; 0 on the first pass

  for (;;) {
    const auto step_start = Clock::now();
    TStep st;
    st.t = t;
    StoredSums sums = build_stored_sums(moments, t);
    Real t_end = min(t + Real(h), t_hi);
    DerivativeBounds D = derivative_bounds_box(X, X + 1L, spec.y_lo, spec.y_hi, t, t_end, opts.bound_safety);
    if (h == 0 && t < t_hi) {
      // size the box from a point-in-time estimate, then redo the bounds over it
      double dt0 = spec.step_fraction * (expected - thr) * (1 - 1 / spec.conservative_factor) / D.Dt;
      h = 1.5 * dt0;
      t_end = min(t + Real(h), t_hi);
      D = derivative_bounds_box(X, X + 1L, spec.y_lo, spec.y_hi, t, t_end, opts.bound_safety);
    }
    st.Dz = D.Dz;
    st.Dt = D.Dt;

    std::vector<Complex> values;
    Mesh mesh;
    double m = 0, margin0 = 0;
    for (int attempt = 0;; ++attempt) {
      mesh = mesh_rectangle(spec, D.Dz, expected);
      long fb = 0;
      auto raw = evaluate_all(sums, mesh.points, opts.threads, fb);
      rep.direct_fallbacks += fb;
      st.evaluations = static_cast<long>(raw.size());
      Evaluator ev{sums};
      values.clear();
      values.reserve(raw.size());
      try {
        for (size_t j = 0; j < raw.size(); ++j) {
          values.push_back(raw[j]);
          size_t k = (j + 1) % raw.size();
          refine_between(mesh.points[j], raw[j], mesh.points[k], raw[k], opts.max_refine_depth, ev, values,
                         st.evaluations, j);
        }
      } catch (const MeshTooCoarse& e) {
        rep.failure = std::string(e.what()) + " at t = " + t.str(8);
        break;
      }
      rep.direct_fallbacks += ev.fallbacks;
      m = 1e300;
      for (auto& z : values) m = std::min(m, abs(z).to_double());
      margin0 = m - thr - D.Dz / (2.0 * static_cast<double>(mesh.n));
      if (margin0 > 0 || attempt == 3 || !(m > thr)) break;
      expected = thr + (m - thr) * 0.9;  // finer mesh and retry
    }
    st.mesh_n = mesh.n;
    st.min_abs_f = m;
    if (!rep.failure.empty()) {
      rep.t_steps.push_back(st);
      break;
    }

    WindingResult w;
    try {
      w = winding_number(values);
    } catch (const std::exception& e) {
      rep.failure = std::string(e.what()) + " at t = " + t.str(8);
      rep.t_steps.push_back(st);
      break;
    }
    st.winding = w.winding;
    st.winding_raw = w.raw;

    for (int k = 0; k < opts.direct_probes_per_step; ++k) {
      const auto& q = mesh.points[std::uniform_int_distribution<size_t>(0, mesh.points.size() - 1)(rng)];
      ModelParams P{q.x, q.y, t};
      Complex direct = compute_ft(P, compute_rs_terms(P));
      bool fast = true;
      Complex v = fast_or_direct(sums, q.x, q.y, &fast);
      rep.max_probe_rel_diff = std::max(rep.max_probe_rel_diff, (abs(v - direct) / abs(direct)).to_double());
      ++rep.direct_probes;
    }

    st.error_budget = worst_corner_budget(spec, t, opts.bound_safety, bits, lower_only);

    double dt = 0;
    if (t < t_hi && margin0 > 0) {
      dt = spec.step_fraction * margin0 / D.Dt;
      double room = (t_end - t).to_double();
      st.t_next = dt >= room ? t_end : t + Real(dt);
      dt = (st.t_next - t).to_double();
    } else {
      st.t_next = t;
    }
    st.margin = margin0 - D.Dt * dt;
    st.cond_ok = st.margin > 0 && st.error_budget <= thr;
    st.seconds = seconds_since(step_start);
    rep.t_steps.push_back(st);
    if (opts.on_step) opts.on_step(st);

    if (st.winding != 0) {
      rep.failure = "winding number " + std::to_string(st.winding) + " at t = " + t.str(8);
      break;
    }
    if (!st.cond_ok) {
      rep.failure = "verification failed at t = " + t.str(8) + ": min|f| " + std::to_string(m) +
                    (st.error_budget > thr ? ", error budget above threshold" : ", condition not met");
      break;
    }
    if (!(st.t_next > t)) break;  // t == t_hi
    expected = m;
    h = 2 * dt;
    t = st.t_next;
    if (!(t < t_hi)) break;
  }
  if (rep.failure.empty()) {
    // the last interval ends at t_hi; its budget is checked there too
    double end_budget = worst_corner_budget(spec, t_hi, opts.bound_safety, bits, lower_only);
    if (end_budget > thr) rep.failure = "error budget above threshold at t_hi";
  }
  rep.verified = rep.failure.empty();
  rep.seconds = seconds_since(t_start);
  return rep;
}

namespace {

std::vector<int> primes_up_to(int n) {
  std::vector<int> out;
  for (int p = 2; p <= n; ++p) {
    bool prime = true;
    for (int d = 2; d * d <= p; ++d)
      if (p % d == 0) prime = false;
    if (prime) out.push_back(p);
  }
  return out;
}

}  // namespace

double euler_product_abs(const Real& x, int prime_cut) {
  mp::ScopedPrecision prec(std::max<mpfr_prec_t>(x.prec(), 128));
  double logabs = 0;
  Real two_pi = 2L * Real::pi();
  for (int p : primes_up_to(prime_cut)) {
    // reduce in MPFR first; the raw phase is ~x
    Real ph = x / 2L * log(Real(static_cast<long>(p)));
    ph = ph - floor(ph / two_pi) * two_pi;
    const double phase = ph.to_double();
    const double ip = 1.0 / p;
    logabs -= 0.5 * std::log(1 - 2 * ip * std::cos(phase) + ip * ip);
  }
  return std::exp(logabs);
}

std::vector<double> fractional_parts(const Real& X, const std::vector<int>& primes) {
  mp::ScopedPrecision prec(std::max<mpfr_prec_t>(X.prec(), 192));
  std::vector<double> out;
  Real pi = Real::pi();
  for (int p : primes) out.push_back(frac(X / (4L * pi) * log(Real(static_cast<long>(p)))).to_double());
  return out;
}

std::vector<LocationCandidate> barrier_location_score(const Real& X_base, long q_lo, long q_hi, int prime_cut,
                                                      double threshold, bool rank, mpfr_prec_t bits) {
  if (prime_cut < 2 || prime_cut > 29) throw std::invalid_argument("prime_cut must lie in [2, 29]");
  const std::vector<int> primes = primes_up_to(prime_cut);
  std::vector<long double> theta, lp;
  {
    mp::ScopedPrecision prec(std::max<mpfr_prec_t>(bits, 192));
    Real two_pi = 2L * Real::pi();
    for (int p : primes) {
      Real l = log(Real(static_cast<long>(p)));
      Real ph = X_base / 2L * l;
      ph = ph - floor(ph / two_pi) * two_pi;
      theta.push_back(ph.to_ld());
      lp.push_back(l.to_ld());
    }
  }
  std::vector<LocationCandidate> out;
  for (long q = q_lo; q <= q_hi; ++q) {
    double worst = 1e300;
    for (int k = -1; k <= 1; ++k) {
      const long double shift = static_cast<long double>(q) + 0.5L * k;
      long double logabs = 0;
      for (size_t i = 0; i < primes.size(); ++i) {
        const long double ph = theta[i] + shift / 2 * lp[i];
        const long double ip = 1.0L / primes[i];
        logabs -= 0.5L * std::log(1 - 2 * ip * std::cos(ph) + ip * ip);
      }
      worst = std::min(worst, static_cast<double>(std::exp(logabs)));
    }
    if (worst > threshold) out.push_back({q, worst, -1});
  }
  if (rank) {
    mp::ScopedPrecision prec(bits);
    for (auto& c : out) {
      double f0 = 1e300;
      for (int k = -1; k <= 1; ++k) {
        ModelParams P{Real(X_base, bits) + Real(static_cast<long>(c.q)) + Real(0.5 * k), Real(1L), Real(0L)};
        f0 = std::min(f0, abs(compute_ft(P, compute_rs_terms(P))).to_double());
      }
      c.f0_min = f0;
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LocationCandidate& a, const LocationCandidate& b) { return a.f0_min > b.f0_min; });
  }
  return out;
}

}  // namespace dbn
