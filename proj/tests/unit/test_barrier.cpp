#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dbn/barrier.hpp"
#include "support.hpp"

using namespace dbn;
using testsupport::Gen;

namespace {

// N = 3000 on the whole box
BarrierSpec small_spec(const char* t_lo, const char* t_hi) {
  BarrierSpec s;
  s.X = Real("113135054.5", 128);
  s.t_lo = Real(t_lo);
  s.t_hi = Real(t_hi);
  s.threshold = Real("0.01");
  return s;
}

Complex ft(const Real& x, const Real& y, const Real& t) {
  ModelParams P{x, y, t};
  return compute_ft(P, compute_rs_terms(P));
}

std::vector<Complex> circle(int m, int turns, double r = 1.0) {
  std::vector<Complex> v;
  for (int j = 0; j < m; ++j) {
    double a = 2 * std::numbers::pi * turns * j / m;
    v.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return v;
}

}  // namespace

TEST_CASE("winding number of simple polygons") {
  mp::ScopedPrecision p(128);
  CHECK(winding_number(circle(64, 1)).winding == 1);
  CHECK(winding_number(circle(64, -1)).winding == -1);
  CHECK(winding_number(circle(64, 2)).winding == 2);
  std::vector<Complex> constant(10, Complex(2.0, -1.0));
  WindingResult w = winding_number(constant);
  CHECK(w.winding == 0);
  CHECK(w.raw == 0.0);
  // off-centre circle that misses the origin
  auto shifted = circle(40, 1, 0.5);
  for (auto& z : shifted) z += Complex(2.0, 0.0);
  CHECK(winding_number(shifted).winding == 0);
}

TEST_CASE("winding number rejects coarse or degenerate input") {
  mp::ScopedPrecision p(128);
  CHECK_THROWS_AS(winding_number(circle(4, 1)), MeshTooCoarse);
  CHECK_THROWS_AS(winding_number({Complex(1.0, 0.0), Complex(0.0, 0.0)}), std::domain_error);
  try {
    winding_number(circle(3, 1));
  } catch (const MeshTooCoarse& e) {
    CHECK(e.index == 0);
  }
}

TEST_CASE("rectangle mesh is counterclockwise with spacing at most 1/n") {
  BarrierSpec s = small_spec("0.1", "0.1");
  for (long n : {1L, 7L, 50L}) {
    Mesh m = mesh_rectangle(s, n);
    REQUIRE(m.points.size() == static_cast<size_t>(4 * n));
    CHECK(m.points[0].x == s.X);
    CHECK(m.points[0].y == s.y_lo);
    double area2 = 0, worst = 0;
    for (size_t j = 0; j < m.points.size(); ++j) {
      const auto& a = m.points[j];
      const auto& b = m.points[(j + 1) % m.points.size()];
      double ax = (a.x - s.X).to_double(), bx = (b.x - s.X).to_double();
      area2 += ax * b.y.to_double() - bx * a.y.to_double();
      worst = std::max(worst, hypot(b.x - a.x, b.y - a.y).to_double());
    }
    CHECK(area2 / 2 == doctest::Approx(0.8).epsilon(1e-12));  // positive: counterclockwise
    CHECK(worst <= 1.0 / n + 1e-15);
  }
}

TEST_CASE("mesh size scales with Dz") {
  CHECK(mesh_size(100, 2.0, 0.5, 1.0) == 34);
  long n1 = mesh_size(1000, 4.3, 0.00125, 8);
  long n2 = mesh_size(2000, 4.3, 0.00125, 8);
  CHECK(std::abs(n2 - 2 * n1) <= 1);
  // doubling n halves the discrepancy bound
  CHECK(1000.0 / (2 * 2 * n1) == doctest::Approx(0.5 * 1000.0 / (2 * n1)));
  CHECK_THROWS(mesh_size(10, 0.001, 0.01, 2));
}

TEST_CASE("derivative bounds exceed finite differences") {
  mp::ScopedPrecision p(128);
  Gen g(5);
  BarrierSpec s = small_spec("0.1", "0.13");
  DerivativeBounds box = derivative_bounds_box(s.X, s.X + 1L, s.y_lo, s.y_hi, s.t_lo, s.t_hi);
  const Real h("1e-6");
  for (int k = 0; k < 10; ++k) {
    Real x = s.X + Real(g.uniform(0.01, 0.99));
    Real y(g.uniform(0.21, 0.99));
    Real t(g.uniform(0.1, 0.13));
    double fdz = (abs(ft(x + h, y, t) - ft(x - h, y, t)) / (2L * h)).to_double();
    double fdt = (abs(ft(x, y, t + h) - ft(x, y, t - h)) / (2L * h)).to_double();
    DerivativeBounds d = derivative_bounds(ModelParams{x, y, t});
    CHECK(d.Dz >= fdz);
    CHECK(d.Dt >= fdt);
    CHECK(box.Dz >= d.Dz);
    CHECK(box.Dt >= d.Dt);
  }
}

TEST_CASE("derivative bound shape") {
  mp::ScopedPrecision p(128);
  Real x("113135055");
  DerivativeBounds lo = derivative_bounds(ModelParams{x, Real("0.2"), Real("0.1")});
  DerivativeBounds hi = derivative_bounds(ModelParams{x, Real(1L), Real("0.1")});
  CHECK(hi.Dz <= lo.Dz);
  CHECK_THROWS(derivative_bounds(ModelParams{Real(5L), Real("0.2"), Real("0.1")}));
  CHECK_THROWS_AS(derivative_bounds_box(Real(5L), Real(6L), Real("0.2"), Real(1L), Real(0L), Real(0L)),
                  std::domain_error);
}

TEST_CASE("derivative bound at t = 0 uses unit b_n") {
  // with b_n = 1 and Re s_* = (1 + y)/2 the B part of Dz is sum n^{-(1+y)/2} log n / 2
  mp::ScopedPrecision p(128);
  Real x(1000L), y(1L);
  ModelParams P{x, y, Real(0L)};
  RSTerms r = compute_rs_terms(P);
  DerivativeBounds d = derivative_bounds(P, 1.0);
  long double bpart = 0, a0 = 0;
  for (long n = 1; n <= r.N; ++n) {
    bpart += std::log((long double)n) / 2 * std::pow((long double)n, -1.0L);
    a0 += 1.0L;  // n^y / n^{Re s_*} = 1 at y = 1
  }
  long double G = abs(r.gamma).to_ld();
  long double Lc = (log(hypot(Real(2L), x) / (4L * Real::pi())) + Real::pi() + 3L / x).to_ld();
  CHECK(d.Dz == doctest::Approx(static_cast<double>(bpart + G * a0 * Lc / 2)).epsilon(1e-12));
}

TEST_CASE("small barrier run verifies with winding number zero") {
  BarrierRunOptions o;
  o.E = 30;
  o.direct_probes_per_step = 1;
  WindingReport r = adaptive_t_schedule(small_spec("0.12", "0.13"), o);
  CHECK(r.verified);
  CHECK(r.failure.empty());
  CHECK(r.N == 3000);
  REQUIRE(!r.t_steps.empty());
  CHECK(r.t_steps.front().t == Real("0.12"));
  CHECK(r.t_steps.back().t_next == Real("0.13"));
  for (size_t k = 0; k < r.t_steps.size(); ++k) {
    const auto& st = r.t_steps[k];
    CHECK(st.winding == 0);
    CHECK(std::fabs(st.winding_raw) < 1e-6);
    CHECK(st.cond_ok);
    CHECK(st.margin > 0);
    CHECK(st.error_budget <= 0.01);
    // intervals chain without gaps
    if (k > 0) CHECK(st.t == r.t_steps[k - 1].t_next);
    // the advance condition itself
    CHECK(st.min_abs_f - 0.01 - st.Dz / (2.0 * st.mesh_n) - st.Dt * (st.t_next - st.t).to_double() > 0);
  }
  CHECK(r.max_probe_rel_diff < 1e-12);
}

TEST_CASE("degenerate t range checks one rectangle") {
  BarrierRunOptions o;
  o.E = 30;
  WindingReport r = adaptive_t_schedule(small_spec("0.12", "0.12"), o);
  CHECK(r.verified);
  REQUIRE(r.t_steps.size() == 1);
  CHECK(r.t_steps[0].t_next == r.t_steps[0].t);
}

TEST_CASE("spec invariants are enforced before a run") {
  BarrierSpec s = small_spec("0.12", "0.13");
  s.threshold = Real("0.0001");  // below the error budget at this height
  CHECK_THROWS_AS(adaptive_t_schedule(s), BarrierSpecError);
  s = small_spec("0.13", "0.12");
  CHECK_THROWS_AS(s.validate(), BarrierSpecError);
  s = small_spec("0.1", "0.1");
  s.X = Real("113172745.8");  // N changes inside [X, X + 1]
  s.threshold = Real("0.05");
  CHECK_THROWS_AS(adaptive_t_schedule(s), BarrierSpecError);
}

TEST_CASE("property: fast mesh values match direct values") {
  mp::ScopedPrecision p(128);
  BarrierSpec s = small_spec("0.12", "0.12");
  TableauAnchor an{s.X + Real("0.5"), Real("0.6")};
  StoredSums sums = build_stored_sums(an, Real("0.12"), 3000, 30, 128);
  Mesh m = mesh_rectangle(s, 100);
  Gen g(77);
  // 5% subsample
  for (int k = 0; k < 20; ++k) {
    const auto& q = m.points[static_cast<size_t>(g.integer(0, 399))];
    Complex fast = fast_eval(sums, eval_offsets(sums, q.x, q.y));
    CHECK(abs(fast - ft(q.x, q.y, Real("0.12"))).to_double() <= 1e-12);
  }
}

TEST_CASE("fractional parts at the barrier location") {
  // mpmath at 40 digits
  auto f = fractional_parts(Real("60000083951.5", 192), {2, 3, 5, 7, 11});
  const double expect[] = {0.9621704547794072, 0.9329983323539324, 0.9899779898819011, 0.9861436850244485,
                           0.9709893592419027};
  for (int k = 0; k < 5; ++k) CHECK(f[k] == doctest::Approx(expect[k]).epsilon(1e-12));
  auto half = fractional_parts(Real("0.5"), {2, 3});
  CHECK(half[0] == doctest::Approx(0.02757945001908145).epsilon(1e-12));
}

TEST_CASE("Euler product scan near a known shift") {
  auto c = barrier_location_score(Real("60000000000"), 83900, 84000, 29, 4.0, false);
  REQUIRE(c.size() == 1);
  CHECK(c[0].q == 83952);
  CHECK(c[0].euler_min == doctest::Approx(4.0161).epsilon(1e-4));
  double direct = 1e300;
  for (const char* x : {"60000083951.5", "60000083952", "60000083952.5"})
    direct = std::min(direct, euler_product_abs(Real(x, 192), 29));
  CHECK(direct == doctest::Approx(c[0].euler_min).epsilon(1e-9));
  CHECK_THROWS(barrier_location_score(Real("60000000000"), 1, 2, 31));
}
