#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dbn/rs.hpp"
#include "dbn/zeros.hpp"
#include "support.hpp"

using namespace dbn;
using testsupport::Gen;

namespace {

double spacing_at(double x) { return 4 * std::numbers::pi / std::log(x / (4 * std::numbers::pi)); }

}  // namespace

TEST_CASE("g at 4pi, monotonicity and the t shift") {
  mp::ScopedPrecision prec(128);
  const Real four_pi = 4L * Real::pi();
  for (const char* t : {"0", "0.2", "0.5"}) CHECK(abs(g_function(four_pi, Real(t)) - Real("0.375")) < Real("1e-35"));
  CHECK_THROWS_AS(g_function(Real(12L), Real("0.2")), std::domain_error);

  Gen g(31);
  for (int k = 0; k < 100; ++k) {
    const Real x(g.uniform(4 * std::numbers::pi, 1e6));
    const Real t(g.uniform(0, 0.5));
    CHECK(g_function(x + 1L, t) > g_function(x, t));
    CHECK(g_derivative(x, t).sign() > 0);
    const Real shift = g_function(x, t) - g_function(x, Real(0L));
    CHECK(abs(shift - t / 16L * log(x / four_pi)) < Real("1e-30"));
    // the averaged count uses 7/8 in place of 11/8
    const Real u = x / four_pi;
    const Real g78 = u * log(u) - u + Real("0.875") + t / 16L * log(u);
    CHECK(abs(g_function(x, t) - g78 - Real("0.5")) < Real("1e-30"));
  }
}

TEST_CASE("lattice points invert g") {
  mp::ScopedPrecision prec(128);
  CHECK(xn_min_index(Real("0.2")) == 2);
  CHECK_THROWS_AS(solve_xn(1, Real("0.2")), std::invalid_argument);
  Gen g(8);
  for (int k = 0; k < 100; ++k) {
    const long n = g.integer(2, 1000000);
    const Real t(g.uniform(0, 0.5));
    const Real x = solve_xn(n, t);
    CHECK(abs(g_function(x, t) - Real(n)) <= Real("1e-20"));
  }
  const Real x100 = solve_xn(100, Real("0.2"));
  CHECK(abs(g_function(x100, Real("0.2")) - Real(100L)) <= Real("1e-20"));

  const double a = solve_xn(10000, Real("0.2")).to_double(), b = solve_xn(10001, Real("0.2")).to_double();
  CHECK(std::fabs((b - a) / spacing_at(a) - 1) < 0.1);

  for (long n : {10L, 100L, 5000L}) CHECK(solve_xn(n, Real("0.4")) < solve_xn(n, Real("0.1")));
}

TEST_CASE("the A + B detector is real on the real axis") {
  Gen g(12);
  for (int k = 0; k < 30; ++k) {
    mp::ScopedPrecision prec(128);
    ModelParams P{Real(g.uniform(200, 5000)), Real(0L), Real(g.uniform(0.01, 0.5))};
    RSTerms r = compute_rs_terms(P);
    Complex v = ab_normalized(P, r, compute_ft(P, r));
    CHECK(abs(v.im()) <= Real("1e-30") * (abs(v) + Real(1L)));
  }
}

TEST_CASE("zeros near x = 295 at t = 0.5: count, lattice and oracle") {
  const Real t("0.5");
  const auto zs = locate_real_zeros(t, Real(290L), Real(300L));
  REQUIRE(zs.size() >= 1);
  const double expect = (g_function(Real(300L), t) - g_function(Real(290L), t)).to_double();
  CHECK(std::fabs(zs.size() - expect) <= 2);
  for (const auto& z : zs) {
    CHECK(z.oracle_confirmed);
    CHECK(z.bracket_lo <= z.x);
    CHECK(z.x <= z.bracket_hi);
    const long n = std::lround(g_function(z.x, t).to_double());
    const double gap = std::fabs((z.x - solve_xn(n, t)).to_double());
    CHECK(gap <= 0.5 * spacing_at(z.x.to_double()));
  }
  CHECK_THROWS_AS(locate_real_zeros(t, Real(150L), Real(300L)), std::invalid_argument);
  CHECK_THROWS_AS(locate_real_zeros(Real("0.6"), Real(250L), Real(300L)), std::invalid_argument);
}

TEST_CASE("zeros drift left as t grows") {
  const auto z1 = locate_real_zeros(Real("0.45"), Real(290L), Real(300L));
  const auto z2 = locate_real_zeros(Real("0.5"), Real(290L), Real(300L));
  REQUIRE(z1.size() == z2.size());
  REQUIRE(!z1.empty());
  const double v = -std::numbers::pi / 4 * 0.05;
  double mean = 0;
  for (size_t i = 0; i < z1.size(); ++i) {
    const double d = (z2[i].x - z1[i].x).to_double();
    CHECK(d < 0);
    mean += d / z1.size();
  }
  CHECK(std::fabs(mean / v - 1) < 0.5);
}

TEST_CASE("zero counts below 200 from the oracle") {
  const Real t("0.5");
  const ZeroCount c = count_zeros(Real(60L), t);
  REQUIRE(c.located.has_value());
  CHECK(std::fabs(*c.located - c.estimate.to_double()) <= 2);
  CHECK_FALSE(count_zeros(Real(60L), t, false).located.has_value());
  CHECK_FALSE(count_zeros(Real(5000L), t).located.has_value());
  // unit windows hold few zeros
  const auto ch = oracle_sign_changes(t, 40, 60, 0.25);
  for (int X = 40; X < 60; ++X) {
    int n = 0;
    for (auto [a, b] : ch) n += (a >= X && b <= X + 1);
    CHECK(n <= 10);
  }
}
