#include <doctest.h>

#include <cmath>

#include "dbn/oracle.hpp"
#include "dbn/rs.hpp"
#include "dbn/special.hpp"
#include "support.hpp"

using namespace dbn;
using testsupport::Gen;
using testsupport::rel_err;

namespace {

ModelParams mp_of(double x, double y, double t) { return {Real(x), Real(y), Real(t)}; }

}  // namespace

TEST_CASE("y = 0 gives kappa = 0 and |gamma| = 1") {
  mp::ScopedPrecision prec(128);
  RSTerms r = compute_rs_terms(ModelParams::from_strings("1234.5", "0", "0.3"));
  CHECK(r.kappa.re().is_zero());
  CHECK(r.kappa.im().is_zero());
  CHECK(abs(abs(r.gamma) - 1L) < Real("1e-36"));
}

TEST_CASE("cutoff N at the table and barrier locations") {
  mp::ScopedPrecision prec(128);
  CHECK(rs_cutoff(Real("2000000129093"), Real("0.198")) == 398942);
  CHECK(rs_cutoff(Real("60000083951.5"), Real("0.2")) == 69098);
  RSTerms r = compute_rs_terms(ModelParams::from_strings("60000083951.5", "0.2", "0.2"));
  CHECK(r.N == 69098);
  CHECK(floor(r.a).to_long_floor() == r.N);
}

TEST_CASE("model parameter region") {
  mp::ScopedPrecision prec(128);
  CHECK_THROWS_AS(compute_rs_terms(mp_of(150, 0.2, 0.2)), std::domain_error);
  CHECK_THROWS_AS(compute_rs_terms(mp_of(300, 1.5, 0.2)), std::domain_error);
  CHECK_THROWS_AS(compute_rs_terms(mp_of(300, 0.2, 0.6)), std::domain_error);
  CHECK_NOTHROW(compute_rs_terms(mp_of(300, 0.2, 0)));
}

TEST_CASE("single-term sums give 1 + gamma") {
  mp::ScopedPrecision prec(128);
  ModelParams P = mp_of(250, 0.3, 0);
  RSTerms r = compute_rs_terms(P);
  r.N = 1;
  Complex f = compute_ft(P, r);
  CHECK(rel_err(f, Complex(Real(1L)) + r.gamma) < 1e-36);
}

TEST_CASE("C0 values") {
  mp::ScopedPrecision prec(128);
  Real pi = Real::pi();
  Complex z = (polar(Real(1L), 3L * pi / 8L) - Complex(Real(0L), sqrt(Real(2L)))) / Real(2L);
  CHECK(rel_err(c0(Real(0L)), z) < 1e-35);
  for (int k = 0; k <= 200; ++k) {
    Real p = Real(-1L) + Real(k) / 100L;
    CHECK(abs(c0(p)) <= Real("0.5"));
  }
}

TEST_CASE("C0 is continuous across the series switch") {
  mp::ScopedPrecision prec(128);
  for (const char* c : {"0.5", "-0.5"}) {
    Real p0(c);
    for (const char* d : {"0.0009999", "-0.0009999"}) {
      Real in = p0 + Real(d);
      Real out = p0 + Real(d) * Real("1.0002");
      CHECK(abs(c0(in) - c0(out)) < Real("1e-6"));
    }
    Complex at = c0(p0);
    CHECK(at.re().is_finite());
    CHECK(abs(at - c0(p0 + Real("1e-12"))) < Real("1e-10"));
  }
}

TEST_CASE("theorem inequality against the oracle at (250, 0, 0.3)") {
  ApproxOptions o;
  o.precision.working_bits = 192;
  mp::ScopedPrecision prec(192);
  ModelParams P = ModelParams::from_strings("250", "0", "0.3");
  ApproxResult a = approximate(P, o);
  OracleResult h = ht_ratio(P.x, P.y, P.t, QuadratureSpec::for_point(250));
  mp::ScopedPrecision p2(192);
  Real plain = abs(h.value - a.f);
  Real refined = abs(h.value - a.f + a.Ct_over_Bt);
  CHECK(plain <= a.eA + a.eB + a.eC0);
  CHECK(refined <= a.eA + a.eB + a.eC);
  CHECK(refined < plain);
  CHECK(a.eC <= a.eC0);
}

TEST_CASE("refined residual beats the plain one on 25 sample x") {
  ApproxOptions o;
  o.precision.working_bits = 160;
  int better = 0;
  for (int k = 0; k < 25; ++k) {
    double x = 250 + 0.37 * k;
    ModelParams P = mp_of(x, 0, 0.3);
    ApproxResult a = approximate(P, o);
    OracleResult h = ht_ratio(P.x, P.y, P.t, QuadratureSpec::for_point(x));
    mp::ScopedPrecision p2(160);
    Real plain = abs(h.value - a.f);
    Real refined = abs(h.value - a.f + a.Ct_over_Bt);
    CHECK(plain <= a.eA + a.eB + a.eC0);
    CHECK(refined <= a.eA + a.eB + a.eC);
    if (refined < plain) ++better;
  }
  CHECK(better >= 20);
}

TEST_CASE("non-vanishing test") {
  ApproxOptions o;
  NonvanishingResult far = nonvanishing_test(ModelParams::from_strings("60000083951.5", "1", "0"), o);
  CHECK(far.passed);
  CHECK(abs(far.approx.f) > Real(4L));
  // agrees with the oracle where it is conclusive
  NonvanishingResult mid = nonvanishing_test(mp_of(300, 0.4, 0.2), o);
  OracleResult h = ht_ratio(Real(300L), Real("0.4"), Real("0.2"), QuadratureSpec::for_point(300));
  if (mid.passed) CHECK(abs(h.value) > h.error);
  CHECK(mid.passed == (mid.margin.sign() > 0));
  // a point whose budget exceeds |f| is inconclusive
  bool saw_inconclusive = false;
  for (int k = 0; k < 200 && !saw_inconclusive; ++k) {
    NonvanishingResult r = nonvanishing_test(mp_of(200 + 0.25 * k, 0, 0.1), o);
    if (r.approx.eC0 > abs(r.approx.f)) {
      CHECK_FALSE(r.passed);
      saw_inconclusive = true;
    }
  }
  CHECK(saw_inconclusive);
}

TEST_CASE("closed form of estimate (vi) is not a bound everywhere at small x") {
  // Recorded counterexample: with a - N small the 1/(a - 0.865) term of the
  // definitional value exceeds the 1/(N - 0.125) used by the closed form.
  mp::ScopedPrecision prec(128);
  ModelParams P = ModelParams::from_strings("201.108", "0.0903326", "0.234038");
  RSTerms r = compute_rs_terms(P);
  ErrorBounds b = compute_error_bounds(P, r, 1.0);
  CHECK(b.eC0 > b.eC0_closed);
  CHECK(b.eC0 <= b.eC0_theorem);
}

TEST_CASE("property: RSTerms bounds at 1000 random region points") {
  mp::ScopedPrecision prec(128);
  Gen g(21);
  for (int i = 0; i < 1000; ++i) {
    ModelParams P = mp_of(g.log_uniform(200, 1e12), g.uniform(0, 1), g.uniform(0, 0.5));
    RSTerms r = compute_rs_terms(P);
    CHECK_NOTHROW(check_rs_invariants(P, r));
  }
}

TEST_CASE("property: bound ordering") {
  mp::ScopedPrecision prec(128);
  Gen g(22);
  const double safety = 1.000001;
  for (int i = 0; i < 300; ++i) {
    ModelParams P = mp_of(g.log_uniform(200, 1e6), g.uniform(0, 1), g.uniform(0, 0.5));
    RSTerms r = compute_rs_terms(P);
    ErrorBounds b = compute_error_bounds(P, r, safety);
    CHECK(b.eA + b.eB <= b.eAB_closed * Real(safety));
    CHECK(b.eA <= b.eA_closed * Real(safety));
    CHECK(b.eB <= b.eB_closed * Real(safety));
    CHECK(b.eC0 <= b.eC0_theorem * Real(safety));
    CHECK(b.eC <= b.eC0);
  }
}

TEST_CASE("property: A + B is real on the real axis") {
  mp::ScopedPrecision prec(128);
  Gen g(23);
  for (int i = 0; i < 30; ++i) {
    ModelParams P = mp_of(g.uniform(200, 5000), 0, g.uniform(0, 0.5));
    RSTerms r = compute_rs_terms(P);
    Complex f = compute_ft(P, r);
    Complex ab = ab_normalized(P, r, f);
    CHECK(abs(ab.im()) <= abs(f) * Real("1e-30"));
  }
}
