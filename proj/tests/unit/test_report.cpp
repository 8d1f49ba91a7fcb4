#include <doctest.h>

#include <sstream>

#include "report.hpp"
#include "support.hpp"

using namespace dbn;
using report::ordered_json;

namespace {

WindingReport fake_barrier(const char* t_end, bool verified = true) {
  WindingReport r;
  r.verified = verified;
  if (!verified) r.failure = "winding 1 at t = 0.1";
  TStep a, b;
  a.t = Real("0");
  a.t_next = Real("0.1");
  b.t = Real("0.1");
  b.t_next = Real(t_end);
  r.t_steps = {a, b};
  return r;
}

RegionReport fake_region(bool passed) {
  RegionReport r;
  r.passed = passed;
  r.intervals.resize(4);
  if (!passed) r.failure = "interval 1 below Z";
  return r;
}

ClaimCResult fake_claim_c(bool nonvanishing) {
  ClaimCResult r;
  r.A = 1.9L;
  r.B = 0.07L;
  r.deviation = nonvanishing ? 0.98L : 1.2L;
  r.nonvanishing = nonvanishing;
  return r;
}

CertificateInputs barrier_inputs() {
  CertificateInputs in;
  in.t0 = "0.2";
  in.y0 = "0.2";
  in.X = "60000083951.5";
  in.rh_height_assumed = "30000041975.75";
  in.barrier = barrier_status(fake_barrier("0.2"), in.t0);
  in.claim_b = claim_b_status(fake_region(true));
  in.claim_c = claim_c_status(fake_claim_c(true));
  return in;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(s);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("exact lambda") {
  CHECK(exact_lambda("0.2", "0.2") == "0.22");
  CHECK(exact_lambda("0.198", "0.15492") == "0.2100001032");
  CHECK(exact_lambda("0.1", "0") == "0.1");
  CHECK(exact_lambda("1", "1") == "1.5");
  CHECK_THROWS_AS(exact_lambda("-0.2", "0.2"), std::invalid_argument);
  CHECK_THROWS_AS(exact_lambda("1e-3", "0.2"), std::invalid_argument);
  CHECK_THROWS_AS(exact_lambda("0.2.1", "0.2"), std::invalid_argument);
}

TEST_CASE("certificate issues with every hypothesis verified") {
  LambdaCertificate c = assemble_certificate(barrier_inputs());
  CHECK(c.issued);
  CHECK_FALSE(c.conditional);
  CHECK(c.lambda_bound == "0.22");
  CHECK(c.lambda_rounded == "0.22");
  CHECK(c.conclusion == "Lambda <= 0.22");
  CHECK(c.hypotheses.size() == 4);

  CertificateInputs high = barrier_inputs();
  high.rh_height_assumed = "1e11";
  LambdaCertificate u = assemble_certificate(high);
  CHECK(u.issued);
  CHECK(u.conditional);
  CHECK(u.conclusion == "Lambda <= 0.22 (conditional on RH to height X/2)");
}

TEST_CASE("tabulated first row is conditional and rounds to 0.21") {
  const Table1Row& row = table1_rows().front();
  CertificateInputs in = barrier_inputs();
  in.t0 = "0.198";
  in.y0 = "0.15492";
  in.X = row.X;
  in.rh_height_assumed = "1000000064547";
  in.barrier = barrier_status(fake_barrier("0.198"), in.t0);
  LambdaCertificate c = assemble_certificate(in);
  CHECK(c.issued);
  CHECK(c.conditional);
  CHECK(c.lambda_bound == "0.2100001032");
  CHECK(c.lambda_rounded == "0.21");
}

TEST_CASE("certificate refuses on a low RH height") {
  CertificateInputs in = barrier_inputs();
  in.rh_height_assumed = "30000041975.7";
  LambdaCertificate c = assemble_certificate(in);
  CHECK_FALSE(c.issued);
  CHECK(c.refusal.find("rh-height") == 0);
  CHECK(c.conclusion.empty());
  in.rh_height_assumed.clear();
  CHECK_FALSE(assemble_certificate(in).issued);
}

TEST_CASE("removing or breaking any hypothesis refuses") {
  for (int k = 0; k < 3; ++k) {
    CertificateInputs in = barrier_inputs();
    if (k == 0) in.barrier.reset();
    if (k == 1) in.claim_b.reset();
    if (k == 2) in.claim_c.reset();
    LambdaCertificate c = assemble_certificate(in);
    CHECK_FALSE(c.issued);
    CHECK(c.refusal.find("missing") != std::string::npos);
  }
  CertificateInputs in = barrier_inputs();
  in.barrier = barrier_status(fake_barrier("0.2", false), in.t0);
  CHECK_FALSE(assemble_certificate(in).issued);
  in = barrier_inputs();
  in.barrier = barrier_status(fake_barrier("0.19"), in.t0);
  CHECK_FALSE(assemble_certificate(in).issued);
  in = barrier_inputs();
  in.claim_b = claim_b_status(fake_region(false));
  CHECK_FALSE(assemble_certificate(in).issued);
  in = barrier_inputs();
  in.claim_c = claim_c_status(fake_claim_c(false));
  CHECK_FALSE(assemble_certificate(in).issued);
}

TEST_CASE("refusal is monotone in the hypotheses") {
  testsupport::Gen g(5);
  for (int trial = 0; trial < 64; ++trial) {
    CertificateInputs in = barrier_inputs();
    const int mask = trial & 7;
    if (mask & 1) in.barrier.reset();
    if (mask & 2) in.claim_b.reset();
    if (mask & 4) in.claim_c.reset();
    const bool low = g.uniform(0, 1) < 0.3;
    if (low) in.rh_height_assumed = "1000";
    CHECK(assemble_certificate(in).issued == (mask == 0 && !low));
  }
}

TEST_CASE("certificate json carries decimal strings") {
  ordered_json j = report::to_json(assemble_certificate(barrier_inputs()));
  CHECK(j["lambda_bound"].is_string());
  CHECK(j["issued"].get<bool>());
  CHECK(j["hypotheses"].size() == 4);
  mp::ScopedPrecision prec(128);
  ordered_json r = report::to_json(fake_barrier("0.2"));
  CHECK(r["t_steps"][1]["t_next"].is_string());
  CHECK(Real(r["t_steps"][1]["t_next"].get<std::string>()) == Real("0.2"));
  CHECK(report::dec(0.25) == "0.25");
  CHECK(report::dec(Real("1.5"), 5) == Real("1.5").str(5));
}

TEST_CASE("plot data c0p") {
  report::PlotGrid g;
  g.from = "0";
  g.to = "1";
  g.count = 41;
  const std::string a = report::plot_csv("c0p", g);
  CHECK(a == report::plot_csv("c0p", g));
  auto rows = parse_csv(a);
  REQUIRE(rows.size() == 42);
  CHECK(rows[0] == std::vector<std::string>{"p", "re", "im", "abs"});
  double mx = 0;
  for (size_t i = 1; i < rows.size(); ++i) mx = std::max(mx, std::stod(rows[i][3]));
  CHECK(mx <= 0.5 + 1e-15);
  CHECK(mx >= 0.5 - 1e-12);
  CHECK_THROWS_AS(report::plot_csv("nope", g), std::invalid_argument);
  g.count = 0;
  CHECK_THROWS_AS(report::plot_csv("c0p", g), std::invalid_argument);
}

TEST_CASE("plot data error split") {
  report::PlotGrid g;
  g.from = "1000";
  g.to = "5000";
  g.count = 9;
  auto rows = parse_csv(report::plot_csv("err-split", g));
  REQUIRE(rows.size() == 10);
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][4] == "1");
  auto tot = parse_csv(report::plot_csv("err-total", g));
  for (size_t i = 1; i < tot.size(); ++i) CHECK(std::stod(tot[i][2]) <= std::stod(tot[i][1]));
}

TEST_CASE("plot data ht-vs-ft without the oracle") {
  report::PlotGrid g;
  g.from = "1e6";
  g.to = "1.0001e6";
  g.count = 3;
  auto rows = parse_csv(report::plot_csv("ht-vs-ft", g));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].size() == 5);
  CHECK_THROWS_AS(report::plot_csv("ht-bt", g), std::invalid_argument);

  g.from = "200";
  g.to = "220";
  auto with = parse_csv(report::plot_csv("ht-vs-ft", g));
  REQUIRE(with[0].size() == 11);
  for (size_t i = 1; i < with.size(); ++i) CHECK(std::stod(with[i][8]) <= std::stod(with[i][4]));
}
