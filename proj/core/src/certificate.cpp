#include "dbn/certificate.hpp"

#include <gmp.h>

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace dbn {

namespace {

// "0.15492" -> (15492, 5)
std::pair<std::string, int> parse_plain_decimal(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty decimal");
  std::string digits;
  int decimals = -1;
  for (char c : s) {
    if (c == '.') {
      if (decimals >= 0) throw std::invalid_argument("malformed decimal: " + s);
      decimals = 0;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      if (decimals >= 0) ++decimals;
    } else {
      throw std::invalid_argument("expected a plain non-negative decimal: " + s);
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed decimal: " + s);
  return {digits, std::max(decimals, 0)};
}

std::string format_scaled(mpz_t v, int decimals) {
  char* raw = mpz_get_str(nullptr, 10, v);
  std::string s(raw);
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(raw, s.size() + 1);
  if (static_cast<int>(s.size()) <= decimals) s.insert(0, decimals + 1 - s.size(), '0');
  if (decimals > 0) s.insert(s.size() - decimals, ".");
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

}  // namespace

std::string exact_lambda(const std::string& t0, const std::string& y0) {
  auto [td, tk] = parse_plain_decimal(t0);
  auto [yd, yk] = parse_plain_decimal(y0);
  const int D = std::max(tk, 2 * yk + 1);
  mpz_t t, y, p, r;
  mpz_inits(t, y, p, r, nullptr);
  mpz_set_str(t, td.c_str(), 10);
  mpz_set_str(y, yd.c_str(), 10);
  mpz_ui_pow_ui(p, 10, D - tk);
  mpz_mul(t, t, p);
  mpz_mul(y, y, y);
  mpz_ui_pow_ui(p, 10, D - 2 * yk);
  mpz_mul(y, y, p);
  mpz_divexact_ui(y, y, 2);
  mpz_add(r, t, y);
  std::string out = format_scaled(r, D);
  mpz_clears(t, y, p, r, nullptr);
  return out;
}

HypothesisStatus barrier_status(const WindingReport& report, const std::string& t0) {
  HypothesisStatus h;
  h.name = "barrier";
  h.present = true;
  if (!report.verified) {
    h.detail = "barrier run not verified: " + report.failure;
    return h;
  }
  if (report.t_steps.empty()) {
    h.detail = "barrier run has no t-steps";
    return h;
  }
  mp::ScopedPrecision prec(256);
  const Real start = report.t_steps.front().t;
  const Real end = report.t_steps.back().t_next;
  // t0 parsed at the report's precision, so an exact endpoint compares equal
  if (start.sign() > 0 || end < Real(t0, end.prec())) {
    h.detail = "barrier t-range [" + start.str(10) + ", " + end.str(10) + "] does not cover [0, " + t0 + "]";
    return h;
  }
  h.verified = true;
  h.detail = std::to_string(report.t_steps.size()) + " t-steps, winding 0 throughout";
  return h;
}

HypothesisStatus claim_b_status(const RegionReport& report) {
  HypothesisStatus h;
  h.name = "claim-b";
  h.present = true;
  h.verified = report.passed;
  h.detail = report.passed ? std::to_string(report.intervals.size()) + " intervals, all edges clear"
                           : "failed: " + report.failure;
  return h;
}

HypothesisStatus claim_c_status(const ClaimCResult& r) {
  HypothesisStatus h;
  h.name = "claim-c";
  h.present = true;
  h.verified = r.nonvanishing;
  char buf[160];
  std::snprintf(buf, sizeof buf, "A = %.5Lf, B = %.5Lf, f = 1 + O(%.4Lf)%s", r.A, r.B, r.deviation,
                r.passed ? "" : " (above the 0.955 of the displayed bound)");
  h.detail = buf;
  return h;
}

LambdaCertificate assemble_certificate(const CertificateInputs& in) {
  LambdaCertificate c;
  c.t0 = in.t0;
  c.y0 = in.y0;
  c.X = in.X;
  c.rh_height_assumed = in.rh_height_assumed;
  c.lambda_bound = exact_lambda(in.t0, in.y0);
  {
    mp::ScopedPrecision prec(256);
    c.lambda_rounded = Real(c.lambda_bound).fixed(2);
  }

  HypothesisStatus rh;
  rh.name = "rh-height";
  rh.present = !in.rh_height_assumed.empty();
  if (rh.present) {
    mp::ScopedPrecision prec(256);
    const Real H(in.rh_height_assumed), X(in.X);
    rh.verified = H >= X / 2L;
    c.conditional = H > Real(kVerifiedRhHeight);
    rh.detail = rh.verified ? (c.conditional ? "conditional on RH to height X/2" : "RH verified to height X/2")
                            : "assumed RH height below X/2";
  } else {
    rh.detail = "no RH height given";
  }
  c.hypotheses.push_back(rh);
  auto add = [&](const std::optional<HypothesisStatus>& h, const char* name) {
    if (h) {
      c.hypotheses.push_back(*h);
    } else {
      HypothesisStatus m;
      m.name = name;
      m.detail = "missing";
      c.hypotheses.push_back(m);
    }
  };
  add(in.barrier, "barrier");
  add(in.claim_b, "claim-b");
  add(in.claim_c, "claim-c");

  for (const auto& h : c.hypotheses) {
    if (!h.present || !h.verified) {
      c.refusal = h.name + ": " + h.detail;
      return c;
    }
  }
  c.issued = true;
  c.conclusion = "Lambda <= " + c.lambda_bound;
  if (c.conditional) c.conclusion += " (conditional on RH to height X/2)";
  return c;
}

}  // namespace dbn
