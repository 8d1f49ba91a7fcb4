#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dbn/barrier.hpp"
#include "dbn/region.hpp"

namespace dbn {

// Height to which the zeros of zeta are known to lie on the critical line; a larger assumed
// height makes the certificate conditional.
inline constexpr const char* kVerifiedRhHeight = "3.06e10";

struct HypothesisStatus {
  std::string name;
  bool present = false;
  bool verified = false;
  std::string detail;
};

HypothesisStatus barrier_status(const WindingReport& report, const std::string& t0);
HypothesisStatus claim_b_status(const RegionReport& report);
// Uses nonvanishing (|f| > 1.25e-3 for N >= N1), which is what the region argument needs.
HypothesisStatus claim_c_status(const ClaimCResult& result);

struct CertificateInputs {
  std::string t0, y0, X;       // decimal
  std::string rh_height_assumed;
  std::optional<HypothesisStatus> barrier, claim_b, claim_c;
};

struct LambdaCertificate {
  std::string t0, y0, X, rh_height_assumed;
  std::string lambda_bound;    // t0 + y0^2/2, exact decimal
  std::string lambda_rounded;  // to 2 decimals, as tabulated
  bool issued = false;
  bool conditional = false;    // rh_height_assumed above kVerifiedRhHeight
  std::vector<HypothesisStatus> hypotheses;  // rh gate, barrier, claim b, claim c
  std::string conclusion;
  std::string refusal;
};

// Exact t0 + y0^2/2 for plain decimal strings. Throws std::invalid_argument on other input.
std::string exact_lambda(const std::string& t0, const std::string& y0);

// Issues the certificate only when every hypothesis is present and verified and the assumed
// RH height is at least X/2.
LambdaCertificate assemble_certificate(const CertificateInputs& in);

}  // namespace dbn
