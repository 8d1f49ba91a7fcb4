#pragma once

#include <json.hpp>
#include <string>

#include "dbn/barrier.hpp"
#include "dbn/certificate.hpp"
#include "dbn/oracle.hpp"
#include "dbn/region.hpp"
#include "dbn/rs.hpp"
#include "dbn/zeros.hpp"

namespace dbn::report {

using nlohmann::ordered_json;

// Certified quantities are written as decimal strings.
std::string dec(const Real& v, int digits = 0);
std::string dec(long double v);
std::string dec(double v);
ordered_json dec(const Complex& z, int digits = 0);

ordered_json to_json(const OracleResult& r);
ordered_json to_json(const ApproxResult& r);
ordered_json to_json(const NonvanishingResult& r);
ordered_json to_json(const TStep& s);
ordered_json to_json(const WindingReport& r);
ordered_json to_json(const LocationCandidate& c);
ordered_json to_json(const ClaimCResult& r);
ordered_json to_json(const IntervalBoundResult& r);
ordered_json to_json(const EdgeCheck& e);
ordered_json to_json(const RegionReport& r);
ordered_json to_json(const EnvelopePoint& p);
ordered_json to_json(const Table1Check& c);
ordered_json to_json(const LocatedZero& z);
ordered_json to_json(const HypothesisStatus& h);
ordered_json to_json(const LambdaCertificate& c);

struct PlotGrid {
  std::string from = "200", to = "400";  // decimal
  int count = 201;
  std::string y = "0.2", t = "0.2";
  bool with_oracle = true;
  int prime_cut = 29;
  mpfr_prec_t bits = 128;
  double bound_safety = 1.000001;
};

// Kinds: c0p, err-split, err-total, ht-vs-ft, ht-bt, euler, tradeoff.
// Throws std::invalid_argument for an unknown kind.
std::string plot_csv(const std::string& kind, const PlotGrid& grid);

}  // namespace dbn::report
