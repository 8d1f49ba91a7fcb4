#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace dbn::report {

std::string dec(const Real& v, int digits) { return v.str(digits); }

std::string dec(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

std::string dec(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json dec(const Complex& z, int digits) { return {{"re", dec(z.re(), digits)}, {"im", dec(z.im(), digits)}}; }

ordered_json to_json(const OracleResult& r) {
  return {{"value", dec(r.value)}, {"error", dec(r.error, 6)}, {"panels", r.panels},
          {"active_panels", r.active_panels}, {"bits", r.bits}};
}

ordered_json to_json(const ApproxResult& r) {
  ordered_json j;
  j["N"] = r.terms.N;
  j["f"] = dec(r.f);
  j["abs_f"] = dec(abs(r.f));
  j["eA"] = dec(r.eA, 10);
  j["eB"] = dec(r.eB, 10);
  j["eC0"] = dec(r.eC0, 10);
  j["eC"] = dec(r.eC, 10);
  if (r.has_ct) j["Ct_over_Bt"] = dec(r.Ct_over_Bt);
  j["bits"] = r.bits;
  return j;
}

ordered_json to_json(const NonvanishingResult& r) {
  ordered_json j = to_json(r.approx);
  j["margin"] = dec(r.margin, 10);
  j["passed"] = r.passed;
  return j;
}

ordered_json to_json(const TStep& s) {
  return {{"t", dec(s.t)},
          {"t_next", dec(s.t_next)},
          {"mesh_n", s.mesh_n},
          {"evaluations", s.evaluations},
          {"winding", s.winding},
          {"winding_raw", dec(s.winding_raw)},
          {"min_abs_f", dec(s.min_abs_f)},
          {"Dz", dec(s.Dz)},
          {"Dt", dec(s.Dt)},
          {"error_budget", dec(s.error_budget)},
          {"margin", dec(s.margin)},
          {"cond_ok", s.cond_ok},
          {"seconds", s.seconds}};
}

ordered_json to_json(const WindingReport& r) {
  ordered_json steps = ordered_json::array();
  for (const auto& s : r.t_steps) steps.push_back(to_json(s));
  return {{"verified", r.verified},
          {"failure", r.failure},
          {"N", r.N},
          {"E", r.E},
          {"bits", r.bits},
          {"step_fraction", dec(r.step_fraction)},
          {"conservative_factor", dec(r.conservative_factor)},
          {"initial_budget", dec(r.initial_budget)},
          {"direct_probes", r.direct_probes},
          {"max_probe_rel_diff", dec(r.max_probe_rel_diff)},
          {"direct_fallbacks", r.direct_fallbacks},
          {"seconds", r.seconds},
          {"step_count", r.t_steps.size()},
          {"t_steps", steps}};
}

ordered_json to_json(const LocationCandidate& c) {
  ordered_json j{{"q", c.q}, {"euler_min", dec(c.euler_min)}};
  if (c.f0_min >= 0) j["f0_min"] = dec(c.f0_min);
  return j;
}

ordered_json to_json(const ClaimCResult& r) {
  ordered_json b = ordered_json::array();
  for (auto [N, v] : r.B_at) b.push_back({{"N", N}, {"B", dec(v)}});
  return {{"N0", r.N0},         {"N1", r.N1},
          {"t", dec(r.t)},      {"sigma1", dec(r.sigma1)},
          {"sigma2", dec(r.sigma2)}, {"A", dec(r.A)},
          {"B", dec(r.B)},      {"x_N1", dec(r.x_N1)},
          {"B_samples", b},     {"B_decreasing", r.B_decreasing},
          {"deviation", dec(r.deviation)}, {"nonvanishing", r.nonvanishing},
          {"passed", r.passed}};
}

ordered_json to_json(const IntervalBoundResult& r) {
  ordered_json j{{"N_minus", r.N_minus}, {"N_plus", r.N_plus}, {"sigma_floor", dec(r.sigma_floor)},
                 {"F", dec(r.F_value)},  {"Z", dec(r.Z_value)},   {"passed", r.passed},
                 {"passed_strict", r.passed_strict}, {"depth", r.depth}};
  if (r.F_naive != 0) j["F_naive"] = dec(r.F_naive);
  return j;
}

ordered_json to_json(const EdgeCheck& e) {
  return {{"edge", e.edge},
          {"passed", e.passed},
          {"magnitude_lower", dec(e.magnitude_lower)},
          {"arg_upper", dec(e.arg_upper)},
          {"dist_lower", dec(e.dist_lower)}};
}

ordered_json to_json(const RegionReport& r) {
  ordered_json edges = ordered_json::array(), iv = ordered_json::array();
  for (const auto& e : r.edges) edges.push_back(to_json(e));
  for (const auto& i : r.intervals) iv.push_back(to_json(i));
  return {{"N0", r.N0},
          {"N1", r.N1},
          {"t", dec(r.t)},
          {"envelope",
           {{"sigma", dec(r.envelope.sigma)},
            {"upper", dec(r.envelope.upper)},
            {"lower", dec(r.envelope.lower)},
            {"phase", dec(r.envelope.phase)}}},
          {"edges", edges},
          {"intervals", iv},
          {"top_sum_B", dec(r.top_sum_B)},
          {"top_sum_A", dec(r.top_sum_A)},
          {"Z", dec(r.Z)},
          {"Z_ok", r.Z_ok},
          {"passed", r.passed},
          {"failure", r.failure}};
}

ordered_json to_json(const EnvelopePoint& p) {
  return {{"N0", p.N0},         {"t0", dec(p.t0)},         {"y0", dec(p.y0)},
          {"x", dec(p.x)},      {"Lambda", dec(p.Lambda)}, {"lower_bound", dec(p.lower_bound)}};
}

ordered_json to_json(const Table1Check& c) {
  return {{"X", c.row.X},
          {"t0", dec(c.row.t0)},
          {"y0", dec(c.row.y0)},
          {"Lambda", dec(c.row.Lambda)},
          {"Lambda_computed", dec(c.Lambda_computed)},
          {"N0", c.row.N0},
          {"N0_computed", c.N0_computed},
          {"bound", dec(c.row.bound)},
          {"bound_computed", dec(c.point.lower_bound)}};
}

ordered_json to_json(const LocatedZero& z) {
  return {{"x", dec(z.x, 20)},
          {"bracket_lo", dec(z.bracket_lo, 20)},
          {"bracket_hi", dec(z.bracket_hi, 20)},
          {"budget", dec(z.budget)},
          {"via_oracle", z.via_oracle},
          {"oracle_confirmed", z.oracle_confirmed}};
}

ordered_json to_json(const HypothesisStatus& h) {
  return {{"name", h.name}, {"present", h.present}, {"verified", h.verified}, {"detail", h.detail}};
}

ordered_json to_json(const LambdaCertificate& c) {
  ordered_json hs = ordered_json::array();
  for (const auto& h : c.hypotheses) hs.push_back(to_json(h));
  return {{"t0", c.t0},
          {"y0", c.y0},
          {"X", c.X},
          {"rh_height_assumed", c.rh_height_assumed},
          {"lambda_bound", c.lambda_bound},
          {"lambda_rounded", c.lambda_rounded},
          {"issued", c.issued},
          {"conditional", c.conditional},
          {"hypotheses", hs},
          {"conclusion", c.conclusion},
          {"refusal", c.refusal}};
}

namespace {

std::vector<Real> grid_points(const PlotGrid& g) {
  if (g.count < 1) throw std::invalid_argument("grid count must be positive");
  mp::ScopedPrecision prec(g.bits);
  const Real a(g.from, g.bits), b(g.to, g.bits);
  std::vector<Real> out;
  for (int k = 0; k < g.count; ++k) {
    if (g.count == 1) {
      out.push_back(a);
      break;
    }
    out.push_back(a + (b - a) * Real(static_cast<long>(k)) / Real(static_cast<long>(g.count - 1)));
  }
  return out;
}

ApproxResult approx_at(const Real& x, const PlotGrid& g, bool with_ct) {
  ApproxOptions o;
  o.precision.working_bits = static_cast<int>(g.bits);
  o.precision.bound_safety = g.bound_safety;
  o.with_ct = with_ct;
  return approximate(ModelParams{x, Real(g.y, g.bits), Real(g.t, g.bits)}, o);
}

QuadratureSpec scan_spec(double x_hi) {
  QuadratureSpec s = QuadratureSpec::for_point(x_hi);
  s.panels = std::max(50, static_cast<int>(std::ceil(1.25 * x_hi)) + 1);
  return s;
}

bool oracle_usable(const PlotGrid& g) {
  return g.with_oracle && Real(g.to, g.bits).to_double() <= QuadratureSpec{}.x_limit;
}

}  // namespace

std::string plot_csv(const std::string& kind, const PlotGrid& g) {
  std::ostringstream os;
  const auto pts = grid_points(g);
  mp::ScopedPrecision prec(g.bits);
  if (kind == "c0p") {
    os << "p,re,im,abs\n";
    for (const auto& p : pts) {
      Complex c = c0(p);
      os << p.str(17) << ',' << c.re().str(17) << ',' << c.im().str(17) << ',' << abs(c).str(17) << '\n';
    }
  } else if (kind == "err-split") {
    os << "x,eA,eB,eC0,eC0_dominant\n";
    for (const auto& x : pts) {
      ApproxResult r = approx_at(x, g, false);
      const bool dom = r.eC0 > r.eA && r.eC0 > r.eB;
      os << x.str(17) << ',' << r.eA.str(10) << ',' << r.eB.str(10) << ',' << r.eC0.str(10) << ',' << dom << '\n';
    }
  } else if (kind == "err-total") {
    os << "x,eA_eB_eC0,eA_eB_eC\n";
    for (const auto& x : pts) {
      ApproxResult r = approx_at(x, g, false);
      os << x.str(17) << ',' << (r.eA + r.eB + r.eC0).str(10) << ',' << (r.eA + r.eB + r.eC).str(10) << '\n';
    }
  } else if (kind == "ht-vs-ft") {
    const bool orc = oracle_usable(g);
    os << "x,f_abs,f_re,f_im,eA_eB_eC0";
    if (orc) os << ",ratio_re,ratio_im,oracle_error,resid,resid_c,eA_eB_eC";
    os << '\n';
    const QuadratureSpec spec = scan_spec(Real(g.to).to_double());
    for (const auto& x : pts) {
      ApproxResult r = approx_at(x, g, orc);
      os << x.str(17) << ',' << abs(r.f).str(17) << ',' << r.f.re().str(17) << ',' << r.f.im().str(17) << ','
         << (r.eA + r.eB + r.eC0).str(10);
      if (orc) {
        OracleResult h = ht_ratio(x, Real(g.y, g.bits), Real(g.t, g.bits), spec);
        mp::ScopedPrecision hp(std::max<mpfr_prec_t>(h.bits, g.bits));
        Real resid = abs(h.value - r.f);
        Real resid_c = abs(h.value - r.f + r.Ct_over_Bt);
        os << ',' << h.value.re().str(17) << ',' << h.value.im().str(17) << ',' << h.error.str(6) << ','
           << resid.str(10) << ',' << resid_c.str(10) << ',' << (r.eA + r.eB + r.eC).str(10);
      }
      os << '\n';
    }
  } else if (kind == "ht-bt") {
    if (!oracle_usable(g)) throw std::invalid_argument("ht-bt needs the oracle (x within its domain)");
    os << "x,log_abs_H,log_abs_B\n";
    const QuadratureSpec spec = scan_spec(Real(g.to).to_double());
    for (const auto& x : pts) {
      OracleResult h = ht_direct(Complex(x, Real(g.y, g.bits)), Real(g.t, g.bits), spec);
      OracleResult q = ht_ratio(x, Real(g.y, g.bits), Real(g.t, g.bits), spec);
      mp::ScopedPrecision hp(h.bits);
      Real lh = log(abs(h.value));
      Real lb = lh - log(abs(q.value));
      os << x.str(17) << ',' << lh.str(17) << ',' << lb.str(17) << '\n';
    }
  } else if (kind == "euler") {
    os << "x,euler_abs\n";
    for (const auto& x : pts) os << x.str(25) << ',' << dec(euler_product_abs(x, g.prime_cut)) << '\n';
  } else if (kind == "tradeoff") {
    // grid: N0 log-spaced over [from, to]
    std::vector<long> Ns;
    const double a = std::log(Real(g.from).to_double()), b = std::log(Real(g.to).to_double());
    for (int k = 0; k < g.count; ++k)
      Ns.push_back(std::lround(std::exp(g.count == 1 ? a : a + (b - a) * k / (g.count - 1))));
    std::vector<long double> ts, ys;
    for (int i = 0; i <= 16; ++i) ts.push_back(0.06L + 0.01L * i);
    for (int i = 0; i <= 12; ++i) ys.push_back(0.08L + 0.01L * i);
    os << "N0,x,t0,y0,Lambda,lower_bound\n";
    for (const auto& p : envelope_scan(ts, ys, Ns))
      os << p.N0 << ',' << dec(p.x) << ',' << dec(p.t0) << ',' << dec(p.y0) << ',' << dec(p.Lambda) << ','
         << dec(p.lower_bound) << '\n';
  } else {
    throw std::invalid_argument("unknown plot kind: " + kind);
  }
  return os.str();
}

}  // namespace dbn::report
