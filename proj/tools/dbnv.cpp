#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dbn/multieval.hpp"
#include "report.hpp"

using namespace dbn;
using report::ordered_json;

namespace {

enum Exit { kOk = 0, kError = 1, kInconclusive = 2 };

struct Globals {
  int bits = 128;
  double safety = 1.000001;
  std::string out;
  std::string cache_dir;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw std::runtime_error("cannot write " + g.out);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

void emit(const Globals& g, const ordered_json& j) { emit(g, j.dump(2)); }

ordered_json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  return ordered_json::parse(f);
}

std::vector<std::pair<long, long>> parse_intervals(const std::string& s) {
  std::vector<std::pair<long, long>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto c = item.find(':');
    if (c == std::string::npos) throw std::invalid_argument("interval must be lo:hi, got " + item);
    out.emplace_back(std::stol(item.substr(0, c)), std::stol(item.substr(c + 1)));
  }
  if (out.empty()) throw std::invalid_argument("no intervals given");
  return out;
}

std::vector<long double> parse_range(const std::string& s) {
  // lo:hi:step or a comma list
  std::vector<long double> out;
  if (s.find(':') != std::string::npos) {
    std::stringstream ss(s);
    std::string a, b, c;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, c, ':');
    const long double lo = std::stold(a), hi = std::stold(b), st = std::stold(c);
    if (!(st > 0)) throw std::invalid_argument("grid step must be positive");
    for (long k = 0; lo + k * st <= hi + st * 1e-9L; ++k) out.push_back(lo + k * st);
  } else {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stold(item));
  }
  return out;
}

WindingReport winding_from_json(const ordered_json& j) {
  WindingReport r;
  r.verified = j.at("verified").get<bool>();
  r.failure = j.value("failure", std::string());
  for (const auto& s : j.at("t_steps")) {
    TStep t;
    t.t = Real(s.at("t").get<std::string>(), 256);
    t.t_next = Real(s.at("t_next").get<std::string>(), 256);
    t.winding = s.at("winding").get<long>();
    r.t_steps.push_back(t);
  }
  return r;
}

RegionReport region_from_json(const ordered_json& j) {
  RegionReport r;
  r.passed = j.at("passed").get<bool>();
  r.failure = j.value("failure", std::string());
  r.intervals.resize(j.at("intervals").size());
  return r;
}

ClaimCResult claim_c_from_json(const ordered_json& j) {
  ClaimCResult r;
  r.A = std::stold(j.at("A").get<std::string>());
  r.B = std::stold(j.at("B").get<std::string>());
  r.deviation = std::stold(j.at("deviation").get<std::string>());
  r.nonvanishing = j.at("nonvanishing").get<bool>();
  r.passed = j.at("passed").get<bool>();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dbnv: effective approximation, barrier and region bounds for H_t"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "read options from a TOML file");
  Globals g;
  if (const char* env = std::getenv("DBN_CACHE_DIR")) g.cache_dir = env;
  app.add_option("--precision-bits", g.bits, "working precision in bits")->check(CLI::Range(53, 100000));
  app.add_option("--bound-safety", g.safety, "multiplier applied to rigorous bounds")->check(CLI::Range(1.0, 2.0))
      ->default_str("1.000001");
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--cache-dir", g.cache_dir, "tableau cache directory (default $DBN_CACHE_DIR)");
  bool dump_config = false;
  app.add_flag("--write-config", dump_config, "print the effective configuration as TOML and exit")->configurable(false);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "H_t(x+iy) by quadrature");
  std::string ox = "300", oy = "0", ot = "0.2";
  bool oratio = false;
  int opanels = 0;
  oracle->add_option("--x", ox);
  oracle->add_option("--y", oy);
  oracle->add_option("--t", ot);
  oracle->add_flag("--ratio", oratio, "divide by B_t");
  oracle->add_option("--panels", opanels);

  // approx
  auto* approx = app.add_subcommand("approx", "f_t, error budgets and the nonvanishing test");
  std::string ax = "1000", ay = "0.2", at = "0.2";
  bool ano_ct = false;
  approx->add_option("--x", ax);
  approx->add_option("--y", ay);
  approx->add_option("--t", at);
  approx->add_flag("--no-ct", ano_ct, "skip the C_t correction");

  // barrier
  auto* barrier = app.add_subcommand("barrier", "winding-number sweep of the barrier rectangle");
  std::string bX = "60000083951.5", by0 = "0.2", by1 = "1", bt_lo = "0", bt0 = "0.2", bthr = "0.00125";
  int bE = 50, bthreads = 1;
  double bcf = 8.0, bfrac = 0.8;
  std::string bsteps_csv, bmesh_csv;
  long bmesh_n = 64;
  bool bbudget = false;
  barrier->add_option("--X", bX, "left edge of the rectangle");
  barrier->add_option("--y0", by0);
  barrier->add_option("--y1", by1);
  barrier->add_option("--t-lo", bt_lo);
  barrier->add_option("--t0", bt0, "upper end of the t range");
  barrier->add_option("--threshold", bthr);
  barrier->add_option("--E", bE, "Taylor order")->check(CLI::Range(1, 200));
  barrier->add_option("--threads", bthreads)->check(CLI::Range(1, 256));
  barrier->add_option("--conservative-factor", bcf);
  barrier->add_option("--step-fraction", bfrac);
  barrier->add_option("--steps-csv", bsteps_csv, "write one row per t-step");
  barrier->add_option("--mesh-csv", bmesh_csv, "write f_t on the rectangle mesh at t-lo");
  barrier->add_option("--mesh-n", bmesh_n, "points per edge for --mesh-csv");
  barrier->add_flag("--budget-only", bbudget, "only report the error budget at the corners");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "analytic bounds for the region right of the barrier");
  bounds->require_subcommand(1);
  auto* claimc = bounds->add_subcommand("claim-c", "large-N bound");
  long cN1 = 1500000, cN0 = 69098;
  std::string ct = "0.2";
  claimc->add_option("--N1", cN1);
  claimc->add_option("--N0", cN0);
  claimc->add_option("--t", ct);
  auto* claimb = bounds->add_subcommand("claim-b", "mollified bound on N0 <= N <= N1");
  std::string bintervals = "69098:80000,80000:110000,110000:220000,220000:1500000";
  long bN0 = 69098, bN1 = 1500000;
  std::string bt = "0.2";
  double left_min = 1.0, left_arg = 1.5707963267948966, sigma_offset = 0.599;
  double right_dev = -1;
  int max_depth = 8;
  claimb->add_option("--intervals", bintervals, "comma list of lo:hi");
  claimb->add_option("--N0", bN0);
  claimb->add_option("--N1", bN1);
  claimb->add_option("--t", bt);
  claimb->add_option("--left-min", left_min, "min |f_t| on the left edge (from the barrier run)");
  claimb->add_option("--left-arg", left_arg, "max |arg f_t| on the left edge");
  claimb->add_option("--right-deviation", right_dev, "f = 1 + O(dev) on the right edge (default: from claim-c)");
  claimb->add_option("--max-depth", max_depth);
  claimb->add_option("--sigma-offset", sigma_offset);
  auto* bscan = bounds->add_subcommand("scan", "parameter envelope scan");
  bool btable = false;
  std::string tgrid = "0.06:0.22:0.01", ygrid = "0.08:0.2:0.01", ngrid = "100000,1000000,10000000,100000000";
  double target = 0.03;
  bool bcsv = false;
  bscan->add_flag("--table", btable, "check the tabulated rows instead of a grid");
  bscan->add_option("--t-grid", tgrid);
  bscan->add_option("--y-grid", ygrid);
  bscan->add_option("--N-grid", ngrid);
  bscan->add_option("--target", target);
  bscan->add_flag("--csv", bcsv);

  // zeros
  auto* zeros = app.add_subcommand("zeros", "real zeros of H_t");
  zeros->require_subcommand(1);
  auto* zlocate = zeros->add_subcommand("locate", "locate and certify real zeros");
  std::string zt = "0.5", zfrom = "250", zto = "400";
  double zstep = 0.25;
  bool zcsv = false;
  zlocate->add_option("--t", zt);
  zlocate->add_option("--from", zfrom);
  zlocate->add_option("--to", zto);
  zlocate->add_option("--step", zstep);
  zlocate->add_flag("--csv", zcsv, "CSV of n, x_n, located_x, gap");
  auto* zlattice = zeros->add_subcommand("lattice", "lattice points x_n");
  long zn = 100, zcount = 1;
  zlattice->add_option("--t", zt);
  zlattice->add_option("--n", zn);
  zlattice->add_option("--count", zcount);
  auto* zcountc = zeros->add_subcommand("count", "g(X, t) and the located count");
  std::string zX = "400";
  bool znolocate = false;
  zcountc->add_option("--X", zX);
  zcountc->add_option("--t", zt);
  zcountc->add_flag("--estimate-only", znolocate);

  // scan
  auto* scan = app.add_subcommand("scan", "barrier-location score over shifts q");
  std::string sbase = "60000000000";
  long sq_lo = 1, sq_hi = 100000;
  int sprime = 29;
  double sthr = 4.0;
  bool sno_rank = false;
  std::string sfrac_x;
  scan->add_option("--X-base", sbase);
  scan->add_option("--q-lo", sq_lo);
  scan->add_option("--q-hi", sq_hi);
  scan->add_option("--prime-cut", sprime);
  scan->add_option("--threshold", sthr);
  scan->add_flag("--no-rank", sno_rank);
  scan->add_option("--fractional-parts", sfrac_x, "only print {(x/4pi) log p} for p = 2..11 at this x");

  // certify
  auto* certify = app.add_subcommand("certify", "assemble the Lambda certificate from saved reports");
  CertificateInputs cin;
  cin.t0 = "0.2";
  cin.y0 = "0.2";
  cin.X = "60000083951.5";
  cin.rh_height_assumed = kVerifiedRhHeight;
  std::string cbar, cclb, cclc;
  certify->add_option("--t0", cin.t0);
  certify->add_option("--y0", cin.y0);
  certify->add_option("--X", cin.X);
  certify->add_option("--rh-height", cin.rh_height_assumed);
  certify->add_option("--barrier-report", cbar);
  certify->add_option("--claim-b-report", cclb);
  certify->add_option("--claim-c-report", cclc);

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "CSV data behind the figures");
  report::PlotGrid pg;
  std::string kind = "err-split";
  bool pno_oracle = false;
  plot->add_option("--kind", kind, "c0p, err-split, err-total, ht-vs-ft, ht-bt, euler, tradeoff");
  plot->add_option("--from", pg.from);
  plot->add_option("--to", pg.to);
  plot->add_option("--count", pg.count);
  plot->add_option("--y", pg.y);
  plot->add_option("--t", pg.t);
  plot->add_option("--prime-cut", pg.prime_cut);
  plot->add_flag("--no-oracle", pno_oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }
  if (dump_config) {
    std::cout << app.config_to_str(true, false);
    return kOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kError;
  }

  try {
    mp::set_default_prec(g.bits);
    const mpfr_prec_t bits = g.bits;

    if (*oracle) {
      QuadratureSpec spec = QuadratureSpec::for_point(std::abs(Real(ox, bits).to_double()));
      spec.precision.working_bits = std::max(spec.precision.working_bits, g.bits);
      if (opanels > 0) spec.panels = opanels;
      OracleResult r = oratio ? ht_ratio(Real(ox, bits), Real(oy, bits), Real(ot, bits), spec)
                              : ht_direct(Complex(Real(ox, bits), Real(oy, bits)), Real(ot, bits), spec);
      emit(g, report::to_json(r));
      return kOk;
    }

    if (*approx) {
      ApproxOptions o;
      o.precision.working_bits = g.bits;
      o.precision.bound_safety = g.safety;
      o.with_ct = !ano_ct;
      NonvanishingResult r = nonvanishing_test(ModelParams{Real(ax, bits), Real(ay, bits), Real(at, bits)}, o);
      emit(g, report::to_json(r));
      return r.passed ? kOk : kInconclusive;
    }

    if (*barrier) {
      BarrierSpec spec;
      spec.X = Real(bX, bits);
      spec.y_lo = Real(by0, bits);
      spec.y_hi = Real(by1, bits);
      spec.t_lo = Real(bt_lo, bits);
      spec.t_hi = Real(bt0, bits);
      spec.threshold = Real(bthr, bits);
      spec.conservative_factor = bcf;
      spec.step_fraction = bfrac;
      spec.validate();
      if (bbudget) {
        ordered_json j{{"t_lo", report::dec(worst_corner_budget(spec, spec.t_lo, g.safety, bits))},
                       {"t_hi", report::dec(worst_corner_budget(spec, spec.t_hi, g.safety, bits))}};
        emit(g, j);
        return kOk;
      }
      if (!bmesh_csv.empty()) {
        TableauCache cache(g.cache_dir);
        const long N = rs_cutoff(spec.X, spec.t_lo);
        TableauAnchor anchor{spec.X + Real("0.5"), Real("0.6")};
        StoredSums sums = build_stored_sums(cache.get_or_build(anchor, N, bE, bits), spec.t_lo);
        std::ofstream f(bmesh_csv);
        f << "x,y,re,im\n";
        for (const auto& p : mesh_rectangle(spec, bmesh_n).points) {
          Complex v = fast_or_direct(sums, p.x, p.y);
          f << p.x.str(20) << ',' << p.y.str(17) << ',' << v.re().str(17) << ',' << v.im().str(17) << '\n';
        }
      }
      BarrierRunOptions opts;
      opts.E = bE;
      opts.bits = bits;
      opts.bound_safety = g.safety;
      opts.threads = bthreads;
      opts.cache_dir = g.cache_dir;
      opts.on_step = [](const TStep& s) {
        std::cerr << "t=" << s.t.str(8) << " n=" << s.mesh_n << " min|f|=" << s.min_abs_f
                  << " winding=" << s.winding << "\n";
      };
      WindingReport r = adaptive_t_schedule(spec, opts);
      if (!bsteps_csv.empty()) {
        std::ofstream f(bsteps_csv);
        f << "t,t_next,mesh_n,evaluations,winding,min_abs_f,Dz,Dt,error_budget,margin,seconds\n";
        for (const auto& s : r.t_steps)
          f << s.t.str(17) << ',' << s.t_next.str(17) << ',' << s.mesh_n << ',' << s.evaluations << ','
            << s.winding << ',' << report::dec(s.min_abs_f) << ',' << report::dec(s.Dz) << ','
            << report::dec(s.Dt) << ',' << report::dec(s.error_budget) << ',' << report::dec(s.margin) << ','
            << s.seconds << '\n';
      }
      emit(g, report::to_json(r));
      return r.verified ? kOk : kInconclusive;
    }

    if (*claimc) {
      ClaimCResult r = verify_claim_c(std::stold(ct), cN1, cN0);
      emit(g, report::to_json(r));
      return r.passed ? kOk : kInconclusive;
    }

    if (*claimb) {
      const long double t = std::stold(bt);
      long double dev = right_dev;
      if (dev < 0) dev = verify_claim_c(t, bN1, bN0).deviation;
      RegionReport r = verify_claim_b(t, bN0, bN1, parse_intervals(bintervals),
                                      LeftEdgeData{left_min, left_arg}, dev, max_depth, sigma_offset);
      emit(g, report::to_json(r));
      return r.passed ? kOk : kInconclusive;
    }

    if (*bscan) {
      if (btable) {
        std::ostringstream csv;
        ordered_json rows = ordered_json::array();
        csv << "X,t0,y0,Lambda,N0,N0_computed,bound,bound_computed\n";
        for (const auto& row : table1_rows()) {
          Table1Check c = check_table1_row(row);
          rows.push_back(report::to_json(c));
          csv << row.X << ',' << report::dec(row.t0) << ',' << report::dec(row.y0) << ','
              << report::dec(row.Lambda) << ',' << row.N0 << ',' << c.N0_computed << ','
              << report::dec(row.bound) << ',' << report::dec(c.point.lower_bound) << '\n';
        }
        if (bcsv)
          emit(g, csv.str());
        else
          emit(g, rows);
        return kOk;
      }
      std::vector<long> Ns;
      for (long double v : parse_range(ngrid)) Ns.push_back(std::llround(v));
      auto pts = envelope_scan(parse_range(tgrid), parse_range(ygrid), Ns, target);
      if (bcsv) {
        std::ostringstream csv;
        csv << "N0,x,t0,y0,Lambda,lower_bound\n";
        for (const auto& p : pts)
          csv << p.N0 << ',' << report::dec(p.x) << ',' << report::dec(p.t0) << ',' << report::dec(p.y0) << ','
              << report::dec(p.Lambda) << ',' << report::dec(p.lower_bound) << '\n';
        emit(g, csv.str());
      } else {
        ordered_json arr = ordered_json::array();
        for (const auto& p : pts) arr.push_back(report::to_json(p));
        emit(g, arr);
      }
      return kOk;
    }

    if (*zlocate) {
      ZeroScanOptions zo;
      zo.step = zstep;
      zo.bits = bits;
      zo.bound_safety = g.safety;
      const Real t(zt, bits);
      auto zs = locate_real_zeros(t, Real(zfrom, bits), Real(zto, bits), zo);
      bool all = true;
      for (const auto& z : zs) all = all && z.oracle_confirmed;
      if (zcsv) {
        std::ostringstream csv;
        csv << "n,x_n,located_x,gap\n";
        for (const auto& z : zs) {
          const long n = std::lround(g_function(z.x, t).to_double());
          Real xn = solve_xn(n, t);
          csv << n << ',' << xn.str(20) << ',' << z.x.str(20) << ',' << (z.x - xn).str(10) << '\n';
        }
        emit(g, csv.str());
      } else {
        ordered_json arr = ordered_json::array();
        for (const auto& z : zs) arr.push_back(report::to_json(z));
        ordered_json j{{"t", zt},
                       {"from", zfrom},
                       {"to", zto},
                       {"count", zs.size()},
                       {"g_difference", report::dec(g_function(Real(zto, bits), t) - g_function(Real(zfrom, bits), t), 10)},
                       {"zeros", arr}};
        emit(g, j);
      }
      return all ? kOk : kInconclusive;
    }

    if (*zlattice) {
      const Real t(zt, bits);
      std::ostringstream csv;
      csv << "n,x_n\n";
      for (long k = 0; k < zcount; ++k) csv << zn + k << ',' << solve_xn(zn + k, t).str(25) << '\n';
      emit(g, csv.str());
      return kOk;
    }

    if (*zcountc) {
      ZeroScanOptions zo;
      zo.bits = bits;
      zo.bound_safety = g.safety;
      ZeroCount c = count_zeros(Real(zX, bits), Real(zt, bits), !znolocate, zo);
      ordered_json j{{"X", zX}, {"t", zt}, {"estimate", report::dec(c.estimate, 12)}};
      if (c.located) j["located"] = *c.located;
      emit(g, j);
      return kOk;
    }

    if (*scan) {
      if (!sfrac_x.empty()) {
        const std::vector<int> primes = {2, 3, 5, 7, 11};
        auto fr = fractional_parts(Real(sfrac_x, 256), primes);
        ordered_json j = ordered_json::object();
        for (size_t i = 0; i < primes.size(); ++i) j[std::to_string(primes[i])] = report::dec(fr[i]);
        emit(g, j);
        return kOk;
      }
      auto cands = barrier_location_score(Real(sbase, 256), sq_lo, sq_hi, sprime, sthr, !sno_rank, bits);
      ordered_json arr = ordered_json::array();
      for (const auto& c : cands) arr.push_back(report::to_json(c));
      emit(g, arr);
      return kOk;
    }

    if (*certify) {
      if (!cbar.empty()) cin.barrier = barrier_status(winding_from_json(read_json(cbar)), cin.t0);
      if (!cclb.empty()) cin.claim_b = claim_b_status(region_from_json(read_json(cclb)));
      if (!cclc.empty()) cin.claim_c = claim_c_status(claim_c_from_json(read_json(cclc)));
      LambdaCertificate c = assemble_certificate(cin);
      emit(g, report::to_json(c));
      return c.issued ? kOk : kInconclusive;
    }

    if (*plot) {
      pg.bits = bits;
      pg.bound_safety = g.safety;
      pg.with_oracle = !pno_oracle;
      emit(g, report::plot_csv(kind, pg));
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
