#include "dbn/multieval.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "dbn/special.hpp"

namespace dbn {

namespace {

constexpr long kBlock = 4096;

int moment_count(int E) { return 3 * E - 2; }

std::vector<Complex> zeros(size_t n, mpfr_prec_t bits) {
  return std::vector<Complex>(n, Complex(Real::zero(bits), Real::zero(bits)));
}

}  // namespace

TaylorMoments TaylorMoments::build_range(const TableauAnchor& anchor, long N, int E, long n_lo, long n_hi,
                                         mpfr_prec_t bits) {
  if (N < 2) throw std::invalid_argument("tableau needs N >= 2");
  if (E < 1) throw std::invalid_argument("tableau needs E >= 1");
  mp::init_thread();
  mp::ScopedPrecision prec(bits);
  TaylorMoments m;
  m.anchor = {Real(anchor.X, bits), Real(anchor.y, bits)};
  m.N = N;
  m.n0 = N / 2;
  m.E = E;
  m.bits = bits;
  const int K = moment_count(E);
  m.SB = zeros(K, bits);
  m.SA = zeros(K, bits);
  Real log_n0 = log(Real::make(m.n0, bits));
  Real hx = m.anchor.X / 2L;
  Real sb = -(1L + m.anchor.y) / 2L;
  Real ln(Real::zero(bits)), L(Real::zero(bits)), Lk(Real::zero(bits)), mag(Real::zero(bits)), ph(Real::zero(bits));
  Real br(Real::zero(bits)), bi(Real::zero(bits)), ar(Real::zero(bits)), ai(Real::zero(bits)), ny(Real::zero(bits));
  for (long n = std::max(1L, n_lo); n <= std::min(N, n_hi); ++n) {
    ln = log(Real::make(n, bits));
    L = ln - log_n0;
    mag = exp(sb * ln);
    ph = hx * ln;
    sin_cos(ph, bi, br);
    br *= mag;
    bi *= mag;
    // c_A = conj(c_B) n^y
    ny = exp(m.anchor.y * ln);
    ar = br * ny;
    ai = -(bi * ny);
    mpfr_set_ui(Lk.get(), 1, MPFR_RNDN);
    for (int k = 0; k < K; ++k) {
      mpfr_fma(m.SB[k].re().get(), br.get(), Lk.get(), m.SB[k].re().get(), MPFR_RNDN);
      mpfr_fma(m.SB[k].im().get(), bi.get(), Lk.get(), m.SB[k].im().get(), MPFR_RNDN);
      mpfr_fma(m.SA[k].re().get(), ar.get(), Lk.get(), m.SA[k].re().get(), MPFR_RNDN);
      mpfr_fma(m.SA[k].im().get(), ai.get(), Lk.get(), m.SA[k].im().get(), MPFR_RNDN);
      mpfr_mul(Lk.get(), Lk.get(), L.get(), MPFR_RNDN);
    }
  }
  return m;
}

TaylorMoments& TaylorMoments::operator+=(const TaylorMoments& o) {
  if (o.N != N || o.E != E || o.bits != bits || o.anchor.X != anchor.X || o.anchor.y != anchor.y)
    throw std::invalid_argument("moments with different anchors cannot be merged");
  for (size_t k = 0; k < SB.size(); ++k) {
    SB[k] += o.SB[k];
    SA[k] += o.SA[k];
  }
  return *this;
}

TaylorMoments TaylorMoments::build(const TableauAnchor& anchor, long N, int E, mpfr_prec_t bits, int threads) {
  const long nblocks = (N + kBlock - 1) / kBlock;
  std::vector<std::optional<TaylorMoments>> parts(nblocks);
  auto work = [&](long first) {
    for (long b = first; b < nblocks; b += std::max(1, threads))
      parts[b] = build_range(anchor, N, E, b * kBlock + 1, (b + 1) * kBlock, bits);
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(work, i);
    for (auto& th : pool) th.join();
  }
  // fixed merge order keeps the result independent of the thread count
  TaylorMoments total = std::move(*parts[0]);
  for (long b = 1; b < nblocks; ++b) total += *parts[b];
  return total;
}

std::string TaylorMoments::cache_key() const {
  std::ostringstream os;
  os << "X=" << anchor.X.str(40) << "|y=" << anchor.y.str(40) << "|N=" << N << "|E=" << E << "|bits=" << bits;
  return os.str();
}

namespace {

void write_values(FILE* f, const std::vector<Complex>& v) {
  for (const auto& z : v) {
    if (mpfr_fpif_export(f, const_cast<mpfr_ptr>(z.re().get())) != 0 ||
        mpfr_fpif_export(f, const_cast<mpfr_ptr>(z.im().get())) != 0)
      throw std::runtime_error("tableau cache: write failed");
  }
}

void read_values(FILE* f, std::vector<Complex>& v, size_t n, mpfr_prec_t bits) {
  v = zeros(n, bits);
  for (auto& z : v) {
    if (mpfr_fpif_import(z.re().get(), f) != 0 || mpfr_fpif_import(z.im().get(), f) != 0)
      throw std::runtime_error("tableau cache: truncated or corrupt file");
  }
}

const char kMagic[] = "DBNTM1\n";

}  // namespace

void TaylorMoments::save(const std::filesystem::path& file) const {
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw std::runtime_error("tableau cache: cannot open " + tmp.string());
  std::string key = cache_key();
  std::fputs(kMagic, f);
  std::fprintf(f, "%s\n%ld %ld %d %ld %zu\n", key.c_str(), N, n0, E, static_cast<long>(bits), SB.size());
  std::string xs = anchor.X.str(0), ys = anchor.y.str(0);
  std::fprintf(f, "%s\n%s\n", xs.c_str(), ys.c_str());
  try {
    write_values(f, SB);
    write_values(f, SA);
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
  std::filesystem::rename(tmp, file);
}

TaylorMoments TaylorMoments::load(const std::filesystem::path& file) {
  FILE* f = std::fopen(file.c_str(), "rb");
  if (!f) throw std::runtime_error("tableau cache: cannot open " + file.string());
  auto line = [&]() {
    std::string s;
    for (int c = std::fgetc(f); c != EOF && c != '\n'; c = std::fgetc(f)) s.push_back(static_cast<char>(c));
    return s;
  };
  TaylorMoments m;
  try {
    if (line() + "\n" != kMagic) throw std::runtime_error("tableau cache: bad magic");
    std::string key = line();
    std::istringstream hdr(line());
    long bits = 0;
    size_t K = 0;
    hdr >> m.N >> m.n0 >> m.E >> bits >> K;
    if (!hdr || bits < 2) throw std::runtime_error("tableau cache: bad header");
    m.bits = bits;
    m.anchor = {Real(line(), bits), Real(line(), bits)};
    read_values(f, m.SB, K, bits);
    read_values(f, m.SA, K, bits);
    if (m.cache_key() != key) throw std::runtime_error("tableau cache: key mismatch");
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
  return m;
}

StoredSums build_stored_sums(const TaylorMoments& m, const Real& t) {
  mp::ScopedPrecision prec(m.bits);
  StoredSums s;
  s.anchor = m.anchor;
  s.t = Real(t, m.bits);
  s.n0 = m.n0;
  s.N = m.N;
  s.E = m.E;
  s.bits = m.bits;
  const int E = m.E;
  s.B = zeros(static_cast<size_t>(E) * E, m.bits);
  s.A = zeros(static_cast<size_t>(E) * E, m.bits);
  s.Bcol = zeros(E, m.bits);
  s.Acol = zeros(E, m.bits);
  Real t4 = s.t / 4L;
  Real coef = Real::make(1, m.bits);
  for (int i = 0; i < E; ++i) {
    for (int j = 0; j < E; ++j) {
      size_t idx = static_cast<size_t>(i) * E + j;
      s.B[idx] = m.SB[2 * i + j] * coef;
      s.A[idx] = m.SA[2 * i + j] * coef;
      s.Bcol[j] += s.B[idx];
      s.Acol[j] += s.A[idx];
    }
    coef = coef * t4 / Real::make(i + 1, m.bits);
  }
  return s;
}

StoredSums build_stored_sums(const TableauAnchor& anchor, const Real& t, long N, int E, mpfr_prec_t bits) {
  return build_stored_sums(TaylorMoments::build(anchor, N, E, bits), t);
}

namespace {

EvalOffsets offsets_unchecked(const StoredSums& sums, const Real& x, const Real& y, long* N_at_point) {
  mp::ScopedPrecision prec(sums.bits);
  ModelParams P{Real(x, sums.bits), Real(y, sums.bits), sums.t};
  RSTerms r = compute_rs_terms(P);
  if (N_at_point) *N_at_point = r.N;
  EvalOffsets o;
  Complex cb((1L + sums.anchor.y) / 2L, -sums.anchor.X / 2L);
  Complex ca((1L - sums.anchor.y) / 2L, sums.anchor.X / 2L);
  o.b = cb - r.s_star;
  o.a = Complex(P.y, Real::zero(sums.bits)) - conj(r.s_star) - r.kappa + ca;
  o.gamma = r.gamma;
  return o;
}

// sum_j col_j w^j / j!
Complex series(const std::vector<Complex>& col, const Complex& w, mpfr_prec_t bits) {
  Complex acc(Real::zero(bits), Real::zero(bits));
  Complex term(Real::make(1, bits), Real::zero(bits));
  for (size_t j = 0; j < col.size(); ++j) {
    acc += col[j] * term;
    term = term * w / Real::make(static_cast<long>(j + 1), bits);
  }
  return acc;
}

}  // namespace

EvalOffsets eval_offsets(const StoredSums& sums, const Real& x, const Real& y) {
  long n = 0;
  EvalOffsets o = offsets_unchecked(sums, x, y, &n);
  if (n != sums.N) throw std::invalid_argument("point has N = " + std::to_string(n) + ", tableau has N = " +
                                               std::to_string(sums.N));
  return o;
}

bool within_envelope(const EvalOffsets& o, double bound) {
  return abs(o.b).to_double() <= bound && abs(o.a).to_double() <= bound;
}

Complex fast_eval(const StoredSums& sums, const EvalOffsets& offs) {
  if (!within_envelope(offs)) throw OffsetEnvelopeError("offset outside |b|, |a| <= 2; use direct evaluation");
  mp::ScopedPrecision prec(sums.bits);
  Real ln0 = log(Real::make(sums.n0, sums.bits));
  Real t4 = sums.t / 4L;
  Real t2 = sums.t / 2L;
  Complex wb = offs.b + t2 * ln0;
  Complex wa = offs.a + t2 * ln0;
  Complex pb = exp((offs.b + t4 * ln0) * ln0);
  Complex pa = exp((offs.a + t4 * ln0) * ln0);
  return pb * series(sums.Bcol, wb, sums.bits) + offs.gamma * pa * series(sums.Acol, wa, sums.bits);
}

Complex fast_or_direct(const StoredSums& sums, const Real& x, const Real& y, bool* used_fast) {
  EvalOffsets o = eval_offsets(sums, x, y);
  if (within_envelope(o)) {
    if (used_fast) *used_fast = true;
    return fast_eval(sums, o);
  }
  if (used_fast) *used_fast = false;
  mp::ScopedPrecision prec(sums.bits);
  ModelParams P{Real(x, sums.bits), Real(y, sums.bits), sums.t};
  return compute_ft(P, compute_rs_terms(P));
}

TableauCache::TableauCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (dir_.empty()) {
    if (const char* env = std::getenv("DBN_CACHE_DIR")) dir_ = env;
  }
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::filesystem::path TableauCache::path_for(const TableauAnchor& anchor, long N, int E, mpfr_prec_t bits) const {
  TaylorMoments probe;
  probe.anchor = {Real(anchor.X, bits), Real(anchor.y, bits)};
  probe.N = N;
  probe.E = E;
  probe.bits = bits;
  char name[64];
  std::snprintf(name, sizeof name, "tableau-%016zx.bin", std::hash<std::string>{}(probe.cache_key()));
  return dir_ / name;
}

TaylorMoments TableauCache::get_or_build(const TableauAnchor& anchor, long N, int E, mpfr_prec_t bits, bool* hit) {
  if (hit) *hit = false;
  if (!enabled()) return TaylorMoments::build(anchor, N, E, bits);
  auto file = path_for(anchor, N, E, bits);
  if (std::filesystem::exists(file)) {
    try {
      TaylorMoments m = TaylorMoments::load(file);
      if (m.N == N && m.E == E && m.bits == bits && m.anchor.X == Real(anchor.X, bits) &&
          m.anchor.y == Real(anchor.y, bits)) {
        if (hit) *hit = true;
        return m;
      }
    } catch (const std::exception&) {
      // unreadable entry: rebuild and overwrite
    }
  }
  TaylorMoments m = TaylorMoments::build(anchor, N, E, bits);
  m.save(file);
  return m;
}

double CostReport::speedup() const {
  double tot = total_seconds();
  return tot > 0 ? static_cast<double>(M) * direct_seconds_per_eval / tot : 0.0;
}

CostReport amortized_cost(const TableauAnchor& anchor, const Real& t, long N, long M, int E, mpfr_prec_t bits,
                          int direct_samples) {
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
  CostReport rep;
  rep.N = N;
  rep.M = M;
  rep.E = E;
  auto t0 = clock::now();
  StoredSums s = build_stored_sums(TaylorMoments::build(anchor, N, E, bits), t);
  rep.build_seconds = secs(t0);
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> du(-0.5, 0.5);
  mp::ScopedPrecision prec(bits);
  auto point = [&](Real& x, Real& y) {
    x = s.anchor.X + Real(du(eng));
    Real yy = s.anchor.y + Real(du(eng) * 0.8);
    y = max(Real::zero(bits), min(Real::make(1, bits), yy));
  };
  Real x, y;
  t0 = clock::now();
  for (long k = 0; k < M; ++k) {
    point(x, y);
    volatile double sink = fast_eval(s, offsets_unchecked(s, x, y, nullptr)).re().to_double();
    (void)sink;
  }
  rep.eval_seconds = secs(t0);
  t0 = clock::now();
  for (int k = 0; k < direct_samples; ++k) {
    point(x, y);
    ModelParams P{x, y, s.t};
    RSTerms r = compute_rs_terms(P);
    r.N = N;
    volatile double sink = compute_ft(P, r).re().to_double();
    (void)sink;
  }
  rep.direct_seconds_per_eval = direct_samples > 0 ? secs(t0) / direct_samples : 0.0;
  return rep;
}

}  // namespace dbn
