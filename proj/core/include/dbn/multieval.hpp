#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbn/mp.hpp"
#include "dbn/rs.hpp"

namespace dbn {

struct TableauAnchor {
  Real X;
  Real y;
};

// t-independent power moments S_k = sum_n c_n L_n^k, k < 3E - 2, with
// L_n = log(n/n0) and c_n = n^{-(1+y-iX)/2} (B side) or n^{-(1-y+iX)/2} (A side).
struct TaylorMoments {
  TableauAnchor anchor;
  long N = 0, n0 = 0;
  int E = 0;
  mpfr_prec_t bits = 0;
  std::vector<Complex> SB, SA;

  // Sum over n in [n_lo, n_hi] only (for blocked or partitioned builds).
  static TaylorMoments build_range(const TableauAnchor& anchor, long N, int E, long n_lo, long n_hi,
                                   mpfr_prec_t bits);
  static TaylorMoments build(const TableauAnchor& anchor, long N, int E, mpfr_prec_t bits, int threads = 1);
  TaylorMoments& operator+=(const TaylorMoments& o);

  void save(const std::filesystem::path& file) const;
  static TaylorMoments load(const std::filesystem::path& file);
  std::string cache_key() const;
};

struct StoredSums {
  TableauAnchor anchor;
  Real t;
  long n0 = 0, N = 0;
  int E = 0;
  mpfr_prec_t bits = 0;
  // E x E row-major, index i*E + j
  std::vector<Complex> B, A;
  // column sums over i; fast_eval only needs these
  std::vector<Complex> Bcol, Acol;

  const Complex& b_at(int i, int j) const { return B[static_cast<size_t>(i) * E + j]; }
  const Complex& a_at(int i, int j) const { return A[static_cast<size_t>(i) * E + j]; }
};

// B_ij = (t/4)^i / i! S_{2i+j}
StoredSums build_stored_sums(const TaylorMoments& m, const Real& t);
StoredSums build_stored_sums(const TableauAnchor& anchor, const Real& t, long N, int E, mpfr_prec_t bits);

struct EvalOffsets {
  Complex b, a, gamma;
};

class OffsetEnvelopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Offsets of the point (x, y) at the tableau's t. Throws if N at the point differs from the tableau's.
EvalOffsets eval_offsets(const StoredSums& sums, const Real& x, const Real& y);
// |b|, |a| <= bound
bool within_envelope(const EvalOffsets& o, double bound = 2.0);
// B(b) + gamma A(a); throws OffsetEnvelopeError outside |b|, |a| <= 2.
Complex fast_eval(const StoredSums& sums, const EvalOffsets& offs);
// Convenience: offsets then fast_eval, or direct compute_ft when outside the envelope.
Complex fast_or_direct(const StoredSums& sums, const Real& x, const Real& y, bool* used_fast = nullptr);

// Binary tableau cache. Directory from $DBN_CACHE_DIR when dir is empty; no caching if neither is set.
class TableauCache {
 public:
  explicit TableauCache(std::filesystem::path dir = {});
  bool enabled() const { return !dir_.empty(); }
  TaylorMoments get_or_build(const TableauAnchor& anchor, long N, int E, mpfr_prec_t bits, bool* hit = nullptr);
  std::filesystem::path path_for(const TableauAnchor& anchor, long N, int E, mpfr_prec_t bits) const;

 private:
  std::filesystem::path dir_;
};

struct CostReport {
  long N = 0, M = 0;
  int E = 0;
  double build_seconds = 0, eval_seconds = 0, direct_seconds_per_eval = 0;
  double total_seconds() const { return build_seconds + eval_seconds; }
  double speedup() const;  // (M * direct) / (build + eval)
};

// Measures build time and M fast evaluations at random offsets in the unit box around the anchor;
// direct cost is sampled on `direct_samples` points.
CostReport amortized_cost(const TableauAnchor& anchor, const Real& t, long N, long M, int E, mpfr_prec_t bits,
                          int direct_samples = 2);

}  // namespace dbn
