#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbn/mp.hpp"
#include "dbn/multieval.hpp"
#include "dbn/rs.hpp"

namespace dbn {

struct BarrierSpec {
  Real X;  // left edge
  Real y_lo{0.2}, y_hi{1L};
  Real t_lo{0L}, t_hi{0.2};
  Real threshold{"0.00125"};
  double conservative_factor = 8.0;
  // fraction of the largest step allowed by the advance condition
  double step_fraction = 0.8;

  void validate() const;
};

struct DerivativeBounds {
  double Dz = 0, Dt = 0;
};

// The lemma's bounds on |df/dz| and |df/dt| at one point, times bound_safety.
DerivativeBounds derivative_bounds(const ModelParams& params, double bound_safety = 1.000001);

// Upper bounds valid on the whole box [x_lo, x_hi] x [y_lo, y_hi] x [t_lo, t_hi]. Re s_* is
// taken at t_lo (it grows with t), b_n^t at t_hi, and the y range is cut into y_cells slabs,
// each bounded by its lower end for |gamma| and its upper end for the n^y weight.
DerivativeBounds derivative_bounds_box(const Real& x_lo, const Real& x_hi, const Real& y_lo, const Real& y_hi,
                                       const Real& t_lo, const Real& t_hi, double bound_safety = 1.000001,
                                       int y_cells = 64);

struct MeshPoint {
  Real x, y;
};

struct Mesh {
  long n = 0;  // points per edge
  std::vector<MeshPoint> points;  // 4n points, counterclockwise from (X, y_lo)
};

// Least n with Dz/(2n) <= (expected_min - threshold)/conservative_factor.
long mesh_size(double Dz, double expected_min, double threshold, double conservative_factor);
Mesh mesh_rectangle(const BarrierSpec& spec, long n);
Mesh mesh_rectangle(const BarrierSpec& spec, double Dz, double expected_min);

class MeshTooCoarse : public std::runtime_error {
 public:
  explicit MeshTooCoarse(size_t index);
  size_t index;  // position j of the offending pair (j, j+1)
};

struct WindingResult {
  long winding = 0;
  double raw = 0;       // (1/2pi) sum of the argument increments
  double max_jump = 0;  // largest |arg(v_{j+1}/v_j)|
};

// Closed polygon through values (last joins the first). Throws MeshTooCoarse on a jump >= pi/2,
// std::domain_error on a zero value or a raw sum further than 1e-6 from an integer.
WindingResult winding_number(const std::vector<Complex>& values);

struct TStep {
  Real t, t_next;
  long mesh_n = 0;
  long evaluations = 0;  // including local refinements
  long winding = 0;
  double winding_raw = 0;
  double min_abs_f = 0;
  double Dz = 0, Dt = 0;
  double error_budget = 0;  // eA + eB + eC0 at the worst corner at t
  double margin = 0;        // min|f| - threshold - Dz/(2n) - Dt (t_next - t)
  bool cond_ok = false;
  double seconds = 0;
};

struct WindingReport {
  std::vector<TStep> t_steps;
  bool verified = false;
  std::string failure;  // empty when verified
  long N = 0;
  int E = 0;
  mpfr_prec_t bits = 0;
  double step_fraction = 0, conservative_factor = 0;
  double initial_budget = 0;  // worst corner at t_lo
  long direct_probes = 0;
  double max_probe_rel_diff = 0;  // fast vs direct on probed mesh points
  long direct_fallbacks = 0;
  double seconds = 0;
};

struct BarrierRunOptions {
  int E = 50;
  mpfr_prec_t bits = 128;
  double bound_safety = 1.000001;
  int threads = 1;
  int direct_probes_per_step = 1;
  unsigned long seed = 1;
  std::filesystem::path cache_dir;  // empty: $DBN_CACHE_DIR or no cache
  int max_refine_depth = 12;
  std::function<void(const TStep&)> on_step;
};

class BarrierSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Runs the t-schedule. A failed condition or a nonzero winding number is reported with
// verified = false (inconclusive); a spec that violates its invariants throws BarrierSpecError.
WindingReport adaptive_t_schedule(const BarrierSpec& spec, const BarrierRunOptions& opts = {});

// Worst-corner eA + eB + eC0 over the four corners of the rectangle at time t.
double worst_corner_budget(const BarrierSpec& spec, const Real& t, double bound_safety, mpfr_prec_t bits,
                           bool lower_corners_only = false);

// |prod_{p <= prime_cut} (1 - p^{-(1 - ix/2)})^{-1}|
double euler_product_abs(const Real& x, int prime_cut);
// {(X/4pi) log p}
std::vector<double> fractional_parts(const Real& X, const std::vector<int>& primes);

struct LocationCandidate {
  long q = 0;
  double euler_min = 0;  // min over x in {X_base+q-0.5, X_base+q, X_base+q+0.5}
  double f0_min = -1;    // min |f_0(x + i)| over the same x, -1 if not ranked
};

// Shifts q in [q_lo, q_hi] whose euler_min exceeds threshold, ranked by f0_min (descending)
// when rank is set, otherwise in increasing q.
std::vector<LocationCandidate> barrier_location_score(const Real& X_base, long q_lo, long q_hi, int prime_cut,
                                                      double threshold = 4.0, bool rank = true,
                                                      mpfr_prec_t bits = 128);

}  // namespace dbn
