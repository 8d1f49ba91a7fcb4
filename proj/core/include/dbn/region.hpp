#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dbn {

// Region bounds work in long double: every sum is of positive terms or is compared against
// margins of 1e-3 and larger.

// sum_{n=a}^{b} b_n^t n^{-sigma}; direct for the first 2^16 terms past a, Euler-Maclaurin beyond.
long double bt_power_sum(long double t, long double sigma, long a, long b);
// Direct blocked sum regardless of length.
long double bt_power_sum_direct(long double t, long double sigma, long a, long b);

// sum_{n<=N0} b_n^t/n^sigma + max(N0^{1-sigma} b_N0^t, N^{1-sigma} b_N^t) log(N/N0).
// Throws std::invalid_argument unless N >= N0 >= 1 and sigma > (t/2) log N.
long double lemma_largen_bound(long N, long N0, long double sigma, long double t);

struct ClaimCResult {
  long N0 = 0, N1 = 0;
  long double t = 0;
  long double sigma1 = 0, sigma2 = 0;  // sigma', sigma'' at N = N1
  long double A = 0, B = 0;
  long double x_N1 = 0;                             // 4 pi N1^2 - pi t/4
  std::vector<std::pair<long, long double>> B_at;  // B at N1, 2 N1, 4 N1
  bool B_decreasing = false;
  long double deviation = 0;  // A + B - 1, so f = 1 + O(deviation)
  bool nonvanishing = false;  // deviation < 1 - 1.25e-3
  bool passed = false;        // A + B < 1.955
};

long double claim_c_B(long N, long N0, long double t);
long double claim_c_A(long N, long N0, long double t);
ClaimCResult verify_claim_c(long double t = 0.2L, long N1 = 1500000, long N0 = 69098);

// Coefficients of E_{t,P} times the Dirichlet polynomial of length N, with P the primes dividing D.
class MollifierTableau {
 public:
  MollifierTableau(long double t, long N, int D = 30, long double alpha_const = 1.03L, long double alpha_exp = 0.2L);

  long double t() const { return t_; }
  long N() const { return N_; }
  int D() const { return D_; }
  const std::vector<int>& divisors() const { return divs_; }
  long double lambda(int d) const;  // prod_{p|d} (-b_p^t)
  // beta_n = sum_{d | (n, D), n/d <= N} lambda_d b_{n/d}^t, alpha_n the same with the (n/d)^alpha_exp weight
  long double beta(long n) const;
  long double alpha(long n) const;
  void coeffs(long n, long double& beta, long double& alpha) const;

 private:
  long double t_, ac_, ae_;
  long N_;
  int D_;
  std::vector<int> divs_;
  std::vector<long double> lam_;  // indexed like divs_
  std::vector<long double> b_, w_;  // b_m^t and m^ae b_m^t for m <= N
};

// F_{N-,N+}: the improved triangle inequality bound with sigma, summed to n <= D N+ (the tableau's N).
long double improved_triangle_lower(const MollifierTableau& tab, long N_minus, long double sigma);
// The plain triangle inequality on the same inputs.
long double naive_triangle_lower(const MollifierTableau& tab, long N_minus, long double sigma);

// offset + 0.1 log N-
long double sigma_floor(long N_minus, long double offset = 0.599L);
// 1.644 sum_{n <= N} (n/N)^0.2 b_n^t n^{-sigma} (n^kappa - 1)
long double z_term(long N, long double sigma, long double t, long double kappa = 4e-13L);
// The crude bound 1.644 sum_{n <= N1} b_n^t n^{-1.714} (n^kappa - 1)
long double z_crude(long N1, long double t, long double kappa = 4e-13L);

struct IntervalBoundResult {
  long N_minus = 0, N_plus = 0;
  long double sigma_floor = 0;
  long double F_value = 0, F_naive = 0;
  long double Z_value = 0;
  bool passed = false;         // F - Z >= 2.14e-3
  bool passed_strict = false;  // F >= 2.15e-3
  int depth = 0;               // split depth from the auto-splitter
};

IntervalBoundResult interval_bound(long double t, long N_minus, long N_plus, long double Z,
                                   long double sigma_offset = 0.599L, bool with_naive = false);

struct EdgeCheck {
  std::string edge;
  bool passed = false;
  long double magnitude_lower = 0;  // of E_{t,5} f_t
  long double arg_upper = 0;
  long double dist_lower = 0;  // to (-inf, 0]
};

struct MollifierEnvelope {
  long double sigma = 0;
  long double upper = 0, lower = 0, phase = 0;
};

// prod (1 +- b_p^t p^{-sigma}) and sum asin(b_p^t p^{-sigma}) over p | D
MollifierEnvelope mollifier_envelope(long double t, long double sigma, int D = 30);

struct LeftEdgeData {
  long double min_abs_f = 0;
  long double max_abs_arg = 0;
};

struct RegionReport {
  long N0 = 0, N1 = 0;
  long double t = 0;
  MollifierEnvelope envelope;
  std::vector<EdgeCheck> edges;
  std::vector<IntervalBoundResult> intervals;
  long double top_sum_B = 0, top_sum_A = 0;  // the 1 + O(0.7) and O(0.1) sums of the top edge
  long double Z = 0;
  bool Z_ok = false;  // Z <= 1e-10
  bool passed = false;
  std::string failure;
};

std::vector<std::pair<long, long>> default_claim_b_intervals();

// Checks the four edges. The right edge uses the claim (c) estimate f = 1 + O(right_deviation), the left edge the
// given barrier data at t, the top edge the displayed sums and the bottom edge per-interval F - Z, with
// failing intervals bisected (geometrically) up to max_depth times.
RegionReport verify_claim_b(long double t, long N0, long N1, const std::vector<std::pair<long, long>>& intervals,
                            const LeftEdgeData& left, long double right_deviation = 0.955L,
                            int max_depth = 8, long double sigma_offset = 0.599L);

// |(1 - beta_2)| |sum alpha_n| bracket from the two-term mollifier lemma.
// Throws std::domain_error if beta_2 alpha_{n/2} is not on [0, alpha_n] for some even n.
std::pair<long double, long double> trib2_bounds(const std::vector<std::complex<long double>>& alphas,
                                                 std::complex<long double> beta2, long double tol = 1e-12L);

struct EnvelopePoint {
  long N0 = 0;
  long double t0 = 0, y0 = 0;
  long double x = 0;       // 4 pi N0^2 - pi t0/4
  long double Lambda = 0;  // t0 + y0^2/2
  long double lower_bound = 0;
};

// Lower bound for |(1 - beta_2) f_{t0}(x + i y0)| at N = N0 from the two-term mollifier lemma
// applied to both sums of f_{t0}.
EnvelopePoint mollified_lower_bound(long N0, long double t0, long double y0);

std::vector<EnvelopePoint> envelope_scan(const std::vector<long double>& t_grid,
                                         const std::vector<long double>& y_grid, const std::vector<long>& N_grid,
                                         long double target = 0.03L);

struct Table1Row {
  std::string X;  // decimal
  long double t0, y0, Lambda;
  long N0;
  long double bound;  // reference value
};

const std::vector<Table1Row>& table1_rows();

struct Table1Check {
  Table1Row row;
  long N0_computed = 0;
  long double Lambda_computed = 0;
  EnvelopePoint point;
};

Table1Check check_table1_row(const Table1Row& row);

}  // namespace dbn
