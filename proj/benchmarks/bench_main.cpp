#include <benchmark/benchmark.h>

#include "dbn/multieval.hpp"
#include "dbn/oracle.hpp"
#include "dbn/region.hpp"
#include "dbn/rs.hpp"

using namespace dbn;

namespace {

constexpr mpfr_prec_t kBits = 128;

ModelParams params_at(const char* x) { return {Real(x, kBits), Real("0.2", kBits), Real("0.2", kBits)}; }

void BM_ft_direct(benchmark::State& st) {
  mp::ScopedPrecision prec(kBits);
  const ModelParams P = params_at(st.range(0) == 0 ? "1e6" : "1e8");
  RSTerms terms = compute_rs_terms(P);
  for (auto _ : st) benchmark::DoNotOptimize(compute_ft(P, terms));
  st.counters["N"] = static_cast<double>(terms.N);
}
BENCHMARK(BM_ft_direct)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_approximate(benchmark::State& st) {
  mp::ScopedPrecision prec(kBits);
  const ModelParams P = params_at("1e6");
  ApproxOptions o;
  o.with_ct = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(approximate(P, o));
}
BENCHMARK(BM_approximate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// build of the Taylor moments at a fixed anchor
void BM_moments_build(benchmark::State& st) {
  mp::ScopedPrecision prec(kBits);
  const TableauAnchor anchor{Real("1e8", kBits), Real("0.2", kBits)};
  const long N = compute_rs_terms(params_at("1e8")).N;
  for (auto _ : st) benchmark::DoNotOptimize(TaylorMoments::build(anchor, N, static_cast<int>(st.range(0)), kBits));
  st.counters["N"] = static_cast<double>(N);
}
BENCHMARK(BM_moments_build)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

// one fast evaluation against one direct evaluation at the same point
void BM_fast_eval(benchmark::State& st) {
  mp::ScopedPrecision prec(kBits);
  const TableauAnchor anchor{Real("1e8", kBits), Real("0.2", kBits)};
  const Real t("0.2", kBits);
  const long N = compute_rs_terms(params_at("1e8")).N;
  StoredSums sums = build_stored_sums(anchor, t, N, 20, kBits);
  const Real x("100000000.37", kBits), y("0.45", kBits);
  EvalOffsets offs = eval_offsets(sums, x, y);
  for (auto _ : st) benchmark::DoNotOptimize(fast_eval(sums, offs));
}
BENCHMARK(BM_fast_eval)->Unit(benchmark::kMicrosecond);

void BM_oracle(benchmark::State& st) {
  const double x = static_cast<double>(st.range(0));
  QuadratureSpec spec = QuadratureSpec::for_point(x);
  mp::ScopedPrecision prec(spec.precision.working_bits);
  const Complex z(Real(x), Real("0.2"));
  const Real t("0.2");
  for (auto _ : st) benchmark::DoNotOptimize(ht_direct(z, t, spec));
}
BENCHMARK(BM_oracle)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_power_sum(benchmark::State& st) {
  const long b = st.range(0);
  for (auto _ : st) benchmark::DoNotOptimize(bt_power_sum(0.2L, 1.8L, 1, b));
}
BENCHMARK(BM_power_sum)->Arg(1000)->Arg(1500000)->Arg(100000000)->Unit(benchmark::kMicrosecond);

void BM_power_sum_direct(benchmark::State& st) {
  const long b = st.range(0);
  for (auto _ : st) benchmark::DoNotOptimize(bt_power_sum_direct(0.2L, 1.8L, 1, b));
}
BENCHMARK(BM_power_sum_direct)->Arg(1000)->Arg(1500000)->Unit(benchmark::kMicrosecond);

void BM_claim_b(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(verify_claim_b(0.2L, 69098, 1500000, default_claim_b_intervals(), LeftEdgeData{1.0L, 1.5L}));
}
BENCHMARK(BM_claim_b)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
