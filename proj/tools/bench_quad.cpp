// Serial vs OpenMP tensor-product kernels.

#include <benchmark/benchmark.h>

#include <cmath>

#include "asep/exact.hpp"
#include "asep/quad.hpp"

using namespace asep;

namespace {

auto sample_term(int k) {
  return [k](const int* idx) {
    cplx s = 0.0;
    for (int a = 0; a < k; ++a) s += cplx(std::cos(0.01 * idx[a]), std::sin(0.02 * idx[a] + a));
    return std::exp(-0.001 * s);
  };
}

void BM_TensorSumSerial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::vector<int> dims(3, n);
  auto term = sample_term(3);
  for (auto _ : st) benchmark::DoNotOptimize(tensor_sum_serial(dims, term));
  st.SetItemsProcessed(st.iterations() * n * n * n);
}

void BM_TensorSumParallel(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::vector<int> dims(3, n);
  auto term = sample_term(3);
  for (auto _ : st) benchmark::DoNotOptimize(tensor_sum(dims, term));
  st.SetItemsProcessed(st.iterations() * n * n * n);
}

void BM_ProductIntegral(benchmark::State& st) {
  const bool par = st.range(0) != 0;
  ModelParams mp = ModelParams::from_tau(0.5);
  std::vector<Contour> cs = nested_contours(3, mp);
  QuadratureRule r;
  r.nodes_per_piece = 48;
  auto f = [](const cplx* z) { return 1.0 / ((z[0] + 2.0) * (z[1] + 3.0) * (z[2] + 4.0)); };
  for (auto _ : st) benchmark::DoNotOptimize(integrate_product(f, cs, r, par).value);
}

void BM_HalfflatMoment(benchmark::State& st) {
  EvalParams ev;
  ev.params = ModelParams::from_tau(0.5);
  ev.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(halfflat_moment(3, 1, 0.5, ev).value);
}

}  // namespace

BENCHMARK(BM_TensorSumSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TensorSumParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProductIntegral)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HalfflatMoment)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
