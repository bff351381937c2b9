// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sideinfo/benefit.hpp"
#include "sideinfo/causality.hpp"
#include "sideinfo/parallel.hpp"
#include "sideinfo/sufficiency.hpp"

using namespace sideinfo;

namespace {

ProcessModel chain() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> k(16);
  for (std::size_t r = 0; r < 4; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < 4; ++c) s += k[r * 4 + c] = u(rng);
    for (std::size_t c = 0; c < 4; ++c) k[r * 4 + c] /= s;
  }
  return ProcessModel::stationary_markov(2, 2, k);
}

std::vector<Joint> joints(std::size_t count) {
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> e(1.0);
  std::vector<Joint> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> p(5 * 5);
    double s = 0;
    for (auto& v : p) s += v = e(rng);
    for (auto& v : p) v /= s;
    out.push_back(Joint::validate(5, 5, p));
  }
  return out;
}

// range(0) is the worker count; 0 selects the serial reference.
void BM_Unroll(benchmark::State& st) {
  const auto m = chain();
  set_worker_count(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) == 0 ? unroll_serial(m, 10) : unroll(m, 10));
}

void BM_PrefixMarginal(benchmark::State& st) {
  const auto table = unroll_serial(chain(), 10);
  set_worker_count(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) == 0 ? prefix_marginal_serial(table, 9, 8) : prefix_marginal(table, 9, 8));
}

void BM_BenefitBatch(benchmark::State& st) {
  const auto js = joints(4096);
  const auto l = builtin_loss("spherical", 5);
  set_worker_count(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) == 0 ? benefit_batch_serial(l, js) : benefit_batch(l, js));
}

void BM_FindViolation(benchmark::State& st) {
  const auto l = builtin_loss("log", 5);
  set_worker_count(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) == 0 ? find_violation_serial(l, 5, 2000, 3) : find_violation(l, 5, 2000, 3));
}

}  // namespace

BENCHMARK(BM_Unroll)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PrefixMarginal)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BenefitBatch)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FindViolation)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
