#include <benchmark/benchmark.h>

#include <random>

#include "bnx/compiler.hpp"
#include "bnx/explainer.hpp"

namespace {

using namespace bnx;

// Binary naive Bayes with random error rates; fixed seed per size.
NaiveBayesClassifier random_binary_nb(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> rate(0.02, 0.6);
  std::vector<ErrorRates> rates;
  for (std::size_t i = 0; i < n; ++i) rates.push_back({"X" + std::to_string(i), rate(rng), rate(rng)});
  return NaiveBayesClassifier::from_rates(0.4, 0.5, rates);
}

Instance random_instance(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance x(n);
  for (auto& v : x) v = static_cast<Value>(rng() & 1u);
  return x;
}

void BM_CompileNaiveBayes(benchmark::State& state) {
  const auto nb = random_binary_nb(static_cast<std::size_t>(state.range(0)));
  std::size_t nodes = 0;
  for (auto _ : state) {
    auto r = compile_naive_bayes(nb);
    nodes = size(r.odd);
    benchmark::DoNotOptimize(r.odd.root());
  }
  state.counters["odd_size"] = static_cast<double>(nodes);
}
BENCHMARK(BM_CompileNaiveBayes)->DenseRange(8, 24, 4)->Unit(benchmark::kMillisecond);

void BM_McExplanations(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = compile_naive_bayes(random_binary_nb(n)).odd;
  const auto x = random_instance(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(mc_explanations(f, x).set.root());
  state.counters["odd_size"] = static_cast<double>(size(f));
}
BENCHMARK(BM_McExplanations)->DenseRange(8, 24, 4)->Unit(benchmark::kMicrosecond);

void BM_PiInst(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = compile_naive_bayes(random_binary_nb(n)).odd;
  const auto x = random_instance(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(explain_pi(f, x).set.root());
}
BENCHMARK(BM_PiInst)->DenseRange(8, 20, 4)->Unit(benchmark::kMicrosecond);

void BM_PiCoverFiltered(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = compile_naive_bayes(random_binary_nb(n)).odd;
  auto x = random_instance(n, 2);
  const bool d = evaluate(f, x);
  const auto g = d ? f : complement(f);
  for (auto _ : state) benchmark::DoNotOptimize(filter_compatible(pi_cover(g), x).set.root());
}
BENCHMARK(BM_PiCoverFiltered)->DenseRange(8, 20, 4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
