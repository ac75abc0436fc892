#include <benchmark/benchmark.h>

#include <random>

#include "nnbandit/nnbandit.hpp"

using namespace nnbandit;

namespace {

Vector gaussian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

ObservationHistory random_history(std::size_t dim, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.1);
  ObservationHistory h(dim);
  for (std::size_t i = 0; i < n; ++i) {
    h.append(gaussian(static_cast<Eigen::Index>(dim), rng) / std::sqrt(static_cast<double>(dim)),
             coin(rng) ? 1 : 0, static_cast<std::int64_t>(i));
  }
  return h;
}

}  // namespace

static void BM_BilinearFeatures(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto l = state.range(0);
  const Vector c = gaussian(l, rng), u = gaussian(l, rng);
  for (auto _ : state) benchmark::DoNotOptimize(bilinear_features(c, u));
}
BENCHMARK(BM_BilinearFeatures)->Arg(8)->Arg(64);

static void BM_FitMap(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto history = random_history(dim, static_cast<std::size_t>(state.range(1)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(fit_map(history, 1.0).mean);
}
BENCHMARK(BM_FitMap)->Args({16, 1000})->Args({64, 1000})->Args({64, 5000})->Unit(benchmark::kMillisecond);

// One online round's worth of work: refit after a single new observation.
static void BM_RefitOneRow(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  auto history = random_history(dim, n + 1, 3);
  ObservationHistory prefix(dim);
  for (std::size_t i = 0; i < n; ++i) {
    prefix.append(history.features().row(static_cast<Eigen::Index>(i)).transpose(),
                  static_cast<int>(history.rewards()[static_cast<Eigen::Index>(i)]), static_cast<std::int64_t>(i));
  }
  const auto previous = fit_map(prefix, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(refit_map(previous, history).mean);
}
BENCHMARK(BM_RefitOneRow)->Args({16, 2000})->Args({64, 2000})->Unit(benchmark::kMillisecond);

static void BM_SelectTopK(benchmark::State& state) {
  std::mt19937_64 rng(4);
  AgentConfig config;
  config.embedding_dim = 8;
  config.feature_map = state.range(0) ? FeatureMapKind::kBilinear : FeatureMapKind::kLinear;
  BanditAgent agent(config);
  const Vector c = gaussian(8, rng);
  std::vector<Vector> pool;
  for (int i = 0; i < 10; ++i) pool.push_back(gaussian(8, rng));
  for (auto _ : state) benchmark::DoNotOptimize(agent.select_topk(c, pool, 1));
}
BENCHMARK(BM_SelectTopK)->Arg(0)->Arg(1);

// Uniform random tokens give a nearly flat spectrum, the slow case.
static void BM_PcaSparse(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const Eigen::Index rows = 2000, cols = state.range(0);
  std::uniform_int_distribution<Eigen::Index> col(0, cols - 1);
  std::vector<Eigen::Triplet<double>> entries;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (int j = 0; j < 12; ++j) entries.emplace_back(r, col(rng), 1.0);
  }
  SparseRowMatrix x(rows, cols);
  x.setFromTriplets(entries.begin(), entries.end());
  for (auto _ : state) benchmark::DoNotOptimize(pca_fit(x, 64).components);
}
BENCHMARK(BM_PcaSparse)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
