// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. An optional argument runs only the criteria
// whose name contains it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nnbandit/nnbandit.hpp"
#include "oracles.hpp"

using namespace nnbandit;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes, pinned.
constexpr double kBilinearTol = 1e-10;
constexpr double kBilinearSeconds = 1.0;
constexpr double kMapTol = 1e-4;
constexpr double kGradientTol = 1e-8;
constexpr double kFdGradientTol = 1e-6;
constexpr double kFdHessianTol = 1e-5;
constexpr double kLaplaceSeconds = 10.0;
constexpr double kSamplingSeconds = 5.0;
constexpr double kSamplingSe = 3.0;
constexpr double kCalibrationSe = 3.0;
constexpr double kRecallZ = 2.576;  // two-sided 99%, three k values per check
constexpr double kCentralMargin = 0.05;
constexpr double kCentralSeconds = 600.0;

constexpr std::size_t kDim = 8;
constexpr std::size_t kOnline = 1000;
constexpr std::size_t kEval = 200;
constexpr std::size_t kCandidates = 10;
constexpr std::size_t kRounds = 5000;
constexpr std::uint64_t kEnvSeed = 0;
constexpr std::size_t kSeeds = 10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Vector gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = normal(rng);
  return v;
}

std::vector<std::uint64_t> seeds() {
  std::vector<std::uint64_t> s(kSeeds);
  for (std::size_t i = 0; i < kSeeds; ++i) s[i] = i;
  return s;
}

double mean_final(const std::vector<SimulationCell>& cells, PolicyKind policy, FeatureMapKind map) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& cell : cells) {
    if (cell.key.policy == policy && cell.key.feature_map == map) {
      sum += cell.curve.final_value();
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : NAN;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Shared environment for the replay criteria: 1000 online contexts plus a
// disjoint evaluation tail of 200 from the same ground truth.
struct Environment {
  SyntheticEnvironment env = make_synthetic(kDim, kOnline + kEval, kCandidates, kEnvSeed);
  DataSplit parts = split_dataset(env.dataset, SplitSizes{kOnline, kEval});
  std::vector<ResolvedContext> eval = resolve_contexts(parts.eval, env.embeddings);
};

const Environment& environment() {
  static const Environment e;
  return e;
}

ExperimentConfig central_config(std::size_t k) {
  ExperimentConfig config;
  config.k = k;
  config.rounds = kRounds;
  config.seeds = seeds();
  return config;
}

// The central runs feed three criteria; compute them once.
struct CentralRuns {
  std::vector<SimulationCell> cells;  // k = 1, all agents
  std::vector<SimulationCell> ts_k2;  // both maps
  std::vector<SimulationCell> ts_k5;
  double seconds = 0.0;
};

const CentralRuns& central_runs() {
  static const CentralRuns runs = [] {
    const auto& e = environment();
    CentralRuns r;
    const auto start = Clock::now();
    auto ts = central_config(1);
    r.cells = run_simulation(ts, e.parts.online, e.env.embeddings);
    auto random = central_config(1);
    random.policies = {PolicyKind::kRandom};
    random.feature_maps = {FeatureMapKind::kLinear};
    for (auto& cell : run_simulation(random, e.parts.online, e.env.embeddings)) r.cells.push_back(std::move(cell));
    r.seconds = seconds_since(start);
    r.ts_k2 = run_simulation(central_config(2), e.parts.online, e.env.embeddings);
    r.ts_k5 = run_simulation(central_config(5), e.parts.online, e.env.embeddings);
    return r;
  }();
  return runs;
}

Outcome bilinear_equivalence() {
  std::mt19937_64 rng(1);
  const std::size_t l = 5;
  double worst = 0.0;
  const auto start = Clock::now();
  for (int t = 0; t < 100; ++t) {
    const Vector c = gaussian(l, rng), u = gaussian(l, rng);
    Matrix m(l, l);
    for (auto& x : m.reshaped()) x = std::normal_distribution<double>()(rng);
    const double got = flatten_row_major(m).dot(bilinear_features(c, u));
    worst = std::max(worst, std::abs(got - oracle::bilinear(c, m, u)));
  }
  const double secs = seconds_since(start);
  return {worst < kBilinearTol && secs < kBilinearSeconds,
          fmt("max |diff| %.2e over 100 triples, %.4f s", worst, secs)};
}

Outcome laplace_oracle() {
  std::mt19937_64 rng(2);
  double worst_map = 0.0, worst_grad = 0.0, worst_fd_g = 0.0, worst_fd_h = 0.0;
  bool all_converged = true;
  const auto start = Clock::now();
  for (int p = 0; p < 20; ++p) {
    const std::size_t d = 1 + static_cast<std::size_t>(p) % 8;
    const std::size_t n = 10 + static_cast<std::size_t>(p * 7) % 41;
    const Vector truth = gaussian(d, rng);
    ObservationHistory history(d);
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd f(n);
    std::uniform_real_distribution<double> unif;
    for (std::size_t i = 0; i < n; ++i) {
      const Vector row = gaussian(d, rng);
      const int reward = unif(rng) < oracle::logistic(row.dot(truth)) ? 1 : 0;
      history.append(row, reward, static_cast<std::int64_t>(i));
      x.row(static_cast<Eigen::Index>(i)) = row.transpose();
      f[static_cast<Eigen::Index>(i)] = reward;
    }
    const auto state = fit_map(history, 1.0);
    all_converged = all_converged && state.converged;
    const Vector reference = oracle::logistic_minimizer_gd(x, f, 1.0);
    worst_map = std::max(worst_map, (state.mean - reference).lpNorm<Eigen::Infinity>());
    worst_grad = std::max(worst_grad, gradient(state.mean, history, 1.0).norm());

    // Central differences of the oracle objective at a random point.
    const Vector w = gaussian(d, rng);
    const double h = 1e-5;
    const Vector g = gradient(w, history, 1.0);
    const Matrix hess = hessian(w, history, 1.0);
    for (std::size_t i = 0; i < d; ++i) {
      Vector e = Vector::Zero(static_cast<Eigen::Index>(d));
      e[static_cast<Eigen::Index>(i)] = h;
      const double fd = (oracle::logistic_objective(x, f, 1.0, w + e) -
                         oracle::logistic_objective(x, f, 1.0, w - e)) / (2 * h);
      worst_fd_g = std::max(worst_fd_g, std::abs(fd - g[static_cast<Eigen::Index>(i)]));
      const Vector col = (oracle::logistic_gradient(x, f, 1.0, w + e) -
                          oracle::logistic_gradient(x, f, 1.0, w - e)) / (2 * h);
      worst_fd_h = std::max(worst_fd_h, (col - hess.col(static_cast<Eigen::Index>(i))).lpNorm<Eigen::Infinity>());
    }
  }
  const double secs = seconds_since(start);
  const bool pass = all_converged && worst_map <= kMapTol && worst_grad <= kGradientTol &&
                    worst_fd_g <= kFdGradientTol && worst_fd_h <= kFdHessianTol && secs < kLaplaceSeconds;
  return {pass, fmt("20 problems: max |w-w_gd| %.2e, max |g(w)| %.2e, fd grad %.2e, fd hess %.2e, %.2f s",
                    worst_map, worst_grad, worst_fd_g, worst_fd_h, secs)};
}

Outcome sampling_variance() {
  const std::size_t n = 100000;
  const auto state = PosteriorState::from_factor(Vector::Zero(1), Matrix::Constant(1, 1, 2.0), 1.0);
  Rng rng(3);
  const auto start = Clock::now();
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = sample_weights(state, rng)[0];
    sum += v;
    sq += v * v;
  }
  const double secs = seconds_since(start);
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  const double var = (sq - dn * mean * mean) / (dn - 1);
  const double se = 0.25 * std::sqrt(2.0 / (dn - 1));
  return {std::abs(var - 0.25) <= kSamplingSe * se && secs < kSamplingSeconds,
          fmt("precision 4: variance %.5f, |dev| = %.2f SE, %.3f s", var, std::abs(var - 0.25) / se, secs)};
}

// A greedy agent frozen at a given weight vector.
BanditAgent pinned(const Vector& w) {
  AgentConfig config;
  config.policy = PolicyKind::kGreedy;
  config.embedding_dim = kDim;
  config.frozen = true;
  BanditAgent agent(config);
  agent.set_posterior(PosteriorState::from_factor(w, Matrix::Identity(w.size(), w.size()), 1.0));
  return agent;
}

Outcome regret_formula() {
  const bool arith = avg_cumulative_regret(std::vector<int>(50, 0)) == 0.0 &&
                     avg_cumulative_regret(std::vector<int>(50, 1)) == 1.0 &&
                     avg_cumulative_regret(std::vector<int>{1, 0, 0, 0}) == 0.25;
  const auto& e = environment();
  ReplayOptions options;
  options.rounds = 2000;
  const Vector w = flatten_row_major(e.env.truth.true_matrix);
  auto oracle_agent = pinned(w);
  auto anti_agent = pinned(-w);
  const double r_oracle = run_replay(e.parts.online, e.env.embeddings, oracle_agent, options).curve.final_value();
  const double r_anti = run_replay(e.parts.online, e.env.embeddings, anti_agent, options).curve.final_value();
  return {arith && r_oracle == 0.0 && r_anti == 1.0,
          fmt("examples %s, replay oracle R=%.4f, anti-oracle R=%.4f", arith ? "exact" : "WRONG", r_oracle, r_anti)};
}

Outcome random_calibration() {
  const auto& e = environment();
  AgentConfig config;
  config.policy = PolicyKind::kRandom;
  config.embedding_dim = kDim;
  config.seed = 4;
  BanditAgent agent(config);
  ReplayOptions options;
  options.rounds = 10000;
  options.seed = 4;
  const double r = run_replay(e.parts.online, e.env.embeddings, agent, options).curve.final_value();
  const double se = oracle::binomial_se(0.9, 10000.0);
  bool pass = std::abs(r - 0.9) <= kCalibrationSe * se;
  std::string detail = fmt("T=10000 R=%.4f (%.2f SE); recall over %zu:", r, std::abs(r - 0.9) / se, e.eval.size());
  for (std::size_t k : {1u, 2u, 5u}) {
    const double p = static_cast<double>(k) / static_cast<double>(kCandidates);
    const double got = recall_at_k(agent, e.eval, k);
    const double half = kRecallZ * oracle::binomial_se(p, static_cast<double>(e.eval.size()));
    pass = pass && std::abs(got - p) <= half;
    detail += fmt(" @%zu %.3f in [%.3f, %.3f]", k, got, p - half, p + half);
  }
  return {pass, detail};
}

Outcome central_claim() {
  const auto& runs = central_runs();
  const double bi = mean_final(runs.cells, PolicyKind::kThompsonSampling, FeatureMapKind::kBilinear);
  const double lin = mean_final(runs.cells, PolicyKind::kThompsonSampling, FeatureMapKind::kLinear);
  const double rnd = mean_final(runs.cells, PolicyKind::kRandom, FeatureMapKind::kLinear);
  const bool pass = bi + kCentralMargin <= lin && lin < rnd && runs.seconds < kCentralSeconds;
  return {pass, fmt("R(T=%zu), %zu seeds: bilinear-TS %.4f, linear-TS %.4f, random %.4f; %.1f s",
                    kRounds, kSeeds, bi, lin, rnd, runs.seconds)};
}

Outcome k_monotonicity() {
  const auto& runs = central_runs();
  bool pass = true;
  std::string detail = fmt("%zu seeds:", kSeeds);
  for (const auto map : {FeatureMapKind::kLinear, FeatureMapKind::kBilinear}) {
    const double r1 = mean_final(runs.cells, PolicyKind::kThompsonSampling, map);
    const double r2 = mean_final(runs.ts_k2, PolicyKind::kThompsonSampling, map);
    const double r5 = mean_final(runs.ts_k5, PolicyKind::kThompsonSampling, map);
    pass = pass && r2 < r1 && r5 < r2;
    detail += fmt("%s %s-TS k=1 %.4f, k=2 %.4f, k=5 %.4f", map == FeatureMapKind::kLinear ? "" : ";", std::string(to_string(map)).c_str(), r1, r2, r5);
  }
  return {pass, detail};
}

Outcome recall_monotonicity() {
  const auto& runs = central_runs();
  const auto& e = environment();
  std::size_t agents = 0, violations = 0;
  auto check = [&](const std::vector<SimulationCell>& cells, std::size_t k) {
    for (const auto& cell : cells) {
      BanditAgent agent(agent_config(central_config(k), cell.key, kDim));
      agent.set_posterior(cell.posterior);
      double previous = 0.0;
      for (std::size_t j : {1u, 2u, 5u}) {
        const double r = recall_at_k(agent, e.eval, j);
        if (r < previous) ++violations;
        previous = r;
      }
      ++agents;
    }
  };
  check(runs.cells, 1);
  check(runs.ts_k2, 2);
  check(runs.ts_k5, 5);
  const double oracle_r1 = recall_at_k(pinned(flatten_row_major(e.env.truth.true_matrix)), e.eval, 1);
  return {violations == 0 && oracle_r1 == 1.0,
          fmt("%zu agents, %zu violations of R@1<=R@2<=R@5; oracle R@1 = %.4f", agents, violations, oracle_r1)};
}

Outcome determinism() {
  const auto env = make_synthetic(kDim, 1000, kCandidates, 5);
  ExperimentConfig config;
  config.policies = {PolicyKind::kThompsonSampling, PolicyKind::kGreedy, PolicyKind::kRandom};
  config.rounds = 300;
  config.seeds = {0, 1};
  const fs::path root = fs::temp_directory_path() / "nnbandit_acceptance";
  fs::remove_all(root);
  run_experiment(config, env.dataset, env.embeddings, root / "a");
  run_experiment(config, env.dataset, env.embeddings, root / "b");
  bool same = true;
  std::string detail;
  for (const char* name : {"regret.csv", "recall.csv"}) {
    const auto a = slurp(root / "a" / name), b = slurp(root / "b" / name);
    same = same && !a.empty() && a == b;
    detail += fmt("%s %zu bytes %s; ", name, a.size(), a == b ? "identical" : "DIFFER");
  }
  fs::remove_all(root);
  return {same, detail + "2 runs of 12 cells"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string filter = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria{
      {"bilinear_equivalence", bilinear_equivalence},
      {"laplace_vs_oracle", laplace_oracle},
      {"posterior_sampling_variance", sampling_variance},
      {"regret_formula", regret_formula},
      {"random_calibration", random_calibration},
      {"central_bilinear_lt_linear_lt_random", central_claim},
      {"regret_decreases_with_k", k_monotonicity},
      {"recall_monotone_and_oracle", recall_monotonicity},
      {"byte_identical_outputs", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!filter.empty() && std::string(c.name).find(filter) == std::string::npos) continue;
    Outcome outcome{false, ""};
    try {
      outcome = c.run();
    } catch (const std::exception& ex) {
      outcome.detail = std::string("exception: ") + ex.what();
    }
    if (!outcome.pass) ++failures;
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", c.name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
