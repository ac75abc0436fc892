#include "nnbandit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "nnbandit/errors.hpp"
#include "nnbandit/posterior_io.hpp"

namespace nnbandit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t parse_size(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError("expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

ReplayDataset slice(const ReplayDataset& dataset, std::size_t first, std::size_t count) {
  ReplayDataset out;
  const auto begin = dataset.contexts.begin() + static_cast<std::ptrdiff_t>(first);
  out.contexts.assign(begin, begin + static_cast<std::ptrdiff_t>(count));
  return out;
}

void write_text_file(const std::filesystem::path& path,
                     const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  body(out);
  if (!out) throw IoError(path, "write failed");
}

}  // namespace

SplitSizes parse_split(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("split must look like ONLINE:EVAL, got '" + std::string(text) + "'");
  }
  return SplitSizes{parse_size(text.substr(0, colon)), parse_size(text.substr(colon + 1))};
}

SplitSizes resolve_split(const ExperimentConfig& config, std::size_t n_contexts) {
  if (config.split) return *config.split;
  const std::size_t online = (n_contexts * 4) / 5;
  return SplitSizes{online, n_contexts - online};
}

DataSplit split_dataset(const ReplayDataset& dataset, SplitSizes sizes) {
  if (sizes.online + sizes.eval > dataset.contexts.size()) {
    throw ValidationError("split " + std::to_string(sizes.online) + ":" +
                          std::to_string(sizes.eval) + " exceeds the " +
                          std::to_string(dataset.contexts.size()) + " available contexts");
  }
  return DataSplit{slice(dataset, 0, sizes.online), slice(dataset, sizes.online, sizes.eval)};
}

void validate_config(const ExperimentConfig& config, const ReplayDataset& dataset,
                     const EmbeddingStore& store) {
  if (config.policies.empty()) throw ValidationError("no policy given");
  if (config.feature_maps.empty()) throw ValidationError("no feature map given");
  if (config.seeds.empty()) throw ValidationError("no seed given");
  // Repeats would produce two cells with the same output file.
  const auto require_unique = [](auto values, const char* what) {
    std::sort(values.begin(), values.end());
    if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
      throw ValidationError(std::string("repeated ") + what);
    }
  };
  require_unique(config.policies, "policy");
  require_unique(config.feature_maps, "feature map");
  require_unique(config.seeds, "seed");
  if (config.rounds < 1) throw ValidationError("rounds must be >= 1");
  if (config.k < 1) throw ValidationError("k must be >= 1");
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
    throw ValidationError("lambda must be finite and > 0");
  }
  if (config.log_stride < 1) throw ValidationError("log stride must be >= 1");
  if (config.newton_max_iterations < 1) throw ValidationError("newton max iterations must be >= 1");

  const auto sizes = resolve_split(config, dataset.contexts.size());
  if (sizes.online < 1) throw ValidationError("online split must contain at least one context");
  const auto parts = split_dataset(dataset, sizes);
  if (config.k >= parts.online.min_pool_size()) {
    throw ValidationError("k = " + std::to_string(config.k) +
                          " must be smaller than the smallest candidate pool (" +
                          std::to_string(parts.online.min_pool_size()) + ")");
  }
  for (const auto rk : config.recall_ks) {
    if (rk < 1) throw ValidationError("recall k must be >= 1");
    if (!parts.eval.contexts.empty() && rk > parts.eval.min_pool_size()) {
      throw ValidationError("recall k = " + std::to_string(rk) +
                            " exceeds the smallest evaluation pool");
    }
  }
  for (const auto map : config.feature_maps) {
    FeatureMap check(map, store.dim(), config.feature_dim_cap);
  }
  validate_embeddings(parts.online, store);
  validate_embeddings(parts.eval, store);
}

std::string cell_name(const CellKey& key) {
  return std::string(to_string(key.policy)) + "_" + std::string(to_string(key.feature_map)) +
         "_seed" + std::to_string(key.seed);
}

std::vector<CellKey> experiment_cells(const ExperimentConfig& config) {
  std::vector<CellKey> keys;
  for (const auto policy : config.policies) {
    for (const auto map : config.feature_maps) {
      for (const auto seed : config.seeds) keys.push_back(CellKey{policy, map, seed});
    }
  }
  return keys;
}

AgentConfig agent_config(const ExperimentConfig& config, const CellKey& key,
                         std::size_t embedding_dim) {
  AgentConfig agent;
  agent.policy = key.policy;
  agent.feature_map = key.feature_map;
  agent.embedding_dim = embedding_dim;
  agent.lambda = config.lambda;
  agent.feature_dim_cap = config.feature_dim_cap;
  agent.newton.max_iterations = config.newton_max_iterations;
  // Agent draws are decorrelated from the context stream of the same seed.
  agent.seed = splitmix64(key.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  return agent;
}

std::vector<SimulationCell> run_simulation(const ExperimentConfig& config,
                                           const ReplayDataset& online,
                                           const EmbeddingStore& store) {
  const auto contexts = resolve_contexts(online, store);
  const auto keys = experiment_cells(config);
  std::vector<SimulationCell> cells(keys.size());
  std::vector<std::exception_ptr> errors(keys.size());
  std::mutex progress_mutex;

  auto run_cell = [&](std::size_t i) {
    try {
      const auto& key = keys[i];
      BanditAgent agent(agent_config(config, key, store.dim()));
      ReplayOptions options;
      options.rounds = config.rounds;
      options.k = config.k;
      options.seed = key.seed;
      if (config.progress) {
        options.progress = [&, name = cell_name(key)](std::size_t round) {
          std::ostringstream line;
          line << name << ": round " << round << "/" << config.rounds;
          std::lock_guard lock(progress_mutex);
          config.progress(line.str());
        };
      }
      auto replay = run_replay(contexts, agent, options);
      cells[i] = SimulationCell{key, std::move(replay.curve), agent.posterior()};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::max<std::size_t>(keys.size(), 1)));
  if (threads == 1) {
    for (std::size_t i = 0; i < keys.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < keys.size(); i = next++) run_cell(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return cells;
}

std::vector<RecallRow> evaluate_recall(const ExperimentConfig& config,
                                       std::span<const CellKey> keys,
                                       std::span<const PosteriorState> posteriors,
                                       const ReplayDataset& eval, const EmbeddingStore& store) {
  if (keys.size() != posteriors.size()) {
    throw UsageError("evaluate_recall: keys and posteriors differ in length");
  }
  if (eval.contexts.empty()) throw ValidationError("evaluation split is empty");
  const auto contexts = resolve_contexts(eval, store);

  // (policy, map) -> per-k sums, in first-seen order.
  std::vector<std::pair<PolicyKind, FeatureMapKind>> groups;
  std::map<std::tuple<int, int, std::size_t>, std::pair<double, std::size_t>> sums;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto group = std::make_pair(keys[i].policy, keys[i].feature_map);
    if (std::find(groups.begin(), groups.end(), group) == groups.end()) groups.push_back(group);
    BanditAgent agent(agent_config(config, keys[i], store.dim()));
    agent.set_posterior(posteriors[i]);
    for (const auto k : config.recall_ks) {
      auto& [sum, count] = sums[{static_cast<int>(group.first), static_cast<int>(group.second), k}];
      sum += recall_at_k(agent, contexts, k);
      ++count;
    }
  }

  std::vector<RecallRow> rows;
  for (const auto& [policy, map] : groups) {
    for (const auto k : config.recall_ks) {
      const auto& [sum, count] = sums.at({static_cast<int>(policy), static_cast<int>(map), k});
      rows.push_back(RecallRow{policy, map, k, sum / static_cast<double>(count),
                               eval.contexts.size()});
    }
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ReplayDataset& dataset,
                                const EmbeddingStore& store,
                                const std::optional<std::filesystem::path>& out_dir) {
  validate_config(config, dataset, store);
  const auto parts = split_dataset(dataset, resolve_split(config, dataset.contexts.size()));

  ExperimentResult result;
  result.cells = run_simulation(config, parts.online, store);
  if (!parts.eval.contexts.empty()) {
    std::vector<CellKey> keys;
    std::vector<PosteriorState> posteriors;
    for (const auto& cell : result.cells) {
      keys.push_back(cell.key);
      posteriors.push_back(cell.posterior);
    }
    result.recall = evaluate_recall(config, keys, posteriors, parts.eval, store);
  }

  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir / "posteriors", ec);
    if (ec) throw IoError(*out_dir, "cannot create output directory: " + ec.message());
    write_text_file(*out_dir / "regret.csv", [&](std::ostream& out) {
      write_regret_csv(result.cells, config.log_stride, out);
    });
    write_text_file(*out_dir / "recall.csv",
                    [&](std::ostream& out) { write_recall_csv(result.recall, out); });
    for (const auto& cell : result.cells) {
      write_posterior(cell.posterior, posterior_path(*out_dir, cell.key));
    }
  }
  return result;
}

void write_regret_csv(std::span<const SimulationCell> cells, std::size_t log_stride,
                      std::ostream& out) {
  if (log_stride < 1) throw ValidationError("log stride must be >= 1");
  out << "round,policy,feature_map,seed,avg_cum_regret\n";
  out << std::setprecision(10);
  for (const auto& cell : cells) {
    const auto& values = cell.curve.values;
    const auto emit = [&](std::size_t round) {
      out << round << ',' << to_string(cell.key.policy) << ','
          << to_string(cell.key.feature_map) << ',' << cell.key.seed << ','
          << values[round - 1] << '\n';
    };
    for (std::size_t round = log_stride; round <= values.size(); round += log_stride) emit(round);
    if (!values.empty() && values.size() % log_stride != 0) emit(values.size());
  }
}

void write_recall_csv(std::span<const RecallRow> rows, std::ostream& out) {
  out << "policy,feature_map,k,recall,n_eval\n";
  out << std::setprecision(10);
  for (const auto& row : rows) {
    out << to_string(row.policy) << ',' << to_string(row.feature_map) << ',' << row.k << ','
        << row.recall << ',' << row.n_eval << '\n';
  }
}

std::filesystem::path posterior_path(const std::filesystem::path& out_dir, const CellKey& key) {
  return out_dir / "posteriors" / (cell_name(key) + ".pst");
}

}  // namespace nnbandit
