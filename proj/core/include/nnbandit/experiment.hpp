#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nnbandit/bandit_policies.hpp"
#include "nnbandit/bayes_logreg.hpp"
#include "nnbandit/corpus_io.hpp"
#include "nnbandit/feature_maps.hpp"
#include "nnbandit/replay_sim.hpp"

namespace nnbandit {

struct SplitSizes {
  std::size_t online = 0;
  std::size_t eval = 0;
};

/// Parses "800:200".
SplitSizes parse_split(std::string_view text);

struct ExperimentConfig {
  std::vector<PolicyKind> policies{PolicyKind::kThompsonSampling};
  std::vector<FeatureMapKind> feature_maps{FeatureMapKind::kLinear, FeatureMapKind::kBilinear};
  std::size_t k = 1;
  std::size_t rounds = 50000;
  double lambda = 1.0;
  std::vector<std::uint64_t> seeds{0};
  /// Defaults to the first 80% of contexts online and the rest for evaluation.
  std::optional<SplitSizes> split;
  std::size_t feature_dim_cap = kDefaultFeatureDimCap;
  int newton_max_iterations = 25;
  std::size_t log_stride = 10;
  std::vector<std::size_t> recall_ks{1, 2, 5};
  /// Worker threads for independent cells; 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// Receives one human-readable line per 1000 replay rounds of each cell.
  std::function<void(const std::string&)> progress;
};

SplitSizes resolve_split(const ExperimentConfig& config, std::size_t n_contexts);

struct DataSplit {
  ReplayDataset online;
  ReplayDataset eval;
};

/// Online contexts are the first `sizes.online` in file order; evaluation
/// contexts the next `sizes.eval`.
DataSplit split_dataset(const ReplayDataset& dataset, SplitSizes sizes);

/// Checks everything that can be checked before any work or output happens.
/// Throws ValidationError (or DimensionError) on the first problem.
void validate_config(const ExperimentConfig& config, const ReplayDataset& dataset,
                     const EmbeddingStore& store);

struct CellKey {
  PolicyKind policy;
  FeatureMapKind feature_map;
  std::uint64_t seed;
};

/// e.g. "ts_bilinear_seed3".
std::string cell_name(const CellKey& key);

/// The policy x map x seed grid in output order.
std::vector<CellKey> experiment_cells(const ExperimentConfig& config);

struct SimulationCell {
  CellKey key;
  RegretCurve curve;
  PosteriorState posterior;
};

struct RecallRow {
  PolicyKind policy;
  FeatureMapKind feature_map;
  std::size_t k;
  double recall;  // averaged over seeds
  std::size_t n_eval;
};

struct ExperimentResult {
  std::vector<SimulationCell> cells;
  std::vector<RecallRow> recall;
};

AgentConfig agent_config(const ExperimentConfig& config, const CellKey& key,
                         std::size_t embedding_dim);

/// Runs every cell of the grid over `online`; cells run concurrently but the
/// result order is experiment_cells() order. The replay seed is the cell seed,
/// so every policy sees the same context sequence for a given seed.
std::vector<SimulationCell> run_simulation(const ExperimentConfig& config,
                                           const ReplayDataset& online,
                                           const EmbeddingStore& store);

/// Recall@k per (policy, map, k) of the given posteriors, averaged over seeds.
std::vector<RecallRow> evaluate_recall(const ExperimentConfig& config,
                                       std::span<const CellKey> keys,
                                       std::span<const PosteriorState> posteriors,
                                       const ReplayDataset& eval, const EmbeddingStore& store);

/// Split, simulate, evaluate. With `out_dir`, also writes regret.csv,
/// recall.csv and one posterior dump per cell under posteriors/.
ExperimentResult run_experiment(const ExperimentConfig& config, const ReplayDataset& dataset,
                                const EmbeddingStore& store,
                                const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Header: round,policy,feature_map,seed,avg_cum_regret. Rows at every
/// multiple of `log_stride`, plus the final round when it is not one.
void write_regret_csv(std::span<const SimulationCell> cells, std::size_t log_stride,
                      std::ostream& out);
/// Header: policy,feature_map,k,recall,n_eval.
void write_recall_csv(std::span<const RecallRow> rows, std::ostream& out);

std::filesystem::path posterior_path(const std::filesystem::path& out_dir, const CellKey& key);

}  // namespace nnbandit
