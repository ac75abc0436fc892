#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nnbandit/bandit_policies.hpp"
#include "nnbandit/corpus_io.hpp"
#include "nnbandit/types.hpp"

namespace nnbandit {

/// A context with its embeddings looked up once.
struct ResolvedContext {
  const ContextEntry* entry = nullptr;
  Vector context;
  std::vector<Vector> candidates;
  std::size_t true_index = 0;
};

/// Resolves every context of `dataset`. Throws ValidationError listing all
/// missing ids before returning anything.
std::vector<ResolvedContext> resolve_contexts(const ReplayDataset& dataset,
                                              const EmbeddingStore& store);

struct RoundLog {
  std::size_t round = 0;  // 1-based
  std::string context_id;
  std::vector<std::string> returned_ids;
  std::vector<int> rewards;
  int regret_increment = 0;  // 1 iff the true response was not returned
};

/// values[t - 1] is the average cumulative regret after t rounds.
struct RegretCurve {
  std::vector<double> values;

  double final_value() const { return values.empty() ? 0.0 : values.back(); }
};

enum class RewardMode {
  /// The reward of a returned response is its label.
  kLabel,
  /// Reward ~ Bernoulli(sigmoid(c M* u^T)); needs ReplayOptions::truth.
  kBernoulli,
};

struct ReplayOptions {
  std::size_t rounds = 1;
  std::size_t k = 1;
  std::uint64_t seed = 0;
  RewardMode reward_mode = RewardMode::kLabel;
  const Matrix* truth = nullptr;
  /// Called with the round number every `progress_every` rounds.
  std::function<void(std::size_t)> progress;
  std::size_t progress_every = 1000;
};

struct ReplayResult {
  RegretCurve curve;
  std::vector<RoundLog> logs;
};

/// Replays the online protocol: each round draws a context uniformly with
/// replacement, the agent returns k candidates, every returned candidate is
/// observed with its reward, then the agent refits once. Regret is charged
/// when no returned candidate is the true response. Requires
/// k < smallest pool size; all ids must resolve.
ReplayResult run_replay(const ReplayDataset& dataset, const EmbeddingStore& store,
                        BanditAgent& agent, const ReplayOptions& options);

/// Same, over contexts that are already resolved.
ReplayResult run_replay(std::span<const ResolvedContext> contexts, BanditAgent& agent,
                        const ReplayOptions& options);

/// (sum of optimal rewards - sum of achieved rewards) / T where the optimal
/// reward is 1 every round, i.e. the mean of the 0/1 regret increments.
/// Throws UsageError on an empty list.
double avg_cumulative_regret(std::span<const int> increments);

/// Running average of the increments.
RegretCurve cumulative_regret_curve(std::span<const int> increments);

/// Fraction of contexts whose true response is among the top k when ranked
/// by the posterior mean (ties by ascending index).
double recall_at_k(const BanditAgent& agent, std::span<const ResolvedContext> contexts,
                   std::size_t k);
double recall_at_k(const BanditAgent& agent, const ReplayDataset& eval,
                   const EmbeddingStore& store, std::size_t k);

}  // namespace nnbandit
