#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nnbandit/bayes_logreg.hpp"
#include "nnbandit/feature_maps.hpp"
#include "nnbandit/types.hpp"

namespace nnbandit {

enum class PolicyKind {
  kThompsonSampling,
  kGreedy,
  kRandom,
};

std::string_view to_string(PolicyKind kind);
/// Accepts "ts", "greedy" or "random".
PolicyKind parse_policy_kind(std::string_view name);

/// Indices of the k largest scores, by descending score, ties by ascending index.
std::vector<std::size_t> top_k_indices(std::span<const double> scores, std::size_t k);

struct AgentConfig {
  PolicyKind policy = PolicyKind::kThompsonSampling;
  FeatureMapKind feature_map = FeatureMapKind::kBilinear;
  std::size_t embedding_dim = 0;
  double lambda = 1.0;
  std::size_t feature_dim_cap = kDefaultFeatureDimCap;
  NewtonOptions newton;
  std::uint64_t seed = 0;
  /// Keep the posterior fixed: refit() only advances the round. Used for
  /// agents whose posterior is set from outside, such as a known optimum.
  bool frozen = false;
};

/// A contextual bandit acting on (context, candidate) embedding pairs with a
/// Laplace-approximated logistic reward model.
///
/// Not thread-safe: select_topk, observe and refit must be serialized by the
/// caller. Independent agents share nothing.
class BanditAgent {
 public:
  explicit BanditAgent(const AgentConfig& config);

  /// Thompson sampling draws one weight vector for the whole call and ranks
  /// every candidate under it; Greedy ranks under the posterior mean; Random
  /// returns a uniformly random ordered k-subset. Requires 1 <= k <= size.
  std::vector<std::size_t> select_topk(const Vector& context,
                                       std::span<const Vector> candidates, std::size_t k);

  /// Full ranking under the posterior mean, ties by ascending index. Does not
  /// touch the rng.
  std::vector<std::size_t> rank_by_mean(const Vector& context,
                                        std::span<const Vector> candidates) const;

  /// Records one labelled interaction; the posterior is left unchanged until
  /// refit(). Throws ValidationError unless reward is exactly 0 or 1.
  void observe(const Vector& context, const Vector& chosen, double reward);

  /// Refits the posterior on the whole history, warm-started at the previous
  /// mean, and advances the round counter. Random and frozen agents only advance
  /// the round.
  void refit();

  PolicyKind policy() const noexcept { return config_.policy; }
  const AgentConfig& config() const noexcept { return config_; }
  const FeatureMap& feature_map() const noexcept { return map_; }
  const PosteriorState& posterior() const noexcept { return posterior_; }
  const ObservationHistory& history() const noexcept { return history_; }
  std::int64_t round() const noexcept { return round_; }
  /// Number of posterior draws made so far.
  std::size_t samples_drawn() const noexcept { return samples_drawn_; }

  /// Replaces the posterior, e.g. with a persisted or known-optimal one.
  void set_posterior(PosteriorState state);

 private:
  std::vector<double> logits(const Vector& w, const Vector& context,
                             std::span<const Vector> candidates) const;
  void check_embeddings(const Vector& context, std::span<const Vector> candidates) const;

  AgentConfig config_;
  FeatureMap map_;
  ObservationHistory history_;
  PosteriorState posterior_;
  Rng rng_;
  std::int64_t round_ = 0;
  std::size_t samples_drawn_ = 0;
};

}  // namespace nnbandit
