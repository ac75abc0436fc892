#include "nnbandit/replay_sim.hpp"

#include <algorithm>
#include <string>

#include "nnbandit/bayes_logreg.hpp"
#include "nnbandit/errors.hpp"

namespace nnbandit {

std::vector<ResolvedContext> resolve_contexts(const ReplayDataset& dataset,
                                              const EmbeddingStore& store) {
  validate_embeddings(dataset, store);
  std::vector<ResolvedContext> out;
  out.reserve(dataset.contexts.size());
  for (const auto& entry : dataset.contexts) {
    ResolvedContext rc;
    rc.entry = &entry;
    rc.context = store.at(entry.context_id);
    rc.candidates.reserve(entry.candidates.size());
    for (const auto& cand : entry.candidates) rc.candidates.push_back(store.at(cand.response_id));
    rc.true_index = entry.true_index();
    out.push_back(std::move(rc));
  }
  return out;
}

ReplayResult run_replay(const ReplayDataset& dataset, const EmbeddingStore& store,
                        BanditAgent& agent, const ReplayOptions& options) {
  const auto contexts = resolve_contexts(dataset, store);
  return run_replay(contexts, agent, options);
}

ReplayResult run_replay(std::span<const ResolvedContext> contexts, BanditAgent& agent,
                        const ReplayOptions& options) {
  if (contexts.empty()) throw ValidationError("replay needs at least one context");
  if (options.rounds == 0) throw ValidationError("replay needs at least one round");
  if (options.k == 0) throw ValidationError("k must be >= 1");
  for (const auto& rc : contexts) {
    if (options.k >= rc.candidates.size()) {
      throw ValidationError("k = " + std::to_string(options.k) +
                            " must be smaller than the pool of context '" +
                            rc.entry->context_id + "' (" +
                            std::to_string(rc.candidates.size()) + " candidates)");
    }
  }
  if (options.reward_mode == RewardMode::kBernoulli && options.truth == nullptr) {
    throw ValidationError("Bernoulli rewards need the true matrix");
  }

  Rng rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick_context(0, contexts.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ReplayResult result;
  result.logs.reserve(options.rounds);
  result.curve.values.reserve(options.rounds);
  long long regret_sum = 0;

  for (std::size_t t = 1; t <= options.rounds; ++t) {
    const auto& rc = contexts[pick_context(rng)];
    const auto chosen = agent.select_topk(rc.context, rc.candidates, options.k);

    RoundLog log;
    log.round = t;
    log.context_id = rc.entry->context_id;
    bool hit = false;
    for (const auto j : chosen) {
      int reward = rc.entry->candidates[j].label;
      if (options.reward_mode == RewardMode::kBernoulli) {
        const double p = sigmoid(rc.context.dot(*options.truth * rc.candidates[j]));
        reward = unit(rng) < p ? 1 : 0;
      }
      agent.observe(rc.context, rc.candidates[j], reward);
      hit = hit || j == rc.true_index;
      log.returned_ids.push_back(rc.entry->candidates[j].response_id);
      log.rewards.push_back(reward);
    }
    agent.refit();

    log.regret_increment = hit ? 0 : 1;
    regret_sum += log.regret_increment;
    result.curve.values.push_back(static_cast<double>(regret_sum) / static_cast<double>(t));
    result.logs.push_back(std::move(log));

    if (options.progress && options.progress_every > 0 && t % options.progress_every == 0) {
      options.progress(t);
    }
  }
  return result;
}

double avg_cumulative_regret(std::span<const int> increments) {
  if (increments.empty()) throw UsageError("average cumulative regret of zero rounds");
  long long sum = 0;
  for (const int r : increments) sum += r;
  return static_cast<double>(sum) / static_cast<double>(increments.size());
}

RegretCurve cumulative_regret_curve(std::span<const int> increments) {
  RegretCurve curve;
  curve.values.reserve(increments.size());
  long long sum = 0;
  for (std::size_t t = 0; t < increments.size(); ++t) {
    sum += increments[t];
    curve.values.push_back(static_cast<double>(sum) / static_cast<double>(t + 1));
  }
  return curve;
}

double recall_at_k(const BanditAgent& agent, std::span<const ResolvedContext> contexts,
                   std::size_t k) {
  if (contexts.empty()) throw UsageError("recall over zero contexts");
  if (k == 0) throw ValidationError("k must be >= 1");
  std::size_t hits = 0;
  for (const auto& rc : contexts) {
    if (k > rc.candidates.size()) {
      throw ValidationError("k = " + std::to_string(k) + " exceeds the pool of context '" +
                            rc.entry->context_id + "'");
    }
    const auto ranking = agent.rank_by_mean(rc.context, rc.candidates);
    const auto top = std::span(ranking).first(k);
    if (std::find(top.begin(), top.end(), rc.true_index) != top.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(contexts.size());
}

double recall_at_k(const BanditAgent& agent, const ReplayDataset& eval,
                   const EmbeddingStore& store, std::size_t k) {
  const auto contexts = resolve_contexts(eval, store);
  return recall_at_k(agent, contexts, k);
}

}  // namespace nnbandit
