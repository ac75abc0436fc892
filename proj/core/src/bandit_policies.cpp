#include "nnbandit/bandit_policies.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "nnbandit/errors.hpp"

namespace nnbandit {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kThompsonSampling:
      return "ts";
    case PolicyKind::kGreedy:
      return "greedy";
    case PolicyKind::kRandom:
      return "random";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "ts") return PolicyKind::kThompsonSampling;
  if (name == "greedy") return PolicyKind::kGreedy;
  if (name == "random") return PolicyKind::kRandom;
  throw ValidationError("unknown policy '" + std::string(name) +
                        "', expected ts, greedy or random");
}

std::vector<std::size_t> top_k_indices(std::span<const double> scores, std::size_t k) {
  if (k > scores.size()) throw ValidationError("k exceeds the number of scores");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto by_score = [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    by_score);
  order.resize(k);
  return order;
}

BanditAgent::BanditAgent(const AgentConfig& config)
    : config_(config),
      map_(config.feature_map, config.embedding_dim, config.feature_dim_cap),
      history_(map_.output_dim()),
      posterior_(PosteriorState::prior(map_.output_dim(), config.lambda)),
      rng_(config.seed) {}

void BanditAgent::check_embeddings(const Vector& context,
                                   std::span<const Vector> candidates) const {
  const auto l = static_cast<Eigen::Index>(config_.embedding_dim);
  if (context.size() != l) {
    throw DimensionError("context embedding length " + std::to_string(context.size()) +
                         " != agent embedding dimension " + std::to_string(l));
  }
  for (const auto& u : candidates) {
    if (u.size() != l) {
      throw DimensionError("candidate embedding length " + std::to_string(u.size()) +
                           " != agent embedding dimension " + std::to_string(l));
    }
  }
}

// Ranking uses the logit x.w; sigmoid is monotone, so the order matches
// ranking by predict() but does not collapse into ties once sigmoid saturates.
std::vector<double> BanditAgent::logits(const Vector& w, const Vector& context,
                                        std::span<const Vector> candidates) const {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& u : candidates) out.push_back(map_(context, u).dot(w));
  return out;
}

std::vector<std::size_t> BanditAgent::select_topk(const Vector& context,
                                                  std::span<const Vector> candidates,
                                                  std::size_t k) {
  if (k < 1 || k > candidates.size()) {
    throw ValidationError("k = " + std::to_string(k) + " outside [1, " +
                          std::to_string(candidates.size()) + "]");
  }
  check_embeddings(context, candidates);

  switch (config_.policy) {
    case PolicyKind::kThompsonSampling: {
      const Vector w = sample_weights(posterior_, rng_);
      ++samples_drawn_;
      return top_k_indices(logits(w, context, candidates), k);
    }
    case PolicyKind::kGreedy:
      return top_k_indices(logits(posterior_.mean, context, candidates), k);
    case PolicyKind::kRandom: {
      // Partial Fisher-Yates: the first k slots form a uniform ordered subset.
      std::vector<std::size_t> order(candidates.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
        std::swap(order[i], order[pick(rng_)]);
      }
      order.resize(k);
      return order;
    }
  }
  throw ValidationError("unknown policy");
}

std::vector<std::size_t> BanditAgent::rank_by_mean(const Vector& context,
                                                   std::span<const Vector> candidates) const {
  check_embeddings(context, candidates);
  return top_k_indices(logits(posterior_.mean, context, candidates), candidates.size());
}

void BanditAgent::observe(const Vector& context, const Vector& chosen, double reward) {
  if (reward != 0.0 && reward != 1.0) {
    throw ValidationError("reward must be exactly 0 or 1, got " + std::to_string(reward));
  }
  check_embeddings(context, std::span<const Vector>(&chosen, 1));
  history_.append(map_(context, chosen), reward == 1.0 ? 1 : 0, round_);
}

void BanditAgent::refit() {
  if (config_.policy != PolicyKind::kRandom && !config_.frozen) {
    posterior_ = refit_map(posterior_, history_, config_.newton);
  }
  ++round_;
}

void BanditAgent::set_posterior(PosteriorState state) {
  if (state.dim() != map_.output_dim()) {
    throw DimensionError("posterior dimension " + std::to_string(state.dim()) +
                         " != feature dimension " + std::to_string(map_.output_dim()));
  }
  if (state.lambda != config_.lambda) {
    // Curvature fitted under another prior cannot seed the next refit.
    state.lambda = config_.lambda;
    state.observations = 0;
  }
  posterior_ = std::move(state);
}

}  // namespace nnbandit
