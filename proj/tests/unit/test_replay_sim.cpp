#include <gtest/gtest.h>

#include <algorithm>

#include "nnbandit/errors.hpp"
#include "nnbandit/replay_sim.hpp"
#include "nnbandit/synthetic.hpp"
#include "oracles.hpp"

using namespace nnbandit;

namespace {

AgentConfig config_for(PolicyKind policy, std::size_t dim, std::uint64_t seed = 1) {
  AgentConfig c;
  c.policy = policy;
  c.feature_map = FeatureMapKind::kBilinear;
  c.embedding_dim = dim;
  c.seed = seed;
  return c;
}

// Greedy agent pinned at a fixed weight vector.
BanditAgent pinned(const Vector& w, std::size_t dim) {
  auto config = config_for(PolicyKind::kGreedy, dim);
  config.frozen = true;
  BanditAgent agent(config);
  agent.set_posterior(PosteriorState::from_factor(w, Matrix::Identity(w.size(), w.size()), 1.0));
  return agent;
}

std::vector<int> increments(const ReplayResult& r) {
  std::vector<int> out;
  for (const auto& log : r.logs) out.push_back(log.regret_increment);
  return out;
}

}  // namespace

TEST(Regret, Examples) {
  EXPECT_EQ(avg_cumulative_regret(std::vector<int>{0, 0, 0, 0}), 0.0);
  EXPECT_EQ(avg_cumulative_regret(std::vector<int>{1, 1}), 1.0);
  EXPECT_EQ(avg_cumulative_regret(std::vector<int>{1, 0, 0, 0}), 0.25);
  EXPECT_THROW(avg_cumulative_regret(std::vector<int>{}), UsageError);
}

TEST(Regret, CurveIsThePrefixAverage) {
  const std::vector<int> inc{1, 0, 1, 1, 0, 0, 0, 1};
  const auto curve = cumulative_regret_curve(inc);
  ASSERT_EQ(curve.values.size(), inc.size());
  for (std::size_t t = 1; t <= inc.size(); ++t) {
    const std::vector<int> prefix(inc.begin(), inc.begin() + static_cast<std::ptrdiff_t>(t));
    EXPECT_NEAR(curve.values[t - 1], oracle::average(prefix), 1e-15);
    EXPECT_GE(curve.values[t - 1], 0.0);
    EXPECT_LE(curve.values[t - 1], 1.0);
  }
  EXPECT_EQ(curve.final_value(), 0.5);
}

TEST(Replay, OracleAgentHasZeroRegret) {
  const auto env = make_synthetic(4, 50, 10, 3);
  auto agent = pinned(flatten_row_major(env.truth.true_matrix), 4);
  ReplayOptions options;
  options.rounds = 500;
  const auto result = run_replay(env.dataset, env.embeddings, agent, options);
  ASSERT_EQ(result.curve.values.size(), 500u);
  for (double v : result.curve.values) EXPECT_EQ(v, 0.0);
}

TEST(Replay, AntiOracleHasRegretOne) {
  const auto env = make_synthetic(4, 50, 10, 3);
  auto agent = pinned(-flatten_row_major(env.truth.true_matrix), 4);
  ReplayOptions options;
  options.rounds = 300;
  const auto result = run_replay(env.dataset, env.embeddings, agent, options);
  for (double v : result.curve.values) EXPECT_EQ(v, 1.0);
  for (const auto& log : result.logs) EXPECT_EQ(log.rewards, std::vector<int>{0});
}

// 1 - k/10 is the expected increment; allow three binomial standard errors.
TEST(Replay, RandomPolicyCalibration) {
  const auto env = make_synthetic(2, 100, 10, 4);
  BanditAgent agent(config_for(PolicyKind::kRandom, 2, 5));
  ReplayOptions options;
  options.rounds = 10000;
  options.seed = 6;
  const double r = run_replay(env.dataset, env.embeddings, agent, options).curve.final_value();
  EXPECT_LE(std::abs(r - 0.9), 3.0 * oracle::binomial_se(0.9, 10000.0));
}

TEST(Replay, IncrementIsAbsenceOfTheTrueResponse) {
  const auto env = make_synthetic(3, 40, 10, 7);
  for (std::size_t k : {1u, 2u, 5u}) {
    BanditAgent agent(config_for(PolicyKind::kThompsonSampling, 3, k));
    ReplayOptions options;
    options.rounds = 200;
    options.k = k;
    const auto result = run_replay(env.dataset, env.embeddings, agent, options);
    ASSERT_EQ(result.logs.size(), 200u);
    EXPECT_EQ(agent.history().size(), 200u * k);
    std::vector<int> inc;
    for (const auto& log : result.logs) {
      const auto it = std::find_if(env.dataset.contexts.begin(), env.dataset.contexts.end(),
                                   [&](const ContextEntry& c) { return c.context_id == log.context_id; });
      ASSERT_NE(it, env.dataset.contexts.end());
      const auto& true_id = it->candidates[it->true_index()].response_id;
      const bool hit = std::find(log.returned_ids.begin(), log.returned_ids.end(), true_id) != log.returned_ids.end();
      EXPECT_EQ(log.regret_increment, hit ? 0 : 1);
      EXPECT_EQ(log.returned_ids.size(), k);
      EXPECT_EQ(std::count(log.rewards.begin(), log.rewards.end(), 1), hit ? 1 : 0);
      inc.push_back(log.regret_increment);
    }
    EXPECT_NEAR(result.curve.final_value(), oracle::average(inc), 1e-15);
  }
}

TEST(Replay, SameSeedSameRun) {
  const auto env = make_synthetic(3, 40, 10, 8);
  ReplayOptions options;
  options.rounds = 150;
  options.seed = 3;
  BanditAgent a(config_for(PolicyKind::kThompsonSampling, 3, 4));
  BanditAgent b(config_for(PolicyKind::kThompsonSampling, 3, 4));
  const auto ra = run_replay(env.dataset, env.embeddings, a, options);
  const auto rb = run_replay(env.dataset, env.embeddings, b, options);
  EXPECT_EQ(ra.curve.values, rb.curve.values);
  EXPECT_EQ(increments(ra), increments(rb));
  EXPECT_EQ(a.posterior().mean, b.posterior().mean);
}

TEST(Replay, RejectsBadOptions) {
  const auto env = make_synthetic(3, 10, 5, 8);
  BanditAgent agent(config_for(PolicyKind::kRandom, 3));
  ReplayOptions options;
  options.rounds = 10;
  options.k = 5;
  EXPECT_THROW(run_replay(env.dataset, env.embeddings, agent, options), ValidationError);
  options.k = 1;
  options.rounds = 0;
  EXPECT_THROW(run_replay(env.dataset, env.embeddings, agent, options), ValidationError);
  options.rounds = 10;
  options.reward_mode = RewardMode::kBernoulli;
  EXPECT_THROW(run_replay(env.dataset, env.embeddings, agent, options), ValidationError);
}

TEST(Replay, BernoulliRewardsFollowTheTrueScores) {
  const auto env = make_synthetic(3, 30, 10, 9);
  BanditAgent agent(config_for(PolicyKind::kRandom, 3));
  ReplayOptions options;
  options.rounds = 4000;
  options.reward_mode = RewardMode::kBernoulli;
  options.truth = &env.truth.true_matrix;
  const auto result = run_replay(env.dataset, env.embeddings, agent, options);
  // Mean reward against the mean success probability of the chosen responses.
  double rewards = 0.0, expected = 0.0;
  for (const auto& log : result.logs) {
    rewards += log.rewards[0];
    const auto& ctx = *std::find_if(env.dataset.contexts.begin(), env.dataset.contexts.end(),
                                    [&](const ContextEntry& c) { return c.context_id == log.context_id; });
    expected += oracle::logistic(oracle::bilinear(env.embeddings.at(ctx.context_id), env.truth.true_matrix,
                                                  env.embeddings.at(log.returned_ids[0])));
  }
  const double n = static_cast<double>(result.logs.size());
  EXPECT_LE(std::abs(rewards / n - expected / n), 4.0 * 0.5 / std::sqrt(n));
}

TEST(Recall, FullPoolIsOne) {
  const auto env = make_synthetic(3, 30, 10, 10);
  const auto contexts = resolve_contexts(env.dataset, env.embeddings);
  BanditAgent agent(config_for(PolicyKind::kThompsonSampling, 3));
  EXPECT_EQ(recall_at_k(agent, contexts, 10), 1.0);
}

// w = 0 scores every candidate alike; the tie rule ranks by index.
TEST(Recall, ZeroMeanFollowsTheTieRule) {
  const auto env = make_synthetic(3, 60, 10, 11);
  const auto contexts = resolve_contexts(env.dataset, env.embeddings);
  BanditAgent agent(config_for(PolicyKind::kGreedy, 3));
  for (std::size_t k : {1u, 2u, 5u}) {
    double expected = 0.0;
    for (const auto& ctx : env.dataset.contexts) expected += ctx.true_index() < k ? 1.0 : 0.0;
    expected /= static_cast<double>(env.dataset.contexts.size());
    EXPECT_DOUBLE_EQ(recall_at_k(agent, contexts, k), expected);
    EXPECT_DOUBLE_EQ(recall_at_k(agent, env.dataset, env.embeddings, k), expected);
  }
}

TEST(Recall, OracleMeanIsPerfect) {
  const auto env = make_synthetic(4, 100, 10, 12);
  const auto agent = pinned(flatten_row_major(env.truth.true_matrix), 4);
  EXPECT_EQ(recall_at_k(agent, env.dataset, env.embeddings, 1), 1.0);
}

TEST(Recall, NonDecreasingInK) {
  const auto env = make_synthetic(3, 80, 10, 13);
  const auto contexts = resolve_contexts(env.dataset, env.embeddings);
  for (const auto policy : {PolicyKind::kThompsonSampling, PolicyKind::kGreedy, PolicyKind::kRandom}) {
    BanditAgent agent(config_for(policy, 3));
    ReplayOptions options;
    options.rounds = 300;
    run_replay(contexts, agent, options);
    double previous = 0.0;
    for (std::size_t k = 1; k <= 10; ++k) {
      const double r = recall_at_k(agent, contexts, k);
      EXPECT_GE(r, previous);
      previous = r;
    }
  }
}
