#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "nnbandit/corpus_io.hpp"
#include "nnbandit/types.hpp"

namespace nnbandit {

/// Ground truth of a synthetic environment: rewards follow sigma(c M* u^T).
struct SyntheticTruth {
  Matrix true_matrix;
  /// When set, replay draws Bernoulli rewards from the true score instead of
  /// reading labels. Labels themselves are always the deterministic argmax.
  bool bernoulli_rewards = false;
  std::uint64_t seed = 0;
};

struct SyntheticEnvironment {
  ReplayDataset dataset;
  EmbeddingStore embeddings;
  SyntheticTruth truth;
};

/// Embeddings are i.i.d. N(0, 1/dim) rounded to float32 so they survive an
/// EMB1 round trip unchanged; M* entries are i.i.d. N(0, 1). In each pool the
/// candidate with the largest c M* u^T carries label 1. Ids are "c<i>" for
/// contexts and "c<i>_r<j>" for responses; text columns are empty.
SyntheticEnvironment make_synthetic(std::size_t dim, std::size_t n_contexts,
                                    std::size_t n_candidates, std::uint64_t seed,
                                    std::size_t feature_dim_cap = kDefaultFeatureDimCap);

/// Bilinear score c M u^T.
double bilinear_score(const Vector& context, const Matrix& m, const Vector& response);

/// One row per matrix row, comma separated, full double precision.
void write_truth_csv(const Matrix& truth, std::ostream& out);
void write_truth_csv(const Matrix& truth, const std::filesystem::path& path);
Matrix read_truth_csv(const std::filesystem::path& path);

}  // namespace nnbandit
