#pragma once

#include <Eigen/SparseCore>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nnbandit/types.hpp"

namespace nnbandit {

using SparseVector = Eigen::SparseVector<double>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Lowercases ASCII letters and splits on every maximal run of ASCII
/// characters that are not letters or digits. Bytes >= 0x80 are kept inside
/// tokens so UTF-8 words are not broken apart.
std::vector<std::string> tokenize(std::string_view text);

struct TfidfOptions {
  /// Tokens seen in fewer documents than this are dropped from the vocabulary.
  std::size_t min_df = 2;
};

/// Raw-count tf times smoothed idf, ln((1 + N) / (1 + df)) + 1, L2-normalized.
/// Vocabulary columns follow lexicographic token order.
class TfidfModel {
 public:
  TfidfModel() = default;

  static TfidfModel fit(std::span<const std::vector<std::string>> corpus,
                        const TfidfOptions& options = {});

  bool fitted() const noexcept { return fitted_; }
  std::size_t vocabulary_size() const noexcept { return idf_.size(); }
  std::size_t corpus_size() const noexcept { return corpus_size_; }
  const Vector& idf() const noexcept { return idf_; }
  std::optional<std::size_t> column(std::string_view token) const;

  /// Out-of-vocabulary tokens are ignored; an all-OOV document maps to zero.
  /// Throws UsageError on an unfitted model.
  SparseVector transform(std::span<const std::string> document) const;

 private:
  bool fitted_ = false;
  std::size_t corpus_size_ = 0;
  std::unordered_map<std::string, std::size_t> vocabulary_;
  Vector idf_;
};

inline TfidfModel tfidf_fit(std::span<const std::vector<std::string>> corpus,
                            const TfidfOptions& options = {}) {
  return TfidfModel::fit(corpus, options);
}

inline SparseVector tfidf_transform(const TfidfModel& model,
                                    std::span<const std::string> document) {
  return model.transform(document);
}

}  // namespace nnbandit
