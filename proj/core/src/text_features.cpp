#include "nnbandit/text_features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "nnbandit/errors.hpp"

namespace nnbandit {

namespace {

bool is_token_byte(unsigned char ch) {
  return (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
         ch >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char c : text) {
    const auto ch = static_cast<unsigned char>(c);
    if (is_token_byte(ch)) {
      current.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch - 'A' + 'a') : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TfidfModel TfidfModel::fit(std::span<const std::vector<std::string>> corpus,
                           const TfidfOptions& options) {
  if (corpus.empty()) throw UsageError("tf-idf fit needs a non-empty corpus");

  std::map<std::string, std::size_t> document_frequency;
  for (const auto& doc : corpus) {
    const std::set<std::string_view> unique(doc.begin(), doc.end());
    for (const auto token : unique) ++document_frequency[std::string(token)];
  }

  TfidfModel model;
  model.fitted_ = true;
  model.corpus_size_ = corpus.size();
  std::vector<double> idf;
  const double n = static_cast<double>(corpus.size());
  for (const auto& [token, df] : document_frequency) {
    if (df < options.min_df) continue;
    model.vocabulary_.emplace(token, idf.size());
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))) + 1.0);
  }
  model.idf_ = Eigen::Map<const Vector>(idf.data(), static_cast<Eigen::Index>(idf.size()));
  return model;
}

std::optional<std::size_t> TfidfModel::column(std::string_view token) const {
  const auto it = vocabulary_.find(std::string(token));
  if (it == vocabulary_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfidfModel::transform(std::span<const std::string> document) const {
  if (!fitted_) throw UsageError("tf-idf transform called before fit");

  std::map<std::size_t, double> counts;
  for (const auto& token : document) {
    if (const auto col = column(token)) counts[*col] += 1.0;
  }
  double norm2 = 0.0;
  for (auto& [col, value] : counts) {
    value *= idf_[static_cast<Eigen::Index>(col)];
    norm2 += value * value;
  }
  const double scale = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 1.0;

  SparseVector out(static_cast<Eigen::Index>(idf_.size()));
  out.reserve(static_cast<Eigen::Index>(counts.size()));
  for (const auto& [col, value] : counts) {
    out.insertBack(static_cast<Eigen::Index>(col)) = value * scale;
  }
  return out;
}

}  // namespace nnbandit
