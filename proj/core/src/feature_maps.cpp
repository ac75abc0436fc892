#include "nnbandit/feature_maps.hpp"

#include <string>

#include "nnbandit/errors.hpp"

namespace nnbandit {

namespace {

void require_same_length(const Vector& c, const Vector& u) {
  if (c.size() != u.size()) {
    throw DimensionError("context length " + std::to_string(c.size()) +
                         " != response length " + std::to_string(u.size()));
  }
}

void require_within_cap(std::size_t embedding_dim, std::size_t cap) {
  if (embedding_dim > 0 && embedding_dim > cap / embedding_dim) {
    throw DimensionError("bilinear feature dimension " +
                         std::to_string(embedding_dim * embedding_dim) +
                         " exceeds the cap " + std::to_string(cap) +
                         "; reduce the embedding dimension (e.g. with PCA) or raise the cap");
  }
}

}  // namespace

std::string_view to_string(FeatureMapKind kind) {
  return kind == FeatureMapKind::kLinear ? "linear" : "bilinear";
}

FeatureMapKind parse_feature_map_kind(std::string_view name) {
  if (name == "linear") return FeatureMapKind::kLinear;
  if (name == "bilinear") return FeatureMapKind::kBilinear;
  throw ValidationError("unknown feature map '" + std::string(name) +
                        "', expected linear or bilinear");
}

std::size_t feature_dim(FeatureMapKind kind, std::size_t embedding_dim) {
  return kind == FeatureMapKind::kLinear ? 2 * embedding_dim : embedding_dim * embedding_dim;
}

Vector concat_features(const Vector& context, const Vector& response) {
  require_same_length(context, response);
  Vector out(context.size() + response.size());
  out << context, response;
  return out;
}

Vector bilinear_features(const Vector& context, const Vector& response,
                         std::size_t feature_dim_cap) {
  require_same_length(context, response);
  const auto l = static_cast<std::size_t>(context.size());
  require_within_cap(l, feature_dim_cap);
  Vector out(context.size() * response.size());
  Eigen::Map<RowMatrix>(out.data(), context.size(), response.size()).noalias() =
      context * response.transpose();
  return out;
}

Vector flatten_row_major(const Matrix& m) {
  Vector out(m.size());
  Eigen::Map<RowMatrix>(out.data(), m.rows(), m.cols()) = m;
  return out;
}

Matrix unflatten_row_major(const Vector& w, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(w.size()) != rows * cols) {
    throw DimensionError("cannot reshape a vector of length " + std::to_string(w.size()) +
                         " to " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Eigen::Map<const RowMatrix>(w.data(), static_cast<Eigen::Index>(rows),
                                     static_cast<Eigen::Index>(cols));
}

FeatureMap::FeatureMap(FeatureMapKind kind, std::size_t embedding_dim,
                       std::size_t feature_dim_cap)
    : kind_(kind),
      embedding_dim_(embedding_dim),
      output_dim_(feature_dim(kind, embedding_dim)),
      cap_(feature_dim_cap) {
  if (embedding_dim == 0) throw DimensionError("embedding dimension must be positive");
  if (kind == FeatureMapKind::kBilinear) require_within_cap(embedding_dim, feature_dim_cap);
  if (output_dim_ > feature_dim_cap) {
    throw DimensionError(std::string(to_string(kind)) + " feature dimension " +
                         std::to_string(output_dim_) + " exceeds the cap " +
                         std::to_string(feature_dim_cap));
  }
}

Vector FeatureMap::operator()(const Vector& context, const Vector& response) const {
  if (static_cast<std::size_t>(context.size()) != embedding_dim_) {
    throw DimensionError("context length " + std::to_string(context.size()) +
                         " != map embedding dimension " + std::to_string(embedding_dim_));
  }
  return kind_ == FeatureMapKind::kLinear ? concat_features(context, response)
                                          : bilinear_features(context, response, cap_);
}

}  // namespace nnbandit
