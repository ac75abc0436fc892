#pragma once

#include <cstddef>
#include <string_view>

#include "nnbandit/types.hpp"

namespace nnbandit {

enum class FeatureMapKind {
  kLinear,    // [c, u], dimension 2L
  kBilinear,  // c (x) u, dimension L^2
};

std::string_view to_string(FeatureMapKind kind);
/// Accepts "linear" or "bilinear"; throws ValidationError otherwise.
FeatureMapKind parse_feature_map_kind(std::string_view name);

/// Output dimension for embeddings of length `embedding_dim`.
std::size_t feature_dim(FeatureMapKind kind, std::size_t embedding_dim);

/// c followed by u.
Vector concat_features(const Vector& context, const Vector& response);

/// Entry i * L + j holds c[i] * u[j], so that
/// dot(bilinear_features(c, u), flatten_row_major(M)) == c M u^T. No squared,
/// context-context, response-response, linear or bias terms appear.
Vector bilinear_features(const Vector& context, const Vector& response,
                         std::size_t feature_dim_cap = kDefaultFeatureDimCap);

/// Row-major flattening, the normative weight layout for the bilinear map.
Vector flatten_row_major(const Matrix& m);
Matrix unflatten_row_major(const Vector& w, std::size_t rows, std::size_t cols);

/// A feature map bound to one embedding dimension.
class FeatureMap {
 public:
  /// Throws DimensionError when the output dimension exceeds `feature_dim_cap`.
  FeatureMap(FeatureMapKind kind, std::size_t embedding_dim,
             std::size_t feature_dim_cap = kDefaultFeatureDimCap);

  FeatureMapKind kind() const noexcept { return kind_; }
  std::size_t embedding_dim() const noexcept { return embedding_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }

  Vector operator()(const Vector& context, const Vector& response) const;

 private:
  FeatureMapKind kind_;
  std::size_t embedding_dim_;
  std::size_t output_dim_;
  std::size_t cap_;
};

}  // namespace nnbandit
