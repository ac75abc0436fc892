#pragma once

#include <cstddef>
#include <cstdint>

#include "nnbandit/text_features.hpp"
#include "nnbandit/types.hpp"

namespace nnbandit {

struct PcaOptions {
  /// Convergence threshold on the sine of the largest principal angle between
  /// successive estimates of the top-d subspace.
  double tolerance = 1e-9;
  int max_iterations = 1000;
  /// Extra trailing directions carried through the iteration; the leading d
  /// Ritz vectors then converge at rate lambda_{d+p+1} / lambda_d.
  std::size_t oversampling = 10;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

/// Rows of `components` are orthonormal principal directions in decreasing
/// variance order; each row's largest-magnitude entry is positive.
struct PcaModel {
  Vector mean;
  Matrix components;  // d x V
  Vector explained_variance;
  int iterations = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(components.rows()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
};

/// Principal directions of the sample covariance
/// (normalized by n - 1) of the rows of `data`. Requires n >= 2 and
/// 1 <= d <= min(n, V). Restarted block Krylov with Rayleigh-Ritz; small V is
/// diagonalized directly. Throws NumericalError with the last relative residual
/// when `max_iterations` covariance products are used up.
PcaModel pca_fit(const Matrix& data, std::size_t d, const PcaOptions& options = {});

/// Same, without densifying; centering is applied implicitly.
PcaModel pca_fit(const SparseRowMatrix& data, std::size_t d, const PcaOptions& options = {});

Vector pca_transform(const PcaModel& model, const Vector& x);
Vector pca_transform(const PcaModel& model, const SparseVector& x);

}  // namespace nnbandit
