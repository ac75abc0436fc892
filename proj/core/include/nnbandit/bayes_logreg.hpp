#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nnbandit/types.hpp"

namespace nnbandit {

/// 1 / (1 + exp(-z)) without overflow for any finite z.
double sigmoid(double z);

/// ln sigmoid(z), accurate in both tails.
double log_sigmoid(double z);

/// Append-only record of (feature vector, binary reward, round) rows. Rows are
/// kept contiguous so the design matrix is available without copying.
class ObservationHistory {
 public:
  explicit ObservationHistory(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return rewards_.size(); }
  bool empty() const noexcept { return rewards_.empty(); }

  /// Throws DimensionError on a length mismatch and ValidationError on a
  /// reward outside {0, 1} or non-finite features.
  void append(const Vector& features, int reward, std::int64_t round);

  /// t x D design matrix.
  Eigen::Map<const RowMatrix> features() const;
  Eigen::Map<const Vector> rewards() const;
  std::int64_t round(std::size_t i) const { return rounds_[i]; }

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<double> rewards_;
  std::vector<std::int64_t> rounds_;
};

/// Laplace approximation N(mean, precision^-1) of the logistic-regression
/// posterior under the prior N(0, lambda^-1 I).
struct PosteriorState {
  Vector mean;
  Matrix precision;         // X^T C X + lambda I at `mean`
  Matrix precision_factor;  // lower triangular L with L L^T = precision
  double lambda = 1.0;
  std::size_t observations = 0;  // history rows the state was fitted on
  int iterations = 0;
  bool converged = true;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }

  /// Zero mean, precision lambda I.
  static PosteriorState prior(std::size_t dim, double lambda);
  /// Rebuilds the precision from a stored factor.
  static PosteriorState from_factor(Vector mean, Matrix factor, double lambda);
};

/// J(w) = (lambda / 2) w^T w - sum_i [f_i ln s(x_i w) + (1 - f_i) ln(1 - s(x_i w))].
double neg_log_posterior(const Vector& w, const ObservationHistory& history, double lambda);

/// lambda w + sum_i (s(x_i w) - f_i) x_i
Vector gradient(const Vector& w, const ObservationHistory& history, double lambda);

/// X^T C(w) X + lambda I with C_ii = s(x_i w)(1 - s(x_i w)); exactly symmetric.
Matrix hessian(const Vector& w, const ObservationHistory& history, double lambda);

struct NewtonOptions {
  int max_iterations = 25;
  /// Stop when ||grad||_inf <= tolerance * max(1, ||w||_inf).
  double gradient_tolerance = 1e-8;
  int max_step_halvings = 60;
};

/// Damped Newton minimization of J from `warm_start` (zero by default). Full
/// steps are halved until J does not increase. The precision and its factor
/// are evaluated at the returned mean. Hitting the iteration cap is reported
/// through `converged`, not thrown.
PosteriorState fit_map(const ObservationHistory& history, double lambda,
                       const std::optional<Vector>& warm_start = std::nullopt,
                       const NewtonOptions& options = {});

/// fit_map warm-started at `previous.mean`. When `previous` was fitted on a
/// prefix of `history` with the same lambda, the Hessian at the warm start is
/// `previous.precision` plus the new rows' terms, which saves one full pass.
PosteriorState refit_map(const PosteriorState& previous, const ObservationHistory& history,
                         const NewtonOptions& options = {});

/// Exact draw from N(mean, precision^-1): mean + L^-T z with z ~ N(0, I).
Vector sample_weights(const PosteriorState& state, Rng& rng);

/// sigmoid(features . w)
double predict(const Vector& w, const Vector& features);

}  // namespace nnbandit
