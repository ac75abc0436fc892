#include "nnbandit/bayes_logreg.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nnbandit/errors.hpp"

namespace nnbandit {

namespace {

void require_dim(std::size_t expected, Eigen::Index actual, const char* what) {
  if (static_cast<std::size_t>(actual) != expected) {
    throw DimensionError(std::string(what) + " has length " + std::to_string(actual) +
                         ", expected " + std::to_string(expected));
  }
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("regularization lambda must be finite and > 0");
  }
}

constexpr double kSigmoidLo = std::numeric_limits<double>::denorm_min();
constexpr double kSigmoidHi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

// Vectorized form of sigmoid(); the same branch split and clamp.
Vector sigmoid_of(const Vector& z) {
  const Eigen::ArrayXd e = (-z.array().abs()).exp();
  const Eigen::ArrayXd p = (z.array() >= 0.0).select(1.0 / (1.0 + e), e / (1.0 + e));
  return p.max(kSigmoidLo).min(kSigmoidHi).matrix();
}

void symmetrize_from_lower(Matrix& m) {
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
}

// Adds sum_i c_i(w) x_i x_i^T over rows [first, first + count) to the lower
// triangle of `out`. Blocked so the scratch stays cache-sized and off the heap
// allocator's mmap path for long histories.
void add_weighted_gram(const Eigen::Map<const RowMatrix>& x, const Vector& w,
                       Eigen::Index first, Eigen::Index count, Matrix& out) {
  constexpr Eigen::Index kBlock = 512;
  RowMatrix scaled(std::min(count, kBlock), x.cols());
  for (Eigen::Index begin = first; begin < first + count; begin += kBlock) {
    const Eigen::Index n = std::min(kBlock, first + count - begin);
    const auto rows = x.middleRows(begin, n);
    const Vector p = sigmoid_of(rows * w);
    const Vector root = (p.array() * (1.0 - p.array())).sqrt().matrix();
    scaled.topRows(n) = rows.array().colwise() * root.array();
    out.selfadjointView<Eigen::Lower>().rankUpdate(scaled.topRows(n).transpose());
  }
}

Matrix lower_factor(const Matrix& precision) {
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("posterior precision is not positive definite");
  }
  return llt.matrixL();
}

constexpr double kFlatObjective = 1e-13;

PosteriorState newton(const ObservationHistory& history, double lambda, Vector w,
                      std::optional<Matrix> hessian_at_w, const NewtonOptions& options) {
  const auto inf_norm = [](const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; };
  double objective = neg_log_posterior(w, history, lambda);
  Vector grad = gradient(w, history, lambda);
  auto small = [&] {
    return inf_norm(grad) <= options.gradient_tolerance * std::max(1.0, inf_norm(w));
  };

  bool converged = small();
  int iterations = 0;
  while (!converged && iterations < options.max_iterations) {
    Matrix h = hessian_at_w ? std::move(*hessian_at_w) : hessian(w, history, lambda);
    hessian_at_w.reset();
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("Newton system is not positive definite");
    }
    const Vector step = llt.solve(grad);

    // Predicted decrease of the quadratic model. Below the resolution of J the
    // comparison in the line search is rounding noise, so take the full step.
    const double predicted = 0.5 * grad.dot(step);
    if (predicted <= kFlatObjective * std::max(1.0, std::abs(objective))) {
      w -= step;
      objective = neg_log_posterior(w, history, lambda);
      grad = gradient(w, history, lambda);
      ++iterations;
      converged = small();
      continue;
    }

    bool accepted = false;
    double scale = 1.0;
    for (int halving = 0; halving <= options.max_step_halvings; ++halving) {
      Vector candidate = w - scale * step;
      const double value = neg_log_posterior(candidate, history, lambda);
      if (value <= objective) {
        w = std::move(candidate);
        objective = value;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    ++iterations;
    if (!accepted) {
      // Objective flat to rounding along the Newton direction.
      hessian_at_w = std::move(h);
      break;
    }
    grad = gradient(w, history, lambda);
    converged = small();
  }

  PosteriorState state;
  state.precision = hessian_at_w ? std::move(*hessian_at_w) : hessian(w, history, lambda);
  state.precision_factor = lower_factor(state.precision);
  state.mean = std::move(w);
  state.lambda = lambda;
  state.observations = history.size();
  state.iterations = iterations;
  state.converged = converged;
  return state;
}

}  // namespace

double sigmoid(double z) {
  double value;
  if (z >= 0.0) {
    value = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    value = e / (1.0 + e);
  }
  // Keep the result strictly inside (0, 1) even where it rounds to an endpoint.
  return std::clamp(value, kSigmoidLo, kSigmoidHi);
}

double log_sigmoid(double z) {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

ObservationHistory::ObservationHistory(std::size_t dim) : dim_(dim) {}

void ObservationHistory::append(const Vector& features, int reward, std::int64_t round) {
  require_dim(dim_, features.size(), "feature vector");
  if (reward != 0 && reward != 1) {
    throw ValidationError("reward must be 0 or 1, got " + std::to_string(reward));
  }
  if (!features.allFinite()) throw ValidationError("feature vector has non-finite entries");
  features_.insert(features_.end(), features.data(), features.data() + features.size());
  rewards_.push_back(static_cast<double>(reward));
  rounds_.push_back(round);
}

Eigen::Map<const RowMatrix> ObservationHistory::features() const {
  return {features_.data(), static_cast<Eigen::Index>(size()),
          static_cast<Eigen::Index>(dim_)};
}

Eigen::Map<const Vector> ObservationHistory::rewards() const {
  return {rewards_.data(), static_cast<Eigen::Index>(size())};
}

PosteriorState PosteriorState::prior(std::size_t dim, double lambda) {
  require_lambda(lambda);
  const auto n = static_cast<Eigen::Index>(dim);
  PosteriorState state;
  state.mean = Vector::Zero(n);
  state.precision = lambda * Matrix::Identity(n, n);
  state.precision_factor = std::sqrt(lambda) * Matrix::Identity(n, n);
  state.lambda = lambda;
  return state;
}

PosteriorState PosteriorState::from_factor(Vector mean, Matrix factor, double lambda) {
  if (factor.rows() != mean.size() || factor.cols() != mean.size()) {
    throw DimensionError("precision factor shape does not match the mean");
  }
  PosteriorState state;
  state.precision_factor = factor.triangularView<Eigen::Lower>();
  state.precision = state.precision_factor * state.precision_factor.transpose();
  state.mean = std::move(mean);
  state.lambda = lambda;
  return state;
}

double neg_log_posterior(const Vector& w, const ObservationHistory& history, double lambda) {
  require_dim(history.dim(), w.size(), "weight vector");
  // With f in {0, 1} each term is log sigmoid(s), s = z for f = 1 and -z for f = 0.
  const Eigen::ArrayXd s =
      (history.features() * w).array() * (2.0 * history.rewards().array() - 1.0);
  const double loglik = (s.min(0.0) - (-s.abs()).exp().log1p()).sum();
  return 0.5 * lambda * w.squaredNorm() - loglik;
}

Vector gradient(const Vector& w, const ObservationHistory& history, double lambda) {
  require_dim(history.dim(), w.size(), "weight vector");
  const auto x = history.features();
  const Vector residual = sigmoid_of(x * w) - history.rewards();
  return lambda * w + x.transpose() * residual;
}

Matrix hessian(const Vector& w, const ObservationHistory& history, double lambda) {
  require_dim(history.dim(), w.size(), "weight vector");
  const auto d = static_cast<Eigen::Index>(history.dim());
  Matrix h = lambda * Matrix::Identity(d, d);
  add_weighted_gram(history.features(), w, 0, static_cast<Eigen::Index>(history.size()), h);
  symmetrize_from_lower(h);
  return h;
}

PosteriorState fit_map(const ObservationHistory& history, double lambda,
                       const std::optional<Vector>& warm_start, const NewtonOptions& options) {
  require_lambda(lambda);
  Vector w = warm_start ? *warm_start : Vector::Zero(static_cast<Eigen::Index>(history.dim()));
  require_dim(history.dim(), w.size(), "warm start");
  return newton(history, lambda, std::move(w), std::nullopt, options);
}

PosteriorState refit_map(const PosteriorState& previous, const ObservationHistory& history,
                         const NewtonOptions& options) {
  require_lambda(previous.lambda);
  require_dim(history.dim(), previous.mean.size(), "previous posterior mean");
  std::optional<Matrix> start_hessian;
  // A state with no observations carries no reusable curvature.
  if (previous.observations > 0 && previous.observations <= history.size() &&
      previous.precision.rows() == previous.mean.size()) {
    Matrix h = previous.precision;
    h.triangularView<Eigen::StrictlyUpper>().setZero();
    add_weighted_gram(history.features(), previous.mean,
                      static_cast<Eigen::Index>(previous.observations),
                      static_cast<Eigen::Index>(history.size() - previous.observations), h);
    symmetrize_from_lower(h);
    start_hessian = std::move(h);
  }
  return newton(history, previous.lambda, previous.mean, std::move(start_hessian), options);
}

Vector sample_weights(const PosteriorState& state, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(state.mean.size());
  for (auto& v : z) v = normal(rng);
  return state.mean +
         state.precision_factor.transpose().triangularView<Eigen::Upper>().solve(z);
}

double predict(const Vector& w, const Vector& features) {
  if (w.size() != features.size()) {
    throw DimensionError("weight length " + std::to_string(w.size()) +
                         " != feature length " + std::to_string(features.size()));
  }
  return sigmoid(features.dot(w));
}

}  // namespace nnbandit
