#pragma once

// Reference computations the tests check the library against. Written from the
// definitions with plain loops; nothing here calls into nnbandit.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// c M u^T by explicit double sum.
inline double bilinear(const Eigen::VectorXd& c, const Eigen::MatrixXd& m,
                       const Eigen::VectorXd& u) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    for (Eigen::Index j = 0; j < u.size(); ++j) s += c[i] * m(i, j) * u[j];
  }
  return s;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off <= 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> values(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

// Sample covariance with (n - 1) normalization; rows are observations.
inline Eigen::MatrixXd covariance(const Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

// Root of a sign-changing function on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((fmid < 0) == (flo < 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// (lambda/2)|w|^2 - sum_i [f_i log s(x_i w) + (1 - f_i) log(1 - s(x_i w))].
inline double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& f,
                                 double lambda, const Eigen::VectorXd& w) {
  double j = 0.5 * lambda * w.squaredNorm();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double p = logistic(x.row(i).dot(w));
    j -= f[i] * std::log(p) + (1.0 - f[i]) * std::log(1.0 - p);
  }
  return j;
}

inline Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& f,
                                         double lambda, const Eigen::VectorXd& w) {
  Eigen::VectorXd g = lambda * w;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    g += (logistic(x.row(i).dot(w)) - f[i]) * x.row(i).transpose();
  }
  return g;
}

// Fixed-step gradient descent on the regularized logistic objective. The step
// is 1 / (lambda + |X|_F^2 / 4), below the inverse Lipschitz constant of the
// gradient, so the iteration contracts to the unique minimizer.
inline Eigen::VectorXd logistic_minimizer_gd(const Eigen::MatrixXd& x, const Eigen::VectorXd& f,
                                             double lambda, double tolerance = 1e-11,
                                             long max_iterations = 10'000'000) {
  const double step = 1.0 / (lambda + 0.25 * x.squaredNorm());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  for (long it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd g = logistic_gradient(x, f, lambda, w);
    if (g.lpNorm<Eigen::Infinity>() < tolerance) break;
    w -= step * g;
  }
  return w;
}

// Standard error of a Bernoulli(p) proportion over n trials.
inline double binomial_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

// Mean of 0/1 regret increments.
inline double average(const std::vector<int>& increments) {
  double s = 0.0;
  for (int v : increments) s += v;
  return s / static_cast<double>(increments.size());
}

}  // namespace oracle
