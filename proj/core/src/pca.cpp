#include "nnbandit/pca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "nnbandit/errors.hpp"

namespace nnbandit {

namespace {

Matrix orthonormalize(const Matrix& z) {
  Eigen::HouseholderQR<Matrix> qr(z);
  return qr.householderQ() * Matrix::Identity(z.rows(), z.cols());
}

void check_shape(Eigen::Index n, Eigen::Index v, std::size_t d) {
  if (n < 2) throw DimensionError("pca needs at least 2 rows");
  if (d == 0) throw DimensionError("pca target dimension must be >= 1");
  if (d > static_cast<std::size_t>(std::min(n, v))) {
    throw DimensionError("pca target dimension " + std::to_string(d) +
                         " exceeds min(rows, columns) = " +
                         std::to_string(std::min(n, v)));
  }
}

PcaModel make_model(Vector mean, const Matrix& top, const Vector& theta, int iterations) {
  PcaModel model;
  model.mean = std::move(mean);
  model.components = top.transpose();
  for (Eigen::Index r = 0; r < model.components.rows(); ++r) {
    Eigen::Index arg = 0;
    model.components.row(r).cwiseAbs().maxCoeff(&arg);
    if (model.components(r, arg) < 0.0) model.components.row(r) *= -1.0;
  }
  model.explained_variance = theta.cwiseMax(0.0);
  model.iterations = iterations;
  return model;
}

// Below this many columns the covariance is formed and diagonalized outright.
constexpr Eigen::Index kDenseLimit = 512;
// Upper bound on the Krylov basis width, in columns.
constexpr Eigen::Index kBasisColumns = 512;

// Orthonormal columns spanning `w` minus the span of `basis`. A column that
// vanishes under projection (the Krylov space has run out, as with
// rank-deficient data) is replaced by a random direction.
Matrix extend_basis(const Matrix& basis, Matrix w, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  auto project = [&](auto&& x) {
    for (int pass = 0; pass < 2; ++pass) x -= basis * (basis.transpose() * x);
  };
  const Vector scale = w.colwise().norm();
  project(w);
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (int attempt = 0;; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        w.col(j) -= w.leftCols(j) * (w.leftCols(j).transpose() * w.col(j));
      }
      const double norm = w.col(j).norm();
      if (norm > 1e-10 * std::max(scale[j], 1.0) || attempt == 3) {
        w.col(j) /= norm;
        break;
      }
      Vector fresh(w.rows());
      for (auto& x : fresh) x = normal(rng);
      project(fresh);
      w.col(j) = fresh;
    }
  }
  return w;
}

// Restarted block Krylov iteration with Rayleigh-Ritz over the whole basis.
// `apply_cov` maps a V x b block to (covariance) * block.
template <class ApplyCov>
PcaModel krylov_pca(Vector mean, std::size_t d, const PcaOptions& options,
                    const ApplyCov& apply_cov) {
  const Eigen::Index v = mean.size();
  const Eigen::Index target = static_cast<Eigen::Index>(d);

  if (v <= kDenseLimit) {
    Matrix cov = apply_cov(Matrix::Identity(v, v));
    cov = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    const Matrix top = es.eigenvectors().rowwise().reverse().leftCols(target);
    return make_model(std::move(mean), top, es.eigenvalues().reverse().head(target), 1);
  }

  const Eigen::Index block =
      target + std::min<Eigen::Index>(static_cast<Eigen::Index>(options.oversampling),
                                      v - target);
  const Eigen::Index depth = std::clamp<Eigen::Index>(kBasisColumns / block, 2, 8);

  Rng rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix start(v, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < v; ++i) start(i, j) = normal(rng);
  }
  Matrix q = orthonormalize(start);

  int applications = 0;
  double residual = 0.0;
  while (applications < options.max_iterations) {
    Matrix basis(v, block * depth), image(v, block * depth);
    basis.leftCols(block) = q;
    for (Eigen::Index j = 0; j < depth; ++j) {
      image.middleCols(j * block, block) = apply_cov(basis.middleCols(j * block, block));
      ++applications;
      if (j + 1 < depth) {
        basis.middleCols((j + 1) * block, block) =
            extend_basis(basis.leftCols((j + 1) * block), image.middleCols(j * block, block), rng);
      }
    }

    Matrix t = basis.transpose() * image;
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    // Eigen returns ascending order; Ritz pairs are wanted descending.
    const Vector theta = es.eigenvalues().reverse();
    const Matrix vecs = es.eigenvectors().rowwise().reverse();
    const Matrix ritz = basis * vecs.leftCols(block);

    // Converged when every significant Ritz pair has a small residual
    // relative to the largest variance. Directions with no variance span an
    // arbitrary null space and are not checked.
    Eigen::Index rank = 0;
    if (theta[0] > 0.0) {
      while (rank < target && theta[rank] > 1e-12 * theta[0]) ++rank;
    }
    bool converged = rank == 0;
    if (!converged) {
      const Matrix r = image * vecs.leftCols(rank) -
                       ritz.leftCols(rank) * theta.head(rank).asDiagonal();
      residual = r.colwise().norm().maxCoeff() / theta[0];
      converged = residual <= options.tolerance;
    }
    if (converged) {
      return make_model(std::move(mean), ritz.leftCols(target), theta.head(target), applications);
    }
    q = orthonormalize(ritz);
  }
  std::ostringstream msg;
  msg << "pca did not converge in " << options.max_iterations
      << " covariance products; relative residual " << residual << " > tolerance "
      << options.tolerance;
  throw NumericalError(msg.str());
}

}  // namespace

PcaModel pca_fit(const Matrix& data, std::size_t d, const PcaOptions& options) {
  check_shape(data.rows(), data.cols(), d);
  if (!data.allFinite()) throw ValidationError("pca input has non-finite entries");
  Vector mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - mean.transpose();
  const double denom = static_cast<double>(data.rows() - 1);
  return krylov_pca(std::move(mean), d, options, [&](const Matrix& block) {
    return Matrix(centered.transpose() * (centered * block) / denom);
  });
}

PcaModel pca_fit(const SparseRowMatrix& data, std::size_t d, const PcaOptions& options) {
  check_shape(data.rows(), data.cols(), d);
  const double n = static_cast<double>(data.rows());
  Vector mean = (data.transpose() * Vector::Ones(data.rows())) / n;
  const double denom = n - 1.0;
  return krylov_pca(mean, d, options, [&](const Matrix& block) {
    const Matrix xb = data * block;
    Matrix out = data.transpose() * xb;
    out.noalias() -= n * mean * (mean.transpose() * block);
    return Matrix(out / denom);
  });
}

Vector pca_transform(const PcaModel& model, const Vector& x) {
  if (x.size() != model.mean.size()) {
    throw DimensionError("pca transform: input length " + std::to_string(x.size()) +
                         " != " + std::to_string(model.mean.size()));
  }
  return model.components * (x - model.mean);
}

Vector pca_transform(const PcaModel& model, const SparseVector& x) {
  if (x.size() != model.mean.size()) {
    throw DimensionError("pca transform: input length " + std::to_string(x.size()) +
                         " != " + std::to_string(model.mean.size()));
  }
  return model.components * x - model.components * model.mean;
}

}  // namespace nnbandit
