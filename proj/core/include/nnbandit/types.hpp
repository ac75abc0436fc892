#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <random>

namespace nnbandit {

/// All arithmetic after load is double precision.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Every stochastic component draws from this engine so runs replay exactly.
using Rng = std::mt19937_64;

/// Largest feature-space dimension D accepted by default (L <= 64 for bilinear).
inline constexpr std::size_t kDefaultFeatureDimCap = 4096;

}  // namespace nnbandit
