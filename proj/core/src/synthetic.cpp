#include "nnbandit/synthetic.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "nnbandit/errors.hpp"

namespace nnbandit {

SyntheticEnvironment make_synthetic(std::size_t dim, std::size_t n_contexts,
                                    std::size_t n_candidates, std::uint64_t seed,
                                    std::size_t feature_dim_cap) {
  if (dim == 0) throw DimensionError("synthetic embedding dimension must be >= 1");
  if (dim > feature_dim_cap / dim) {
    throw DimensionError("bilinear feature dimension " + std::to_string(dim * dim) +
                         " exceeds the cap " + std::to_string(feature_dim_cap));
  }
  if (n_candidates < 2) throw ValidationError("synthetic pools need at least 2 candidates");
  if (n_contexts == 0) throw ValidationError("synthetic dataset needs at least 1 context");

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));

  SyntheticEnvironment env{ReplayDataset{}, EmbeddingStore(dim),
                           SyntheticTruth{Matrix(dim, dim), false, seed}};
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) env.truth.true_matrix(i, j) = normal(rng);
  }

  auto draw_embedding = [&] {
    Vector v(dim);
    for (auto& x : v) x = static_cast<double>(static_cast<float>(normal(rng) * scale));
    return v;
  };

  env.dataset.contexts.reserve(n_contexts);
  for (std::size_t c = 0; c < n_contexts; ++c) {
    ContextEntry entry;
    entry.context_id = "c" + std::to_string(c);
    Vector context = draw_embedding();
    // Row vector c M*, shared by every candidate in the pool.
    const Vector projected = env.truth.true_matrix.transpose() * context;
    env.embeddings.insert(entry.context_id, std::move(context));

    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_candidates; ++j) {
      Candidate cand;
      cand.response_id = entry.context_id + "_r" + std::to_string(j);
      Vector response = draw_embedding();
      const double score = projected.dot(response);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
      env.embeddings.insert(cand.response_id, std::move(response));
      entry.candidates.push_back(std::move(cand));
    }
    entry.candidates[best].label = 1;
    env.dataset.contexts.push_back(std::move(entry));
  }
  return env;
}

double bilinear_score(const Vector& context, const Matrix& m, const Vector& response) {
  if (m.rows() != context.size() || m.cols() != response.size()) {
    throw DimensionError("bilinear score: matrix shape does not match embeddings");
  }
  return context.dot(m * response);
}

void write_truth_csv(const Matrix& truth, std::ostream& out) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      if (j > 0) out << ',';
      out << truth(i, j);
    }
    out << '\n';
  }
}

void write_truth_csv(const Matrix& truth, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  write_truth_csv(truth, out);
  if (!out) throw IoError(path, "write failed");
}

Matrix read_truth_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(line_no, "not a number: '" + cell + "'");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(line_no, "ragged truth matrix row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(path.string() + ": empty truth matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace nnbandit
