#pragma once

#include <filesystem>
#include <iosfwd>

#include "nnbandit/bayes_logreg.hpp"

namespace nnbandit {

// Binary posterior dump: magic "PST1", u32 dim D, D float64 mean, then the
// D x D lower-triangular precision factor row-major as float64. Little-endian.

void write_posterior(const PosteriorState& state, std::ostream& out);
void write_posterior(const PosteriorState& state, const std::filesystem::path& path);

/// The precision is rebuilt from the factor; `lambda` is not stored.
PosteriorState read_posterior(std::istream& in, double lambda);
PosteriorState read_posterior(const std::filesystem::path& path, double lambda);

}  // namespace nnbandit
