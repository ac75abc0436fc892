#include "nnbandit/posterior_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

#include "nnbandit/errors.hpp"

namespace nnbandit {

namespace {

constexpr std::array<char, 4> kMagic = {'P', 'S', 'T', '1'};

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::istream& in, int bytes, std::uint64_t& offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw FormatError(offset, "truncated posterior");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    ++offset;
  }
  return v;
}

}  // namespace

void write_posterior(const PosteriorState& state, std::ostream& out) {
  const auto d = state.mean.size();
  out.write(kMagic.data(), kMagic.size());
  put_le(out, static_cast<std::uint64_t>(d), 4);
  for (Eigen::Index i = 0; i < d; ++i) put_le(out, std::bit_cast<std::uint64_t>(state.mean[i]), 8);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double v = j <= i ? state.precision_factor(i, j) : 0.0;
      put_le(out, std::bit_cast<std::uint64_t>(v), 8);
    }
  }
}

void write_posterior(const PosteriorState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  write_posterior(state, out);
  if (!out) throw IoError(path, "write failed");
}

PosteriorState read_posterior(std::istream& in, double lambda) {
  std::uint64_t offset = 0;
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic) throw FormatError(0, "bad magic, expected 'PST1'");
  offset = 4;
  const auto d = static_cast<Eigen::Index>(get_le(in, 4, offset));
  if (d == 0) throw FormatError(4, "posterior dimension is 0");
  Vector mean(d);
  for (Eigen::Index i = 0; i < d; ++i) mean[i] = std::bit_cast<double>(get_le(in, 8, offset));
  Matrix factor(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) factor(i, j) = std::bit_cast<double>(get_le(in, 8, offset));
  }
  if (!mean.allFinite() || !factor.allFinite()) {
    throw FormatError(8, "posterior contains non-finite values");
  }
  return PosteriorState::from_factor(std::move(mean), std::move(factor), lambda);
}

PosteriorState read_posterior(const std::filesystem::path& path, double lambda) {
  std::ifstream in(path, std::ios::in | std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return read_posterior(in, lambda);
}

}  // namespace nnbandit
