#pragma once

#include <iosfwd>

namespace nnbandit::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

/// Parses `argv` and runs the selected subcommand (featurize, make-synthetic,
/// simulate, evaluate). Never throws; failures become exit codes with a
/// message on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nnbandit::cli
