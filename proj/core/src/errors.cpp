#include "nnbandit/errors.hpp"

namespace nnbandit {

ParseError::ParseError(std::size_t line, const std::string& message)
    : ValidationError("line " + std::to_string(line) + ": " + message),
      line_(line) {}

FormatError::FormatError(std::uint64_t offset, const std::string& message)
    : ValidationError("byte offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

IoError::IoError(const std::filesystem::path& path, const std::string& message)
    : Error(ErrorKind::kIo, path.string() + ": " + message), path_(path) {}

}  // namespace nnbandit
