#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace nnbandit {

/// Broad failure category; the CLI maps each to a process exit code.
enum class ErrorKind {
  kValidation,
  kIo,
  kNumerical,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Bad input data, bad arguments, or a violated precondition.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

/// Vector or matrix shapes that do not fit together, or a dimension cap hit.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An API used out of order (e.g. transform before fit) or with empty input.
class UsageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed text input. Line numbers are 1-based and count the header.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Malformed binary input, located by byte offset from the start of the file.
class FormatError : public ValidationError {
 public:
  FormatError(std::uint64_t offset, const std::string& message);

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class IoError : public Error {
 public:
  IoError(const std::filesystem::path& path, const std::string& message);

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace nnbandit
