#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace expsel {

enum class ErrorKind {
  InvalidArgument,
  NonFinite,
  RankDeficient,
  ShapeMismatch,
  DegenerateSplit,
  TooManySubsets,
  AllSubsetsFailed,
  DegenerateResiduals,
  AllReplicationsFailed,
  FileNotFound,
  ParseError,
  MissingColumn,
  EmptyData,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `kind()` drives the CLI exit-code mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown by load_csv for a malformed cell. Row and column are 1-based,
/// counting the header as row 1 when one is present.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : Error(ErrorKind::ParseError, what), row_(row), col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace expsel
