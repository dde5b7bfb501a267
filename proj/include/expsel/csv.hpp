#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expsel/dataset.hpp"

namespace expsel {

/// A column given by header name or by 0-based position.
struct ColumnRef {
  std::optional<std::string> name;
  std::optional<std::size_t> index;

  static ColumnRef by_name(std::string n) { return {std::move(n), std::nullopt}; }
  static ColumnRef by_index(std::size_t i) { return {std::nullopt, i}; }
};

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
  /// Column names for headerless files (or to replace the header).
  std::vector<std::string> names;
  /// Last column when unset.
  std::optional<ColumnRef> response;
  /// Predictor columns by name; every non-response column when empty.
  std::vector<std::string> predictors;
  /// Keep a uniformly drawn subset of this many rows (original order kept).
  std::optional<std::size_t> subsample;
  std::uint64_t subsample_seed = 0;
};

/// RFC 4180 records: quoted fields, doubled quotes, CRLF or LF line ends.
/// Blank lines are skipped. Throws ParseError on an unterminated quote.
std::vector<std::vector<std::string>> read_csv_records(std::string_view text, char delimiter);

/// Numeric dataset from CSV text. Every selected cell must parse as a finite
/// number; anything else is a ParseError carrying the 1-based row (header
/// included) and column.
Dataset parse_csv(std::string_view text, const CsvOptions& options = {});

/// parse_csv on a file. Throws FileNotFound, ParseError, MissingColumn, EmptyData.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});

/// Reads a whole file; FileNotFound / IoError on failure.
std::string read_file(const std::string& path);

}  // namespace expsel
