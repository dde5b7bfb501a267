#include "expsel/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "expsel/error.hpp"
#include "expsel/rng.hpp"

namespace expsel {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

std::vector<std::vector<std::string>> read_csv_records(std::string_view text, char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool row_has_content = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;

  auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && row[0].empty() && !row_has_content;
    if (!blank) records.push_back(std::move(row));
    row.clear();
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && trim(field).empty() && !field_quoted) {
      field.clear();
      in_quotes = true;
      field_quoted = true;
      row_has_content = true;
      quote_line = line;
    } else if (c == delimiter) {
      row_has_content = true;
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_row();
      ++line;
    } else {
      if (c != ' ' && c != '\t') row_has_content = true;
      field += c;
    }
  }
  if (in_quotes) {
    throw ParseError(quote_line, row.size() + 1, "unterminated quoted field starting on line " +
                                                     std::to_string(quote_line));
  }
  if (!field.empty() || !row.empty() || row_has_content) end_row();
  return records;
}

Dataset parse_csv(std::string_view text, const CsvOptions& options) {
  const auto records = read_csv_records(text, options.delimiter);
  if (records.empty()) throw Error(ErrorKind::EmptyData, "no rows in CSV input");

  std::vector<std::string> names;
  std::size_t first_data = 0;
  if (options.header) {
    for (const auto& h : records[0]) names.emplace_back(trim(h));
    first_data = 1;
  }
  if (!options.names.empty()) names = options.names;
  const std::size_t width = records[first_data < records.size() ? first_data : 0].size();
  if (names.empty()) {
    for (std::size_t j = 0; j < width; ++j) names.push_back("V" + std::to_string(j + 1));
  }
  if (names.size() != width) {
    throw ParseError(first_data + 1, std::min(names.size(), width) + 1,
                     "expected " + std::to_string(names.size()) + " columns, found " +
                         std::to_string(width));
  }

  auto resolve = [&](const ColumnRef& ref) -> std::size_t {
    if (ref.index) {
      if (*ref.index >= names.size()) {
        throw Error(ErrorKind::MissingColumn,
                    "column index " + std::to_string(*ref.index + 1) + " out of range (" +
                        std::to_string(names.size()) + " columns)");
      }
      return *ref.index;
    }
    const auto it = std::find(names.begin(), names.end(), ref.name.value_or(""));
    if (it == names.end()) {
      throw Error(ErrorKind::MissingColumn, "no column named '" + ref.name.value_or("") + "'");
    }
    return static_cast<std::size_t>(it - names.begin());
  };

  const std::size_t response =
      options.response ? resolve(*options.response) : names.size() - 1;
  std::vector<std::size_t> predictors;
  if (options.predictors.empty()) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j != response) predictors.push_back(j);
    }
  } else {
    for (const auto& name : options.predictors) {
      const std::size_t j = resolve(ColumnRef::by_name(name));
      if (j == response) {
        throw Error(ErrorKind::InvalidArgument, "column '" + name + "' is the response");
      }
      predictors.push_back(j);
    }
  }
  if (predictors.empty()) throw Error(ErrorKind::EmptyData, "no predictor columns");

  std::vector<std::size_t> rows(records.size() - first_data);
  std::iota(rows.begin(), rows.end(), first_data);
  if (rows.empty()) throw Error(ErrorKind::EmptyData, "CSV input has a header but no data rows");
  if (options.subsample && *options.subsample < rows.size()) {
    Engine rng = make_engine(options.subsample_seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(*options.subsample);
    std::sort(rows.begin(), rows.end());
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyData, "row subsample is empty");

  const auto n = static_cast<Index>(rows.size());
  Matrix x(n, static_cast<Index>(predictors.size()));
  Vector y(n);
  auto cell = [&](std::size_t r, std::size_t j) {
    const auto& rec = records[r];
    if (rec.size() != width) {
      throw ParseError(r + 1, std::min(rec.size(), width) + 1,
                       "row " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) +
                           " fields, expected " + std::to_string(width));
    }
    const auto v = parse_number(rec[j]);
    if (!v) {
      throw ParseError(r + 1, j + 1,
                       "non-numeric value '" + rec[j] + "' at row " + std::to_string(r + 1) +
                           ", column " + std::to_string(j + 1) + " (" + names[j] + ")");
    }
    return *v;
  };
  for (Index i = 0; i < n; ++i) {
    const std::size_t r = rows[static_cast<std::size_t>(i)];
    y(i) = cell(r, response);
    for (std::size_t k = 0; k < predictors.size(); ++k) {
      x(i, static_cast<Index>(k)) = cell(r, predictors[k]);
    }
  }
  std::vector<std::string> kept;
  for (auto j : predictors) kept.push_back(names[j]);
  return Dataset(std::move(x), std::move(y), std::move(kept));
}

std::string read_file(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::FileNotFound, "file not found: " + path);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoError, "error reading " + path);
  return buf.str();
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  return parse_csv(read_file(path), options);
}

}  // namespace expsel
