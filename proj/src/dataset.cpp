#include "expsel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "expsel/error.hpp"

namespace expsel {

Dataset::Dataset(Matrix x, Vector y, std::vector<std::string> column_names)
    : x_(std::move(x)), y_(std::move(y)), names_(std::move(column_names)) {
  if (x_.rows() < 1 || x_.cols() < 1) {
    throw Error(ErrorKind::EmptyData, "dataset needs at least one row and one column");
  }
  if (x_.rows() != y_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "design has " + std::to_string(x_.rows()) +
                                              " rows but response has " +
                                              std::to_string(y_.size()));
  }
  if (!x_.allFinite() || !y_.allFinite()) {
    throw Error(ErrorKind::NonFinite, "dataset contains non-finite values");
  }
  if (names_.empty()) {
    names_.reserve(static_cast<std::size_t>(x_.cols()));
    for (Index j = 0; j < x_.cols(); ++j) names_.push_back("x" + std::to_string(j + 1));
  } else if (names_.size() != static_cast<std::size_t>(x_.cols())) {
    throw Error(ErrorKind::ShapeMismatch, "column name count does not match design width");
  }
}

Dataset Dataset::rows(std::span<const std::size_t> rows) const {
  Matrix xs(static_cast<Index>(rows.size()), x_.cols());
  Vector ys(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto i = static_cast<Index>(rows[k]);
    if (i < 0 || i >= n()) throw Error(ErrorKind::InvalidArgument, "row index out of range");
    xs.row(static_cast<Index>(k)) = x_.row(i);
    ys(static_cast<Index>(k)) = y_(i);
  }
  return Dataset(std::move(xs), std::move(ys), names_);
}

Dataset Dataset::with_response(Vector y) const { return Dataset(x_, std::move(y), names_); }

ModelSubset::ModelSubset(std::vector<std::size_t> columns, std::size_t p)
    : columns_(std::move(columns)), p_(p) {
  std::sort(columns_.begin(), columns_.end());
  if (std::adjacent_find(columns_.begin(), columns_.end()) != columns_.end()) {
    throw Error(ErrorKind::InvalidArgument, "duplicate column in model subset");
  }
  if (!columns_.empty() && columns_.back() >= p_) {
    throw Error(ErrorKind::InvalidArgument, "model subset column " +
                                                std::to_string(columns_.back() + 1) +
                                                " exceeds p = " + std::to_string(p_));
  }
}

ModelSubset ModelSubset::from_one_based(const std::vector<std::size_t>& indices, std::size_t p) {
  std::vector<std::size_t> cols;
  cols.reserve(indices.size());
  for (auto i : indices) {
    if (i == 0) throw Error(ErrorKind::InvalidArgument, "subset indices are 1-based");
    cols.push_back(i - 1);
  }
  return ModelSubset(std::move(cols), p);
}

ModelSubset ModelSubset::parse(const std::string& label, std::size_t p) {
  if (label.empty() || label == "0") return ModelSubset({}, p);
  std::vector<std::size_t> idx;
  std::stringstream ss(label);
  std::string tok;
  while (std::getline(ss, tok, '+')) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw Error(ErrorKind::InvalidArgument, "bad subset label '" + label + "'");
    }
    idx.push_back(v);
  }
  return from_one_based(idx, p);
}

ModelSubset ModelSubset::full(std::size_t p) {
  std::vector<std::size_t> cols(p);
  for (std::size_t j = 0; j < p; ++j) cols[j] = j;
  return ModelSubset(std::move(cols), p);
}

bool ModelSubset::contains(std::size_t column) const {
  return std::binary_search(columns_.begin(), columns_.end(), column);
}

std::vector<std::size_t> ModelSubset::one_based() const {
  std::vector<std::size_t> out(columns_);
  for (auto& c : out) ++c;
  return out;
}

std::string ModelSubset::label() const {
  if (columns_.empty()) return "0";
  std::string out;
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    if (k) out += '+';
    out += std::to_string(columns_[k] + 1);
  }
  return out;
}

std::strong_ordering ModelSubset::operator<=>(const ModelSubset& other) const {
  if (auto c = columns_.size() <=> other.columns_.size(); c != 0) return c;
  return columns_ <=> other.columns_;
}

}  // namespace expsel
