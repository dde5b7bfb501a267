#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace expsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Observed responses and their deterministic design, one row per observation.
///
/// Construction validates shapes and rejects non-finite entries. Column names
/// default to "x1", "x2", ... when none are supplied.
class Dataset {
 public:
  Dataset(Matrix x, Vector y, std::vector<std::string> column_names = {});

  const Matrix& x() const noexcept { return x_; }
  const Vector& y() const noexcept { return y_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }

  Index n() const noexcept { return x_.rows(); }
  Index p() const noexcept { return x_.cols(); }

  /// Copy of the rows listed in `rows` (0-based), in that order.
  Dataset rows(std::span<const std::size_t> rows) const;

  /// Same design, replacement response.
  Dataset with_response(Vector y) const;

 private:
  Matrix x_;
  Vector y_;
  std::vector<std::string> names_;
};

/// A candidate submodel: a sorted set of column indices into a p-column design.
///
/// Indices are stored 0-based; `label()` renders them 1-based joined by '+'
/// ("1+3"), which is also the wire format. The empty subset is representable
/// and means "intercept only" to the fitting routines.
class ModelSubset {
 public:
  ModelSubset() = default;
  /// Throws InvalidArgument when an index is out of range; duplicates are rejected.
  ModelSubset(std::vector<std::size_t> columns, std::size_t p);

  /// Build from 1-based indices.
  static ModelSubset from_one_based(const std::vector<std::size_t>& indices, std::size_t p);
  /// Parse the "+"-joined 1-based label; "" or "0" is the empty subset.
  static ModelSubset parse(const std::string& label, std::size_t p);
  static ModelSubset full(std::size_t p);

  const std::vector<std::size_t>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return columns_.size(); }
  bool empty() const noexcept { return columns_.empty(); }
  std::size_t ambient_dim() const noexcept { return p_; }
  bool contains(std::size_t column) const;

  std::vector<std::size_t> one_based() const;
  std::string label() const;

  bool operator==(const ModelSubset& other) const = default;
  /// Size first, then lexicographic on the index lists.
  std::strong_ordering operator<=>(const ModelSubset& other) const;

 private:
  std::vector<std::size_t> columns_;
  std::size_t p_ = 0;
};

}  // namespace expsel
