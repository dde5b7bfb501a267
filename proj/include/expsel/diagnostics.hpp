#pragma once

#include "expsel/dataset.hpp"

namespace expsel {

/// Design checks behind the consistency assumptions: eigenvalue range of the
/// Gram matrix, row norms, and the training/validation balance at fraction s.
struct Diagnostics {
  std::size_t n = 0;
  std::size_t p = 0;
  double s = 0.0;
  /// Extreme eigenvalues of n^{-1} X'X.
  double eig_min = 0.0;
  double eig_max = 0.0;
  /// eig_max / eig_min; infinite for a singular Gram matrix.
  double condition_number = 0.0;
  double max_row_norm2 = 0.0;
  double max_row_norm_inf = 0.0;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  /// sqrt(p / n_train) * max_row_norm2.
  double row_norm_ratio = 0.0;
  /// n_validation <= n_train.
  bool split_ratio_warning = false;
};

/// Never throws on valid data; the warnings are advisory.
Diagnostics diagnose(const Dataset& data, double s);

}  // namespace expsel
