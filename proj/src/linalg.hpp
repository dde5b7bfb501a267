#pragma once

#include "expsel/dataset.hpp"

namespace expsel::detail {

/// [1 | X_M] when `intercept`, otherwise X_M.
Matrix design_matrix(const Matrix& x, const ModelSubset& subset, bool intercept);

bool has_full_column_rank(const Matrix& z);

/// Ridge added to a singular Gram matrix: 1e-10 * trace(Z'Z) / k.
double ridge_jitter(const Matrix& z);

/// argmin_b sum_i w_i (y_i - z_i b)^2 + ridge * |b|^2, via Householder QR on
/// the row-scaled (and ridge-augmented) system.
Vector weighted_least_squares(const Matrix& z, const Vector& y, const Vector& w, double ridge);

/// Unweighted least squares via column-pivoting QR.
Vector least_squares(const Matrix& z, const Vector& y, double ridge);

double median(Vector v);

}  // namespace expsel::detail
