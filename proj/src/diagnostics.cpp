#include "expsel/diagnostics.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "expsel/selection.hpp"

namespace expsel {

Diagnostics diagnose(const Dataset& data, double s) {
  Diagnostics d;
  d.n = static_cast<std::size_t>(data.n());
  d.p = static_cast<std::size_t>(data.p());
  d.s = s;

  const Matrix gram = data.x().transpose() * data.x() / static_cast<double>(data.n());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  d.eig_min = eig.eigenvalues().minCoeff();
  d.eig_max = eig.eigenvalues().maxCoeff();
  // Relative to eig_max, eigenvalues at rounding level are treated as zero.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(d.eig_max);
  d.condition_number = d.eig_min > floor ? d.eig_max / d.eig_min
                                         : std::numeric_limits<double>::infinity();

  d.max_row_norm2 = data.x().rowwise().norm().maxCoeff();
  d.max_row_norm_inf = data.x().cwiseAbs().rowwise().maxCoeff().maxCoeff();

  const std::size_t nv = (s > 0.0 && s < 1.0) ? std::min(validation_size(d.n, s), d.n) : 0;
  d.n_validation = nv;
  d.n_train = d.n - nv;
  d.split_ratio_warning = d.n_validation <= d.n_train;
  d.row_norm_ratio =
      d.n_train > 0 ? std::sqrt(static_cast<double>(d.p) / static_cast<double>(d.n_train)) *
                          d.max_row_norm2
                    : std::numeric_limits<double>::infinity();
  return d;
}

}  // namespace expsel
