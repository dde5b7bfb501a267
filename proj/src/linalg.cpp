#include "linalg.hpp"

#include <algorithm>
#include <cmath>

#include "expsel/error.hpp"

namespace expsel::detail {

Matrix design_matrix(const Matrix& x, const ModelSubset& subset, bool intercept) {
  const Index k = static_cast<Index>(subset.size()) + (intercept ? 1 : 0);
  if (k == 0) {
    throw Error(ErrorKind::InvalidArgument, "empty model without intercept has no parameters");
  }
  if (subset.ambient_dim() != static_cast<std::size_t>(x.cols())) {
    throw Error(ErrorKind::ShapeMismatch, "subset dimension does not match design width");
  }
  Matrix z(x.rows(), k);
  Index c = 0;
  if (intercept) z.col(c++).setOnes();
  for (auto j : subset.columns()) z.col(c++) = x.col(static_cast<Index>(j));
  return z;
}

bool has_full_column_rank(const Matrix& z) {
  if (z.rows() < z.cols()) return false;
  Eigen::ColPivHouseholderQR<Matrix> qr(z);
  return qr.rank() == z.cols();
}

double ridge_jitter(const Matrix& z) {
  const double tr = z.colwise().squaredNorm().sum();
  return 1e-10 * std::max(tr, 1.0) / static_cast<double>(z.cols());
}

Vector weighted_least_squares(const Matrix& z, const Vector& y, const Vector& w, double ridge) {
  const Index n = z.rows();
  const Index k = z.cols();
  const Index extra = ridge > 0.0 ? k : 0;
  Matrix a(n + extra, k);
  Vector b(n + extra);
  const Vector sw = w.array().sqrt();
  a.topRows(n) = sw.asDiagonal() * z;
  b.head(n) = sw.cwiseProduct(y);
  if (extra) {
    a.bottomRows(k) = std::sqrt(ridge) * Matrix::Identity(k, k);
    b.tail(k).setZero();
  }
  return a.householderQr().solve(b);
}

Vector least_squares(const Matrix& z, const Vector& y, double ridge) {
  if (ridge > 0.0) return weighted_least_squares(z, y, Vector::Ones(z.rows()), ridge);
  return z.colPivHouseholderQr().solve(y);
}

double median(Vector v) {
  if (v.size() == 0) throw Error(ErrorKind::EmptyData, "median of empty vector");
  std::sort(v.data(), v.data() + v.size());
  const Index m = v.size() / 2;
  return v.size() % 2 ? v(m) : 0.5 * (v(m - 1) + v(m));
}

}  // namespace expsel::detail
