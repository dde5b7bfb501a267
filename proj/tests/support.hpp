#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "expsel/dataset.hpp"
#include "expsel/losses.hpp"
#include "expsel/rng.hpp"

namespace testing {

using expsel::Dataset;
using expsel::Index;
using expsel::Matrix;
using expsel::Vector;

/// Gaussian design, y = X beta + noise_scale * N(0, 1) (+ intercept).
inline Dataset gaussian_data(std::uint64_t seed, Index n, const Vector& beta,
                             double noise_scale = 1.0, double intercept = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix x(n, beta.size());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < beta.size(); ++j) x(i, j) = z(rng);
  }
  Vector y = x * beta;
  for (Index i = 0; i < n; ++i) y(i) += intercept + noise_scale * z(rng);
  return Dataset(std::move(x), std::move(y));
}

inline Vector random_vector(std::uint64_t seed, Index p, double scale = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector b(p);
  for (Index j = 0; j < p; ++j) b(j) = u(rng);
  return b;
}

/// Minimizer of a convex scalar function: a coarse grid scan brackets the
/// minimum, golden-section search refines it.
inline double minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              int grid = 2000) {
  double best_x = lo;
  double best_f = f(lo);
  const double h = (hi - lo) / grid;
  for (int k = 1; k <= grid; ++k) {
    const double x = lo + k * h;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  double a = best_x - h;
  double b = best_x + h;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

/// Minimizer of a 2-D function by a dense grid followed by two rounds of
/// local grid refinement.
inline std::pair<double, double> minimize_grid_2d(const std::function<double(double, double)>& f,
                                                  double lo, double hi, double step) {
  double bx = lo, by = lo, bf = f(lo, lo);
  auto scan = [&](double x0, double x1, double y0, double y1, double h) {
    const int nx = static_cast<int>(std::round((x1 - x0) / h));
    const int ny = static_cast<int>(std::round((y1 - y0) / h));
    for (int i = 0; i <= nx; ++i) {
      const double x = x0 + i * h;
      for (int j = 0; j <= ny; ++j) {
        const double y = y0 + j * h;
        const double v = f(x, y);
        if (v < bf) {
          bf = v;
          bx = x;
          by = y;
        }
      }
    }
  };
  scan(lo, hi, lo, hi, step);
  for (int round = 0; round < 3; ++round) {
    const double h = step / 100.0;
    scan(bx - step, bx + step, by - step, by + step, h);
    step = h;
  }
  return {bx, by};
}

inline double sum_expectile_loss(const Vector& r, double tau) {
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += (r(i) < 0 ? 1.0 - tau : tau) * r(i) * r(i);
  return s;
}

inline double sum_check_loss(const Vector& r, double level) {
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += r(i) * (level - (r(i) < 0 ? 1.0 : 0.0));
  return s;
}

}  // namespace testing
