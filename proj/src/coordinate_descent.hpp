#pragma once

// Cyclic coordinate descent for
//
//   F(b) = n^{-1} sum_i loss_i(y_i - z_i' b) + sum_j penalty_j |b_j|
//
// where each loss_i is convex, C^1 and piecewise quadratic. Every coordinate
// update minimizes F exactly along that coordinate, so F never increases.

#include <cassert>
#include <cmath>
#include <limits>

#include "expsel/dataset.hpp"
#include "expsel/losses.hpp"

namespace expsel::detail {

struct CdOptions {
  double tol = 1e-10;
  int max_sweeps = 10000;
};

struct CdResult {
  Vector beta;
  int sweeps = 0;
  bool converged = false;
};

/// rho_tau on every observation.
struct ExpectileCdLoss {
  ExpectileIndex tau;
  double value(Index, double r) const { return expectile_loss(r, tau); }
  double d1(Index, double r) const { return expectile_score(r, tau); }
  double d2(Index, double r) const { return expectile_weight(r, tau); }
};

/// a_i r^2 + c r: the majorizer of the smoothed check loss at a fixed anchor.
struct QuadraticSurrogateLoss {
  const Vector* a;
  double linear;
  double value(Index i, double r) const { return (*a)(i) * r * r + linear * r; }
  double d1(Index i, double r) const { return 2.0 * (*a)(i) * r + linear; }
  double d2(Index i, double) const { return 2.0 * (*a)(i); }
};

/// argmin_b n^{-1} sum_i loss_i(e_i - z_i b) + c |b|.
///
/// The smooth part has a continuous, nondecreasing, piecewise-linear
/// derivative L'. Zero is optimal iff |L'(0)| <= c; otherwise the root of
/// L'(b) = -c sign(b) is found by Newton steps on the current linear piece,
/// safeguarded by a shrinking bracket. Newton lands on the root exactly once
/// it reaches the root's piece.
template <class Loss>
double coordinate_minimizer(const Loss& loss, const double* z, const double* e, Index n,
                            double c, double start) {
  const double inv_n = 1.0 / static_cast<double>(n);
  auto derivative = [&](double b, double& slope) {
    double g = 0.0;
    double h = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double r = e[i] - z[i] * b;
      g -= loss.d1(i, r) * z[i];
      h += loss.d2(i, r) * z[i] * z[i];
    }
    slope = h * inv_n;
    return g * inv_n;
  };

  double zz = 0.0;
  for (Index i = 0; i < n; ++i) zz += z[i] * z[i];
  if (zz == 0.0) return 0.0;

  constexpr double inf = std::numeric_limits<double>::infinity();
  double target = 0.0;
  double lo = -inf;
  double hi = inf;
  double b = start;
  if (c > 0.0) {
    double s0 = 0.0;
    const double g0 = derivative(0.0, s0);
    if (std::abs(g0) <= c) return 0.0;
    if (g0 < -c) {
      target = -c;
      lo = 0.0;
      if (!(b > 0.0)) b = 0.0;
    } else {
      target = c;
      hi = 0.0;
      if (!(b < 0.0)) b = 0.0;
    }
  }

  for (int it = 0; it < 200; ++it) {
    double slope = 0.0;
    const double f = derivative(b, slope) - target;
    if (f == 0.0) return b;
    if (f < 0.0) {
      lo = b;
    } else {
      hi = b;
    }
    double next = b - f / slope;
    if (!(next > lo && next < hi)) {
      if (std::isfinite(lo) && std::isfinite(hi)) {
        next = 0.5 * (lo + hi);
      } else {
        return b;  // slope > 0 keeps Newton inside a half-open bracket
      }
    }
    if (std::abs(next - b) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(1.0, std::abs(b))) {
      return next;
    }
    b = next;
  }
  return b;
}

template <class Loss>
double cd_objective(const Loss& loss, const Vector& r, const Vector& beta, const Vector& penalty) {
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += loss.value(i, r(i));
  return s / static_cast<double>(r.size()) + penalty.cwiseProduct(beta.cwiseAbs()).sum();
}

template <class Loss>
CdResult coordinate_descent(const Matrix& z, const Vector& y, const Loss& loss,
                            const Vector& penalty, Vector beta, const CdOptions& opts) {
  const Index n = z.rows();
  const Index k = z.cols();
  Vector r = y - z * beta;
  Vector e(n);
  CdResult out;
#ifndef NDEBUG
  double last = cd_objective(loss, r, beta, penalty);
#endif
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index j = 0; j < k; ++j) {
      e = r + z.col(j) * beta(j);
      const double b = coordinate_minimizer(loss, z.col(j).data(), e.data(), n, penalty(j), beta(j));
      r = e - z.col(j) * b;
      max_change = std::max(max_change, std::abs(b - beta(j)) / (1.0 + std::abs(b)));
      beta(j) = b;
    }
#ifndef NDEBUG
    const double now = cd_objective(loss, r, beta, penalty);
    assert(now <= last + 1e-12 * (1.0 + std::abs(last)));
    last = now;
#endif
    out.sweeps = sweep;
    if (max_change < opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.beta = std::move(beta);
  return out;
}

}  // namespace expsel::detail
