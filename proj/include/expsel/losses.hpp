#pragma once

namespace expsel {

/// Asymmetry level of the expectile loss, restricted to the open interval (0, 1).
class ExpectileIndex {
 public:
  /// Throws Error(InvalidArgument) unless 0 < tau < 1.
  explicit ExpectileIndex(double tau);

  double value() const noexcept { return tau_; }
  ExpectileIndex reflected() const { return ExpectileIndex(1.0 - tau_); }

  friend bool operator==(ExpectileIndex, ExpectileIndex) = default;

 private:
  double tau_;
};

// Asymmetric squared loss |tau - 1{x<0}| x^2.
inline double expectile_loss(double x, ExpectileIndex tau) noexcept {
  const double w = x < 0.0 ? 1.0 - tau.value() : tau.value();
  return w * x * x;
}

// First derivative of expectile_loss; the x >= 0 branch owns x == 0.
inline double expectile_score(double x, ExpectileIndex tau) noexcept {
  const double w = x < 0.0 ? 1.0 - tau.value() : tau.value();
  return 2.0 * w * x;
}

// Second derivative of expectile_loss (piecewise constant).
inline double expectile_weight(double x, ExpectileIndex tau) noexcept {
  return x < 0.0 ? 2.0 * (1.0 - tau.value()) : 2.0 * tau.value();
}

// Check (pinball) loss at quantile level `level`, used by the median-regression baseline.
// `level` must lie in (0, 1); validated by callers.
inline double check_loss(double x, double level) noexcept {
  return x < 0.0 ? (level - 1.0) * x : level * x;
}

inline double squared_loss(double x) noexcept { return 0.5 * x * x; }

}  // namespace expsel
