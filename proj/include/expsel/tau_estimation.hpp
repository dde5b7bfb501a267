#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "expsel/dataset.hpp"
#include "expsel/estimators.hpp"
#include "expsel/noise.hpp"

namespace expsel {

enum class TauStage { from_errors, step0, step1 };

std::string_view to_string(TauStage s);

struct TauEstimate {
  /// Clamped to [kTauClampLow, kTauClampHigh].
  double tau = 0.5;
  /// Value before clamping.
  double raw = 0.5;
  TauStage stage = TauStage::from_errors;
  /// Residuals that entered the sums (exact zeros are dropped).
  std::size_t n_used = 0;
  /// Two-step scheme: the median-residual estimate that seeded the fit.
  std::optional<double> tau0;
  /// Number of refits performed by tau_two_step.
  int iterations = 0;
};

inline constexpr double kTauClampLow = 0.01;
inline constexpr double kTauClampHigh = 0.99;

/// sum(e_i, e_i < 0) / (sum(e_i, e_i < 0) - sum(e_i, e_i > 0)), clamped.
///
/// Throws DegenerateResiduals when e is empty or every entry is zero. A
/// one-signed residual set gives 0 or 1 before clamping.
TauEstimate tau_from_residuals(std::span<const double> e);
TauEstimate tau_from_residuals(const Vector& e);

/// Two-step estimate for data whose errors are unobservable: tau0 from
/// y - median(y), then an expectile fit of `subset` on all rows at tau0 and
/// the estimate from its residuals. `iterations` > 1 repeats the refit.
TauEstimate tau_two_step(const Dataset& data, const ModelSubset& subset,
                         const SolverOptions& opts = {}, int iterations = 1);

/// Index tau at which the tau-expectile of the law is zero:
/// E[eps^-] / (E[eps^+] + E[eps^-]). Closed forms, plus one 1-D quadrature
/// for E - Z^4.
double true_tau_of(ErrorDistribution d);

}  // namespace expsel
