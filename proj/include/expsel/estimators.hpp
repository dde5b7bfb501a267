#pragma once

#include <optional>
#include <string_view>

#include "expsel/dataset.hpp"
#include "expsel/losses.hpp"

namespace expsel {

enum class FitMethod {
  expectile,
  lasso_expectile,
  adaptive_lasso_expectile,
  least_squares,
  adaptive_lasso_least_squares,
  quantile,
  adaptive_lasso_quantile,
};

std::string_view to_string(FitMethod m);
FitMethod fit_method_from_string(std::string_view s);

struct SolverOptions {
  /// Convergence threshold on the largest coefficient change, relative to
  /// 1 + |coefficient|.
  double tol = 1e-10;
  int max_iter = 200;
  /// Used only to flag suspicious unpenalized fits in `FitResult::gradient_norm`.
  double grad_tol = 1e-8;
  /// Throw RankDeficient instead of adding ridge jitter to a singular design.
  bool strict_rank = false;
  /// Unpenalized, always-included constant column.
  bool intercept = true;
  int max_sweeps = 10000;
};

/// How the adaptive-LASSO pilot estimator and weight cap are chosen.
enum class PilotRegime {
  /// fixed_p when |M| < sqrt(n), growing_p otherwise.
  automatic,
  /// Unpenalized pilot, uncapped weights.
  fixed_p,
  /// LASSO pilot with penalty nu, weights capped at sqrt(n).
  growing_p,
};

struct PenaltyConfig {
  /// Defaults to default_lambda(p, n) when unset.
  std::optional<double> lambda;
  double gamma = 1.0;
  /// LASSO-pilot penalty; defaults to lambda.
  std::optional<double> nu;
  PilotRegime regime = PilotRegime::automatic;
  /// Overrides the regime's cap choice when set.
  std::optional<bool> cap_weights;
  double weight_floor = 1e-10;
  /// Try lambda * 2^k, k = -4..4, and keep the minimizer of
  /// n log(mean training loss) + |active| log(n).
  bool lambda_grid = false;
  /// Center (with intercept) and scale the subset columns before fitting;
  /// coefficients are reported on the original scale.
  bool standardize = true;
  /// Use these weights instead of a pilot fit (length |M|).
  std::optional<Vector> fixed_weights;

  void validate() const;
};

/// sqrt(log(max(p, 2)) / n).
double default_lambda(Index p, Index n);

struct FitResult {
  ModelSubset subset;
  /// Coefficients on subset.columns(), original data scale.
  Vector beta;
  std::optional<double> intercept;
  /// Expectile index, 0.5 for least squares, quantile level for the median baseline.
  double tau = 0.5;
  FitMethod method = FitMethod::expectile;
  /// Final training objective: mean loss plus penalty for penalized fits.
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Ridge jitter was added because the subset design is singular.
  bool regularized = false;
  /// Sup-norm of n^{-1} sum_i loss'(r_i) z_i over all free parameters
  /// (unpenalized smooth fits only; 0 otherwise).
  double gradient_norm = 0.0;
  /// Penalized fits: lambda used and per-coefficient penalty lambda*omega_j
  /// expressed on the original scale (so the KKT conditions can be checked
  /// against the raw data).
  double lambda = 0.0;
  Vector adaptive_weights;
  Vector penalty;

  /// Positions k (into beta) with beta(k) != 0.
  std::vector<std::size_t> active_positions() const;
  /// Subset columns with nonzero coefficients.
  ModelSubset active_subset() const;
};

Vector predict(const FitResult& fit, const Matrix& x);

double mean_expectile_loss(const Vector& residuals, ExpectileIndex tau);
double mean_check_loss(const Vector& residuals, double level);
Vector residuals(const FitResult& fit, const Dataset& data);

/// Asymmetric least squares by iteratively reweighted least squares.
///
/// Each step solves the weighted least-squares problem with weights
/// h_tau(r_i)/2 at the current residuals; a step that would raise the
/// objective is halved, so the objective is non-increasing. Iteration stops
/// once the residual sign pattern settles (coefficient change below tol).
/// Non-convergence is reported via `converged`, not thrown.
FitResult fit_expectile(const Dataset& data, const ModelSubset& subset, ExpectileIndex tau,
                        const SolverOptions& opts = {});

FitResult fit_least_squares(const Dataset& data, const ModelSubset& subset,
                            const SolverOptions& opts = {});

/// Check-loss regression. A smoothed-check-loss MM/IRLS pass supplies the
/// start; simplex steps between basic solutions then reach the exact
/// minimizer. Singular designs keep the ridge-stabilized MM solution.
FitResult fit_quantile(const Dataset& data, const ModelSubset& subset, double level = 0.5,
                       const SolverOptions& opts = {});

/// n^{-1} sum rho_tau(r_i) + nu * |beta|_1 by exact cyclic coordinate descent.
FitResult fit_lasso_expectile(const Dataset& data, const ModelSubset& subset, ExpectileIndex tau,
                              const PenaltyConfig& penalty, const SolverOptions& opts = {});

/// omega_j = |beta_j|^{-gamma}, optionally capped; coefficients below `floor`
/// in magnitude get cap (when capped) or floor^{-gamma}.
Vector compute_adaptive_weights(const Vector& pilot_beta, double gamma, std::optional<double> cap,
                                double floor);
Vector compute_adaptive_weights(const FitResult& pilot, double gamma, std::optional<double> cap,
                                double floor);

/// n^{-1} sum rho_tau(r_i) + lambda sum_j omega_j |beta_j| by exact cyclic
/// coordinate descent, warm-started at the pilot fit.
FitResult fit_adaptive_lasso_expectile(const Dataset& data, const ModelSubset& subset,
                                       ExpectileIndex tau, const PenaltyConfig& penalty,
                                       const SolverOptions& opts = {});

/// Adaptive LASSO on the least-squares loss (rho_{0.5}).
FitResult fit_adaptive_lasso_least_squares(const Dataset& data, const ModelSubset& subset,
                                           const PenaltyConfig& penalty,
                                           const SolverOptions& opts = {});

/// Adaptive LASSO on the check loss, solved exactly as a check-loss problem
/// with two pseudo-observations per penalized coefficient.
FitResult fit_adaptive_lasso_quantile(const Dataset& data, const ModelSubset& subset,
                                      double level, const PenaltyConfig& penalty,
                                      const SolverOptions& opts = {});

/// Largest violation of the expectile-loss KKT conditions of a fit on `data`,
/// using fit.penalty (zero when empty) on the original scale. Free parameters
/// (intercept) must have zero gradient.
double expectile_kkt_violation(const Dataset& data, const FitResult& fit, ExpectileIndex tau);

/// Column centering/scaling used by the penalized fits.
struct ColumnScaling {
  Vector center;
  Vector scale;
};

/// Scale = population standard deviation when centering, root mean square
/// otherwise; degenerate columns keep scale 1.
ColumnScaling column_scaling(const Matrix& x, bool center);
Matrix apply_scaling(const Matrix& x, const ColumnScaling& s);

}  // namespace expsel
