#include "expsel/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coordinate_descent.hpp"
#include "expsel/error.hpp"
#include "linalg.hpp"

namespace expsel {

namespace {

using detail::design_matrix;

struct Design {
  Matrix z;
  double ridge = 0.0;
};

Design prepare_design(const Dataset& data, const ModelSubset& subset, const SolverOptions& opts) {
  Design d{design_matrix(data.x(), subset, opts.intercept), 0.0};
  if (!detail::has_full_column_rank(d.z)) {
    if (opts.strict_rank) {
      throw Error(ErrorKind::RankDeficient,
                  "design for subset {" + subset.label() + "} is rank deficient");
    }
    d.ridge = detail::ridge_jitter(d.z);
  }
  return d;
}

double sum_expectile_loss(const Vector& r, ExpectileIndex tau) {
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += expectile_loss(r(i), tau);
  return s;
}

double max_relative_change(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (Index j = 0; j < a.size(); ++j) {
    m = std::max(m, std::abs(a(j) - b(j)) / (1.0 + std::abs(b(j))));
  }
  return m;
}

struct CoreFit {
  Vector beta;
  int iterations = 0;
  bool converged = false;
};

// Damped IRLS on sum rho_tau(r) + ridge |b|^2 (the ridge term is the one
// added to the normal equations, so the full step is a Newton step on it).
CoreFit irls_expectile(const Matrix& z, const Vector& y, ExpectileIndex tau, double ridge,
                       const SolverOptions& opts) {
  auto objective = [&](const Vector& b) {
    return sum_expectile_loss(y - z * b, tau) + ridge * b.squaredNorm();
  };
  CoreFit out;
  out.beta = detail::least_squares(z, y, ridge);
  double obj = objective(out.beta);
  Vector w(z.rows());
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vector r = y - z * out.beta;
    for (Index i = 0; i < r.size(); ++i) w(i) = expectile_weight(r(i), tau) / 2.0;
    const Vector full = detail::weighted_least_squares(z, y, w, ridge);
    Vector cand = full;
    double cand_obj = objective(cand);
    double step = 1.0;
    for (int h = 0; h < 60 && cand_obj > obj * (1.0 + 1e-15); ++h) {
      step *= 0.5;
      cand = out.beta + step * (full - out.beta);
      cand_obj = objective(cand);
    }
    if (cand_obj > obj) {  // no decrease possible at working precision
      out.iterations = it;
      out.converged = true;
      break;
    }
    const double change = max_relative_change(cand, out.beta);
    out.beta = std::move(cand);
    obj = cand_obj;
    out.iterations = it;
    if (change < opts.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// MM for the smoothed check loss: |r| is majorized by r^2 / (2 max(|r0|, eps)),
// giving weighted least squares with weights a_i = 1/(4 max(|r0_i|, eps)) on a
// shifted response.
CoreFit irls_quantile(const Matrix& z, const Vector& y, double level, double ridge,
                      const SolverOptions& opts, double eps_min = 1e-8) {
  const double lin = level - 0.5;
  CoreFit out;
  out.beta = detail::least_squares(z, y, ridge);
  Vector a(z.rows());
  Vector shifted(z.rows());
  for (double eps = 1e-2; eps >= eps_min * (1.0 - 1e-9); eps *= 0.1) {
    out.converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
      const Vector r = y - z * out.beta;
      for (Index i = 0; i < r.size(); ++i) {
        a(i) = 1.0 / (4.0 * std::max(std::abs(r(i)), eps));
        shifted(i) = y(i) + lin / (2.0 * a(i));
      }
      Vector cand = detail::weighted_least_squares(z, shifted, a, ridge);
      const double change = max_relative_change(cand, out.beta);
      out.beta = std::move(cand);
      ++out.iterations;
      if (change < std::max(opts.tol, 1e-3 * eps)) {
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

// Rows of z, in order of increasing |r|, forming a nonsingular k x k block.
// Empty when z has no full-rank row subset.
std::vector<Index> initial_basis(const Matrix& z, const Vector& r) {
  const Index k = z.cols();
  std::vector<Index> order(static_cast<std::size_t>(z.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return std::abs(r(i)) < std::abs(r(j)); });
  std::vector<Index> basis;
  Matrix rows(0, k);
  const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
  for (Index i : order) {
    Matrix trial(rows.rows() + 1, k);
    trial.topRows(rows.rows()) = rows;
    trial.row(rows.rows()) = z.row(i);
    Eigen::FullPivLU<Matrix> lu(trial);
    lu.setThreshold(1e-10 * scale);
    if (lu.rank() == trial.rows()) {
      rows = std::move(trial);
      basis.push_back(i);
      if (static_cast<Index>(basis.size()) == k) return basis;
    }
  }
  return {};
}

// Exact minimizer of sum_i check(y_i - z_i b) by simplex steps between basic
// solutions (k rows fitted exactly). Each step frees one basic row in the
// steepest descending direction and moves to the minimum along that edge.
// Starts from the basis of the k smallest residuals at `beta`. Returns false
// (beta untouched) when no nonsingular basis exists.
bool vertex_descent(const Matrix& z, const Vector& y, double level, Vector& beta, int& iterations) {
  const Index n = z.rows();
  const Index k = z.cols();
  if (n < k || k == 0) return false;
  std::vector<Index> basis = initial_basis(z, y - z * beta);
  if (basis.empty()) return false;

  const int max_steps = 50 * static_cast<int>(n + k) + 1000;
  std::vector<char> in_basis(static_cast<std::size_t>(n), 0);
  Matrix zb(k, k);
  Vector yb(k);
  std::vector<std::pair<double, Index>> breaks;
  for (int step = 0; step < max_steps; ++step) {
    std::fill(in_basis.begin(), in_basis.end(), 0);
    for (Index q = 0; q < k; ++q) {
      const Index i = basis[static_cast<std::size_t>(q)];
      zb.row(q) = z.row(i);
      yb(q) = y(i);
      in_basis[static_cast<std::size_t>(i)] = 1;
    }
    Eigen::PartialPivLU<Matrix> lu(zb);
    const Matrix inv = lu.inverse();
    Vector b = inv * yb;
    const Vector r = y - z * b;
    // Column q of g: change of z_i b per unit move of basic row q's fit.
    const Matrix g = z * inv;
    const double rtol = 1e-12 * (1.0 + y.cwiseAbs().maxCoeff());

    double best = 0.0;
    Index best_q = -1;
    double best_sign = 0.0;
    for (Index q = 0; q < k; ++q) {
      for (double sign : {1.0, -1.0}) {
        double slope = 0.0;
        double size = 0.0;
        for (Index i = 0; i < n; ++i) {
          double gi;
          if (in_basis[static_cast<std::size_t>(i)]) {
            if (i != basis[static_cast<std::size_t>(q)]) continue;
            gi = sign;
          } else {
            gi = sign * g(i, q);
          }
          size += std::abs(gi);
          if (in_basis[static_cast<std::size_t>(i)] || std::abs(r(i)) <= rtol) {
            slope += level * std::max(-gi, 0.0) + (1.0 - level) * std::max(gi, 0.0);
          } else if (r(i) > 0.0) {
            slope -= level * gi;
          } else {
            slope += (1.0 - level) * gi;
          }
        }
        if (slope < best && slope < -1e-12 * size) {
          best = slope;
          best_q = q;
          best_sign = sign;
        }
      }
    }
    if (best_q < 0) {
      beta = std::move(b);
      iterations += step;
      return true;
    }

    // Line search: the objective along the edge is convex piecewise linear
    // with kinks where nonbasic residuals cross zero.
    breaks.clear();
    for (Index i = 0; i < n; ++i) {
      if (in_basis[static_cast<std::size_t>(i)] || std::abs(r(i)) <= rtol) continue;
      const double gi = best_sign * g(i, best_q);
      if (gi == 0.0) continue;
      const double t = r(i) / gi;
      if (t > 0.0) breaks.emplace_back(t, i);
    }
    std::sort(breaks.begin(), breaks.end());
    double slope = best;
    Index enter = -1;
    for (const auto& [t, i] : breaks) {
      slope += std::abs(g(i, best_q));
      if (slope >= 0.0) {
        enter = i;
        break;
      }
    }
    if (enter < 0) {  // unbounded direction; cannot happen for 0 < level < 1
      beta = std::move(b);
      iterations += step;
      return false;
    }
    basis[static_cast<std::size_t>(best_q)] = enter;
  }
  iterations += max_steps;
  return false;
}

// Check-loss regression: smoothed MM for a starting point, then exact
// vertex descent. Singular designs keep the ridge-stabilized MM solution.
CoreFit solve_quantile(const Matrix& z, const Vector& y, double level, double ridge,
                       const SolverOptions& opts) {
  if (ridge > 0.0) return irls_quantile(z, y, level, ridge, opts);
  CoreFit out = irls_quantile(z, y, level, ridge, opts, 1e-4);
  out.converged = vertex_descent(z, y, level, out.beta, out.iterations);
  return out;
}

double expectile_gradient_norm(const Matrix& z, const Vector& r, ExpectileIndex tau) {
  Vector g(r.size());
  for (Index i = 0; i < r.size(); ++i) g(i) = expectile_score(r(i), tau);
  return (z.transpose() * g).cwiseAbs().maxCoeff() / static_cast<double>(r.size());
}

FitResult make_result(const ModelSubset& subset, const Vector& coef, bool intercept) {
  FitResult f;
  f.subset = subset;
  const Index off = intercept ? 1 : 0;
  if (intercept) f.intercept = coef(0);
  f.beta = coef.tail(coef.size() - off);
  return f;
}

enum class LossKind { expectile, quantile };

CoreFit mm_quantile_penalized(const Matrix& z, const Vector& y, double level, const Vector& pen,
                              Vector beta, const SolverOptions& opts) {
  const double lin = level - 0.5;
  detail::CdOptions cdo{opts.tol, opts.max_sweeps};
  CoreFit out;
  Vector a(z.rows());
  for (double eps = 1e-2; eps >= 1e-8 * (1.0 - 1e-9); eps *= 0.1) {
    out.converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
      const Vector r = y - z * beta;
      for (Index i = 0; i < r.size(); ++i) a(i) = 1.0 / (4.0 * std::max(std::abs(r(i)), eps));
      auto cd = detail::coordinate_descent(z, y, detail::QuadraticSurrogateLoss{&a, lin}, pen,
                                           beta, cdo);
      const double change = max_relative_change(cd.beta, beta);
      beta = std::move(cd.beta);
      out.iterations += cd.sweeps;
      if (change < std::max(opts.tol, 1e-3 * eps)) {
        out.converged = true;
        break;
      }
    }
  }
  out.beta = std::move(beta);
  return out;
}

// n^{-1} sum check(r_i) + sum_j pen_j |b_j| is, up to the factor n, an
// unpenalized check-loss problem with two extra rows (+-n pen_j e_j, response
// 0) per penalized coefficient, since check(x) + check(-x) = |x|.
CoreFit quantile_penalized(const Matrix& z, const Vector& y, double level, const Vector& pen,
                           Vector beta, const SolverOptions& opts) {
  const Index n = z.rows();
  const Index k = z.cols();
  Index extra = 0;
  for (Index j = 0; j < k; ++j) extra += pen(j) > 0.0 ? 2 : 0;
  Matrix za = Matrix::Zero(n + extra, k);
  Vector ya = Vector::Zero(n + extra);
  za.topRows(n) = z;
  ya.head(n) = y;
  Index row = n;
  for (Index j = 0; j < k; ++j) {
    if (pen(j) <= 0.0) continue;
    const double c = static_cast<double>(n) * pen(j);
    za(row++, j) = c;
    za(row++, j) = -c;
  }
  CoreFit out;
  Vector start = beta;
  if (vertex_descent(za, ya, level, start, out.iterations)) {
    out.beta = std::move(start);
    out.converged = true;
    return out;
  }
  return mm_quantile_penalized(z, y, level, pen, std::move(beta), opts);
}

CoreFit run_penalized(const Matrix& z, const Vector& y, LossKind kind, double tau_or_level,
                      const Vector& pen, Vector start, const SolverOptions& opts) {
  if (kind == LossKind::quantile) {
    return quantile_penalized(z, y, tau_or_level, pen, std::move(start), opts);
  }
  auto cd = detail::coordinate_descent(z, y, detail::ExpectileCdLoss{ExpectileIndex(tau_or_level)},
                                       pen, std::move(start), {opts.tol, opts.max_sweeps});
  return {std::move(cd.beta), cd.sweeps, cd.converged};
}

double mean_training_loss(LossKind kind, double tau_or_level, const Vector& r) {
  return kind == LossKind::quantile ? mean_check_loss(r, tau_or_level)
                                    : mean_expectile_loss(r, ExpectileIndex(tau_or_level));
}

FitResult penalized_fit(const Dataset& data, const ModelSubset& subset, LossKind kind,
                        double tau_or_level, const PenaltyConfig& cfg, const SolverOptions& opts,
                        bool adaptive, FitMethod method) {
  cfg.validate();
  const Index n = data.n();
  const Index m = static_cast<Index>(subset.size());
  const Index off = opts.intercept ? 1 : 0;
  if (m + off == 0) {
    throw Error(ErrorKind::InvalidArgument, "empty model without intercept has no parameters");
  }

  Matrix xm(n, m);
  for (Index c = 0; c < m; ++c) {
    xm.col(c) = data.x().col(static_cast<Index>(subset.columns()[static_cast<std::size_t>(c)]));
  }
  ColumnScaling sc{Vector::Zero(m), Vector::Ones(m)};
  if (cfg.standardize) sc = column_scaling(xm, opts.intercept);
  Matrix z(n, m + off);
  if (off) z.col(0).setOnes();
  z.rightCols(m) = apply_scaling(xm, sc);
  const Vector& y = data.y();

  double ridge = 0.0;
  if (!detail::has_full_column_rank(z)) {
    if (opts.strict_rank) {
      throw Error(ErrorKind::RankDeficient,
                  "design for subset {" + subset.label() + "} is rank deficient");
    }
    ridge = detail::ridge_jitter(z);
  }

  const double lambda = cfg.lambda.value_or(default_lambda(data.p(), n));
  const double nu = cfg.nu.value_or(lambda);

  Vector weights = Vector::Ones(m);
  Vector start = Vector::Zero(m + off);
  double base = nu;
  if (adaptive) {
    base = lambda;
    const bool growing =
        cfg.regime == PilotRegime::growing_p ||
        (cfg.regime == PilotRegime::automatic &&
         static_cast<double>(m) >= std::sqrt(static_cast<double>(n)));
    const bool capped = cfg.cap_weights.value_or(growing);
    const std::optional<double> cap =
        capped ? std::optional<double>(std::sqrt(static_cast<double>(n))) : std::nullopt;

    Vector pilot;
    if (growing && !cfg.fixed_weights) {
      Vector pv = Vector::Constant(m + off, nu);
      pv.head(off).setZero();
      pilot = run_penalized(z, y, kind, tau_or_level, pv, Vector::Zero(m + off), opts).beta;
    } else if (kind == LossKind::quantile) {
      pilot = solve_quantile(z, y, tau_or_level, ridge, opts).beta;
    } else {
      pilot = irls_expectile(z, y, ExpectileIndex(tau_or_level), ridge, opts).beta;
    }
    if (cfg.fixed_weights) {
      if (cfg.fixed_weights->size() != m) {
        throw Error(ErrorKind::ShapeMismatch, "fixed adaptive weights must have length |M|");
      }
      weights = *cfg.fixed_weights;
    } else {
      weights = compute_adaptive_weights(Vector(pilot.tail(m)), cfg.gamma, cap, cfg.weight_floor);
    }
    start = pilot;
  }

  auto penalty_for = [&](double lam) {
    Vector pv(m + off);
    pv.head(off).setZero();
    pv.tail(m) = lam * weights;
    return pv;
  };

  double chosen_lambda = base;
  CoreFit core;
  if (cfg.lambda_grid) {
    double best = std::numeric_limits<double>::infinity();
    Vector warm = start;
    for (int k = -4; k <= 4; ++k) {
      const double lam = base * std::ldexp(1.0, k);
      CoreFit cand = run_penalized(z, y, kind, tau_or_level, penalty_for(lam), warm, opts);
      warm = cand.beta;
      const Vector r = y - z * cand.beta;
      const double loss = std::max(mean_training_loss(kind, tau_or_level, r),
                                   std::numeric_limits<double>::min());
      Index active = 0;
      for (Index j = off; j < cand.beta.size(); ++j) active += cand.beta(j) != 0.0;
      const double crit = static_cast<double>(n) * std::log(loss) +
                          static_cast<double>(active) * std::log(static_cast<double>(n));
      if (crit < best) {
        best = crit;
        chosen_lambda = lam;
        core = std::move(cand);
      }
    }
  } else {
    core = run_penalized(z, y, kind, tau_or_level, penalty_for(base), start, opts);
  }

  FitResult f = make_result(subset, core.beta, opts.intercept);
  f.beta = f.beta.cwiseQuotient(sc.scale);
  if (f.intercept) *f.intercept -= f.beta.dot(sc.center);
  f.method = method;
  f.tau = tau_or_level;
  f.iterations = core.iterations;
  f.converged = core.converged;
  f.regularized = ridge > 0.0;
  f.lambda = chosen_lambda;
  f.adaptive_weights = weights;
  f.penalty = chosen_lambda * weights.cwiseProduct(sc.scale);
  const Vector r = residuals(f, data);
  f.objective = mean_training_loss(kind, tau_or_level, r) + f.penalty.dot(f.beta.cwiseAbs());
  return f;
}

}  // namespace

std::string_view to_string(FitMethod m) {
  switch (m) {
    case FitMethod::expectile: return "expectile";
    case FitMethod::lasso_expectile: return "lasso_expectile";
    case FitMethod::adaptive_lasso_expectile: return "adaptive_lasso_expectile";
    case FitMethod::least_squares: return "least_squares";
    case FitMethod::adaptive_lasso_least_squares: return "adaptive_lasso_least_squares";
    case FitMethod::quantile: return "quantile";
    case FitMethod::adaptive_lasso_quantile: return "adaptive_lasso_quantile";
  }
  return "unknown";
}

FitMethod fit_method_from_string(std::string_view s) {
  for (auto m : {FitMethod::expectile, FitMethod::lasso_expectile,
                 FitMethod::adaptive_lasso_expectile, FitMethod::least_squares,
                 FitMethod::adaptive_lasso_least_squares, FitMethod::quantile,
                 FitMethod::adaptive_lasso_quantile}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown fit method '" + std::string(s) + "'");
}

void PenaltyConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "gamma must lie in (0, 1]");
  }
  if (lambda && !(*lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
  if (nu && !(*nu >= 0.0)) throw Error(ErrorKind::InvalidArgument, "nu must be >= 0");
  if (!(weight_floor > 0.0)) throw Error(ErrorKind::InvalidArgument, "weight floor must be > 0");
}

double default_lambda(Index p, Index n) {
  return std::sqrt(std::log(static_cast<double>(std::max<Index>(p, 2))) / static_cast<double>(n));
}

std::vector<std::size_t> FitResult::active_positions() const {
  std::vector<std::size_t> out;
  for (Index k = 0; k < beta.size(); ++k) {
    if (beta(k) != 0.0) out.push_back(static_cast<std::size_t>(k));
  }
  return out;
}

ModelSubset FitResult::active_subset() const {
  std::vector<std::size_t> cols;
  for (auto k : active_positions()) cols.push_back(subset.columns()[k]);
  return ModelSubset(std::move(cols), subset.ambient_dim());
}

Vector predict(const FitResult& fit, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != fit.subset.ambient_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "prediction design width does not match the fit");
  }
  Vector yhat = Vector::Constant(x.rows(), fit.intercept.value_or(0.0));
  const auto& cols = fit.subset.columns();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    yhat += fit.beta(static_cast<Index>(k)) * x.col(static_cast<Index>(cols[k]));
  }
  return yhat;
}

Vector residuals(const FitResult& fit, const Dataset& data) {
  return data.y() - predict(fit, data.x());
}

double mean_expectile_loss(const Vector& r, ExpectileIndex tau) {
  return sum_expectile_loss(r, tau) / static_cast<double>(r.size());
}

double mean_check_loss(const Vector& r, double level) {
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += check_loss(r(i), level);
  return s / static_cast<double>(r.size());
}

FitResult fit_expectile(const Dataset& data, const ModelSubset& subset, ExpectileIndex tau,
                        const SolverOptions& opts) {
  const Design d = prepare_design(data, subset, opts);
  CoreFit core = irls_expectile(d.z, data.y(), tau, d.ridge, opts);
  FitResult f = make_result(subset, core.beta, opts.intercept);
  f.tau = tau.value();
  f.method = FitMethod::expectile;
  f.iterations = core.iterations;
  f.converged = core.converged;
  f.regularized = d.ridge > 0.0;
  const Vector r = data.y() - d.z * core.beta;
  f.objective = mean_expectile_loss(r, tau);
  f.gradient_norm = expectile_gradient_norm(d.z, r, tau);
  return f;
}

FitResult fit_least_squares(const Dataset& data, const ModelSubset& subset,
                            const SolverOptions& opts) {
  const Design d = prepare_design(data, subset, opts);
  const Vector coef = detail::least_squares(d.z, data.y(), d.ridge);
  FitResult f = make_result(subset, coef, opts.intercept);
  f.tau = 0.5;
  f.method = FitMethod::least_squares;
  f.iterations = 1;
  f.converged = true;
  f.regularized = d.ridge > 0.0;
  const Vector r = data.y() - d.z * coef;
  f.objective = mean_expectile_loss(r, ExpectileIndex(0.5));
  f.gradient_norm = expectile_gradient_norm(d.z, r, ExpectileIndex(0.5));
  return f;
}

FitResult fit_quantile(const Dataset& data, const ModelSubset& subset, double level,
                       const SolverOptions& opts) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "quantile level must lie in (0, 1)");
  }
  const Design d = prepare_design(data, subset, opts);
  CoreFit core = solve_quantile(d.z, data.y(), level, d.ridge, opts);
  FitResult f = make_result(subset, core.beta, opts.intercept);
  f.tau = level;
  f.method = FitMethod::quantile;
  f.iterations = core.iterations;
  f.converged = core.converged;
  f.regularized = d.ridge > 0.0;
  f.objective = mean_check_loss(data.y() - d.z * core.beta, level);
  return f;
}

FitResult fit_lasso_expectile(const Dataset& data, const ModelSubset& subset, ExpectileIndex tau,
                              const PenaltyConfig& penalty, const SolverOptions& opts) {
  return penalized_fit(data, subset, LossKind::expectile, tau.value(), penalty, opts, false,
                       FitMethod::lasso_expectile);
}

Vector compute_adaptive_weights(const Vector& pilot_beta, double gamma, std::optional<double> cap,
                                double floor) {
  Vector w(pilot_beta.size());
  for (Index j = 0; j < w.size(); ++j) {
    const double b = std::abs(pilot_beta(j));
    if (b < floor) {
      w(j) = cap ? *cap : std::pow(floor, -gamma);
    } else {
      w(j) = std::pow(b, -gamma);
      if (cap) w(j) = std::min(w(j), *cap);
    }
  }
  return w;
}

Vector compute_adaptive_weights(const FitResult& pilot, double gamma, std::optional<double> cap,
                                double floor) {
  return compute_adaptive_weights(pilot.beta, gamma, cap, floor);
}

FitResult fit_adaptive_lasso_expectile(const Dataset& data, const ModelSubset& subset,
                                       ExpectileIndex tau, const PenaltyConfig& penalty,
                                       const SolverOptions& opts) {
  return penalized_fit(data, subset, LossKind::expectile, tau.value(), penalty, opts, true,
                       FitMethod::adaptive_lasso_expectile);
}

FitResult fit_adaptive_lasso_least_squares(const Dataset& data, const ModelSubset& subset,
                                           const PenaltyConfig& penalty,
                                           const SolverOptions& opts) {
  return penalized_fit(data, subset, LossKind::expectile, 0.5, penalty, opts, true,
                       FitMethod::adaptive_lasso_least_squares);
}

FitResult fit_adaptive_lasso_quantile(const Dataset& data, const ModelSubset& subset,
                                      double level, const PenaltyConfig& penalty,
                                      const SolverOptions& opts) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "quantile level must lie in (0, 1)");
  }
  return penalized_fit(data, subset, LossKind::quantile, level, penalty, opts, true,
                       FitMethod::adaptive_lasso_quantile);
}

double expectile_kkt_violation(const Dataset& data, const FitResult& fit, ExpectileIndex tau) {
  const Vector r = residuals(fit, data);
  Vector g(r.size());
  for (Index i = 0; i < r.size(); ++i) g(i) = expectile_score(r(i), tau);
  const double inv_n = 1.0 / static_cast<double>(r.size());
  double worst = 0.0;
  if (fit.intercept) worst = std::abs(g.sum() * inv_n);
  const auto& cols = fit.subset.columns();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Index kk = static_cast<Index>(k);
    // d/d beta_k of the mean loss is -n^{-1} sum g(r_i) x_ik.
    const double grad = -data.x().col(static_cast<Index>(cols[k])).dot(g) * inv_n;
    const double pen = fit.penalty.size() ? fit.penalty(kk) : 0.0;
    const double b = fit.beta(kk);
    const double v = b != 0.0 ? std::abs(grad + pen * (b > 0 ? 1.0 : -1.0))
                              : std::max(0.0, std::abs(grad) - pen);
    worst = std::max(worst, v);
  }
  return worst;
}

ColumnScaling column_scaling(const Matrix& x, bool center) {
  ColumnScaling s{Vector::Zero(x.cols()), Vector::Ones(x.cols())};
  const double n = static_cast<double>(x.rows());
  for (Index j = 0; j < x.cols(); ++j) {
    if (center) s.center(j) = x.col(j).mean();
    const double ms = (x.col(j).array() - s.center(j)).square().sum() / n;
    if (ms > 0.0 && std::isfinite(ms)) s.scale(j) = std::sqrt(ms);
  }
  return s;
}

Matrix apply_scaling(const Matrix& x, const ColumnScaling& s) {
  return (x.rowwise() - s.center.transpose()).array().rowwise() / s.scale.transpose().array();
}

}  // namespace expsel
