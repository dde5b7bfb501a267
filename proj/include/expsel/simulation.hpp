#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expsel/dataset.hpp"
#include "expsel/noise.hpp"
#include "expsel/selection.hpp"

namespace expsel {

enum class CovariateLaw {
  normal,   // N(0, 1)
  uniform,  // U(-sqrt(3), sqrt(3)), unit variance
};

std::string_view to_string(CovariateLaw c);
CovariateLaw covariate_law_from_string(std::string_view s);

struct SimConfig {
  std::size_t n = 500;
  /// Length defines p.
  Vector beta_star;
  ErrorDistribution error = ErrorDistribution::std_normal;
  /// Validation fraction.
  double s = 0.9;
  /// Expectile index for fitting; true_tau_of(error) when unset.
  std::optional<double> tau;
  std::vector<SelectionMethod> methods{SelectionMethod::expectile};
  /// aCVS with adaptive-LASSO fits instead of CVS.
  bool penalized = false;
  std::size_t replications = 200;
  std::uint64_t master_seed = 1;
  CovariateLaw covariates = CovariateLaw::normal;
  /// When false, y = X beta* exactly.
  bool noise = true;
  /// Enumeration, solver, penalty and tie settings; the solver intercept is
  /// off by default because the generating model has none.
  SelectionConfig selection = default_selection();
  unsigned threads = 1;

  std::size_t p() const noexcept { return static_cast<std::size_t>(beta_star.size()); }
  double resolved_tau() const;
  void validate() const;

  static SelectionConfig default_selection();
};

struct Instance {
  Dataset data;
  ModelSubset true_support;
  std::uint64_t seed = 0;
};

/// Replication `rep` of the design; deterministic in (master_seed, rep).
/// Draw order: X row by row, then the errors.
Instance generate_instance(const SimConfig& config, std::size_t rep);

struct Metrics {
  /// Mean squared prediction error on the validation rows.
  double mse = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  /// |beta_hat - beta*|^2 / p, with zeros outside the selected model.
  double coef_mse = 0.0;
};

/// mse, tpr, tnr for a selected model; coef_mse is left at 0.
Metrics compute_metrics(const ModelSubset& chosen, const ModelSubset& true_support, std::size_t p,
                        const Vector& yhat, const Vector& yval);

double coefficient_mse(const Vector& beta_hat, const Vector& beta_star);

struct ReplicationRecord {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  SelectionMethod method = SelectionMethod::expectile;
  /// Selected subset; for aCVS its nonzero coefficients only.
  ModelSubset selected;
  Metrics metrics;
};

struct ReplicationFailure {
  std::size_t rep = 0;
  SelectionMethod method = SelectionMethod::expectile;
  std::string reason;
};

struct MethodSummary {
  SelectionMethod method = SelectionMethod::expectile;
  /// Arithmetic means over successful replications.
  Metrics mean;
  std::size_t used = 0;
  std::size_t failed = 0;
};

struct ReplicationSummary {
  std::string label;
  std::size_t n = 0;
  std::size_t p = 0;
  double s = 0.0;
  double tau = 0.5;
  ErrorDistribution error = ErrorDistribution::std_normal;
  Criterion criterion = Criterion::cvs;
  std::uint64_t master_seed = 0;
  std::size_t replications = 0;
  std::vector<MethodSummary> methods;
  /// Ordered by replication, then by method order of the config.
  std::vector<ReplicationRecord> records;
  std::vector<ReplicationFailure> failures;

  const MethodSummary& summary(SelectionMethod m) const;
};

/// Runs every replication and method, then averages the metrics. Throws
/// AllReplicationsFailed when some method has no successful replication.
ReplicationSummary run_experiment(const SimConfig& config, std::string label = {});

struct Preset {
  std::string name;
  std::string description;
  SimConfig config;
};

/// Named designs: table1-p2, table1-p4, table1-p7, table5, and
/// table2-n<N>-s<S> / table3-n<N>-s<S> for N in {100, 500, 1000}, S in {0.8, 0.9}.
const std::vector<Preset>& presets();
const Preset& find_preset(std::string_view name);

}  // namespace expsel
