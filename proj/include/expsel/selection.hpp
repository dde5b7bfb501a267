#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expsel/dataset.hpp"
#include "expsel/estimators.hpp"

namespace expsel {

/// Random partition of rows 0..n-1 into a training set and a validation set.
struct CvSplit {
  std::vector<std::size_t> train;       // sorted
  std::vector<std::size_t> validation;  // sorted
  std::uint64_t seed = 0;
  /// Set when the validation set does not outnumber the training set.
  bool dominance_warning = false;

  std::size_t n_train() const noexcept { return train.size(); }
  std::size_t n_validation() const noexcept { return validation.size(); }
};

/// round(s * n), halves rounded up.
std::size_t validation_size(std::size_t n, double s);

/// Uniform random split with |V| = validation_size(n, s); deterministic in seed.
/// Throws DegenerateSplit if either side would be empty.
CvSplit make_split(std::size_t n, double s, std::uint64_t seed);

struct EnumConfig {
  std::size_t max_exhaustive_p = 20;
  /// Admit the empty model (meaningful only with an intercept).
  bool include_empty = false;
  /// 0-based columns present in / absent from every candidate.
  std::vector<std::size_t> force_in;
  std::vector<std::size_t> force_out;
  /// Explicit candidate list; bypasses the exhaustive cap.
  std::optional<std::vector<ModelSubset>> candidates;
};

/// Candidate subsets in size-then-lexicographic order.
std::vector<ModelSubset> enumerate_subsets(std::size_t p, const EnumConfig& config);

enum class SelectionMethod { expectile, least_squares, quantile };
enum class Criterion { cvs, acvs };

std::string_view to_string(SelectionMethod m);
SelectionMethod selection_method_from_string(std::string_view s);
std::string_view to_string(Criterion c);
Criterion criterion_from_string(std::string_view s);

struct SelectionConfig {
  EnumConfig enumeration;
  SolverOptions solver;
  /// Adaptive-LASSO settings for select_model_penalized.
  PenaltyConfig penalty;
  double quantile_level = 0.5;
  /// Score every method with rho_tau instead of its own loss.
  bool score_with_tau = false;
  /// Scores within tie_rtol * |min| + tie_atol_scale * (null-model score) of
  /// the minimum are ties; the smallest subset among them wins.
  double tie_rtol = 1e-8;
  double tie_atol_scale = 1e-12;
  unsigned threads = 1;
};

struct SubsetScore {
  ModelSubset subset;
  double score = 0.0;
  FitResult fit;
};

struct SkippedSubset {
  ModelSubset subset;
  std::string reason;
};

struct SelectionReport {
  Criterion criterion = Criterion::cvs;
  SelectionMethod method = SelectionMethod::expectile;
  /// Expectile index used for fitting/scoring (quantile level for quantile).
  double tau = 0.5;
  CvSplit split;
  std::size_t p = 0;
  std::vector<std::string> column_names;
  /// One entry per successfully fitted subset, in enumeration order.
  std::vector<SubsetScore> scores;
  std::vector<SkippedSubset> skipped;
  ModelSubset chosen;
  std::vector<ModelSubset> ties;

  const SubsetScore* find(const ModelSubset& subset) const;
  const SubsetScore& chosen_entry() const;
};

/// Mean expectile loss of the validation residuals of `fit`.
double cvs(const Dataset& data, const CvSplit& split, const ModelSubset& subset,
           ExpectileIndex tau, const FitResult& fit);

/// Fit every candidate on the training rows, score on the validation rows,
/// return the tie-broken argmin. Failed fits are recorded as skips.
SelectionReport select_model(const Dataset& data, const CvSplit& split, ExpectileIndex tau,
                             SelectionMethod method, const SelectionConfig& config);

/// Same flow with adaptive-LASSO fits (aCVS).
SelectionReport select_model_penalized(const Dataset& data, const CvSplit& split,
                                       ExpectileIndex tau, SelectionMethod method,
                                       const SelectionConfig& config);

struct SelectedCoefficients {
  Vector beta;  // length p, zeros outside the chosen subset
  std::optional<double> intercept;
};

SelectedCoefficients selected_coefficients(const SelectionReport& report);

}  // namespace expsel
