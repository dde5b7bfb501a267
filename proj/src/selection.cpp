#include "expsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "expsel/error.hpp"
#include "expsel/rng.hpp"
#include "parallel.hpp"

namespace expsel {

namespace {

// Per-observation validation loss for a method under the config's scoring rule.
struct ScoreLoss {
  enum class Kind { expectile, check } kind;
  double param;

  double operator()(double r) const {
    return kind == Kind::check ? check_loss(r, param) : expectile_loss(r, ExpectileIndex(param));
  }
};

ScoreLoss score_loss_for(SelectionMethod method, ExpectileIndex tau, const SelectionConfig& cfg) {
  if (cfg.score_with_tau) return {ScoreLoss::Kind::expectile, tau.value()};
  switch (method) {
    case SelectionMethod::expectile: return {ScoreLoss::Kind::expectile, tau.value()};
    case SelectionMethod::least_squares: return {ScoreLoss::Kind::expectile, 0.5};
    case SelectionMethod::quantile: return {ScoreLoss::Kind::check, cfg.quantile_level};
  }
  return {ScoreLoss::Kind::expectile, tau.value()};
}

double mean_score(const Vector& r, const ScoreLoss& loss) {
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += loss(r(i));
  return s / static_cast<double>(r.size());
}

FitResult fit_for(const Dataset& train, const ModelSubset& subset, ExpectileIndex tau,
                  SelectionMethod method, const SelectionConfig& cfg, bool penalized) {
  if (penalized) {
    switch (method) {
      case SelectionMethod::expectile:
        return fit_adaptive_lasso_expectile(train, subset, tau, cfg.penalty, cfg.solver);
      case SelectionMethod::least_squares:
        return fit_adaptive_lasso_least_squares(train, subset, cfg.penalty, cfg.solver);
      case SelectionMethod::quantile:
        return fit_adaptive_lasso_quantile(train, subset, cfg.quantile_level, cfg.penalty,
                                           cfg.solver);
    }
  }
  switch (method) {
    case SelectionMethod::expectile: return fit_expectile(train, subset, tau, cfg.solver);
    case SelectionMethod::least_squares: return fit_least_squares(train, subset, cfg.solver);
    case SelectionMethod::quantile:
      return fit_quantile(train, subset, cfg.quantile_level, cfg.solver);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown selection method");
}

void validate_split(const CvSplit& split, std::size_t n) {
  if (split.train.empty() || split.validation.empty()) {
    throw Error(ErrorKind::DegenerateSplit, "training and validation sets must be nonempty");
  }
  if (split.train.size() + split.validation.size() != n) {
    throw Error(ErrorKind::ShapeMismatch, "split does not cover the dataset rows");
  }
}

SelectionReport run_selection(const Dataset& data, const CvSplit& split, ExpectileIndex tau,
                              SelectionMethod method, const SelectionConfig& cfg,
                              bool penalized) {
  validate_split(split, static_cast<std::size_t>(data.n()));
  const Dataset train = data.rows(split.train);
  const Dataset valid = data.rows(split.validation);
  const auto p = static_cast<std::size_t>(data.p());

  EnumConfig ec = cfg.enumeration;
  if (!cfg.solver.intercept) ec.include_empty = false;
  const std::vector<ModelSubset> candidates = enumerate_subsets(p, ec);
  const ScoreLoss loss = score_loss_for(method, tau, cfg);

  std::vector<std::optional<SubsetScore>> slots(candidates.size());
  std::vector<std::string> errors(candidates.size());
  detail::parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
    try {
      FitResult fit = fit_for(train, candidates[i], tau, method, cfg, penalized);
      const double score = mean_score(residuals(fit, valid), loss);
      if (!std::isfinite(score)) {
        errors[i] = "non-finite validation score";
        return;
      }
      slots[i] = SubsetScore{candidates[i], score, std::move(fit)};
    } catch (const Error& e) {
      errors[i] = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });

  SelectionReport report;
  report.criterion = penalized ? Criterion::acvs : Criterion::cvs;
  report.method = method;
  report.tau = tau.value();
  report.split = split;
  report.p = p;
  report.column_names = data.column_names();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (slots[i]) {
      report.scores.push_back(std::move(*slots[i]));
    } else {
      report.skipped.push_back({candidates[i], errors[i]});
    }
  }
  if (report.scores.empty()) {
    throw Error(ErrorKind::AllSubsetsFailed, "every candidate subset failed to fit");
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : report.scores) best = std::min(best, s.score);
  const double null_score = mean_score(valid.y(), loss);
  const double slack = cfg.tie_rtol * std::abs(best) + cfg.tie_atol_scale * null_score;
  for (const auto& s : report.scores) {
    if (s.score <= best + slack) report.ties.push_back(s.subset);
  }
  std::sort(report.ties.begin(), report.ties.end());
  report.chosen = report.ties.front();
  return report;
}

}  // namespace

std::size_t validation_size(std::size_t n, double s) {
  return static_cast<std::size_t>(std::floor(s * static_cast<double>(n) + 0.5));
}

CvSplit make_split(std::size_t n, double s, std::uint64_t seed) {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorKind::DegenerateSplit, "validation fraction must lie in (0, 1)");
  }
  const std::size_t nv = validation_size(n, s);
  if (n < 2 || nv == 0 || nv >= n) {
    throw Error(ErrorKind::DegenerateSplit, "split of n = " + std::to_string(n) + " at s = " +
                                                std::to_string(s) + " leaves an empty side");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Engine eng = make_engine(seed);
  std::shuffle(perm.begin(), perm.end(), eng);

  CvSplit split;
  split.seed = seed;
  split.validation.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(nv));
  split.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(nv), perm.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.train.begin(), split.train.end());
  split.dominance_warning = split.n_validation() <= split.n_train();
  return split;
}

std::vector<ModelSubset> enumerate_subsets(std::size_t p, const EnumConfig& config) {
  if (p < 1) throw Error(ErrorKind::InvalidArgument, "p must be at least 1");
  const std::set<std::size_t> in(config.force_in.begin(), config.force_in.end());
  const std::set<std::size_t> out(config.force_out.begin(), config.force_out.end());
  for (auto j : in) {
    if (j >= p) throw Error(ErrorKind::InvalidArgument, "forced-in column out of range");
    if (out.count(j)) throw Error(ErrorKind::InvalidArgument, "column both forced in and out");
  }
  for (auto j : out) {
    if (j >= p) throw Error(ErrorKind::InvalidArgument, "forced-out column out of range");
  }

  auto admissible = [&](const ModelSubset& m) {
    if (m.empty() && !config.include_empty) return false;
    for (auto j : in) {
      if (!m.contains(j)) return false;
    }
    for (auto j : out) {
      if (m.contains(j)) return false;
    }
    return true;
  };

  std::vector<ModelSubset> result;
  if (config.candidates) {
    for (const auto& m : *config.candidates) {
      if (m.ambient_dim() != p) {
        throw Error(ErrorKind::ShapeMismatch, "candidate subset dimension does not match p");
      }
      if (admissible(m)) result.push_back(m);
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
  }

  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < p; ++j) {
    if (!in.count(j) && !out.count(j)) free.push_back(j);
  }
  const bool masked = !in.empty() || !out.empty();
  const std::size_t effective = masked ? free.size() : p;
  if (effective > config.max_exhaustive_p) {
    throw Error(ErrorKind::TooManySubsets,
                "exhaustive enumeration over " + std::to_string(effective) +
                    " columns exceeds the cap of " + std::to_string(config.max_exhaustive_p) +
                    "; supply a candidate list or masks");
  }

  const std::size_t f = free.size();
  for (std::size_t k = 0; k <= f; ++k) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
      std::vector<std::size_t> cols(in.begin(), in.end());
      for (auto q : idx) cols.push_back(free[q]);
      ModelSubset m(std::move(cols), p);
      if (admissible(m)) result.push_back(std::move(m));
      // next k-combination of {0..f-1} in lexicographic order
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == f - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t q = pos; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::string_view to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::expectile: return "expectile";
    case SelectionMethod::least_squares: return "ls";
    case SelectionMethod::quantile: return "quantile";
  }
  return "unknown";
}

SelectionMethod selection_method_from_string(std::string_view s) {
  if (s == "expectile") return SelectionMethod::expectile;
  if (s == "ls" || s == "least_squares") return SelectionMethod::least_squares;
  if (s == "quantile" || s == "median") return SelectionMethod::quantile;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(s) + "'");
}

std::string_view to_string(Criterion c) { return c == Criterion::cvs ? "cvs" : "acvs"; }

Criterion criterion_from_string(std::string_view s) {
  if (s == "cvs") return Criterion::cvs;
  if (s == "acvs") return Criterion::acvs;
  throw Error(ErrorKind::InvalidArgument, "unknown criterion '" + std::string(s) + "'");
}

const SubsetScore* SelectionReport::find(const ModelSubset& subset) const {
  for (const auto& s : scores) {
    if (s.subset == subset) return &s;
  }
  return nullptr;
}

const SubsetScore& SelectionReport::chosen_entry() const {
  const SubsetScore* s = find(chosen);
  if (!s) throw Error(ErrorKind::InvalidArgument, "chosen subset has no recorded fit");
  return *s;
}

double cvs(const Dataset& data, const CvSplit& split, const ModelSubset& subset,
           ExpectileIndex tau, const FitResult& fit) {
  if (!(fit.subset == subset) || fit.beta.size() != static_cast<Index>(subset.size())) {
    throw Error(ErrorKind::ShapeMismatch, "fit does not belong to subset {" + subset.label() + "}");
  }
  const Dataset valid = data.rows(split.validation);
  return mean_expectile_loss(residuals(fit, valid), tau);
}

SelectionReport select_model(const Dataset& data, const CvSplit& split, ExpectileIndex tau,
                             SelectionMethod method, const SelectionConfig& config) {
  return run_selection(data, split, tau, method, config, false);
}

SelectionReport select_model_penalized(const Dataset& data, const CvSplit& split,
                                       ExpectileIndex tau, SelectionMethod method,
                                       const SelectionConfig& config) {
  return run_selection(data, split, tau, method, config, true);
}

SelectedCoefficients selected_coefficients(const SelectionReport& report) {
  const SubsetScore& entry = report.chosen_entry();
  SelectedCoefficients out{Vector::Zero(static_cast<Index>(report.p)), entry.fit.intercept};
  const auto& cols = report.chosen.columns();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.beta(static_cast<Index>(cols[k])) = entry.fit.beta(static_cast<Index>(k));
  }
  return out;
}

}  // namespace expsel
