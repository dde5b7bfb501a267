#include "expsel/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "expsel/csv.hpp"
#include "expsel/diagnostics.hpp"
#include "expsel/estimators.hpp"
#include "expsel/report.hpp"
#include "expsel/selection.hpp"
#include "expsel/simulation.hpp"
#include "expsel/tau_estimation.hpp"

namespace expsel {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return kExitUsage;
    case ErrorKind::NonFinite:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::FileNotFound:
    case ErrorKind::ParseError:
    case ErrorKind::MissingColumn:
    case ErrorKind::EmptyData:
    case ErrorKind::IoError:
      return kExitData;
    case ErrorKind::RankDeficient:
    case ErrorKind::DegenerateSplit:
    case ErrorKind::TooManySubsets:
    case ErrorKind::AllSubsetsFailed:
    case ErrorKind::DegenerateResiduals:
    case ErrorKind::AllReplicationsFailed:
      return kExitComputation;
  }
  return kExitComputation;
}

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::optional<std::size_t> as_position(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  return static_cast<std::size_t>(std::stoull(s));
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::InvalidArgument, what + " must be a number, got '" + s + "'");
}

unsigned threads_from_env() {
  const char* env = std::getenv("EXPSEL_THREADS");
  if (!env || !*env) return 1;
  const auto v = as_position(env);
  if (!v) throw Error(ErrorKind::InvalidArgument, "EXPSEL_THREADS must be a nonnegative integer");
  if (*v == 0) return std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(*v);
}

// Gathers validation problems so they can be reported together.
struct Problems {
  std::vector<std::string> items;

  void add(std::string s) { items.push_back(std::move(s)); }
  void raise() const {
    if (items.empty()) return;
    std::string msg = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) msg += "; " + items[i];
    throw Error(ErrorKind::InvalidArgument, msg);
  }
};

struct DataArgs {
  std::string input;
  std::string response;
  std::string delimiter = ",";
  bool no_header = false;
  std::string names;
  std::string predictors;
  std::size_t subsample = 0;
  std::uint64_t subsample_seed = 0;
  bool no_intercept = false;

  void attach(CLI::App* app) {
    app->add_option("--input,-i", input, "Input CSV file")->required();
    app->add_option("--response,-r", response,
                    "Response column: header name or 1-based position (default: last column)");
    app->add_option("--delimiter", delimiter, "Field separator; 'tab' for tabs")
        ->capture_default_str();
    app->add_flag("--no-header", no_header, "The file has no header row");
    app->add_option("--names", names, "Comma-separated column names for headerless files");
    app->add_option("--predictors", predictors,
                    "Comma-separated predictor names (default: all other columns)");
    app->add_option("--subsample", subsample, "Keep this many randomly chosen rows");
    app->add_option("--subsample-seed", subsample_seed, "Seed for --subsample")
        ->capture_default_str();
    app->add_flag("--no-intercept", no_intercept, "Fit without an intercept");
  }

  Dataset load() const {
    CsvOptions o;
    if (delimiter == "tab" || delimiter == "\\t") {
      o.delimiter = '\t';
    } else if (delimiter.size() == 1) {
      o.delimiter = delimiter[0];
    } else {
      throw Error(ErrorKind::InvalidArgument, "--delimiter must be a single character or 'tab'");
    }
    o.header = !no_header;
    o.names = split_list(names, ',');
    o.predictors = split_list(predictors, ',');
    if (!response.empty()) {
      if (const auto pos = as_position(response)) {
        if (*pos == 0) throw Error(ErrorKind::InvalidArgument, "--response positions start at 1");
        o.response = ColumnRef::by_index(*pos - 1);
      } else {
        o.response = ColumnRef::by_name(response);
      }
    }
    if (subsample > 0) {
      o.subsample = subsample;
      o.subsample_seed = subsample_seed;
    }
    return load_csv(input, o);
  }
};

struct OutputArgs {
  std::string format = "csv";
  std::string output = "-";
  bool quiet = false;
  bool time = false;

  void attach(CLI::App* app) {
    app->add_option("--format", format, "Report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app->add_option("--output,-o", output, "Report path ('-' for stdout)")->capture_default_str();
    app->add_flag("--quiet,-q", quiet, "Suppress progress messages");
    app->add_flag("--time", time, "Report wall-clock time on stderr");
  }
};

struct PenaltyArgs {
  double lambda = -1.0;
  double gamma = 1.0;
  double nu = -1.0;
  bool lambda_grid = false;
  bool no_standardize = false;

  void attach(CLI::App* app) {
    app->add_option("--lambda", lambda, "Adaptive-LASSO penalty (default sqrt(log p / n))");
    app->add_option("--gamma", gamma, "Adaptive weight exponent in (0, 1]")->capture_default_str();
    app->add_option("--nu", nu, "Pilot LASSO penalty (default: lambda)");
    app->add_flag("--lambda-grid", lambda_grid, "Choose lambda from a grid by a BIC-type rule");
    app->add_flag("--no-standardize", no_standardize, "Fit on the raw column scale");
  }

  PenaltyConfig config() const {
    PenaltyConfig c;
    if (lambda >= 0.0) c.lambda = lambda;
    if (nu >= 0.0) c.nu = nu;
    c.gamma = gamma;
    c.lambda_grid = lambda_grid;
    c.standardize = !no_standardize;
    c.validate();
    return c;
  }
};

// Columns named or numbered (1-based) in `tokens`.
std::vector<std::size_t> resolve_columns(const std::vector<std::string>& tokens,
                                         const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& t : tokens) {
    const auto it = std::find(names.begin(), names.end(), t);
    if (it != names.end()) {
      out.push_back(static_cast<std::size_t>(it - names.begin()));
    } else if (const auto pos = as_position(t); pos && *pos >= 1 && *pos <= names.size()) {
      out.push_back(*pos - 1);
    } else {
      throw Error(ErrorKind::MissingColumn, "unknown predictor '" + t + "'");
    }
  }
  return out;
}

ModelSubset parse_subset(const std::string& spec, const std::vector<std::string>& names) {
  if (spec.empty() || spec == "all") return ModelSubset::full(names.size());
  if (spec == "0" || spec == "none") return ModelSubset({}, names.size());
  auto cols = resolve_columns(split_list(spec, '+'), names);
  std::sort(cols.begin(), cols.end());
  return ModelSubset(std::move(cols), names.size());
}

std::vector<ModelSubset> read_candidates(const std::string& path,
                                         const std::vector<std::string>& names) {
  std::vector<ModelSubset> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto b = line.find_last_not_of(" \t\r");
    out.push_back(parse_subset(line.substr(a, b - a + 1), names));
  }
  if (out.empty()) throw Error(ErrorKind::EmptyData, "candidate file " + path + " lists no subsets");
  return out;
}

void note(const OutputArgs& out, const std::string& msg) {
  if (!out.quiet) std::cerr << msg << '\n';
}

std::string names_of(const ModelSubset& m, const std::vector<std::string>& names) {
  if (m.empty()) return "(none)";
  std::string s;
  for (auto j : m.columns()) {
    if (!s.empty()) s += ", ";
    s += names[j];
  }
  return s;
}

FitMethod fit_method_from_cli(const std::string& s) {
  if (s == "expectile") return FitMethod::expectile;
  if (s == "lasso") return FitMethod::lasso_expectile;
  if (s == "adaptive-lasso") return FitMethod::adaptive_lasso_expectile;
  if (s == "ls") return FitMethod::least_squares;
  if (s == "adaptive-lasso-ls") return FitMethod::adaptive_lasso_least_squares;
  if (s == "quantile") return FitMethod::quantile;
  if (s == "adaptive-lasso-quantile") return FitMethod::adaptive_lasso_quantile;
  return fit_method_from_string(s);
}

// "auto" or a value in (0, 1).
std::optional<double> parse_tau_arg(const std::string& s) {
  if (s == "auto") return std::nullopt;
  const double v = parse_real(s, "--tau");
  if (!(v > 0.0 && v < 1.0)) throw Error(ErrorKind::InvalidArgument, "--tau must lie in (0, 1)");
  return v;
}

// ---- fit ----

struct FitArgs {
  DataArgs data;
  OutputArgs out;
  PenaltyArgs penalty;
  std::string subset = "all";
  std::string method = "expectile";
  std::string tau = "0.5";
  double level = 0.5;
};

int run_fit(const FitArgs& a) {
  Problems problems;
  std::optional<double> tau;
  try {
    tau = parse_tau_arg(a.tau);
  } catch (const Error& e) {
    problems.add(e.what());
  }
  if (!(a.level > 0.0 && a.level < 1.0)) problems.add("--level must lie in (0, 1)");
  FitMethod method = FitMethod::expectile;
  try {
    method = fit_method_from_cli(a.method);
  } catch (const Error& e) {
    problems.add(e.what());
  }
  problems.raise();

  const Dataset data = a.data.load();
  SolverOptions solver;
  solver.intercept = !a.data.no_intercept;
  const ModelSubset subset = parse_subset(a.subset, data.column_names());
  if (!tau) {
    const TauEstimate est = tau_two_step(data, subset, solver);
    tau = est.tau;
    note(a.out, "estimated tau = " + format_double(est.tau));
  }
  const ExpectileIndex index(*tau);
  const PenaltyConfig pen = a.penalty.config();
  FitResult fit;
  switch (method) {
    case FitMethod::expectile: fit = fit_expectile(data, subset, index, solver); break;
    case FitMethod::lasso_expectile: fit = fit_lasso_expectile(data, subset, index, pen, solver); break;
    case FitMethod::adaptive_lasso_expectile:
      fit = fit_adaptive_lasso_expectile(data, subset, index, pen, solver);
      break;
    case FitMethod::least_squares: fit = fit_least_squares(data, subset, solver); break;
    case FitMethod::adaptive_lasso_least_squares:
      fit = fit_adaptive_lasso_least_squares(data, subset, pen, solver);
      break;
    case FitMethod::quantile: fit = fit_quantile(data, subset, a.level, solver); break;
    case FitMethod::adaptive_lasso_quantile:
      fit = fit_adaptive_lasso_quantile(data, subset, a.level, pen, solver);
      break;
  }
  if (!fit.converged) note(a.out, "warning: solver did not converge");
  write_text(a.out.output, render(fit, data.column_names(), report_format_from_string(a.out.format)));
  return kExitOk;
}

// ---- select ----

struct SelectArgs {
  DataArgs data;
  OutputArgs out;
  PenaltyArgs penalty;
  double s = 0.8;
  std::uint64_t seed = 1;
  std::string tau = "auto";
  std::string method = "expectile";
  bool penalized = false;
  std::size_t max_p = 20;
  std::string force_in;
  std::string force_out;
  std::string candidates;
  bool include_empty = false;
  bool score_with_tau = false;
  double level = 0.5;
};

int run_select(const SelectArgs& a) {
  Problems problems;
  std::optional<double> tau;
  try {
    tau = parse_tau_arg(a.tau);
  } catch (const Error& e) {
    problems.add(e.what());
  }
  if (!(a.s > 0.0 && a.s < 1.0)) problems.add("--s must lie in (0, 1)");
  if (!(a.level > 0.0 && a.level < 1.0)) problems.add("--level must lie in (0, 1)");
  SelectionMethod method = SelectionMethod::expectile;
  try {
    method = selection_method_from_string(a.method);
  } catch (const Error& e) {
    problems.add(e.what());
  }
  if (a.include_empty && a.data.no_intercept) {
    problems.add("--include-empty needs an intercept");
  }
  problems.raise();

  const Dataset data = a.data.load();
  const auto& names = data.column_names();
  SelectionConfig cfg;
  cfg.solver.intercept = !a.data.no_intercept;
  cfg.penalty = a.penalty.config();
  cfg.quantile_level = a.level;
  cfg.score_with_tau = a.score_with_tau;
  cfg.threads = threads_from_env();
  cfg.enumeration.max_exhaustive_p = a.max_p;
  cfg.enumeration.include_empty = a.include_empty;
  cfg.enumeration.force_in = resolve_columns(split_list(a.force_in, ','), names);
  cfg.enumeration.force_out = resolve_columns(split_list(a.force_out, ','), names);
  if (!a.candidates.empty()) cfg.enumeration.candidates = read_candidates(a.candidates, names);

  const bool tau_matters = method == SelectionMethod::expectile || a.score_with_tau;
  if (!tau) {
    if (tau_matters) {
      const TauEstimate est =
          tau_two_step(data, ModelSubset::full(names.size()), cfg.solver);
      tau = est.tau;
      note(a.out, "estimated tau = " + format_double(est.tau) + " (initial " +
                      format_double(est.tau0.value_or(est.tau)) + ")");
    } else {
      tau = 0.5;
    }
  }

  const CvSplit split = make_split(static_cast<std::size_t>(data.n()), a.s, a.seed);
  if (split.dominance_warning) {
    note(a.out, "warning: validation set (" + std::to_string(split.n_validation()) +
                    ") does not outnumber training set (" + std::to_string(split.n_train()) + ")");
  }
  const SelectionReport report =
      a.penalized ? select_model_penalized(data, split, ExpectileIndex(*tau), method, cfg)
                  : select_model(data, split, ExpectileIndex(*tau), method, cfg);
  const ModelSubset selected =
      a.penalized ? report.chosen_entry().fit.active_subset() : report.chosen;
  note(a.out, "selected: " + names_of(selected, names) + " (score " +
                  format_double(report.chosen_entry().score) + ", " +
                  std::to_string(report.scores.size()) + " subsets fitted, " +
                  std::to_string(report.skipped.size()) + " skipped)");
  write_report(report, report_format_from_string(a.out.format), a.out.output);
  return kExitOk;
}

// ---- simulate ----

struct SimulateArgs {
  OutputArgs out;
  PenaltyArgs penalty;
  std::string preset;
  std::size_t n = 500;
  std::string beta;
  std::string error = "normal";
  double s = 0.9;
  std::string tau = "auto";
  std::string methods = "expectile";
  bool penalized = false;
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  std::string covariates = "normal";
  bool no_noise = false;
  std::string summary;
  bool list = false;
  std::size_t max_p = 20;
};

int run_simulate(const SimulateArgs& a, const CLI::App& app) {
  if (a.list) {
    std::string text;
    for (const auto& p : presets()) text += p.name + "\t" + p.description + "\n";
    write_text("-", text);
    return kExitOk;
  }
  auto given = [&](const char* flag) { return app.count(flag) > 0; };

  Problems problems;
  SimConfig cfg;
  std::string label = a.preset.empty() ? "custom" : a.preset;
  if (!a.preset.empty()) {
    try {
      cfg = find_preset(a.preset).config;
    } catch (const Error& e) {
      problems.add(e.what());
    }
  } else if (a.beta.empty()) {
    problems.add("either --preset or --beta is required");
  }
  auto guard = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      problems.add(e.what());
    }
  };
  if (!a.beta.empty()) {
    guard([&] {
      const auto parts = split_list(a.beta, ',');
      cfg.beta_star = Vector(static_cast<Index>(parts.size()));
      for (std::size_t j = 0; j < parts.size(); ++j) {
        cfg.beta_star(static_cast<Index>(j)) = parse_real(parts[j], "--beta entry");
      }
    });
  }
  if (given("--n")) cfg.n = a.n;
  if (given("--error")) guard([&] { cfg.error = error_distribution_from_string(a.error); });
  if (given("--s")) cfg.s = a.s;
  if (given("--tau")) guard([&] { cfg.tau = parse_tau_arg(a.tau); });
  if (given("--methods") || a.preset.empty()) {
    guard([&] {
      cfg.methods.clear();
      for (const auto& m : split_list(a.methods, ',')) {
        cfg.methods.push_back(selection_method_from_string(m));
      }
    });
  }
  if (a.penalized) cfg.penalized = true;
  if (given("--reps")) cfg.replications = a.reps;
  cfg.master_seed = a.seed;
  if (given("--covariates")) guard([&] { cfg.covariates = covariate_law_from_string(a.covariates); });
  if (a.no_noise) cfg.noise = false;
  if (given("--max-p")) cfg.selection.enumeration.max_exhaustive_p = a.max_p;
  guard([&] { cfg.selection.penalty = a.penalty.config(); });
  guard([&] { cfg.validate(); });
  problems.raise();
  cfg.threads = threads_from_env();

  note(a.out, "simulating " + label + ": n = " + std::to_string(cfg.n) +
                  ", p = " + std::to_string(cfg.p()) + ", " + std::to_string(cfg.replications) +
                  " replications");
  const ReplicationSummary summary = run_experiment(cfg, label);
  const std::string table = render_summary_table(summary);
  if (!a.out.quiet) std::cerr << table;
  if (!a.summary.empty()) write_text(a.summary, table);
  if (!summary.failures.empty()) {
    note(a.out, "warning: " + std::to_string(summary.failures.size()) +
                    " method-replications failed");
  }
  write_report(summary, report_format_from_string(a.out.format), a.out.output);
  return kExitOk;
}

// ---- estimate-tau ----

struct TauArgs {
  DataArgs data;
  OutputArgs out;
  std::string subset = "all";
  int iterations = 1;
};

int run_estimate_tau(const TauArgs& a) {
  Problems problems;
  if (a.iterations < 1) problems.add("--iterations must be at least 1");
  problems.raise();
  const Dataset data = a.data.load();
  SolverOptions solver;
  solver.intercept = !a.data.no_intercept;
  const TauEstimate est =
      tau_two_step(data, parse_subset(a.subset, data.column_names()), solver, a.iterations);
  write_report(est, report_format_from_string(a.out.format), a.out.output);
  return kExitOk;
}

// ---- diagnose ----

struct DiagnoseArgs {
  DataArgs data;
  OutputArgs out;
  double s = 0.8;
};

int run_diagnose(const DiagnoseArgs& a) {
  if (!(a.s > 0.0 && a.s < 1.0)) throw Error(ErrorKind::InvalidArgument, "--s must lie in (0, 1)");
  const Dataset data = a.data.load();
  const Diagnostics d = diagnose(data, a.s);
  if (d.split_ratio_warning) {
    note(a.out, "warning: at s = " + format_double(a.s) +
                    " the validation set does not outnumber the training set");
  }
  write_report(d, report_format_from_string(a.out.format), a.out.output);
  return kExitOk;
}

void report_error(const Error& e, bool as_json) {
  const int code = exit_code_for(e.kind());
  if (as_json) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "error";
    j["error"] = to_string(e.kind());
    j["message"] = e.what();
    j["exit_code"] = code;
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
      j["row"] = pe->row();
      j["col"] = pe->col();
    }
    std::cerr << j.dump() << '\n';
  } else {
    std::cerr << "expsel: " << to_string(e.kind()) << ": " << e.what() << '\n';
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Variable selection for linear models by cross-validated expectile regression"};
  app.name("expsel");
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one model and print its coefficients");
  fit.data.attach(fit_cmd);
  fit.out.attach(fit_cmd);
  fit.penalty.attach(fit_cmd);
  fit_cmd->add_option("--subset", fit.subset, "Columns joined by '+', names or 1-based; 'all'")
      ->capture_default_str();
  fit_cmd
      ->add_option("--method", fit.method,
                   "expectile, lasso, adaptive-lasso, ls, adaptive-lasso-ls, quantile, "
                   "adaptive-lasso-quantile")
      ->capture_default_str();
  fit_cmd->add_option("--tau", fit.tau, "Expectile index in (0, 1) or 'auto'")
      ->capture_default_str();
  fit_cmd->add_option("--level", fit.level, "Quantile level")->capture_default_str();

  SelectArgs sel;
  auto* sel_cmd = app.add_subcommand("select", "Choose a submodel by cross-validation");
  sel.data.attach(sel_cmd);
  sel.out.attach(sel_cmd);
  sel.penalty.attach(sel_cmd);
  sel_cmd->add_option("--s", sel.s, "Validation fraction")->capture_default_str();
  sel_cmd->add_option("--seed", sel.seed, "Split seed")->capture_default_str();
  sel_cmd->add_option("--tau", sel.tau, "Expectile index in (0, 1) or 'auto'")
      ->capture_default_str();
  sel_cmd->add_option("--method", sel.method, "expectile, ls or quantile")->capture_default_str();
  sel_cmd->add_flag("--penalized", sel.penalized, "Use adaptive-LASSO fits");
  sel_cmd->add_option("--max-p", sel.max_p, "Largest p searched exhaustively")
      ->capture_default_str();
  sel_cmd->add_option("--force-in", sel.force_in, "Comma-separated columns kept in every model");
  sel_cmd->add_option("--force-out", sel.force_out, "Comma-separated columns never used");
  sel_cmd->add_option("--candidates", sel.candidates,
                      "File listing candidate subsets, one per line ('1+3' or 'a+b')");
  sel_cmd->add_flag("--include-empty", sel.include_empty, "Also score the intercept-only model");
  sel_cmd->add_flag("--score-with-tau", sel.score_with_tau,
                    "Score every method with the expectile loss at tau");
  sel_cmd->add_option("--level", sel.level, "Quantile level")->capture_default_str();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study of the selection procedure");
  sim.out.attach(sim_cmd);
  sim.penalty.attach(sim_cmd);
  sim_cmd->add_option("--preset", sim.preset, "Named design (see --list)");
  sim_cmd->add_flag("--list", sim.list, "List the named designs");
  sim_cmd->add_option("--n", sim.n, "Sample size")->capture_default_str();
  sim_cmd->add_option("--beta", sim.beta, "True coefficients, comma-separated");
  sim_cmd->add_option("--error", sim.error, "normal, exp, normal4 or exp-normal4")
      ->capture_default_str();
  sim_cmd->add_option("--s", sim.s, "Validation fraction")->capture_default_str();
  sim_cmd->add_option("--tau", sim.tau, "Expectile index or 'auto' (zero expectile of the error)")
      ->capture_default_str();
  sim_cmd->add_option("--methods", sim.methods, "Comma-separated: expectile, ls, quantile")
      ->capture_default_str();
  sim_cmd->add_flag("--penalized", sim.penalized, "Use adaptive-LASSO fits");
  sim_cmd->add_option("--reps", sim.reps, "Replications")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--covariates", sim.covariates, "normal or uniform")->capture_default_str();
  sim_cmd->add_flag("--no-noise", sim.no_noise, "Generate y = X beta exactly");
  sim_cmd->add_option("--summary", sim.summary, "Also write the per-method means to this path");
  sim_cmd->add_option("--max-p", sim.max_p, "Largest p searched exhaustively")
      ->capture_default_str();

  TauArgs tau;
  auto* tau_cmd = app.add_subcommand("estimate-tau", "Estimate the expectile index of the errors");
  tau.data.attach(tau_cmd);
  tau.out.attach(tau_cmd);
  tau_cmd->add_option("--subset", tau.subset, "Model used for the residuals")
      ->capture_default_str();
  tau_cmd->add_option("--iterations", tau.iterations, "Refits after the initial estimate")
      ->capture_default_str();

  DiagnoseArgs diag;
  auto* diag_cmd = app.add_subcommand("diagnose", "Design diagnostics");
  diag.data.attach(diag_cmd);
  diag.out.attach(diag_cmd);
  diag_cmd->add_option("--s", diag.s, "Validation fraction")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string* format = &fit.out.format;
  if (sel_cmd->parsed()) format = &sel.out.format;
  if (sim_cmd->parsed()) format = &sim.out.format;
  if (tau_cmd->parsed()) format = &tau.out.format;
  if (diag_cmd->parsed()) format = &diag.out.format;
  const bool json_errors = *format == "json";

  const auto start = std::chrono::steady_clock::now();
  bool timed = false;
  int code = kExitOk;
  try {
    if (fit_cmd->parsed()) {
      timed = fit.out.time;
      code = run_fit(fit);
    } else if (sel_cmd->parsed()) {
      timed = sel.out.time;
      code = run_select(sel);
    } else if (sim_cmd->parsed()) {
      timed = sim.out.time;
      code = run_simulate(sim, *sim_cmd);
    } else if (tau_cmd->parsed()) {
      timed = tau.out.time;
      code = run_estimate_tau(tau);
    } else if (diag_cmd->parsed()) {
      timed = diag.out.time;
      code = run_diagnose(diag);
    }
  } catch (const Error& e) {
    report_error(e, json_errors);
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "expsel: internal error: " << e.what() << '\n';
    return kExitComputation;
  }
  if (timed) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cerr << "elapsed: " << elapsed.count() << " s\n";
  }
  return code;
}

}  // namespace expsel
