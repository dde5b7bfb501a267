#include "expsel/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "expsel/csv.hpp"
#include "expsel/error.hpp"

namespace expsel {

using json = nlohmann::json;

std::string_view to_string(ReportFormat f) { return f == ReportFormat::csv ? "csv" : "json"; }

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw Error(ErrorKind::InvalidArgument, "unknown format '" + std::string(s) + "' (csv, json)");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(0, 0, "malformed number '" + std::string(s) + "'");
  }
  return v;
}

namespace {

// ---- CSV helpers ----

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string join_doubles(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v(i));
  }
  return out;
}

Vector split_doubles(std::string_view s) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto next = s.find(' ', pos);
    const auto end = next == std::string_view::npos ? s.size() : next;
    if (end > pos) vals.push_back(parse_double(s.substr(pos, end - pos)));
    pos = end + 1;
  }
  return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// Records with the header checked and mapped to column positions.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return j;
    }
    throw Error(ErrorKind::MissingColumn, "report CSV lacks column '" + name + "'");
  }
};

CsvTable read_table(std::string_view text) {
  auto records = read_csv_records(text, ',');
  if (records.empty()) throw Error(ErrorKind::EmptyData, "empty report CSV");
  CsvTable t;
  t.header = std::move(records.front());
  t.rows.assign(std::make_move_iterator(records.begin() + 1),
                std::make_move_iterator(records.end()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].size() != t.header.size()) {
      throw ParseError(r + 2, t.rows[r].size() + 1, "ragged report CSV row");
    }
  }
  return t;
}

// ---- JSON helpers ----

json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double get_num(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::optional<double> get_opt_num(const json& j) {
  if (j.is_null()) return std::nullopt;
  return get_num(j);
}

json vec(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

Vector get_vec(const json& a) {
  Vector v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = get_num(a[i]);
  return v;
}

json header(std::string_view kind) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

json parse_checked(std::string_view text, std::string_view kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, 0, std::string("malformed JSON report: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version") || !j.contains("kind")) {
    throw Error(ErrorKind::ParseError, "JSON report lacks schema_version/kind");
  }
  if (j["schema_version"].get<int>() != kSchemaVersion) {
    throw Error(ErrorKind::ParseError, "unsupported schema_version");
  }
  if (j["kind"].get<std::string>() != kind) {
    throw Error(ErrorKind::ParseError, "expected a '" + std::string(kind) + "' report, found '" +
                                           j["kind"].get<std::string>() + "'");
  }
  return j;
}

template <class Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed JSON report: ") + e.what());
  }
}

json fit_json(const FitResult& f) {
  json j;
  j["subset"] = f.subset.label();
  j["p"] = f.subset.ambient_dim();
  j["beta"] = vec(f.beta);
  j["intercept"] = opt_num(f.intercept);
  j["tau"] = num(f.tau);
  j["method"] = to_string(f.method);
  j["objective"] = num(f.objective);
  j["iterations"] = f.iterations;
  j["converged"] = f.converged;
  j["regularized"] = f.regularized;
  j["gradient_norm"] = num(f.gradient_norm);
  j["lambda"] = num(f.lambda);
  j["adaptive_weights"] = vec(f.adaptive_weights);
  j["penalty"] = vec(f.penalty);
  return j;
}

FitResult fit_from(const json& j) {
  FitResult f;
  f.subset = ModelSubset::parse(j.at("subset").get<std::string>(), j.at("p").get<std::size_t>());
  f.beta = get_vec(j.at("beta"));
  f.intercept = get_opt_num(j.at("intercept"));
  f.tau = get_num(j.at("tau"));
  f.method = fit_method_from_string(j.at("method").get<std::string>());
  f.objective = get_num(j.at("objective"));
  f.iterations = j.at("iterations").get<int>();
  f.converged = j.at("converged").get<bool>();
  f.regularized = j.at("regularized").get<bool>();
  f.gradient_norm = get_num(j.at("gradient_norm"));
  f.lambda = get_num(j.at("lambda"));
  f.adaptive_weights = get_vec(j.at("adaptive_weights"));
  f.penalty = get_vec(j.at("penalty"));
  return f;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---- selection ----

std::string render(const SelectionReport& r, ReportFormat f) {
  auto is_tie = [&](const ModelSubset& m) {
    return std::find(r.ties.begin(), r.ties.end(), m) != r.ties.end();
  };
  if (f == ReportFormat::csv) {
    std::string out = "subset,size,status,score,chosen,tie,intercept,coefficients,reason\n";
    for (const auto& s : r.scores) {
      out += s.subset.label() + ',' + std::to_string(s.subset.size()) + ",ok," +
             format_double(s.score) + ',' + (s.subset == r.chosen ? "1" : "0") + ',' +
             (is_tie(s.subset) ? "1" : "0") + ',' + opt_double(s.fit.intercept) + ',' +
             join_doubles(s.fit.beta) + ",\n";
    }
    for (const auto& s : r.skipped) {
      out += s.subset.label() + ',' + std::to_string(s.subset.size()) + ",skipped,,0,0,,," +
             csv_field(s.reason) + '\n';
    }
    return out;
  }
  json j = header("selection");
  j["criterion"] = to_string(r.criterion);
  j["method"] = to_string(r.method);
  j["tau"] = num(r.tau);
  j["p"] = r.p;
  j["column_names"] = r.column_names;
  j["split"] = {{"seed", r.split.seed},
                {"train", r.split.train},
                {"validation", r.split.validation},
                {"dominance_warning", r.split.dominance_warning}};
  j["chosen"] = r.chosen.label();
  json ties = json::array();
  for (const auto& t : r.ties) ties.push_back(t.label());
  j["ties"] = ties;
  json scores = json::array();
  for (const auto& s : r.scores) {
    scores.push_back({{"subset", s.subset.label()}, {"score", num(s.score)}, {"fit", fit_json(s.fit)}});
  }
  j["scores"] = scores;
  json skipped = json::array();
  for (const auto& s : r.skipped) {
    skipped.push_back({{"subset", s.subset.label()}, {"reason", s.reason}});
  }
  j["skipped"] = skipped;
  return dump(j);
}

SelectionReport selection_from_json(std::string_view text) {
  const json j = parse_checked(text, "selection");
  return guarded([&] {
    SelectionReport r;
    r.criterion = criterion_from_string(j.at("criterion").get<std::string>());
    r.method = selection_method_from_string(j.at("method").get<std::string>());
    r.tau = get_num(j.at("tau"));
    r.p = j.at("p").get<std::size_t>();
    r.column_names = j.at("column_names").get<std::vector<std::string>>();
    const json& sp = j.at("split");
    r.split.seed = sp.at("seed").get<std::uint64_t>();
    r.split.train = sp.at("train").get<std::vector<std::size_t>>();
    r.split.validation = sp.at("validation").get<std::vector<std::size_t>>();
    r.split.dominance_warning = sp.at("dominance_warning").get<bool>();
    r.chosen = ModelSubset::parse(j.at("chosen").get<std::string>(), r.p);
    for (const auto& t : j.at("ties")) r.ties.push_back(ModelSubset::parse(t.get<std::string>(), r.p));
    for (const auto& s : j.at("scores")) {
      r.scores.push_back({ModelSubset::parse(s.at("subset").get<std::string>(), r.p),
                          get_num(s.at("score")), fit_from(s.at("fit"))});
    }
    for (const auto& s : j.at("skipped")) {
      r.skipped.push_back({ModelSubset::parse(s.at("subset").get<std::string>(), r.p),
                           s.at("reason").get<std::string>()});
    }
    return r;
  });
}

std::vector<SelectionRow> selection_rows_from_csv(std::string_view text, std::size_t p) {
  const CsvTable t = read_table(text);
  const auto c_subset = t.col("subset"), c_status = t.col("status"), c_score = t.col("score"),
             c_chosen = t.col("chosen"), c_tie = t.col("tie"), c_int = t.col("intercept"),
             c_coef = t.col("coefficients"), c_reason = t.col("reason");
  std::vector<SelectionRow> out;
  for (const auto& row : t.rows) {
    SelectionRow s;
    s.subset = ModelSubset::parse(row[c_subset], p);
    s.status = row[c_status];
    if (!row[c_score].empty()) s.score = parse_double(row[c_score]);
    s.chosen = row[c_chosen] == "1";
    s.tie = row[c_tie] == "1";
    if (!row[c_int].empty()) s.intercept = parse_double(row[c_int]);
    s.beta = split_doubles(row[c_coef]);
    s.reason = row[c_reason];
    out.push_back(std::move(s));
  }
  return out;
}

// ---- simulation ----

std::string render(const ReplicationSummary& r, ReportFormat f) {
  if (f == ReportFormat::csv) {
    std::string out = "rep,seed,method,selected,mse,tpr,tnr,coef_mse\n";
    for (const auto& rec : r.records) {
      out += std::to_string(rec.rep) + ',' + std::to_string(rec.seed) + ',' +
             std::string(to_string(rec.method)) + ',' + rec.selected.label() + ',' +
             format_double(rec.metrics.mse) + ',' + format_double(rec.metrics.tpr) + ',' +
             format_double(rec.metrics.tnr) + ',' + format_double(rec.metrics.coef_mse) + '\n';
    }
    return out;
  }
  json j = header("simulation");
  j["label"] = r.label;
  j["n"] = r.n;
  j["p"] = r.p;
  j["s"] = num(r.s);
  j["tau"] = num(r.tau);
  j["error"] = to_string(r.error);
  j["criterion"] = to_string(r.criterion);
  j["master_seed"] = r.master_seed;
  j["replications"] = r.replications;
  json methods = json::array();
  for (const auto& m : r.methods) {
    methods.push_back({{"method", to_string(m.method)},
                       {"mse", num(m.mean.mse)},
                       {"tpr", num(m.mean.tpr)},
                       {"tnr", num(m.mean.tnr)},
                       {"coef_mse", num(m.mean.coef_mse)},
                       {"used", m.used},
                       {"failed", m.failed}});
  }
  j["methods"] = methods;
  json records = json::array();
  for (const auto& rec : r.records) {
    records.push_back({{"rep", rec.rep},
                       {"seed", rec.seed},
                       {"method", to_string(rec.method)},
                       {"selected", rec.selected.label()},
                       {"mse", num(rec.metrics.mse)},
                       {"tpr", num(rec.metrics.tpr)},
                       {"tnr", num(rec.metrics.tnr)},
                       {"coef_mse", num(rec.metrics.coef_mse)}});
  }
  j["records"] = records;
  json failures = json::array();
  for (const auto& fl : r.failures) {
    failures.push_back({{"rep", fl.rep}, {"method", to_string(fl.method)}, {"reason", fl.reason}});
  }
  j["failures"] = failures;
  return dump(j);
}

std::string render_summary_table(const ReplicationSummary& r) {
  std::string out = "label,criterion,error,n,p,s,tau,method,mse,tpr,tnr,coef_mse,used,failed\n";
  for (const auto& m : r.methods) {
    out += csv_field(r.label) + ',' + std::string(to_string(r.criterion)) + ',' +
           std::string(to_string(r.error)) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.p) + ',' + format_double(r.s) + ',' + format_double(r.tau) + ',' +
           std::string(to_string(m.method)) + ',' + format_double(m.mean.mse) + ',' +
           format_double(m.mean.tpr) + ',' + format_double(m.mean.tnr) + ',' +
           format_double(m.mean.coef_mse) + ',' + std::to_string(m.used) + ',' +
           std::to_string(m.failed) + '\n';
  }
  return out;
}

ReplicationSummary summary_from_json(std::string_view text) {
  const json j = parse_checked(text, "simulation");
  return guarded([&] {
    ReplicationSummary r;
    r.label = j.at("label").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.p = j.at("p").get<std::size_t>();
    r.s = get_num(j.at("s"));
    r.tau = get_num(j.at("tau"));
    r.error = error_distribution_from_string(j.at("error").get<std::string>());
    r.criterion = criterion_from_string(j.at("criterion").get<std::string>());
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.replications = j.at("replications").get<std::size_t>();
    for (const auto& m : j.at("methods")) {
      MethodSummary ms;
      ms.method = selection_method_from_string(m.at("method").get<std::string>());
      ms.mean = {get_num(m.at("mse")), get_num(m.at("tpr")), get_num(m.at("tnr")),
                 get_num(m.at("coef_mse"))};
      ms.used = m.at("used").get<std::size_t>();
      ms.failed = m.at("failed").get<std::size_t>();
      r.methods.push_back(ms);
    }
    for (const auto& x : j.at("records")) {
      ReplicationRecord rec;
      rec.rep = x.at("rep").get<std::size_t>();
      rec.seed = x.at("seed").get<std::uint64_t>();
      rec.method = selection_method_from_string(x.at("method").get<std::string>());
      rec.selected = ModelSubset::parse(x.at("selected").get<std::string>(), r.p);
      rec.metrics = {get_num(x.at("mse")), get_num(x.at("tpr")), get_num(x.at("tnr")),
                     get_num(x.at("coef_mse"))};
      r.records.push_back(std::move(rec));
    }
    for (const auto& x : j.at("failures")) {
      r.failures.push_back({x.at("rep").get<std::size_t>(),
                            selection_method_from_string(x.at("method").get<std::string>()),
                            x.at("reason").get<std::string>()});
    }
    return r;
  });
}

std::vector<ReplicationRecord> records_from_csv(std::string_view text, std::size_t p) {
  const CsvTable t = read_table(text);
  const auto c_rep = t.col("rep"), c_seed = t.col("seed"), c_method = t.col("method"),
             c_sel = t.col("selected"), c_mse = t.col("mse"), c_tpr = t.col("tpr"),
             c_tnr = t.col("tnr"), c_coef = t.col("coef_mse");
  std::vector<ReplicationRecord> out;
  for (const auto& row : t.rows) {
    ReplicationRecord rec;
    rec.rep = std::stoull(row[c_rep]);
    rec.seed = std::stoull(row[c_seed]);
    rec.method = selection_method_from_string(row[c_method]);
    rec.selected = ModelSubset::parse(row[c_sel], p);
    rec.metrics = {parse_double(row[c_mse]), parse_double(row[c_tpr]), parse_double(row[c_tnr]),
                   parse_double(row[c_coef])};
    out.push_back(std::move(rec));
  }
  return out;
}

// ---- tau ----

std::string render(const TauEstimate& t, ReportFormat f) {
  if (f == ReportFormat::csv) {
    return "tau,raw,stage,n_used,tau0,iterations\n" + format_double(t.tau) + ',' +
           format_double(t.raw) + ',' + std::string(to_string(t.stage)) + ',' +
           std::to_string(t.n_used) + ',' + opt_double(t.tau0) + ',' +
           std::to_string(t.iterations) + '\n';
  }
  json j = header("tau");
  j["tau"] = num(t.tau);
  j["raw"] = num(t.raw);
  j["stage"] = to_string(t.stage);
  j["n_used"] = t.n_used;
  j["tau0"] = opt_num(t.tau0);
  j["iterations"] = t.iterations;
  return dump(j);
}

TauEstimate tau_from_json(std::string_view text) {
  const json j = parse_checked(text, "tau");
  return guarded([&] {
    TauEstimate t;
    t.tau = get_num(j.at("tau"));
    t.raw = get_num(j.at("raw"));
    const auto stage = j.at("stage").get<std::string>();
    if (stage == "from_errors") {
      t.stage = TauStage::from_errors;
    } else if (stage == "step0") {
      t.stage = TauStage::step0;
    } else if (stage == "step1") {
      t.stage = TauStage::step1;
    } else {
      throw Error(ErrorKind::ParseError, "unknown tau stage '" + stage + "'");
    }
    t.n_used = j.at("n_used").get<std::size_t>();
    t.tau0 = get_opt_num(j.at("tau0"));
    t.iterations = j.at("iterations").get<int>();
    return t;
  });
}

// ---- diagnostics ----

std::string render(const Diagnostics& d, ReportFormat f) {
  if (f == ReportFormat::csv) {
    return "n,p,s,eig_min,eig_max,condition_number,max_row_norm2,max_row_norm_inf,n_train,"
           "n_validation,row_norm_ratio,split_ratio_warning\n" +
           std::to_string(d.n) + ',' + std::to_string(d.p) + ',' + format_double(d.s) + ',' +
           format_double(d.eig_min) + ',' + format_double(d.eig_max) + ',' +
           format_double(d.condition_number) + ',' + format_double(d.max_row_norm2) + ',' +
           format_double(d.max_row_norm_inf) + ',' + std::to_string(d.n_train) + ',' +
           std::to_string(d.n_validation) + ',' + format_double(d.row_norm_ratio) + ',' +
           (d.split_ratio_warning ? "1" : "0") + '\n';
  }
  json j = header("diagnostics");
  j["n"] = d.n;
  j["p"] = d.p;
  j["s"] = num(d.s);
  j["eig_min"] = num(d.eig_min);
  j["eig_max"] = num(d.eig_max);
  j["condition_number"] = num(d.condition_number);
  j["max_row_norm2"] = num(d.max_row_norm2);
  j["max_row_norm_inf"] = num(d.max_row_norm_inf);
  j["n_train"] = d.n_train;
  j["n_validation"] = d.n_validation;
  j["row_norm_ratio"] = num(d.row_norm_ratio);
  j["split_ratio_warning"] = d.split_ratio_warning;
  return dump(j);
}

Diagnostics diagnostics_from_json(std::string_view text) {
  const json j = parse_checked(text, "diagnostics");
  return guarded([&] {
    Diagnostics d;
    d.n = j.at("n").get<std::size_t>();
    d.p = j.at("p").get<std::size_t>();
    d.s = get_num(j.at("s"));
    d.eig_min = get_num(j.at("eig_min"));
    d.eig_max = get_num(j.at("eig_max"));
    d.condition_number = get_num(j.at("condition_number"));
    d.max_row_norm2 = get_num(j.at("max_row_norm2"));
    d.max_row_norm_inf = get_num(j.at("max_row_norm_inf"));
    d.n_train = j.at("n_train").get<std::size_t>();
    d.n_validation = j.at("n_validation").get<std::size_t>();
    d.row_norm_ratio = get_num(j.at("row_norm_ratio"));
    d.split_ratio_warning = j.at("split_ratio_warning").get<bool>();
    return d;
  });
}

// ---- single fit ----

std::string render(const FitResult& fit, const std::vector<std::string>& names, ReportFormat f) {
  if (f == ReportFormat::csv) {
    std::string out = "term,estimate\n";
    if (fit.intercept) out += "(Intercept)," + format_double(*fit.intercept) + '\n';
    const auto& cols = fit.subset.columns();
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::string name =
          cols[k] < names.size() ? names[cols[k]] : "x" + std::to_string(cols[k] + 1);
      out += csv_field(name) + ',' + format_double(fit.beta(static_cast<Index>(k))) + '\n';
    }
    return out;
  }
  json j = header("fit");
  j["column_names"] = names;
  j["fit"] = fit_json(fit);
  return dump(j);
}

FitResult fit_from_json(std::string_view text) {
  const json j = parse_checked(text, "fit");
  return guarded([&] { return fit_from(j.at("fit")); });
}

void write_text(const std::string& path, std::string_view text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorKind::IoError, "cannot write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::IoError, "error writing " + path);
}

}  // namespace expsel
