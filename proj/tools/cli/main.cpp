// spectradiag command-line front end. Every subcommand prints one JSON
// document (stdout or --out) and exits 0 on success, 1 when the analysis
// rejects the data or a fit, 2 on input errors.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spectradiag/association.hpp"
#include "spectradiag/composite.hpp"
#include "spectradiag/corr_matrix.hpp"
#include "spectradiag/error.hpp"
#include "spectradiag/matrix_io.hpp"
#include "spectradiag/null_validation.hpp"
#include "spectradiag/parallel.hpp"
#include "spectradiag/selection.hpp"
#include "spectradiag/serialize.hpp"
#include "spectradiag/spectral.hpp"
#include "spectradiag/stats.hpp"
#include "spectradiag/synthetic.hpp"
#include "spectradiag/temporal.hpp"
#include "spectradiag/workflow.hpp"

namespace sd = spectradiag;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string csv;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_csv = true) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", c.out, "Write the primary output here instead of stdout");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = SPECTRADIAG_THREADS or all cores)");
  if (with_csv) cmd->add_option("--csv", c.csv, "Also write plot data as CSV");
}

void emit_text(const std::string& text, const Common& c) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw sd::InputError("cannot write " + c.out);
  f << text;
}

void emit(const sd::Json& j, const Common& c) { emit_text(j.dump(2) + "\n", c); }

void write_csv(const Common& c, const std::function<void(std::ostream&)>& writer) {
  if (c.csv.empty()) return;
  std::ofstream f(c.csv, std::ios::binary);
  if (!f) throw sd::InputError("cannot write " + c.csv);
  writer(f);
}

sd::ScoreMatrix read_scores(const std::string& path, const std::optional<double>& threshold) {
  sd::ScoreMatrix m = sd::load_matrix(path);
  if (m.exceeds_missing_budget()) {
    std::cerr << "warning: " << path << " has " << sd::format_double(100.0 * m.missing_fraction())
              << "% missing cells; imputing model means\n";
  }
  if (m.has_missing()) m = sd::impute_missing(m);
  if (threshold) m = sd::binarize(m, {*threshold});
  return m;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---- ed ---------------------------------------------------------------

struct EdArgs {
  std::string matrix;
  std::string centering = "task";
  std::optional<double> binarize;
  std::size_t bootstrap = 1000;
  double level = 0.95;
  std::size_t null_replicates = 0;
  bool alternatives = false;
  bool tetrachoric = false;
};

void run_ed(const EdArgs& a, const Common& c) {
  const sd::ScoreMatrix m = read_scores(a.matrix, a.binarize);
  sd::EdReportOptions opt;
  opt.centering = sd::parse_centering(a.centering);
  opt.bootstrap_iterations = a.bootstrap;
  opt.level = a.level;
  opt.seed = c.seed;
  const sd::EdReport r = sd::ed_report(m, opt);
  sd::Json j = sd::to_json(r);
  j["input"] = {{"path", a.matrix}, {"fnv1a64", sd::file_digest(a.matrix)}};
  j["kind"] = m.kind() == sd::ScoreKind::binary ? "binary" : "continuous";
  if (a.null_replicates > 0) {
    const auto band = sd::permutation_null(m, a.null_replicates, c.seed);
    j["permutation_null"] = sd::to_json(band);
    j["significant_pcs"] = sd::significant_pcs(m, band);
  }
  if (a.alternatives) j["alternative_estimators"] = sd::to_json(sd::alternative_estimators(m, c.seed));
  if (a.tetrachoric) j["tetrachoric_ed"] = sd::tetrachoric_ed(m);
  emit(j, c);
  write_csv(c, [&](std::ostream& out) {
    const auto fractions = sd::singular_spectrum(sd::center(m, opt.centering)).variance_fractions();
    out << "rank,variance_fraction\n";
    for (std::size_t i = 0; i < fractions.size(); ++i) out << i + 1 << ',' << sd::format_double(fractions[i]) << '\n';
  });
}

// ---- corr -------------------------------------------------------------

struct CorrArgs {
  std::string input;
  std::string method = "spearman";
  std::optional<double> cluster_height;
  std::optional<std::size_t> cluster_groups;
  double redundant = 0.9;
  double vet = 0.7;
  double complementary = -0.3;
};

void run_corr(const CorrArgs& a, const Common& c) {
  const sd::CorrMethod method = sd::parse_corr_method(a.method);
  sd::CorrMatrix corr;
  if (method == sd::CorrMethod::tetrachoric) {
    corr = sd::tetrachoric_matrix(read_scores(a.input, std::nullopt));
  } else {
    const sd::LabeledTable t = sd::load_table(a.input);
    corr = sd::pairwise_correlation(t.row_ids, t.values, method);
  }
  sd::Json j;
  j["input"] = {{"path", a.input}, {"fnv1a64", sd::file_digest(a.input)}};
  j["correlation"] = sd::to_json(corr);
  j["undefined"] = corr.undefined_ids();
  j["flags"] = sd::to_json(sd::redundancy_flags(corr, {a.redundant, a.vet, a.complementary}));
  if (a.cluster_height) j["clusters"] = sd::to_json(sd::hierarchical_cluster(corr, sd::CutAtHeight{*a.cluster_height}));
  if (a.cluster_groups) j["clusters"] = sd::to_json(sd::hierarchical_cluster(corr, sd::CutToGroups{*a.cluster_groups}));
  emit(j, c);
  write_csv(c, [&](std::ostream& out) { sd::write_corr_csv(corr, out); });
}

// ---- ceiling ----------------------------------------------------------

void run_ceiling(double rho, std::size_t grid, const Common& c) {
  sd::Json j;
  j["rho"] = rho;
  j["ceiling"] = sd::composite_ceiling(rho);
  j["oracle"] = sd::to_json(sd::ceiling_oracle(rho, grid));
  emit(j, c);
}

// ---- workflow ---------------------------------------------------------

struct WorkflowArgs {
  std::string suite;
  std::string matrices;
  std::string series;
  std::string candidates;
  sd::WorkflowThresholds thresholds;
};

void run_workflow(const WorkflowArgs& a, const Common& c) {
  sd::WorkflowInputs in;
  if (!a.suite.empty()) in.suite = a.suite;
  if (!a.matrices.empty()) in.matrices_dir = a.matrices;
  if (!a.series.empty()) in.ed_series = a.series;
  if (!a.candidates.empty()) in.candidates = a.candidates;
  const sd::WorkflowReport r = sd::run_workflow(sd::load_workflow_inputs(in), a.thresholds, c.seed);
  std::cerr << sd::workflow_summary(r);
  emit(sd::to_json(r), c);
}

// ---- select -----------------------------------------------------------

struct SelectArgs {
  std::string matrix;
  std::string method = "ed_greedy";
  Eigen::Index k = 10;
  std::optional<double> binarize;
  std::string prospective_ks;
  double design_fraction = 0.6;
};

void run_select(const SelectArgs& a, const Common& c) {
  const sd::ScoreMatrix m = read_scores(a.matrix, a.binarize);
  if (!a.prospective_ks.empty()) {
    std::vector<sd::SelectionMethod> methods;
    for (const auto& name : split_list(a.method)) methods.push_back(sd::parse_selection_method(name));
    std::vector<Eigen::Index> ks;
    for (const auto& k : split_list(a.prospective_ks)) ks.push_back(std::stol(k));
    sd::Json j;
    j["design_fraction"] = a.design_fraction;
    j["seed"] = c.seed;
    j["rows"] = sd::to_json(sd::prospective_split_eval(m, a.design_fraction, methods, ks, c.seed));
    emit(j, c);
    return;
  }
  const auto r = sd::select_tasks(m, a.k, sd::parse_selection_method(a.method), c.seed);
  emit(sd::to_json(r), c);
  write_csv(c, [&](std::ostream& out) {
    out << "step,task_id,ed\n";
    for (std::size_t i = 0; i < r.selected.size(); ++i) {
      out << i + 1 << ',' << r.selected[i] << ',' << sd::format_double(r.ed_trajectory[i]) << '\n';
    }
  });
}

// ---- compress ---------------------------------------------------------

struct CompressArgs {
  std::string matrix;
  double target = 0.95;
  std::size_t trials = 20;
  std::optional<double> binarize;
  std::size_t submodularity = 0;
};

void run_compress(const CompressArgs& a, const Common& c) {
  const sd::ScoreMatrix m = read_scores(a.matrix, a.binarize);
  const auto curve = sd::compression_curve(m, a.target, a.trials, c.seed);
  sd::Json j = sd::to_json(curve);
  j["seed"] = c.seed;
  if (a.submodularity > 0) j["submodularity"] = sd::to_json(sd::submodularity_probe(m, a.submodularity, c.seed));
  emit(j, c);
  write_csv(c, [&](std::ostream& out) {
    out << "fraction,mean_tau\n";
    for (const auto& p : curve.curve) out << sd::format_double(p.fraction) << ',' << sd::format_double(p.mean_tau) << '\n';
  });
}

// ---- saturate ---------------------------------------------------------

struct SaturateArgs {
  std::string matrix;
  std::string points;
  std::string counts;
  std::size_t trials = 20;
};

std::vector<sd::SaturationPoint> read_points(const std::string& path) {
  const sd::EdSeries s = sd::load_series(path);
  std::vector<sd::SaturationPoint> pts;
  for (std::size_t i = 0; i < s.x.size(); ++i) pts.push_back({s.x[i], s.ed[i], 0.0});
  return pts;
}

void run_saturate(const SaturateArgs& a, const Common& c) {
  std::vector<sd::SaturationPoint> pts;
  if (!a.points.empty()) {
    pts = read_points(a.points);
  } else {
    if (a.matrix.empty()) throw sd::InputError("saturate: give a matrix or --points");
    const sd::ScoreMatrix m = read_scores(a.matrix, std::nullopt);
    std::vector<Eigen::Index> counts;
    if (a.counts.empty()) {
      for (Eigen::Index n = 10; n < m.model_count(); n += 10) counts.push_back(n);
      counts.push_back(m.model_count());
    } else {
      for (const auto& v : split_list(a.counts)) counts.push_back(std::stol(v));
    }
    pts = sd::ed_vs_model_count(m, counts, a.trials, c.seed);
  }
  sd::Json j;
  j["seed"] = c.seed;
  j["points"] = sd::to_json(pts);
  j["fit"] = sd::to_json(sd::saturation_fit(pts));
  emit(j, c);
  write_csv(c, [&](std::ostream& out) {
    out << "x,ed\n";
    for (const auto& p : pts) out << sd::format_double(p.n) << ',' << sd::format_double(p.ed) << '\n';
  });
}

// ---- trend ------------------------------------------------------------

struct TrendArgs {
  std::string series;
  std::string suite;
  std::size_t window = 500;
  std::size_t step = 200;
  bool raw = false;
  std::optional<std::size_t> from;
  std::optional<std::size_t> to;
  bool sort = false;
};

void run_trend(const TrendArgs& a, const Common& c) {
  sd::EdSeries s;
  if (!a.series.empty()) {
    s = sd::load_series(a.series);
  } else {
    if (a.suite.empty()) throw sd::InputError("trend: give an ED series or --suite");
    sd::SuiteScores suite = sd::load_suite(a.suite);
    if (a.sort) suite = sd::sort_models_by_composite(suite);
    if (a.from || a.to) {
      const std::size_t lo = a.from.value_or(0);
      const std::size_t hi = std::min(a.to.value_or(static_cast<std::size_t>(suite.model_count())),
                                      static_cast<std::size_t>(suite.model_count()));
      if (lo >= hi) throw sd::InputError("trend: empty model range");
      std::vector<Eigen::Index> cols;
      for (std::size_t i = lo; i < hi; ++i) cols.push_back(static_cast<Eigen::Index>(i));
      suite = suite.select_models(cols);
    }
    s = sd::sliding_window_ed(suite, a.window, a.step, !a.raw);
  }
  sd::Json j;
  j["series"] = sd::to_json(s);
  j["mann_kendall"] = sd::to_json(sd::mann_kendall(s.ed));
  if (s.x.size() >= 2) j["temporal_information_density"] = sd::to_json(sd::temporal_information_density(s));
  emit(j, c);
  write_csv(c, [&](std::ostream& out) { sd::write_series_csv(s, out); });
}

// ---- synth ------------------------------------------------------------

struct SynthArgs {
  sd::IrtSpec spec;
  std::string iid;
  double p = 0.5;
  bool rank_recovery = false;
  std::string ks = "1,2,3,5,10,20";
  std::size_t seeds = 10;
  std::string format = "csv";
};

void run_synth(SynthArgs a, const Common& c) {
  if (a.rank_recovery) {
    sd::RankRecoveryOptions opt;
    opt.ks.clear();
    for (const auto& k : split_list(a.ks)) opt.ks.push_back(std::stol(k));
    opt.seeds = a.seeds;
    opt.tasks = a.spec.tasks;
    opt.models = a.spec.models;
    opt.discrimination_scale = a.spec.discrimination_scale;
    opt.difficulty_spread = a.spec.difficulty_spread;
    opt.base_seed = c.seed;
    emit(sd::to_json(sd::rank_recovery_report(opt)), c);
    return;
  }
  sd::LabeledTable table;
  if (!a.iid.empty()) {
    const auto kind = a.iid == "gaussian"    ? sd::IidKind::gaussian
                      : a.iid == "bernoulli" ? sd::IidKind::bernoulli
                                             : throw sd::InputError("unknown --iid kind '" + a.iid + "'");
    table = sd::gen_iid_matrix(a.spec.tasks, a.spec.models, kind, a.p, c.seed);
  } else {
    a.spec.seed = c.seed;
    table = sd::table_from_matrix(sd::gen_irt_matrix(a.spec));
  }
  if (a.format == "json") {
    emit(sd::table_to_json(table), c);
  } else if (a.format == "csv") {
    std::ostringstream out;
    sd::write_table_csv(table, out);
    emit_text(out.str(), c);
  } else {
    throw sd::InputError("unknown --format '" + a.format + "'");
  }
}

// ---- suite ------------------------------------------------------------

struct SuiteArgs {
  std::string suite;
  double alpha = 1.0;
  std::size_t samples = 10000;
  std::size_t subset_size = 0;
};

void run_suite(const SuiteArgs& a, const Common& c) {
  const sd::SuiteScores s = sd::load_suite(a.suite);
  const double ed = sd::suite_ed(s);
  const auto ranking = sd::equal_weight_ranking(s);
  sd::Json j;
  j["input"] = {{"path", a.suite}, {"fnv1a64", sd::file_digest(a.suite)}};
  j["benchmarks"] = s.benchmark_count();
  j["models"] = s.model_count();
  j["suite_ed"] = ed;
  j["information_density"] = sd::information_density(ed, static_cast<std::size_t>(s.benchmark_count()));
  j["ranking"] = sd::to_json(ranking);
  j["fragility"] = sd::to_json(sd::dirichlet_fragility(s, a.alpha, a.samples, c.seed));
  if (s.benchmark_count() >= 2) j["leave_one_out"] = sd::to_json(sd::leave_one_out(s));
  if (a.subset_size > 0) j["subset_search"] = sd::to_json(sd::best_subset_search(s, a.subset_size));
  emit(j, c);
  write_csv(c, [&](std::ostream& out) {
    out << "rank,model,composite\n";
    for (std::size_t i = 0; i < ranking.order.size(); ++i) {
      out << i + 1 << ',' << ranking.order[i] << ',' << sd::format_double(ranking.composite[i]) << '\n';
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral diagnostics for benchmark score matrices"};
  app.set_version_flag("--version", std::string(sd::tool_version()));
  app.require_subcommand(1);

  Common common;

  EdArgs ed;
  auto* ed_cmd = app.add_subcommand("ed", "Effective dimensionality report for a tasks x models matrix");
  ed_cmd->add_option("matrix", ed.matrix, "Score matrix (CSV or JSON)")->required();
  ed_cmd->add_option("--centering", ed.centering, "task, model, double or none")->capture_default_str();
  ed_cmd->add_option("--binarize", ed.binarize, "Binarize at this threshold (score > t)");
  ed_cmd->add_option("--bootstrap", ed.bootstrap, "Bootstrap iterations")->capture_default_str();
  ed_cmd->add_option("--level", ed.level, "Interval level")->capture_default_str();
  ed_cmd->add_option("--null-replicates", ed.null_replicates, "Permutation-null replicates (0 = skip)");
  ed_cmd->add_flag("--alternatives", ed.alternatives, "Add classical retention-rule estimates");
  ed_cmd->add_flag("--tetrachoric", ed.tetrachoric, "Add tetrachoric ED (binary input)");
  add_common(ed_cmd, common);

  CorrArgs corr;
  auto* corr_cmd = app.add_subcommand("corr", "Correlation matrix between the rows of a table");
  corr_cmd->add_option("input", corr.input, "Table whose rows are correlated (tetrachoric: models of a binary matrix)")
      ->required();
  corr_cmd->add_option("--method", corr.method, "pearson, spearman, kendall or tetrachoric")->capture_default_str();
  corr_cmd->add_option("--cluster-height", corr.cluster_height, "Cut the average-linkage tree below this distance");
  corr_cmd->add_option("--cluster-groups", corr.cluster_groups, "Cut the tree into this many groups");
  corr_cmd->add_option("--redundant", corr.redundant, "Redundancy threshold")->capture_default_str();
  corr_cmd->add_option("--vet", corr.vet, "Vetting threshold")->capture_default_str();
  corr_cmd->add_option("--complementary", corr.complementary, "Complementarity threshold")->capture_default_str();
  add_common(corr_cmd, common);

  double rho = 0.0;
  std::size_t grid = 10000;
  auto* ceiling_cmd = app.add_subcommand("ceiling", "Composite correlation ceiling for two benchmarks");
  ceiling_cmd->add_option("--rho", rho, "Correlation between the two benchmarks")->required();
  ceiling_cmd->add_option("--grid", grid, "Oracle grid size")->capture_default_str();
  add_common(ceiling_cmd, common, false);

  WorkflowArgs wf;
  auto* wf_cmd = app.add_subcommand("workflow", "Four-step suite maintenance report");
  wf_cmd->add_option("--suite", wf.suite, "Benchmarks x models scores");
  wf_cmd->add_option("--matrices", wf.matrices, "Directory of per-benchmark task matrices");
  wf_cmd->add_option("--series", wf.series, "ED series CSV (x,ed)");
  wf_cmd->add_option("--candidates", wf.candidates, "Candidate benchmarks x models scores");
  wf_cmd->add_option("--redundant", wf.thresholds.redundant, "Redundancy threshold")->capture_default_str();
  wf_cmd->add_option("--vet", wf.thresholds.vet, "Vetting threshold")->capture_default_str();
  wf_cmd->add_option("--complementary", wf.thresholds.complementary, "Complementarity threshold")
      ->capture_default_str();
  wf_cmd->add_option("--ed-floor", wf.thresholds.ed_floor, "One-dimensional verdict below this ED")
      ->capture_default_str();
  wf_cmd->add_option("--alpha", wf.thresholds.alpha, "Trend significance level")->capture_default_str();
  add_common(wf_cmd, common, false);

  SelectArgs sel;
  auto* sel_cmd = app.add_subcommand("select", "Task selection");
  sel_cmd->add_option("matrix", sel.matrix, "Score matrix")->required();
  sel_cmd->add_option("--method", sel.method,
                      "ed_greedy, random, max_variance, irt_discrimination, k_medoids, two_stage "
                      "(comma list with --prospective)")
      ->capture_default_str();
  sel_cmd->add_option("--k", sel.k, "Tasks to select")->capture_default_str();
  sel_cmd->add_option("--binarize", sel.binarize, "Binarize at this threshold");
  sel_cmd->add_option("--prospective", sel.prospective_ks, "Comma list of k for the design/future cohort split");
  sel_cmd->add_option("--design-fraction", sel.design_fraction, "Design cohort fraction")->capture_default_str();
  add_common(sel_cmd, common);

  CompressArgs comp;
  auto* comp_cmd = app.add_subcommand("compress", "Ranking-fidelity compression curve");
  comp_cmd->add_option("matrix", comp.matrix, "Score matrix")->required();
  comp_cmd->add_option("--target", comp.target, "Kendall tau target")->capture_default_str();
  comp_cmd->add_option("--trials", comp.trials, "Random subsets per fraction")->capture_default_str();
  comp_cmd->add_option("--binarize", comp.binarize, "Binarize at this threshold");
  comp_cmd->add_option("--submodularity", comp.submodularity, "Submodularity probe samples (0 = skip)");
  add_common(comp_cmd, common);

  SaturateArgs sat;
  auto* sat_cmd = app.add_subcommand("saturate", "ED saturation curve fit");
  sat_cmd->add_option("matrix", sat.matrix, "Score matrix to subsample");
  sat_cmd->add_option("--points", sat.points, "Precomputed points as CSV (x = model count, ed)");
  sat_cmd->add_option("--counts", sat.counts, "Comma list of model counts");
  sat_cmd->add_option("--trials", sat.trials, "Subsets per count")->capture_default_str();
  add_common(sat_cmd, common);

  TrendArgs tr;
  auto* tr_cmd = app.add_subcommand("trend", "Mann-Kendall trend of an ED series");
  tr_cmd->add_option("series", tr.series, "ED series CSV (x,ed)");
  tr_cmd->add_option("--suite", tr.suite, "Compute the series from suite scores instead");
  tr_cmd->add_option("--window", tr.window, "Models per window")->capture_default_str();
  tr_cmd->add_option("--step", tr.step, "Window step")->capture_default_str();
  tr_cmd->add_flag("--raw", tr.raw, "Skip per-window standardization");
  tr_cmd->add_flag("--sort", tr.sort, "Order models by equal-weight composite first");
  tr_cmd->add_option("--from", tr.from, "First model position (after sorting)");
  tr_cmd->add_option("--to", tr.to, "One past the last model position");
  add_common(tr_cmd, common);

  SynthArgs syn;
  auto* syn_cmd = app.add_subcommand("synth", "Synthetic IRT or i.i.d. matrices");
  syn_cmd->add_option("--k", syn.spec.k, "Latent dimensions")->capture_default_str();
  syn_cmd->add_option("--tasks", syn.spec.tasks, "Tasks")->capture_default_str();
  syn_cmd->add_option("--models", syn.spec.models, "Models")->capture_default_str();
  syn_cmd->add_option("--scale", syn.spec.discrimination_scale, "Discrimination scale")->capture_default_str();
  syn_cmd->add_option("--spread", syn.spec.difficulty_spread, "Difficulty spread")->capture_default_str();
  syn_cmd->add_flag("--positive", syn.spec.positive_loadings, "Positive-orthant loadings");
  syn_cmd->add_option("--log-sd", syn.spec.discrimination_log_sd, "Per-task log discrimination sd");
  syn_cmd->add_option("--iid", syn.iid, "gaussian or bernoulli instead of IRT");
  syn_cmd->add_option("--p", syn.p, "Bernoulli probability")->capture_default_str();
  syn_cmd->add_option("--format", syn.format, "csv or json")->capture_default_str();
  syn_cmd->add_flag("--rank-recovery", syn.rank_recovery, "Run the rank-recovery harness instead");
  syn_cmd->add_option("--ks", syn.ks, "k values for --rank-recovery")->capture_default_str();
  syn_cmd->add_option("--seeds", syn.seeds, "Seeds for --rank-recovery")->capture_default_str();
  add_common(syn_cmd, common, false);

  SuiteArgs suite;
  auto* suite_cmd = app.add_subcommand("suite", "Suite ED, composite ranking and weight fragility");
  suite_cmd->add_option("suite", suite.suite, "Benchmarks x models scores")->required();
  suite_cmd->add_option("--alpha", suite.alpha, "Dirichlet concentration")->capture_default_str();
  suite_cmd->add_option("--samples", suite.samples, "Dirichlet weight draws")->capture_default_str();
  suite_cmd->add_option("--subset-size", suite.subset_size, "Exhaustive subset search size (0 = skip)");
  add_common(suite_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (common.threads > 0) sd::set_worker_count(common.threads);
    if (ed_cmd->parsed()) run_ed(ed, common);
    if (corr_cmd->parsed()) run_corr(corr, common);
    if (ceiling_cmd->parsed()) run_ceiling(rho, grid, common);
    if (wf_cmd->parsed()) run_workflow(wf, common);
    if (sel_cmd->parsed()) run_select(sel, common);
    if (comp_cmd->parsed()) run_compress(comp, common);
    if (sat_cmd->parsed()) run_saturate(sat, common);
    if (tr_cmd->parsed()) run_trend(tr, common);
    if (syn_cmd->parsed()) run_synth(syn, common);
    if (suite_cmd->parsed()) run_suite(suite, common);
  } catch (const sd::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sd::AnalysisError& e) {
    std::cerr << "rejected: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad number in list: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
