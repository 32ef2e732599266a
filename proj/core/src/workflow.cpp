#include "spectradiag/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "spectradiag/error.hpp"
#include "spectradiag/null_validation.hpp"
#include "spectradiag/spectral.hpp"

#ifndef SPECTRADIAG_VERSION
#define SPECTRADIAG_VERSION "0.0.0"
#endif

namespace spectradiag {
namespace {

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<double> row_of(const Eigen::MatrixXd& m, Eigen::Index r) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m(r, c);
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void run_step1(const WorkflowData& data, const WorkflowThresholds& th, RedundancyStep& step) {
  if (!data.suite) {
    step.info = {StepStatus::skipped, "no suite scores supplied"};
    return;
  }
  const SuiteScores& s = *data.suite;
  step.benchmarks = s.benchmark_ids();
  if (s.benchmark_count() < 2) {
    step.info = {StepStatus::skipped, "suite has a single benchmark"};
    return;
  }
  const CorrMatrix c = pairwise_correlation(s.benchmark_ids(), s.scores(), CorrMethod::spearman);
  step.flags = redundancy_flags(c, {th.redundant, th.vet, th.complementary});
  step.info = {StepStatus::ok, ""};
}

void run_step2(const WorkflowData& data, const WorkflowThresholds& th, DimensionStep& step) {
  for (const auto& nm : data.matrices) {
    BenchmarkEd b;
    b.name = nm.name;
    b.tasks = nm.matrix.task_count();
    b.models = nm.matrix.model_count();
    b.ed = try_matrix_ed(center(nm.matrix, Centering::task)).value_or(0.0);
    b.ed_null = mp_null_ed(b.tasks, b.models);
    b.ratio = b.ed / b.ed_null;
    step.per_benchmark.push_back(b);
  }
  if (!data.suite) {
    step.info = {StepStatus::skipped, "no suite scores supplied"};
    return;
  }
  const SuiteScores& s = *data.suite;
  step.benchmarks = static_cast<std::size_t>(s.benchmark_count());
  step.suite_ed = suite_ed(s);
  step.information_density = information_density(step.suite_ed, step.benchmarks);
  step.verdict = std::string(step.suite_ed < th.ed_floor ? kOneDimensionalVerdict : kMultiDimensionalVerdict);
  step.info = {StepStatus::ok, ""};
}

void run_step3(const WorkflowData& data, const WorkflowThresholds& th, TrendStep& step) {
  if (!data.series) {
    step.info = {StepStatus::skipped, "no ED series supplied"};
    return;
  }
  step.trend = mann_kendall(data.series->ed);
  if (step.trend.p < th.alpha && step.trend.tau < 0.0) {
    step.verdict = std::string(kDecliningVerdict);
  } else if (step.trend.p < th.alpha && step.trend.tau > 0.0) {
    step.verdict = std::string(kRisingVerdict);
  } else {
    step.verdict = std::string(kNoTrendVerdict);
  }
  step.info = {StepStatus::ok, ""};
}

void run_step4(const WorkflowData& data, const WorkflowThresholds& th, VetStep& step) {
  if (!data.candidates) {
    step.info = {StepStatus::skipped, "no candidate benchmarks supplied"};
    return;
  }
  if (!data.suite) {
    step.info = {StepStatus::skipped, "no suite scores to vet against"};
    return;
  }
  const SuiteScores& s = *data.suite;
  const SuiteScores& cand = *data.candidates;
  // Models scored on both the suite and the candidates, in suite order.
  std::vector<Eigen::Index> suite_cols;
  std::vector<Eigen::Index> cand_cols;
  for (std::size_t j = 0; j < s.model_ids().size(); ++j) {
    const auto& ids = cand.model_ids();
    const auto it = std::find(ids.begin(), ids.end(), s.model_ids()[j]);
    if (it == ids.end()) continue;
    suite_cols.push_back(static_cast<Eigen::Index>(j));
    cand_cols.push_back(static_cast<Eigen::Index>(it - ids.begin()));
  }
  if (suite_cols.size() < 3) throw InputError("candidates share fewer than 3 models with the suite");
  const SuiteScores shared_suite = s.select_models(suite_cols);
  const SuiteScores shared_cand = cand.select_models(cand_cols);

  for (Eigen::Index c = 0; c < shared_cand.benchmark_count(); ++c) {
    CandidateVet v;
    v.candidate = shared_cand.benchmark_ids()[static_cast<std::size_t>(c)];
    v.shared_models = suite_cols.size();
    v.max_rho = -std::numeric_limits<double>::infinity();
    const auto x = row_of(shared_cand.scores(), c);
    for (Eigen::Index b = 0; b < shared_suite.benchmark_count(); ++b) {
      const auto rho = spearman(x, row_of(shared_suite.scores(), b));
      if (rho && *rho > v.max_rho) {
        v.max_rho = *rho;
        v.nearest = shared_suite.benchmark_ids()[static_cast<std::size_t>(b)];
      }
    }
    if (v.nearest.empty()) {
      throw AnalysisError("candidate '" + v.candidate + "' has no defined correlation with the suite");
    }
    v.pass = v.max_rho < th.vet;
    step.candidates.push_back(v);
  }
  step.info = {StepStatus::ok, ""};
}

template <typename Step, typename Fn>
void guarded(Step& step, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    step.info = {StepStatus::failed, e.what()};
  }
}

std::optional<SuiteScores> maybe_suite(const std::optional<std::filesystem::path>& path, WorkflowData& data) {
  if (!path) return std::nullopt;
  data.digests.emplace_back(path->string(), file_digest(*path));
  return load_suite(*path);
}

}  // namespace

std::string_view tool_version() { return SPECTRADIAG_VERSION; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) { return fnv1a_hex(read_bytes(path)); }

WorkflowData load_workflow_inputs(const WorkflowInputs& inputs) {
  WorkflowData data;
  data.suite = maybe_suite(inputs.suite, data);
  if (inputs.matrices_dir) {
    if (!std::filesystem::is_directory(*inputs.matrices_dir)) {
      throw InputError("not a directory: " + inputs.matrices_dir->string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(*inputs.matrices_dir)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".csv" || ext == ".json")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      data.digests.emplace_back(f.string(), file_digest(f));
      ScoreMatrix m = load_matrix(f);
      if (m.has_missing()) m = impute_missing(m);
      data.matrices.push_back({f.stem().string(), std::move(m)});
    }
  }
  if (inputs.ed_series) {
    data.digests.emplace_back(inputs.ed_series->string(), file_digest(*inputs.ed_series));
    data.series = load_series(*inputs.ed_series);
  }
  data.candidates = maybe_suite(inputs.candidates, data);
  return data;
}

std::string_view to_string(StepStatus status) {
  switch (status) {
    case StepStatus::ok: return "ok";
    case StepStatus::skipped: return "skipped";
    case StepStatus::failed: return "failed";
  }
  return "unknown";
}

WorkflowReport run_workflow(const WorkflowData& data, const WorkflowThresholds& thresholds, std::uint64_t seed) {
  WorkflowReport r;
  r.thresholds = thresholds;
  r.version = std::string(tool_version());
  r.seed = seed;
  r.digests = data.digests;
  guarded(r.step1, [&] { run_step1(data, thresholds, r.step1); });
  guarded(r.step2, [&] { run_step2(data, thresholds, r.step2); });
  guarded(r.step3, [&] { run_step3(data, thresholds, r.step3); });
  guarded(r.step4, [&] { run_step4(data, thresholds, r.step4); });
  return r;
}

std::string workflow_summary(const WorkflowReport& r) {
  std::ostringstream out;
  auto status_line = [&](const char* name, const StepInfo& info) {
    out << name << ": " << to_string(info.status);
    if (!info.reason.empty()) out << " (" << info.reason << ")";
    out << '\n';
  };
  status_line("step 1 redundancy", r.step1.info);
  if (r.step1.info.status == StepStatus::ok) {
    for (const auto& p : r.step1.flags.redundant) {
      out << "  redundant: " << p.first << " ~ " << p.second << " rho=" << fixed(p.rho, 3) << '\n';
    }
    for (const auto& p : r.step1.flags.complementary) {
      out << "  complementary: " << p.first << " ~ " << p.second << " rho=" << fixed(p.rho, 3) << '\n';
    }
  }
  status_line("step 2 dimensionality", r.step2.info);
  if (r.step2.info.status == StepStatus::ok) {
    out << "  suite ED=" << fixed(r.step2.suite_ed, 2) << " over " << r.step2.benchmarks
        << " benchmarks, ID=" << fixed(r.step2.information_density, 3) << ", " << r.step2.verdict << '\n';
  }
  for (const auto& b : r.step2.per_benchmark) {
    out << "  " << b.name << ": ED=" << fixed(b.ed, 2) << " null=" << fixed(b.ed_null, 2) << '\n';
  }
  status_line("step 3 trend", r.step3.info);
  if (r.step3.info.status == StepStatus::ok) {
    out << "  tau=" << fixed(r.step3.trend.tau, 3) << " p=" << fixed(r.step3.trend.p, 4) << ", " << r.step3.verdict
        << '\n';
  }
  status_line("step 4 vetting", r.step4.info);
  for (const auto& c : r.step4.candidates) {
    out << "  " << c.candidate << ": max rho=" << fixed(c.max_rho, 3) << " vs " << c.nearest << ", "
        << (c.pass ? "pass" : "fail") << '\n';
  }
  return out.str();
}

}  // namespace spectradiag
