#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spectradiag/association.hpp"
#include "spectradiag/composite.hpp"
#include "spectradiag/temporal.hpp"

namespace spectradiag {

std::string_view tool_version();

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

struct WorkflowThresholds {
  double redundant = 0.9;
  double vet = 0.7;
  double complementary = -0.3;
  double ed_floor = 2.0;  ///< suites below this ED are effectively one-dimensional
  double alpha = 0.05;    ///< trend significance level
};

struct WorkflowInputs {
  std::optional<std::filesystem::path> suite;        ///< benchmarks x models scores
  std::optional<std::filesystem::path> matrices_dir;  ///< per-benchmark task x model matrices
  std::optional<std::filesystem::path> ed_series;     ///< `x,ed` CSV
  std::optional<std::filesystem::path> candidates;    ///< candidate benchmarks x models
};

struct NamedMatrix {
  std::string name;
  ScoreMatrix matrix;
};

struct WorkflowData {
  std::optional<SuiteScores> suite;
  std::vector<NamedMatrix> matrices;  ///< sorted by name
  std::optional<EdSeries> series;
  std::optional<SuiteScores> candidates;
  std::vector<std::pair<std::string, std::string>> digests;  ///< input path, FNV-1a
};

/// Reads every supplied input. Matrix files (*.csv, *.json) in the directory
/// are loaded in name order; missing cells are imputed.
WorkflowData load_workflow_inputs(const WorkflowInputs& inputs);

enum class StepStatus { ok, skipped, failed };
std::string_view to_string(StepStatus status);

struct StepInfo {
  StepStatus status = StepStatus::skipped;
  std::string reason;  ///< why skipped or failed
};

struct RedundancyStep {
  StepInfo info;
  RedundancyFlags flags;
  std::vector<std::string> benchmarks;
};

struct BenchmarkEd {
  std::string name;
  Eigen::Index tasks = 0;
  Eigen::Index models = 0;
  double ed = 0.0;
  double ed_null = 0.0;
  double ratio = 0.0;
};

struct DimensionStep {
  StepInfo info;
  double suite_ed = 0.0;
  std::size_t benchmarks = 0;
  double information_density = 0.0;
  std::string verdict;
  std::vector<BenchmarkEd> per_benchmark;
};

struct TrendStep {
  StepInfo info;
  MannKendall trend;
  std::string verdict;
};

struct CandidateVet {
  std::string candidate;
  std::string nearest;  ///< existing benchmark with the largest rho
  double max_rho = 0.0;
  std::size_t shared_models = 0;
  bool pass = false;
};

struct VetStep {
  StepInfo info;
  std::vector<CandidateVet> candidates;
};

struct WorkflowReport {
  RedundancyStep step1;
  DimensionStep step2;
  TrendStep step3;
  VetStep step4;
  WorkflowThresholds thresholds;
  std::string version;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> digests;
};

inline constexpr std::string_view kOneDimensionalVerdict = "effectively one-dimensional";
inline constexpr std::string_view kMultiDimensionalVerdict = "multidimensional";
inline constexpr std::string_view kDecliningVerdict = "declining";
inline constexpr std::string_view kRisingVerdict = "rising";
inline constexpr std::string_view kNoTrendVerdict = "no significant trend";

/// Runs the four maintainer checks; steps without inputs are skipped and
/// steps whose analysis fails are marked failed, without stopping the others.
WorkflowReport run_workflow(const WorkflowData& data, const WorkflowThresholds& thresholds = {},
                            std::uint64_t seed = 0);

/// Short human-readable digest of a report.
std::string workflow_summary(const WorkflowReport& report);

}  // namespace spectradiag
