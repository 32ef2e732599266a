#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spectradiag/matrix_io.hpp"

namespace spectradiag {

enum class SelectionMethod { ed_greedy, random, max_variance, irt_discrimination, k_medoids, two_stage };

std::string_view to_string(SelectionMethod method);
SelectionMethod parse_selection_method(std::string_view name);

struct SelectionResult {
  SelectionMethod method = SelectionMethod::ed_greedy;
  std::vector<std::string> selected;  ///< in selection order
  std::vector<double> ed_trajectory;  ///< ED after each addition
  double tau_vs_full = 0.0;
  std::uint64_t seed = 0;
};

/// Greedy maximization of the task-centered ED. Each step adds the task with
/// the largest ED(S + t); ties (within 1e-12 relative) go to the higher task
/// variance, then the smaller task id. Tasks with zero variance are only
/// picked once no other candidate remains. Requires a complete matrix.
SelectionResult ed_greedy(const ScoreMatrix& m, Eigen::Index k);

struct BaselineParams {
  std::size_t max_swaps = 50;  ///< k-medoids swap iterations
};

/// Dispatches to ed_greedy or one of the comparison selectors.
SelectionResult select_tasks(const ScoreMatrix& m, Eigen::Index k, SelectionMethod method, std::uint64_t seed = 0,
                             BaselineParams params = {});

/// Point-biserial correlation of each task with the model mean score; zero
/// for tasks that do not vary.
std::vector<double> task_discrimination(const ScoreMatrix& m);

/// ED after each prefix of `order`, computed on task-centered rows.
std::vector<double> ed_trajectory(const ScoreMatrix& m, std::span<const Eigen::Index> order);

/// Tau-b between model rankings by mean score on the selected tasks and on
/// all tasks. When either mean vector is constant the result is 1 if both
/// are, else 0.
double ranking_fidelity(const ScoreMatrix& m, std::span<const Eigen::Index> selected);
double ranking_fidelity(const ScoreMatrix& m, const std::vector<std::string>& selected);

struct CompressionPoint {
  double fraction = 0.0;
  Eigen::Index tasks = 0;
  double mean_tau = 0.0;
};

struct CompressionCurve {
  double fraction_needed = 1.0;
  bool reached = false;  ///< false when no fraction meets the target
  double tau_target = 0.95;
  std::vector<CompressionPoint> curve;
};

inline constexpr double kCompressionFractions[] = {0.01, 0.02, 0.05, 0.08, 0.1, 0.15, 0.2, 0.25,
                                                   0.3,  0.4,  0.5,  0.6,  0.7, 0.8,  0.9, 1.0};

CompressionCurve compression_curve(const ScoreMatrix& m, double tau_target = 0.95, std::size_t trials = 20,
                                   std::uint64_t seed = 0);

struct SubmodularityProbe {
  double median_gamma = 0.0;
  double min_gamma = 0.0;
  std::size_t valid = 0;
  std::size_t negative_numerator = 0;  ///< excluded from gamma
  double below_one_fraction = 0.0;     ///< among valid samples
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Submodularity ratios over random nested pairs S within S'. Throws
/// AnalysisError when fewer than 10 samples are valid.
SubmodularityProbe submodularity_probe(const ScoreMatrix& m, std::size_t samples = 200, std::uint64_t seed = 0);

struct ProspectiveRow {
  SelectionMethod method = SelectionMethod::ed_greedy;
  Eigen::Index k = 0;
  double train_tau = 0.0;
  double test_tau = 0.0;
  double gap = 0.0;  ///< test - train
};

/// Models sorted by mean score; selection on the lowest design_fraction,
/// fidelity measured on both cohorts. Each cohort needs at least 5 models.
std::vector<ProspectiveRow> prospective_split_eval(const ScoreMatrix& m, double design_fraction,
                                                   const std::vector<SelectionMethod>& methods,
                                                   const std::vector<Eigen::Index>& ks, std::uint64_t seed = 0);

}  // namespace spectradiag
