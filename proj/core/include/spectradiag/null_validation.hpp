#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spectradiag/association.hpp"
#include "spectradiag/matrix_io.hpp"
#include "spectradiag/spectral.hpp"

namespace spectradiag {

/// Analytic participation ratio of an i.i.d. T x N matrix: TN / (T + N).
double mp_null_ed(Eigen::Index tasks, Eigen::Index models);

/// within_task permutes each task row across models (keeps task difficulty);
/// within_model permutes each model column across tasks.
enum class ShuffleAxis { within_task, within_model };

struct NullSpectrumBand {
  std::vector<double> upper;  ///< per-rank quantile of replicate variance fractions
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double quantile = 0.95;
  ShuffleAxis axis = ShuffleAxis::within_task;
};

NullSpectrumBand permutation_null(const ScoreMatrix& m, std::size_t replicates = 100, std::uint64_t seed = 0,
                                  ShuffleAxis axis = ShuffleAxis::within_task, double quantile = 0.95);

/// Largest r such that the observed variance fractions of ranks 1..r all
/// exceed the band.
std::size_t significant_pcs(const ScoreMatrix& m, const NullSpectrumBand& band);

/// Percentile interval of ED over model-column bootstrap resamples.
/// Resamples whose centered matrix vanishes are skipped.
Interval bootstrap_ed_ci(const ScoreMatrix& m, std::size_t iterations = 1000, double level = 0.95,
                         std::uint64_t seed = 0, Centering scheme = Centering::task);

struct EdReport {
  double ed = 0.0;
  double pc1_pct = 0.0;  ///< percent, 0-100
  double ed_null = 0.0;
  double ratio = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Eigen::Index tasks = 0;
  Eigen::Index models = 0;
  std::uint64_t seed = 0;
  std::size_t bootstrap_iterations = 0;
  double level = 0.95;
  Centering centering = Centering::task;
};

struct EdReportOptions {
  Centering centering = Centering::task;
  std::size_t bootstrap_iterations = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

/// ED, PC1%, null ED and bootstrap interval for one matrix. The interval is
/// widened to contain the point estimate when the percentile interval misses it.
EdReport ed_report(const ScoreMatrix& m, const EdReportOptions& options = {});

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// ED over random tasks x models subsamples (indices kept in original order).
MeanSd matched_dimension_ed(const ScoreMatrix& m, Eigen::Index tasks, Eigen::Index models, std::size_t trials = 30,
                            std::uint64_t seed = 0);

/// For each of the k leading components, the mean absolute correlation of
/// task loadings between two random model halves (greedy matching).
std::vector<double> split_half_reliability(const ScoreMatrix& m, std::size_t splits, Eigen::Index k,
                                           std::uint64_t seed = 0);

/// Orientation-free ROC AUC of labels ranked by scores; ties count one half.
double pc_metadata_auc(std::span<const double> scores, const std::vector<bool>& labels);

struct AlternativeEstimates {
  std::size_t parallel_analysis = 0;
  std::size_t kaiser = 0;
  std::size_t broken_stick = 0;
  std::size_t var80 = 0;
  std::size_t var90 = 0;
};

/// Classical retention rules on the model x model correlation matrix.
/// Models with constant scores are skipped.
AlternativeEstimates alternative_estimators(const ScoreMatrix& m, std::uint64_t seed = 0,
                                            std::size_t pa_replicates = 20);

}  // namespace spectradiag
