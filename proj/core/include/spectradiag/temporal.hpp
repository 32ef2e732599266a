#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spectradiag/association.hpp"
#include "spectradiag/composite.hpp"
#include "spectradiag/matrix_io.hpp"

namespace spectradiag {

struct EdSeries {
  std::vector<double> x;  ///< window center, model count or cumulative agents
  std::vector<double> ed;
  std::size_t window = 0;
  std::size_t step = 0;
  bool standardized = false;

  /// Throws InputError on unequal lengths or non-increasing x.
  void validate() const;
};

/// Two-column CSV with header `x,ed`.
void write_series_csv(const EdSeries& s, std::ostream& out);
EdSeries read_series_csv(std::istream& in, std::string_view source = "<stream>");
EdSeries load_series(const std::filesystem::path& path);

/// Models reordered by ascending equal-weight composite (ties by id).
SuiteScores sort_models_by_composite(const SuiteScores& s);

/// Suite ED over windows of consecutive models; x is the window center
/// (0-based model position). With standardize each benchmark is z-scored
/// within the window, otherwise only centered.
EdSeries sliding_window_ed(const SuiteScores& s, std::size_t window = 500, std::size_t step = 200,
                           bool standardize = true);

/// Task-centered ED over windows of consecutive model columns.
EdSeries sliding_window_ed(const ScoreMatrix& m, std::size_t window, std::size_t step);

struct MannKendall {
  double s = 0.0;
  double tau = 0.0;
  double p = 1.0;         ///< two-sided
  double variance = 0.0;  ///< tie-corrected Var(S)
  bool exact = false;     ///< p from the exact permutation distribution
  std::size_t n = 0;
};

/// Exact p-values for n <= 10, otherwise the normal approximation with
/// continuity correction. Requires at least 4 values.
MannKendall mann_kendall(std::span<const double> series);

struct SaturationFit {
  double ed_inf = 0.0;
  double n_half = 0.0;
  double rss = 0.0;
  bool boundary = false;  ///< n_half collapsed to 0 (flat series)
  std::size_t iterations = 0;
};

struct SaturationPoint {
  double n = 0.0;
  double ed = 0.0;
  double sd = 0.0;
};

/// Fits ED(n) = ed_inf * n / (n + n_half): linearized least squares, then
/// Gauss-Newton on the original scale. Throws AnalysisError when a fitted
/// parameter is not positive.
SaturationFit saturation_fit(std::span<const SaturationPoint> points);

/// Mean and sd of ED over random model subsets of each size.
std::vector<SaturationPoint> ed_vs_model_count(const ScoreMatrix& m, const std::vector<Eigen::Index>& counts,
                                               std::size_t trials = 20, std::uint64_t seed = 0);

/// Tasks whose population variance changes by less than tol (relative to the
/// early cohort, floored at 1e-9) between the two cohorts.
std::vector<std::string> fixed_variance_subset(const ScoreMatrix& m, const std::vector<std::string>& early_ids,
                                               const std::vector<std::string>& late_ids, double tol = 0.2);

struct CohortComparison {
  double delta = 0.0;  ///< mean(ED_b - ED_a)
  Interval ci;         ///< 95% percentile interval of ED_b - ED_a
  double cohens_d = 0.0;
  double p_direction = 0.0;  ///< fraction of iterations with ED_b > ED_a
  double mean_a = 0.0;
  double sd_a = 0.0;
  double mean_b = 0.0;
  double sd_b = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
};

/// Bootstrap ED of `sample` models drawn with replacement from each group.
CohortComparison cohort_bootstrap_compare(const SuiteScores& s, const std::vector<std::string>& group_a,
                                          const std::vector<std::string>& group_b, std::size_t sample = 300,
                                          std::size_t iterations = 1000, std::uint64_t seed = 0);

struct DiversityProbe {
  double fraction_increase = 0.0;
  double ed_late = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Fraction of trials in which adding one random early model to the late
/// cohort raises its task-centered ED.
DiversityProbe diversity_insertion_probe(const ScoreMatrix& m, const std::vector<std::string>& late_ids,
                                         const std::vector<std::string>& early_ids, std::size_t trials = 100,
                                         std::uint64_t seed = 0);

struct TemporalDensity {
  double slope = 0.0;
  double se = 0.0;
};

/// Least-squares slope of ED against x.
TemporalDensity temporal_information_density(const EdSeries& series);

}  // namespace spectradiag
