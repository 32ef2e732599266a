#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectradiag/matrix_io.hpp"

namespace spectradiag {

/// Continuous benchmark-level scores, stored benchmarks x models (one row per
/// benchmark, the same orientation as the CSV layout).
class SuiteScores {
 public:
  /// Throws InputError on duplicate ids, shape mismatch, missing or
  /// non-finite scores, or fewer than two models.
  SuiteScores(std::vector<std::string> benchmark_ids, std::vector<std::string> model_ids, Eigen::MatrixXd scores);

  const std::vector<std::string>& benchmark_ids() const { return benchmark_ids_; }
  const std::vector<std::string>& model_ids() const { return model_ids_; }
  const Eigen::MatrixXd& scores() const { return scores_; }
  Eigen::Index benchmark_count() const { return scores_.rows(); }
  Eigen::Index model_count() const { return scores_.cols(); }

  SuiteScores select_benchmarks(std::span<const Eigen::Index> rows) const;
  SuiteScores select_models(std::span<const Eigen::Index> cols) const;
  /// Throws InputError naming the first unknown id.
  std::vector<Eigen::Index> model_indices(const std::vector<std::string>& ids) const;

 private:
  std::vector<std::string> benchmark_ids_;
  std::vector<std::string> model_ids_;
  Eigen::MatrixXd scores_;
};

SuiteScores suite_from_table(LabeledTable table);
SuiteScores load_suite(const std::filesystem::path& path);

/// Each benchmark row z-scored across models. Throws AnalysisError naming a
/// zero-variance benchmark.
Eigen::MatrixXd standardized_scores(const SuiteScores& s);

/// ED of the standardized benchmarks x models table (rows are centered by
/// the standardization).
double suite_ed(const SuiteScores& s);

struct Ranking {
  std::vector<std::string> order;  ///< best first
  std::vector<double> composite;   ///< composite score aligned with order
};

/// Weighted sum of standardized benchmarks; ties broken by model id.
Ranking composite_ranking(const SuiteScores& s, std::span<const double> weights);
Ranking equal_weight_ranking(const SuiteScores& s);

/// Tau-b between two orderings over their shared ids.
double kendall_tau(const std::vector<std::string>& rank_a, const std::vector<std::string>& rank_b);

/// Best attainable min(corr(c, s1), corr(c, s2)) over positive-weight
/// composites of two standardized scores with correlation rho.
double composite_ceiling(double rho);

struct CeilingOracle {
  double value = 0.0;
  double argmax_weight_ratio = 0.0;  ///< w2 / w1 at the maximum
};

/// Grid search over w2/w1 in logspace(1e-3, 1e3).
CeilingOracle ceiling_oracle(double rho, std::size_t grid = 10000);

struct FragilityReport {
  double champion_change_rate = 0.0;
  std::size_t distinct_champions = 0;
  std::string baseline_champion;
  double alpha = 1.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Symmetric Dirichlet(alpha) weight draws; rate at which the composite
/// champion differs from the equal-weight champion.
FragilityReport dirichlet_fragility(const SuiteScores& s, double alpha, std::size_t samples = 10000,
                                    std::uint64_t seed = 0);

struct LeaveOneOut {
  std::string benchmark_id;
  double delta_ed = 0.0;     ///< ED(full) - ED(without benchmark)
  double tau_vs_full = 0.0;  ///< equal-weight rankings, full vs reduced
};

std::vector<LeaveOneOut> leave_one_out(const SuiteScores& s);

struct SubsetScore {
  std::vector<std::string> benchmarks;
  double tau = 0.0;
};

struct SubsetSearch {
  SubsetScore best;
  SubsetScore worst;
  std::size_t evaluated = 0;
};

/// Exhaustive search over benchmark subsets of the given size for the
/// equal-weight ranking closest to (best) and furthest from (worst) the full
/// suite's. Requires C(k, size) <= 1e6.
SubsetSearch best_subset_search(const SuiteScores& s, std::size_t size);

double information_density(double ed, std::size_t benchmarks);

}  // namespace spectradiag
