#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spectradiag/matrix_io.hpp"

namespace spectradiag {

struct IrtSpec {
  Eigen::Index k = 1;  ///< latent ability dimensions
  Eigen::Index tasks = 500;
  Eigen::Index models = 100;
  double discrimination_scale = 1.0;
  double difficulty_spread = 1.0;
  /// Loadings drawn from the positive orthant of the sphere instead of the
  /// whole sphere (all abilities help on every task).
  bool positive_loadings = false;
  /// Per-task discrimination multiplier exp(sd * z); 0 disables it.
  double discrimination_log_sd = 0.0;
  std::uint64_t seed = 0;

  /// Throws InputError unless 1 <= k <= min(tasks, models), models >= 2 and
  /// the scales are nonnegative.
  void validate() const;
};

/// Multidimensional 2PL: P(pass) = logistic(a_i . theta_j - b_i) with
/// theta_j ~ N(0, I_k), a_i = scale * unit loading, b_i ~ N(0, spread).
/// Ids are zero-padded ("t0000", "m000").
ScoreMatrix gen_irt_matrix(const IrtSpec& spec);

enum class IidKind { gaussian, bernoulli };

/// I.i.d. entries: standard normal, or Bernoulli(p). Gaussian values are
/// not valid scores, so the result is a plain labelled table.
LabeledTable gen_iid_matrix(Eigen::Index tasks, Eigen::Index models, IidKind kind, double p = 0.5,
                            std::uint64_t seed = 0);

/// Zero-padded ids with the given prefix.
std::vector<std::string> padded_ids(char prefix, Eigen::Index count, std::size_t min_width);

struct RankRecoveryOptions {
  std::vector<Eigen::Index> ks{1, 2, 3, 5, 10, 20};
  std::size_t seeds = 10;
  Eigen::Index tasks = 500;
  Eigen::Index models = 100;
  double discrimination_scale = 2.5;
  double difficulty_spread = 1.0;
  std::uint64_t base_seed = 0;
};

struct RankRecoveryReport {
  std::vector<Eigen::Index> ks;
  std::vector<std::vector<double>> ed;  ///< ed[k index][seed]
  std::vector<double> mean_ed;
  std::vector<double> overestimate_ratio;  ///< mean_ed / k
  double spearman_rho = 0.0;               ///< k vs mean ED
  double per_seed_rho_mean = 0.0;
  double per_seed_rho_sd = 0.0;
  bool top_exceeds_bottom_every_seed = false;  ///< ED(max k) > ED(min k) per seed
  RankRecoveryOptions options;
};

/// Generates one IRT matrix per (k, seed) cell and relates ED to k.
RankRecoveryReport rank_recovery_report(const RankRecoveryOptions& options = {});

/// Seed used for cell (k, replicate) of the rank-recovery harness.
std::uint64_t rank_recovery_seed(std::uint64_t base_seed, Eigen::Index k, std::size_t replicate);

}  // namespace spectradiag
