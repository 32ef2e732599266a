#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "spectradiag/corr_matrix.hpp"
#include "spectradiag/matrix_io.hpp"

namespace spectradiag {

struct Interval {
  double low = 0.0;
  double high = 0.0;
  double width() const { return high - low; }
};

// Scalar coefficients. nullopt when undefined (zero variance, < 3 pairs).
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
/// Pearson on average ranks.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);
/// Tie-corrected tau-b.
std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y);
/// Dispatch for pearson/spearman/kendall; tetrachoric throws InputError.
std::optional<double> correlation(std::span<const double> x, std::span<const double> y, CorrMethod method);

/// Correlation between every pair of rows of `rows`. NaN cells are dropped
/// pairwise; pairs with fewer than 3 shared observations or a constant
/// series are left undefined (NaN). Tetrachoric requires binary rows.
CorrMatrix pairwise_correlation(const std::vector<std::string>& ids, const Eigen::MatrixXd& rows,
                                CorrMethod method);

/// Percentile bootstrap over paired resamples; undefined resamples are skipped.
Interval correlation_ci(std::span<const double> x, std::span<const double> y, CorrMethod method = CorrMethod::spearman,
                        std::size_t iterations = 10000, double level = 0.95, std::uint64_t seed = 0);

/// Correlation of x and y after regressing z out of both (on ranks for
/// spearman). Returns 0 when z explains either series completely.
double partial_correlation(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                           CorrMethod method = CorrMethod::spearman);

struct StratumCorrelation {
  std::string label;
  std::size_t n = 0;
  std::optional<double> rho;
  bool reliable = false;  ///< n >= 5 and rho defined
};

struct StratifiedCorrelation {
  std::vector<StratumCorrelation> strata;
  std::vector<std::string> warnings;
};

/// Per-stratum Spearman. When `requested` is non-empty only those labels are
/// reported, in that order; requested labels with no members are omitted
/// with a warning.
StratifiedCorrelation stratified_correlation(std::span<const double> x, std::span<const double> y,
                                             const std::vector<std::string>& labels,
                                             const std::vector<std::string>& requested = {});

/// 2x2 pass/fail counts for a pair of binary series.
struct ContingencyTable {
  double both = 0.0;         ///< x = 1, y = 1
  double first_only = 0.0;   ///< x = 1, y = 0
  double second_only = 0.0;  ///< x = 0, y = 1
  double neither = 0.0;      ///< x = 0, y = 0
  double total() const { return both + first_only + second_only + neither; }
};

ContingencyTable contingency(std::span<const double> x, std::span<const double> y);

/// P(X <= h, Y <= k) for a standard bivariate normal with correlation rho.
double bivariate_normal_cdf(double h, double k, double rho);

inline constexpr double kTetrachoricClamp = 0.999;

/// Latent-normal correlation reproducing the table's joint pass frequency.
/// nullopt on a zero marginal; tables with no sign change inside
/// [-0.999, 0.999] (e.g. a zero cell) are clamped to that bound.
std::optional<double> tetrachoric(const ContingencyTable& table);

/// Model x model tetrachoric correlation matrix of a binary matrix. Models
/// whose column is constant are excluded.
CorrMatrix tetrachoric_matrix(const ScoreMatrix& m);

/// Participation ratio of the model x model tetrachoric matrix
/// (negative eigenvalues clipped). Throws InputError for non-binary input or
/// fewer than three usable models.
double tetrachoric_ed(const ScoreMatrix& m);

struct CutAtHeight {
  double height = 0.0;
};
struct CutToGroups {
  std::size_t groups = 1;
};
using ClusterCut = std::variant<CutAtHeight, CutToGroups>;

struct ClusterMerge {
  std::vector<std::string> left;   ///< sorted member ids
  std::vector<std::string> right;  ///< sorted member ids
  double height = 0.0;
};

struct ClusterGrouping {
  std::vector<ClusterMerge> merges;  ///< in merge order
  std::vector<std::vector<std::string>> groups;  ///< sorted; each group sorted
};

/// Average-linkage agglomeration on distance 1 - |r|. Ties (within 1e-12)
/// merge the lexicographically smallest pair of clusters first, where a
/// cluster is keyed by its smallest member id. A height cut keeps merges
/// strictly below the height.
ClusterGrouping hierarchical_cluster(const CorrMatrix& c, ClusterCut cut);

struct RedundancyThresholds {
  double redundant = 0.9;
  double vet = 0.7;
  double complementary = -0.3;
};

struct FlaggedPair {
  std::string first;
  std::string second;
  double rho = 0.0;
};

struct RedundancyFlags {
  std::vector<FlaggedPair> redundant;      ///< rho > redundant
  std::vector<FlaggedPair> vet_fail;       ///< rho > vet
  std::vector<FlaggedPair> complementary;  ///< rho < complementary
};

RedundancyFlags redundancy_flags(const CorrMatrix& c, RedundancyThresholds thresholds = {});

/// Mean over model pairs of the fraction of tasks on which they disagree.
double mean_pairwise_hamming(const ScoreMatrix& m);

}  // namespace spectradiag
