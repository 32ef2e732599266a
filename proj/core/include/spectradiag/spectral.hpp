#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spectradiag/corr_matrix.hpp"
#include "spectradiag/matrix_io.hpp"

namespace spectradiag {

/// task: subtract each row (task) mean. model: subtract each column mean.
/// double_center: row means first, then column means of the result.
enum class Centering { task, model, double_center, none };

std::string_view to_string(Centering scheme);
Centering parse_centering(std::string_view name);

Eigen::MatrixXd center(const Eigen::MatrixXd& x, Centering scheme);
/// Throws InputError if `m` has missing cells.
Eigen::MatrixXd center(const ScoreMatrix& m, Centering scheme);

/// Singular values above this fraction of the largest are kept; the rest are zeroed.
inline constexpr double kRelativeZeroSigma = 1e-10;

/// Above this many cells the spectrum is taken from the smaller-side Gram matrix.
inline constexpr double kGramRouteCells = 5e6;

/// Descending, nonnegative singular values.
class Spectrum {
 public:
  /// Throws InputError unless values are finite, nonnegative and nonincreasing.
  explicit Spectrum(std::vector<double> sigmas);
  /// Sorts descending before validating.
  static Spectrum from_unsorted(std::vector<double> sigmas);

  std::span<const double> sigmas() const { return sigmas_; }
  std::size_t size() const { return sigmas_.size(); }
  std::size_t nonzero_count() const;
  double total_variance() const;
  /// sigma_i^2 / sum sigma_j^2; all zeros for a zero spectrum.
  std::vector<double> variance_fractions() const;

 private:
  std::vector<double> sigmas_;
};

/// Length min(T, N). Throws InputError on non-finite entries.
Spectrum singular_spectrum(const Eigen::MatrixXd& x);

/// Participation ratio (sum s^2)^2 / sum s^4. Throws AnalysisError on a zero spectrum.
double effective_dimensionality(const Spectrum& s);
/// exp(H2) of the normalized eigenvalue distribution; equals effective_dimensionality.
double renyi2_ed(const Spectrum& s);
/// exp(H1), with 0 log 0 := 0.
double shannon_effective_rank(const Spectrum& s);
double pc1_fraction(const Spectrum& s);

/// (sum l)^2 / sum l^2 over nonnegative eigenvalues; negatives are clipped to 0.
double participation_ratio(std::span<const double> eigenvalues);

/// ED of an already-centered matrix; nullopt when the matrix is all zeros.
std::optional<double> try_matrix_ed(const Eigen::MatrixXd& centered);
double matrix_ed(const Eigen::MatrixXd& centered);
double matrix_ed(const ScoreMatrix& m, Centering scheme = Centering::task);

struct PcDecomposition {
  Eigen::MatrixXd loadings;  ///< T x k, orthonormal columns (task loadings)
  Eigen::MatrixXd scores;    ///< N x k, model scores (sigma_i * v_i)
  std::vector<double> variance_fraction;
  std::vector<double> sigmas;  ///< leading k singular values
};

/// Leading k components of `x` (already centered). Each loading vector is
/// oriented so its largest-magnitude entry is positive.
PcDecomposition principal_components(const Eigen::MatrixXd& x, Eigen::Index k);

/// Participation ratio of the eigenvalues of a correlation matrix, negatives
/// clipped to zero. Throws InputError on asymmetric or undefined input.
double ed_of_correlation(const CorrMatrix& c);

/// Eigenvalues of a symmetric matrix, descending.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& s);

}  // namespace spectradiag
