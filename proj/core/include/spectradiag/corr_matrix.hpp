#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spectradiag {

enum class CorrMethod { pearson, spearman, kendall, tetrachoric };

std::string_view to_string(CorrMethod method);
CorrMethod parse_corr_method(std::string_view name);

/// Symmetric pairwise association table. Undefined entries (a zero-variance
/// series, too few paired observations) hold NaN.
struct CorrMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
  CorrMethod method = CorrMethod::pearson;

  Eigen::Index size() const { return values.rows(); }
  bool has_undefined() const { return values.array().isNaN().any(); }
  /// Ids taking part in at least one undefined entry.
  std::vector<std::string> undefined_ids() const;
  /// Throws InputError on shape, symmetry (1e-12), diagonal or range violations.
  void validate() const;
};

/// Square CSV with the ids as header row and first column.
void write_corr_csv(const CorrMatrix& c, std::ostream& out);
CorrMatrix read_corr_csv(std::istream& in, CorrMethod method, std::string_view source = "<stream>");

}  // namespace spectradiag
