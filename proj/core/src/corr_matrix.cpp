#include "spectradiag/corr_matrix.hpp"

#include <cmath>
#include <ostream>

#include "spectradiag/error.hpp"
#include "spectradiag/matrix_io.hpp"

namespace spectradiag {

std::string_view to_string(CorrMethod method) {
  switch (method) {
    case CorrMethod::pearson: return "pearson";
    case CorrMethod::spearman: return "spearman";
    case CorrMethod::kendall: return "kendall";
    case CorrMethod::tetrachoric: return "tetrachoric";
  }
  return "unknown";
}

CorrMethod parse_corr_method(std::string_view name) {
  if (name == "pearson") return CorrMethod::pearson;
  if (name == "spearman") return CorrMethod::spearman;
  if (name == "kendall") return CorrMethod::kendall;
  if (name == "tetrachoric") return CorrMethod::tetrachoric;
  throw InputError("unknown correlation method '" + std::string(name) + "'");
}

std::vector<std::string> CorrMatrix::undefined_ids() const {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    if (values.row(i).array().isNaN().any()) out.push_back(ids[static_cast<std::size_t>(i)]);
  }
  return out;
}

void CorrMatrix::validate() const {
  if (values.rows() != values.cols() || values.rows() != static_cast<Eigen::Index>(ids.size())) {
    throw InputError("correlation matrix shape does not match its ids");
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    if (std::abs(values(i, i) - 1.0) > 1e-12) throw InputError("correlation matrix diagonal must be 1");
    for (Eigen::Index j = i + 1; j < values.cols(); ++j) {
      const double a = values(i, j);
      const double b = values(j, i);
      if (std::isnan(a) != std::isnan(b) || (!std::isnan(a) && std::abs(a - b) > 1e-12)) {
        throw InputError("correlation matrix is not symmetric at (" + ids[static_cast<std::size_t>(i)] + ", " +
                         ids[static_cast<std::size_t>(j)] + ")");
      }
      if (!std::isnan(a) && std::abs(a) > 1.0 + 1e-12) throw InputError("correlation outside [-1,1]");
    }
  }
}

void write_corr_csv(const CorrMatrix& c, std::ostream& out) {
  LabeledTable table{c.ids, c.ids, c.values, c.values.array().isNaN()};
  write_table_csv(table, out, "id");
}

CorrMatrix read_corr_csv(std::istream& in, CorrMethod method, std::string_view source) {
  auto table = read_table_csv(in, source);
  if (table.row_ids != table.col_ids) throw InputError(std::string(source) + ": row and column ids differ");
  CorrMatrix c{std::move(table.row_ids), std::move(table.values), method};
  c.validate();
  return c;
}

}  // namespace spectradiag
