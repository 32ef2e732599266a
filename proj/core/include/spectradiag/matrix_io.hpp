#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace spectradiag {

enum class ScoreKind { binary, continuous };
enum class MatrixFormat { csv, json };

using MissingMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Missing fraction above which loaders should warn.
inline constexpr double kMissingWarnFraction = 0.05;

/// A labelled grid exactly as read from disk: no range or kind checks.
/// Missing cells are marked in `missing` and hold NaN in `values`.
struct LabeledTable {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  Eigen::MatrixXd values;
  MissingMask missing;
};

/// Tasks x models score grid with an explicit missing-value mask.
///
/// Scores lie in [0, 1]. The kind is binary when every observed score is 0 or
/// 1. Missing cells are never zero-filled: they carry NaN in values() and are
/// flagged in missing(); imputation is a separate pass (impute_missing).
class ScoreMatrix {
 public:
  /// NaN entries in `values` mark missing cells. Throws InputError on
  /// duplicate or empty ids, shape mismatch, out-of-range or non-finite
  /// scores, fewer than one task or two models.
  ScoreMatrix(std::vector<std::string> task_ids, std::vector<std::string> model_ids,
              Eigen::MatrixXd values);

  const std::vector<std::string>& task_ids() const { return task_ids_; }
  const std::vector<std::string>& model_ids() const { return model_ids_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const MissingMask& missing() const { return missing_; }

  Eigen::Index task_count() const { return values_.rows(); }
  Eigen::Index model_count() const { return values_.cols(); }
  ScoreKind kind() const { return kind_; }
  bool has_missing() const { return missing_count_ > 0; }
  double missing_fraction() const;
  bool exceeds_missing_budget() const { return missing_fraction() > kMissingWarnFraction; }

  std::optional<Eigen::Index> task_index(std::string_view id) const;
  std::optional<Eigen::Index> model_index(std::string_view id) const;

  ScoreMatrix select_tasks(std::span<const Eigen::Index> rows) const;
  ScoreMatrix select_models(std::span<const Eigen::Index> cols) const;

  /// Throws InputError if any cell is missing; `what` names the caller.
  void require_complete(std::string_view what) const;

 private:
  std::vector<std::string> task_ids_;
  std::vector<std::string> model_ids_;
  Eigen::MatrixXd values_;
  MissingMask missing_;
  Eigen::Index missing_count_ = 0;
  ScoreKind kind_ = ScoreKind::continuous;
};

struct ModelMeta {
  std::string model_id;
  std::optional<double> log_param_count;
  std::optional<std::string> date;  // ISO-8601 calendar date
  std::optional<std::string> family;
  std::map<std::string, bool> labels;
};

/// Strict-greater binarization: a score becomes 1 iff it exceeds threshold.
struct BinarizationPolicy {
  double threshold = 0.5;
};

struct DegenerateDrop {
  ScoreMatrix matrix;
  std::vector<std::string> dropped;
};

MatrixFormat format_from_path(const std::filesystem::path& path);

/// CSV: header `task_id,<model_1>,...`, one row per task, empty field =
/// missing. `source` is used in error messages.
LabeledTable read_table_csv(std::istream& in, std::string_view source = "<stream>");
void write_table_csv(const LabeledTable& table, std::ostream& out,
                     std::string_view corner = "task_id");

/// JSON: {"task_ids": [...], "model_ids": [...], "values": [[..|null], ...]}.
LabeledTable table_from_json(const nlohmann::json& doc, std::string_view source = "<json>");
nlohmann::ordered_json table_to_json(const LabeledTable& table);

LabeledTable load_table(const std::filesystem::path& path, MatrixFormat format);
LabeledTable load_table(const std::filesystem::path& path);

ScoreMatrix matrix_from_table(LabeledTable table);
LabeledTable table_from_matrix(const ScoreMatrix& m);

ScoreMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
ScoreMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const ScoreMatrix& m, const std::filesystem::path& path, MatrixFormat format);

std::vector<ModelMeta> parse_metadata(const nlohmann::json& doc);
std::vector<ModelMeta> load_metadata(const std::filesystem::path& path);
/// Throws InputError naming the first metadata model_id absent from `m`.
void validate_metadata(std::span<const ModelMeta> meta, const ScoreMatrix& m);

ScoreMatrix binarize(const ScoreMatrix& m, BinarizationPolicy policy = {});

/// Replaces each missing cell by its model's mean over observed tasks.
/// Throws InputError naming any model with no observed task.
ScoreMatrix impute_missing(const ScoreMatrix& m);

/// Removes tasks whose scores do not vary across models.
/// Throws AnalysisError when every task is degenerate.
DegenerateDrop drop_degenerate_tasks(const ScoreMatrix& m);

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

}  // namespace spectradiag
