#include "spectradiag/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "spectradiag/error.hpp"

namespace spectradiag {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

void check_unique(const std::vector<std::string>& ids, std::string_view what, std::string_view source) {
  std::set<std::string_view> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw InputError(std::string(source) + ": empty " + std::string(what) + " id");
    if (!seen.insert(id).second) {
      throw InputError(std::string(source) + ": duplicate " + std::string(what) + " id '" + id + "'");
    }
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw InputError("format_double: conversion failed");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// ScoreMatrix

ScoreMatrix::ScoreMatrix(std::vector<std::string> task_ids, std::vector<std::string> model_ids,
                         Eigen::MatrixXd values)
    : task_ids_(std::move(task_ids)), model_ids_(std::move(model_ids)), values_(std::move(values)) {
  if (task_ids_.empty()) throw InputError("score matrix has no tasks");
  if (model_ids_.size() < 2) throw InputError("score matrix needs at least two models");
  if (values_.rows() != static_cast<Eigen::Index>(task_ids_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(model_ids_.size())) {
    throw InputError("score matrix shape does not match its ids");
  }
  check_unique(task_ids_, "task", "score matrix");
  check_unique(model_ids_, "model", "score matrix");

  missing_ = values_.array().isNaN();
  missing_count_ = missing_.count();
  bool binary = true;
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      const double v = values_(i, j);
      if (std::isnan(v)) continue;
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw InputError("score out of [0,1] at task '" + task_ids_[i] + "', model '" + model_ids_[j] +
                         "': " + format_double(v));
      }
      if (v != 0.0 && v != 1.0) binary = false;
    }
  }
  kind_ = binary ? ScoreKind::binary : ScoreKind::continuous;
}

double ScoreMatrix::missing_fraction() const {
  return static_cast<double>(missing_count_) / static_cast<double>(values_.size());
}

std::optional<Eigen::Index> ScoreMatrix::task_index(std::string_view id) const {
  const auto it = std::find(task_ids_.begin(), task_ids_.end(), id);
  if (it == task_ids_.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - task_ids_.begin());
}

std::optional<Eigen::Index> ScoreMatrix::model_index(std::string_view id) const {
  const auto it = std::find(model_ids_.begin(), model_ids_.end(), id);
  if (it == model_ids_.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - model_ids_.begin());
}

ScoreMatrix ScoreMatrix::select_tasks(std::span<const Eigen::Index> rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ids.push_back(task_ids_.at(static_cast<std::size_t>(rows[r])));
    sub.row(static_cast<Eigen::Index>(r)) = values_.row(rows[r]);
  }
  return ScoreMatrix(std::move(ids), model_ids_, std::move(sub));
}

ScoreMatrix ScoreMatrix::select_models(std::span<const Eigen::Index> cols) const {
  std::vector<std::string> ids;
  ids.reserve(cols.size());
  Eigen::MatrixXd sub(values_.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    ids.push_back(model_ids_.at(static_cast<std::size_t>(cols[c])));
    sub.col(static_cast<Eigen::Index>(c)) = values_.col(cols[c]);
  }
  return ScoreMatrix(task_ids_, std::move(ids), std::move(sub));
}

void ScoreMatrix::require_complete(std::string_view what) const {
  if (!has_missing()) return;
  for (Eigen::Index i = 0; i < missing_.rows(); ++i) {
    for (Eigen::Index j = 0; j < missing_.cols(); ++j) {
      if (missing_(i, j)) {
        throw InputError(std::string(what) + ": missing cell at task '" + task_ids_[i] + "', model '" +
                         model_ids_[j] + "' (run imputation first)");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Tables

MatrixFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".json") return MatrixFormat::json;
  return MatrixFormat::csv;
}

LabeledTable read_table_csv(std::istream& in, std::string_view source) {
  const std::string src(source);
  std::string line;
  std::size_t line_no = 0;
  LabeledTable table;

  // header
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
      line.erase(0, 3);  // UTF-8 BOM
    }
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw InputError(src + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2) throw InputError(src + ": header has no model columns");
  table.col_ids.assign(header.begin() + 1, header.end());
  check_unique(table.col_ids, "model", src);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw InputError(src + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    table.row_ids.push_back(fields[0]);
    std::vector<double> row(fields.size() - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const std::string& f = fields[j];
      if (f.empty() || f == "NA" || f == "NaN" || f == "nan") {
        row[j - 1] = kNaN;
        continue;
      }
      double v = 0.0;
      const char* begin = f.data();
      const char* end = f.data() + f.size();
      if (*begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw InputError(src + ":" + std::to_string(line_no) + ": non-numeric cell '" + f + "' at row '" +
                         fields[0] + "', column '" + table.col_ids[j - 1] + "'");
      }
      row[j - 1] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(src + ": no data rows");
  check_unique(table.row_ids, "row", src);

  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.col_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  table.missing = table.values.array().isNaN();
  return table;
}

void write_table_csv(const LabeledTable& table, std::ostream& out, std::string_view corner) {
  out << corner;
  for (const auto& id : table.col_ids) out << ',' << csv_escape(id);
  out << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    out << csv_escape(table.row_ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      out << ',';
      const bool miss = table.missing.size() > 0 ? table.missing(i, j) : std::isnan(table.values(i, j));
      if (!miss) out << format_double(table.values(i, j));
    }
    out << '\n';
  }
}

LabeledTable table_from_json(const nlohmann::json& doc, std::string_view source) {
  const std::string src(source);
  if (!doc.is_object()) throw InputError(src + ": expected a JSON object");
  LabeledTable table;
  try {
    table.row_ids = doc.at("task_ids").get<std::vector<std::string>>();
    table.col_ids = doc.at("model_ids").get<std::vector<std::string>>();
    const auto& values = doc.at("values");
    if (!values.is_array() || values.size() != table.row_ids.size()) {
      throw InputError(src + ": 'values' must have one row per task id");
    }
    table.values.resize(static_cast<Eigen::Index>(table.row_ids.size()),
                        static_cast<Eigen::Index>(table.col_ids.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& row = values[i];
      if (!row.is_array() || row.size() != table.col_ids.size()) {
        throw InputError(src + ": row '" + table.row_ids[i] + "' has the wrong number of values");
      }
      for (std::size_t j = 0; j < row.size(); ++j) {
        const auto& cell = row[j];
        double v = kNaN;
        if (cell.is_number()) {
          v = cell.get<double>();
        } else if (!cell.is_null()) {
          throw InputError(src + ": non-numeric cell at row '" + table.row_ids[i] + "', column '" +
                           table.col_ids[j] + "'");
        }
        table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(src + ": " + e.what());
  }
  if (table.row_ids.empty() || table.col_ids.empty()) throw InputError(src + ": empty matrix");
  check_unique(table.row_ids, "row", src);
  check_unique(table.col_ids, "model", src);
  table.missing = table.values.array().isNaN();
  return table;
}

nlohmann::ordered_json table_to_json(const LabeledTable& table) {
  nlohmann::ordered_json doc;
  doc["task_ids"] = table.row_ids;
  doc["model_ids"] = table.col_ids;
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      const double v = table.values(i, j);
      if (std::isnan(v)) {
        row.push_back(nullptr);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  doc["values"] = std::move(rows);
  return doc;
}

LabeledTable load_table(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  if (format == MatrixFormat::json) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ": " + e.what());
    }
    return table_from_json(doc, path.string());
  }
  return read_table_csv(in, path.string());
}

LabeledTable load_table(const std::filesystem::path& path) { return load_table(path, format_from_path(path)); }

ScoreMatrix matrix_from_table(LabeledTable table) {
  return ScoreMatrix(std::move(table.row_ids), std::move(table.col_ids), std::move(table.values));
}

LabeledTable table_from_matrix(const ScoreMatrix& m) {
  return LabeledTable{m.task_ids(), m.model_ids(), m.values(), m.missing()};
}

ScoreMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  return matrix_from_table(load_table(path, format));
}

ScoreMatrix load_matrix(const std::filesystem::path& path) { return load_matrix(path, format_from_path(path)); }

void save_matrix(const ScoreMatrix& m, const std::filesystem::path& path, MatrixFormat format) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  const auto table = table_from_matrix(m);
  if (format == MatrixFormat::json) {
    out << table_to_json(table).dump(2) << '\n';
  } else {
    write_table_csv(table, out);
  }
}

// ---------------------------------------------------------------------------
// Metadata

std::vector<ModelMeta> parse_metadata(const nlohmann::json& doc) {
  if (!doc.is_array()) throw InputError("metadata: expected a JSON array");
  std::vector<ModelMeta> out;
  std::set<std::string> seen;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("model_id") || !item["model_id"].is_string()) {
      throw InputError("metadata: every entry needs a string model_id");
    }
    ModelMeta meta;
    meta.model_id = item["model_id"].get<std::string>();
    if (!seen.insert(meta.model_id).second) throw InputError("metadata: duplicate model_id '" + meta.model_id + "'");
    try {
      if (item.contains("log_param_count") && !item["log_param_count"].is_null()) {
        meta.log_param_count = item["log_param_count"].get<double>();
      }
      if (item.contains("date") && !item["date"].is_null()) meta.date = item["date"].get<std::string>();
      if (item.contains("family") && !item["family"].is_null()) meta.family = item["family"].get<std::string>();
      if (item.contains("labels") && !item["labels"].is_null()) {
        for (const auto& [name, flag] : item["labels"].items()) meta.labels[name] = flag.get<bool>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError("metadata for '" + meta.model_id + "': " + e.what());
    }
    out.push_back(std::move(meta));
  }
  return out;
}

std::vector<ModelMeta> load_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return parse_metadata(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void validate_metadata(std::span<const ModelMeta> meta, const ScoreMatrix& m) {
  for (const auto& entry : meta) {
    if (!m.model_index(entry.model_id)) {
      throw InputError("metadata model_id '" + entry.model_id + "' is not a column of the score matrix");
    }
  }
}

// ---------------------------------------------------------------------------
// Preprocessing

ScoreMatrix binarize(const ScoreMatrix& m, BinarizationPolicy policy) {
  if (!(policy.threshold > 0.0 && policy.threshold < 1.0)) {
    throw InputError("binarization threshold must lie in (0,1)");
  }
  Eigen::MatrixXd out = m.values().unaryExpr([&](double v) {
    if (std::isnan(v)) return v;
    return v > policy.threshold ? 1.0 : 0.0;
  });
  return ScoreMatrix(m.task_ids(), m.model_ids(), std::move(out));
}

ScoreMatrix impute_missing(const ScoreMatrix& m) {
  if (!m.has_missing()) return m;
  Eigen::MatrixXd out = m.values();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    double sum = 0.0;
    Eigen::Index observed = 0;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      if (!m.missing()(i, j)) {
        sum += out(i, j);
        ++observed;
      }
    }
    if (observed == 0) {
      throw InputError("cannot impute model '" + m.model_ids()[static_cast<std::size_t>(j)] +
                       "': every task is missing");
    }
    const double column_mean = sum / static_cast<double>(observed);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      if (m.missing()(i, j)) out(i, j) = column_mean;
    }
  }
  return ScoreMatrix(m.task_ids(), m.model_ids(), std::move(out));
}

DegenerateDrop drop_degenerate_tasks(const ScoreMatrix& m) {
  m.require_complete("drop_degenerate_tasks");
  std::vector<Eigen::Index> keep;
  std::vector<std::string> dropped;
  for (Eigen::Index i = 0; i < m.task_count(); ++i) {
    const auto row = m.values().row(i);
    if (row.maxCoeff() > row.minCoeff()) {
      keep.push_back(i);
    } else {
      dropped.push_back(m.task_ids()[static_cast<std::size_t>(i)]);
    }
  }
  if (keep.empty()) throw AnalysisError("every task has zero variance across models");
  return DegenerateDrop{m.select_tasks(keep), std::move(dropped)};
}

}  // namespace spectradiag
