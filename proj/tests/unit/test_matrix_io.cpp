#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "spectradiag/error.hpp"
#include "spectradiag/matrix_io.hpp"

using namespace spectradiag;

namespace {

LabeledTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_table_csv(in, "mem");
}

std::string error_of(const std::string& text) {
  try {
    matrix_from_table(parse(text));
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("csv parsing keeps ids, values and missing cells") {
  const auto t = parse("task_id,a,b,c\nt1,1,0,\nt2,NA,0.5,1\n");
  CHECK(t.row_ids == std::vector<std::string>{"t1", "t2"});
  CHECK(t.col_ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.values(0, 0) == 1.0);
  CHECK(t.values(1, 1) == 0.5);
  CHECK(t.missing(0, 2));
  CHECK(t.missing(1, 0));
  CHECK_FALSE(t.missing(1, 2));
}

TEST_CASE("csv handles a byte-order mark and quoted ids") {
  const auto t = parse("\xEF\xBB\xBFtask_id,\"model, one\",b\n\"t,1\",1,0\n");
  CHECK(t.col_ids[0] == "model, one");
  CHECK(t.row_ids[0] == "t,1");
}

TEST_CASE("input errors name the offending row and column") {
  const std::string bad_cell = error_of("task_id,a,b\nt1,1,x\n");
  CHECK(bad_cell.find("'t1'") != std::string::npos);
  CHECK(bad_cell.find("'b'") != std::string::npos);
  const std::string out_of_range = error_of("task_id,a,b\nt1,1,1.5\n");
  CHECK(out_of_range.find("t1") != std::string::npos);
  CHECK(out_of_range.find("b") != std::string::npos);
  CHECK(error_of("task_id,a,a\nt1,1,0\n").find("duplicate") != std::string::npos);
  CHECK(error_of("task_id,a,b\nt1,1,0\nt1,0,1\n").find("duplicate") != std::string::npos);
  CHECK_FALSE(error_of("task_id,a,b\nt1,1\n").empty());
}

TEST_CASE("matrix invariants") {
  CHECK_THROWS_AS(ScoreMatrix({"t"}, {"a"}, Eigen::MatrixXd::Zero(1, 1)), InputError);
  CHECK_THROWS_AS(ScoreMatrix({}, {"a", "b"}, Eigen::MatrixXd::Zero(0, 2)), InputError);
  CHECK_THROWS_AS(ScoreMatrix({"t"}, {"a", ""}, Eigen::MatrixXd::Zero(1, 2)), InputError);
  ScoreMatrix bin({"t"}, {"a", "b"}, (Eigen::MatrixXd(1, 2) << 0, 1).finished());
  CHECK(bin.kind() == ScoreKind::binary);
  ScoreMatrix cont({"t"}, {"a", "b"}, (Eigen::MatrixXd(1, 2) << 0.25, 1).finished());
  CHECK(cont.kind() == ScoreKind::continuous);
}

TEST_CASE("missing fraction and budget") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(4, 5, 0.5);
  v(0, 0) = std::nan("");
  const ScoreMatrix m = oracle::matrix(v);
  CHECK(m.has_missing());
  CHECK(m.missing_fraction() == doctest::Approx(0.05));
  CHECK_FALSE(m.exceeds_missing_budget());
  v(1, 1) = std::nan("");
  CHECK(oracle::matrix(v).exceeds_missing_budget());
  CHECK_THROWS_AS(m.require_complete("test"), InputError);
}

TEST_CASE("imputation uses model means over observed tasks") {
  Eigen::MatrixXd v(3, 2);
  v << 1, 0, std::nan(""), 1, 0, 1;
  const ScoreMatrix m = impute_missing(oracle::matrix(v));
  CHECK_FALSE(m.has_missing());
  CHECK(m.values()(1, 0) == doctest::Approx(0.5));
  CHECK(m.values()(0, 0) == 1.0);

  Eigen::MatrixXd all_missing = Eigen::MatrixXd::Constant(2, 2, std::nan(""));
  all_missing(0, 1) = 1.0;
  try {
    impute_missing(oracle::matrix(all_missing));
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("m0000") != std::string::npos);
  }
}

TEST_CASE("binarization is strictly greater than the threshold") {
  Eigen::MatrixXd v(1, 3);
  v << 0.5, 0.51, 0.2;
  const ScoreMatrix b = binarize(oracle::matrix(v));
  CHECK(b.values()(0, 0) == 0.0);
  CHECK(b.values()(0, 1) == 1.0);
  CHECK(b.values()(0, 2) == 0.0);
  CHECK(b.kind() == ScoreKind::binary);
  const ScoreMatrix low = binarize(oracle::matrix(v), {0.1});
  CHECK(low.values().sum() == 3.0);
}

TEST_CASE("degenerate tasks are dropped and reported") {
  Eigen::MatrixXd v(3, 3);
  v << 1, 1, 1, 0, 1, 0, 0, 0, 0;
  const auto d = drop_degenerate_tasks(oracle::matrix(v));
  CHECK(d.matrix.task_count() == 1);
  CHECK(d.dropped == std::vector<std::string>{"t0000", "t0002"});
  CHECK_THROWS_AS(drop_degenerate_tasks(oracle::matrix(Eigen::MatrixXd::Ones(2, 3))), AnalysisError);
}

TEST_CASE("csv and json round trips are lossless") {
  Eigen::MatrixXd v = oracle::random_uniform(3, 7, 5);
  v(2, 3) = std::nan("");
  v(0, 0) = 0.1 + 0.2;  // not exactly representable as a short decimal
  const ScoreMatrix m = oracle::matrix(v);
  const auto dir = std::filesystem::temp_directory_path() / "spectradiag_io_test";
  std::filesystem::create_directories(dir);
  for (const auto fmt : {MatrixFormat::csv, MatrixFormat::json}) {
    const auto path = dir / (fmt == MatrixFormat::csv ? "m.csv" : "m.json");
    save_matrix(m, path, fmt);
    const ScoreMatrix back = load_matrix(path);
    CHECK(back.task_ids() == m.task_ids());
    CHECK(back.model_ids() == m.model_ids());
    CHECK(back.missing().cwiseEqual(m.missing()).all());
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        if (m.missing()(i, j)) continue;
        CHECK(back.values()(i, j) == m.values()(i, j));
      }
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.30000000000000004}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("metadata parsing and validation") {
  const auto doc = nlohmann::json::parse(R"([
    {"model_id": "m0000", "log_param_count": 9.5, "date": "2024-01-02", "family": "x", "labels": {"open": true}},
    {"model_id": "m0001"}
  ])");
  const auto meta = parse_metadata(doc);
  REQUIRE(meta.size() == 2);
  CHECK(meta[0].log_param_count == doctest::Approx(9.5));
  CHECK(meta[0].labels.at("open"));
  CHECK_FALSE(meta[1].date.has_value());
  const ScoreMatrix m = oracle::matrix(Eigen::MatrixXd::Zero(2, 2));
  CHECK_NOTHROW(validate_metadata(meta, m));
  auto bad = meta;
  bad[1].model_id = "ghost";
  CHECK_THROWS_AS(validate_metadata(bad, m), InputError);
}
