#include <doctest.h>

#include <algorithm>
#include <functional>
#include <thread>

#include "oracles.hpp"
#include "spectradiag/composite.hpp"
#include "spectradiag/null_validation.hpp"
#include "spectradiag/parallel.hpp"
#include "spectradiag/selection.hpp"
#include "spectradiag/serialize.hpp"
#include "spectradiag/synthetic.hpp"
#include "spectradiag/temporal.hpp"

using namespace spectradiag;

namespace {

std::size_t many_workers() { return std::max<std::size_t>(4, std::thread::hardware_concurrency()); }

std::string under(std::size_t workers, const std::function<Json()>& run) {
  ScopedWorkerCount scope(workers);
  return run().dump();
}

void same_across_workers(const std::string& what, const std::function<Json()>& run) {
  INFO(what);
  const std::string one = under(1, run);
  CHECK(one == under(many_workers(), run));
  CHECK(one == under(3, run));
}

ScoreMatrix irt(Eigen::Index k, std::uint64_t seed) {
  IrtSpec spec;
  spec.k = k;
  spec.tasks = 120;
  spec.models = 40;
  spec.discrimination_scale = 2.5;
  spec.seed = seed;
  return gen_irt_matrix(spec);
}

SuiteScores suite(std::uint64_t seed) {
  return SuiteScores(oracle::ids('b', 4), oracle::ids('m', 80), oracle::random_uniform(seed, 4, 80));
}

}  // namespace

TEST_CASE("worker count override") {
  {
    ScopedWorkerCount scope(2);
    CHECK(worker_count() == 2);
  }
  CHECK(worker_count() >= 1);
}

TEST_CASE("randomized operations are reproducible across worker counts") {
  const ScoreMatrix m = irt(3, 1);
  const SuiteScores s = suite(2);
  same_across_workers("generator", [] {
    Json j = Json::array();
    const ScoreMatrix g = irt(4, 9);
    for (double v : g.values().reshaped()) j.push_back(v);
    return j;
  });
  same_across_workers("rank recovery", [] {
    RankRecoveryOptions o;
    o.ks = {1, 2, 4};
    o.seeds = 3;
    o.tasks = 80;
    o.models = 30;
    return to_json(rank_recovery_report(o));
  });
  same_across_workers("ed report", [&] {
    EdReportOptions o;
    o.bootstrap_iterations = 64;
    o.seed = 5;
    return to_json(ed_report(m, o));
  });
  same_across_workers("permutation null", [&] { return to_json(permutation_null(m, 20, 3)); });
  same_across_workers("matched dimension", [&] {
    const auto r = matched_dimension_ed(m, 60, 20, 16, 2);
    return Json{r.mean, r.sd};
  });
  same_across_workers("split half", [&] { return Json(split_half_reliability(m, 12, 2, 4)); });
  same_across_workers("alternatives", [&] { return to_json(alternative_estimators(m, 6, 8)); });
  same_across_workers("correlation ci", [&] {
    const Eigen::VectorXd a = m.values().row(0);
    const Eigen::VectorXd b = m.values().colwise().mean();
    return to_json(correlation_ci(std::span<const double>(a.data(), 40), std::span<const double>(b.data(), 40),
                                  CorrMethod::spearman, 500, 0.95, 1));
  });
  same_across_workers("tetrachoric", [&] { return to_json(tetrachoric_matrix(m)); });
  same_across_workers("fragility", [&] { return to_json(dirichlet_fragility(s, 0.5, 500, 8)); });
  same_across_workers("subset search", [&] { return to_json(best_subset_search(s, 2)); });
  same_across_workers("greedy", [&] { return to_json(ed_greedy(m, 15)); });
  for (auto method : {SelectionMethod::random, SelectionMethod::k_medoids, SelectionMethod::two_stage}) {
    same_across_workers("baselines", [&] { return to_json(select_tasks(m, 10, method, 3)); });
  }
  same_across_workers("compression", [&] { return to_json(compression_curve(m, 0.95, 6, 2)); });
  same_across_workers("submodularity", [&] { return to_json(submodularity_probe(m, 60, 2)); });
  same_across_workers("prospective", [&] {
    return to_json(prospective_split_eval(m, 0.6, {SelectionMethod::random, SelectionMethod::ed_greedy}, {10}, 1));
  });
  same_across_workers("model counts", [&] { return to_json(ed_vs_model_count(m, {10, 20, 40}, 8, 3)); });
  same_across_workers("sliding window", [&] { return to_json(sliding_window_ed(s, 20, 10, true)); });
  same_across_workers("cohorts", [&] {
    std::vector<std::string> a(s.model_ids().begin(), s.model_ids().begin() + 40);
    std::vector<std::string> b(s.model_ids().begin() + 40, s.model_ids().end());
    return to_json(cohort_bootstrap_compare(s, a, b, 40, 100, 3));
  });
  same_across_workers("diversity", [&] {
    std::vector<std::string> late(m.model_ids().begin() + 20, m.model_ids().end());
    std::vector<std::string> early(m.model_ids().begin(), m.model_ids().begin() + 20);
    return to_json(diversity_insertion_probe(m, late, early, 30, 4));
  });
}
