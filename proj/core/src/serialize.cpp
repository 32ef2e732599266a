#include "spectradiag/serialize.hpp"

#include <cmath>

namespace spectradiag {
namespace {

// JSON has no NaN or infinity; undefined values become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

Json pairs(const std::vector<FlaggedPair>& ps) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back({{"first", p.first}, {"second", p.second}, {"rho", number(p.rho)}});
  return out;
}

Json step_header(const StepInfo& info) {
  Json j;
  j["status"] = std::string(to_string(info.status));
  if (!info.reason.empty()) j["reason"] = info.reason;
  return j;
}

}  // namespace

Json to_json(const EdReport& r) {
  return {{"ed", number(r.ed)},
          {"pc1_pct", number(r.pc1_pct)},
          {"ed_null", number(r.ed_null)},
          {"ratio", number(r.ratio)},
          {"ci_low", number(r.ci_low)},
          {"ci_high", number(r.ci_high)},
          {"level", r.level},
          {"tasks", r.tasks},
          {"models", r.models},
          {"centering", std::string(to_string(r.centering))},
          {"bootstrap_iterations", r.bootstrap_iterations},
          {"seed", r.seed}};
}

Json to_json(const NullSpectrumBand& b) {
  return {{"axis", b.axis == ShuffleAxis::within_task ? "within_task" : "within_model"},
          {"replicates", b.replicates},
          {"quantile", b.quantile},
          {"seed", b.seed},
          {"upper", numbers(b.upper)}};
}

Json to_json(const AlternativeEstimates& a) {
  return {{"parallel_analysis", a.parallel_analysis},
          {"kaiser", a.kaiser},
          {"broken_stick", a.broken_stick},
          {"var80", a.var80},
          {"var90", a.var90}};
}

Json to_json(const CorrMatrix& c) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < c.values.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < c.values.cols(); ++j) row.push_back(number(c.values(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"method", std::string(to_string(c.method))}, {"ids", c.ids}, {"values", std::move(rows)}};
}

Json to_json(const RedundancyFlags& f) {
  return {{"redundant", pairs(f.redundant)},
          {"vet_fail", pairs(f.vet_fail)},
          {"complementary", pairs(f.complementary)}};
}

Json to_json(const ClusterGrouping& g) {
  Json merges = Json::array();
  for (const auto& m : g.merges) merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}});
  return {{"merges", std::move(merges)}, {"groups", g.groups}};
}

Json to_json(const StratifiedCorrelation& s) {
  Json strata = Json::array();
  for (const auto& st : s.strata) {
    strata.push_back({{"label", st.label},
                      {"n", st.n},
                      {"rho", st.rho ? number(*st.rho) : Json(nullptr)},
                      {"reliable", st.reliable}});
  }
  return {{"strata", std::move(strata)}, {"warnings", s.warnings}};
}

Json to_json(const Interval& i) { return {{"low", number(i.low)}, {"high", number(i.high)}}; }

Json to_json(const Ranking& r) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    rows.push_back({{"rank", i + 1}, {"model", r.order[i]}, {"composite", number(r.composite[i])}});
  }
  return rows;
}

Json to_json(const CeilingOracle& c) {
  return {{"value", number(c.value)}, {"argmax_weight_ratio", number(c.argmax_weight_ratio)}};
}

Json to_json(const FragilityReport& f) {
  return {{"alpha", f.alpha},
          {"samples", f.samples},
          {"seed", f.seed},
          {"baseline_champion", f.baseline_champion},
          {"champion_change_rate", number(f.champion_change_rate)},
          {"distinct_champions", f.distinct_champions}};
}

Json to_json(const std::vector<LeaveOneOut>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"benchmark", r.benchmark_id}, {"delta_ed", number(r.delta_ed)}, {"tau_vs_full", number(r.tau_vs_full)}});
  }
  return out;
}

Json to_json(const SubsetSearch& s) {
  return {{"evaluated", s.evaluated},
          {"best", {{"benchmarks", s.best.benchmarks}, {"tau", number(s.best.tau)}}},
          {"worst", {{"benchmarks", s.worst.benchmarks}, {"tau", number(s.worst.tau)}}}};
}

Json to_json(const SelectionResult& r) {
  return {{"method", std::string(to_string(r.method))},
          {"seed", r.seed},
          {"selected", r.selected},
          {"ed_trajectory", numbers(r.ed_trajectory)},
          {"tau_vs_full", number(r.tau_vs_full)}};
}

Json to_json(const CompressionCurve& c) {
  Json curve = Json::array();
  for (const auto& p : c.curve) curve.push_back({{"fraction", p.fraction}, {"tasks", p.tasks}, {"mean_tau", number(p.mean_tau)}});
  return {{"tau_target", c.tau_target},
          {"fraction_needed", c.fraction_needed},
          {"reached", c.reached},
          {"curve", std::move(curve)}};
}

Json to_json(const SubmodularityProbe& p) {
  return {{"samples", p.samples},
          {"seed", p.seed},
          {"valid", p.valid},
          {"median_gamma", number(p.median_gamma)},
          {"min_gamma", number(p.min_gamma)},
          {"negative_numerator", p.negative_numerator},
          {"below_one_fraction", number(p.below_one_fraction)}};
}

Json to_json(const std::vector<ProspectiveRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"method", std::string(to_string(r.method))},
                   {"k", r.k},
                   {"train_tau", number(r.train_tau)},
                   {"test_tau", number(r.test_tau)},
                   {"gap", number(r.gap)}});
  }
  return out;
}

Json to_json(const EdSeries& s) {
  return {{"window", s.window},
          {"step", s.step},
          {"standardized", s.standardized},
          {"x", numbers(s.x)},
          {"ed", numbers(s.ed)}};
}

Json to_json(const MannKendall& m) {
  return {{"n", m.n},
          {"s", m.s},
          {"tau", number(m.tau)},
          {"p", number(m.p)},
          {"variance", number(m.variance)},
          {"exact", m.exact}};
}

Json to_json(const SaturationFit& f) {
  return {{"ed_inf", number(f.ed_inf)},
          {"n_half", number(f.n_half)},
          {"rss", number(f.rss)},
          {"boundary", f.boundary},
          {"iterations", f.iterations}};
}

Json to_json(const std::vector<SaturationPoint>& points) {
  Json out = Json::array();
  for (const auto& p : points) out.push_back({{"n", p.n}, {"ed", number(p.ed)}, {"sd", number(p.sd)}});
  return out;
}

Json to_json(const CohortComparison& c) {
  return {{"iterations", c.iterations},
          {"seed", c.seed},
          {"delta", number(c.delta)},
          {"ci", to_json(c.ci)},
          {"cohens_d", number(c.cohens_d)},
          {"p_direction", number(c.p_direction)},
          {"mean_a", number(c.mean_a)},
          {"sd_a", number(c.sd_a)},
          {"mean_b", number(c.mean_b)},
          {"sd_b", number(c.sd_b)}};
}

Json to_json(const DiversityProbe& d) {
  return {{"trials", d.trials},
          {"seed", d.seed},
          {"ed_late", number(d.ed_late)},
          {"fraction_increase", number(d.fraction_increase)}};
}

Json to_json(const TemporalDensity& t) { return {{"slope", number(t.slope)}, {"se", number(t.se)}}; }

Json to_json(const RankRecoveryReport& r) {
  Json per_k = Json::array();
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    per_k.push_back({{"k", r.ks[i]},
                     {"mean_ed", number(r.mean_ed[i])},
                     {"overestimate_ratio", number(r.overestimate_ratio[i])},
                     {"ed", numbers(r.ed[i])}});
  }
  return {{"tasks", r.options.tasks},
          {"models", r.options.models},
          {"seeds", r.options.seeds},
          {"base_seed", r.options.base_seed},
          {"discrimination_scale", r.options.discrimination_scale},
          {"difficulty_spread", r.options.difficulty_spread},
          {"spearman_rho", number(r.spearman_rho)},
          {"per_seed_rho_mean", number(r.per_seed_rho_mean)},
          {"per_seed_rho_sd", number(r.per_seed_rho_sd)},
          {"top_exceeds_bottom_every_seed", r.top_exceeds_bottom_every_seed},
          {"per_k", std::move(per_k)}};
}

Json to_json(const WorkflowReport& r) {
  Json step1 = step_header(r.step1.info);
  step1["benchmarks"] = r.step1.benchmarks;
  if (r.step1.info.status == StepStatus::ok) {
    step1["method"] = "spearman";
    step1["flags"] = to_json(r.step1.flags);
  }

  Json step2 = step_header(r.step2.info);
  if (r.step2.info.status == StepStatus::ok) {
    step2["suite_ed"] = number(r.step2.suite_ed);
    step2["benchmarks"] = r.step2.benchmarks;
    step2["information_density"] = number(r.step2.information_density);
    step2["verdict"] = r.step2.verdict;
  }
  Json per = Json::array();
  for (const auto& b : r.step2.per_benchmark) {
    per.push_back({{"name", b.name},
                   {"tasks", b.tasks},
                   {"models", b.models},
                   {"ed", number(b.ed)},
                   {"ed_null", number(b.ed_null)},
                   {"ratio", number(b.ratio)}});
  }
  step2["per_benchmark"] = std::move(per);

  Json step3 = step_header(r.step3.info);
  if (r.step3.info.status == StepStatus::ok) {
    step3["mann_kendall"] = to_json(r.step3.trend);
    step3["verdict"] = r.step3.verdict;
  }

  Json step4 = step_header(r.step4.info);
  Json cands = Json::array();
  for (const auto& c : r.step4.candidates) {
    cands.push_back({{"candidate", c.candidate},
                     {"nearest", c.nearest},
                     {"max_rho", number(c.max_rho)},
                     {"shared_models", c.shared_models},
                     {"pass", c.pass}});
  }
  step4["candidates"] = std::move(cands);

  Json digests = Json::array();
  for (const auto& [path, hash] : r.digests) digests.push_back({{"path", path}, {"fnv1a64", hash}});

  return {{"version", r.version},
          {"seed", r.seed},
          {"thresholds",
           {{"redundant", r.thresholds.redundant},
            {"vet", r.thresholds.vet},
            {"complementary", r.thresholds.complementary},
            {"ed_floor", r.thresholds.ed_floor},
            {"alpha", r.thresholds.alpha}}},
          {"inputs", std::move(digests)},
          {"step1_redundancy", std::move(step1)},
          {"step2_dimensionality", std::move(step2)},
          {"step3_trend", std::move(step3)},
          {"step4_vetting", std::move(step4)}};
}

}  // namespace spectradiag
