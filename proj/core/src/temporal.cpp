#include "spectradiag/temporal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include "spectradiag/error.hpp"
#include "spectradiag/parallel.hpp"
#include "spectradiag/random.hpp"
#include "spectradiag/spectral.hpp"
#include "spectradiag/stats.hpp"

namespace spectradiag {
namespace {

constexpr std::size_t kExactLimit = 10;

std::vector<Eigen::Index> model_positions(const ScoreMatrix& m, const std::vector<std::string>& ids,
                                          std::string_view what) {
  if (ids.empty()) throw InputError(std::string(what) + ": cohort is empty");
  std::vector<Eigen::Index> out;
  for (const auto& id : ids) {
    const auto j = m.model_index(id);
    if (!j) throw InputError(std::string(what) + ": unknown model '" + id + "'");
    out.push_back(*j);
  }
  return out;
}

double parse_field(std::string_view text, std::string_view source, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw InputError(std::string(source) + ":" + std::to_string(line) + ": invalid number '" + std::string(text) + "'");
  }
  return v;
}

double mk_statistic(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (x[j] > x[i]) s += 1.0;
      if (x[j] < x[i]) s -= 1.0;
    }
  }
  return s;
}

// Two-sided P(|S| >= |s_obs|) under random ordering of the observed values.
double exact_mk_p(std::span<const double> x, double s_obs) {
  const std::size_t n = x.size();
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const bool ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
  const double target = std::abs(s_obs) - 1e-9;
  if (!ties) {
    // Mahonian numbers: permutations of n by inversion count; S = pairs - 2 inv.
    std::vector<double> counts{1.0};
    for (std::size_t k = 2; k <= n; ++k) {
      std::vector<double> next(counts.size() + k - 1, 0.0);
      for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = 0; j < k; ++j) next[i + j] += counts[i];
      }
      counts = std::move(next);
    }
    const double pairs = static_cast<double>(n * (n - 1) / 2);
    double hit = 0.0;
    double total = 0.0;
    for (std::size_t inv = 0; inv < counts.size(); ++inv) {
      total += counts[inv];
      if (std::abs(pairs - 2.0 * static_cast<double>(inv)) >= target) hit += counts[inv];
    }
    return hit / total;
  }
  double hit = 0.0;
  double total = 0.0;
  do {
    total += 1.0;
    if (std::abs(mk_statistic(sorted)) >= target) hit += 1.0;
  } while (std::next_permutation(sorted.begin(), sorted.end()));
  return hit / total;
}

double fitted(double e, double h, double n) { return e * n / (n + h); }

double rss_of(std::span<const SaturationPoint> pts, double e, double h) {
  double rss = 0.0;
  for (const auto& p : pts) {
    const double r = p.ed - fitted(e, h, p.n);
    rss += r * r;
  }
  return rss;
}

}  // namespace

void EdSeries::validate() const {
  if (x.size() != ed.size()) throw InputError("ED series: x and ed lengths differ");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw InputError("ED series: x must be strictly increasing");
  }
}

void write_series_csv(const EdSeries& s, std::ostream& out) {
  s.validate();
  out << "x,ed\n";
  for (std::size_t i = 0; i < s.x.size(); ++i) out << format_double(s.x[i]) << ',' << format_double(s.ed[i]) << '\n';
}

EdSeries read_series_csv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw InputError(std::string(source) + ": empty series file");
  ++line_no;
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,ed") throw InputError(std::string(source) + ": expected header 'x,ed'");
  EdSeries s;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw InputError(std::string(source) + ":" + std::to_string(line_no) + ": expected two fields");
    }
    const std::string_view view(line);
    s.x.push_back(parse_field(view.substr(0, comma), source, line_no));
    s.ed.push_back(parse_field(view.substr(comma + 1), source, line_no));
  }
  s.validate();
  return s;
}

EdSeries load_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_series_csv(in, path.string());
}

SuiteScores sort_models_by_composite(const SuiteScores& s) {
  const Ranking r = equal_weight_ranking(s);
  std::vector<std::size_t> idx(r.order.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (r.composite[a] != r.composite[b]) return r.composite[a] < r.composite[b];
    return r.order[a] < r.order[b];
  });
  std::vector<std::string> ascending;
  for (std::size_t i : idx) ascending.push_back(r.order[i]);
  return s.select_models(s.model_indices(ascending));
}

EdSeries sliding_window_ed(const SuiteScores& s, std::size_t window, std::size_t step, bool standardize) {
  const auto n = static_cast<std::size_t>(s.model_count());
  if (window < 2) throw InputError("sliding_window_ed: window must be at least 2");
  if (step < 1) throw InputError("sliding_window_ed: step must be positive");
  if (window > n) {
    throw InputError("sliding_window_ed: window " + std::to_string(window) + " exceeds " + std::to_string(n) +
                     " models");
  }
  const std::size_t count = (n - window) / step + 1;
  EdSeries out;
  out.window = window;
  out.step = step;
  out.standardized = standardize;
  out.x.resize(count);
  out.ed.resize(count);
  parallel_for(count, [&](std::size_t w) {
    const std::size_t start = w * step;
    Eigen::MatrixXd block = s.scores().middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(window));
    for (Eigen::Index b = 0; b < block.rows(); ++b) {
      block.row(b).array() -= block.row(b).mean();
      if (standardize) {
        const double sd = std::sqrt(block.row(b).squaredNorm() / static_cast<double>(window));
        if (!(sd > 0.0)) {
          throw AnalysisError("sliding_window_ed: benchmark '" + s.benchmark_ids()[static_cast<std::size_t>(b)] +
                              "' is constant in window starting at model " + std::to_string(start));
        }
        block.row(b) /= sd;
      }
    }
    out.x[w] = static_cast<double>(start) + static_cast<double>(window - 1) / 2.0;
    out.ed[w] = matrix_ed(block);
  });
  return out;
}

EdSeries sliding_window_ed(const ScoreMatrix& m, std::size_t window, std::size_t step) {
  m.require_complete("sliding_window_ed");
  const auto n = static_cast<std::size_t>(m.model_count());
  if (window < 2) throw InputError("sliding_window_ed: window must be at least 2");
  if (step < 1) throw InputError("sliding_window_ed: step must be positive");
  if (window > n) {
    throw InputError("sliding_window_ed: window " + std::to_string(window) + " exceeds " + std::to_string(n) +
                     " models");
  }
  const std::size_t count = (n - window) / step + 1;
  EdSeries out;
  out.window = window;
  out.step = step;
  out.x.resize(count);
  out.ed.resize(count);
  parallel_for(count, [&](std::size_t w) {
    const std::size_t start = w * step;
    Eigen::MatrixXd block = m.values().middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(window));
    out.x[w] = static_cast<double>(start) + static_cast<double>(window - 1) / 2.0;
    out.ed[w] = matrix_ed(center(block, Centering::task));
  });
  return out;
}

MannKendall mann_kendall(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) throw InputError("mann_kendall: need at least 4 values");
  for (double v : series) {
    if (!std::isfinite(v)) throw InputError("mann_kendall: series has non-finite values");
  }
  MannKendall r;
  r.n = n;
  r.s = mk_statistic(series);

  std::map<double, double> groups;
  for (double v : series) groups[v] += 1.0;
  const double dn = static_cast<double>(n);
  double tie_var = 0.0;
  double tied_pairs = 0.0;
  for (const auto& [value, t] : groups) {
    tie_var += t * (t - 1.0) * (2.0 * t + 5.0);
    tied_pairs += t * (t - 1.0) / 2.0;
  }
  r.variance = (dn * (dn - 1.0) * (2.0 * dn + 5.0) - tie_var) / 18.0;
  const double pairs = dn * (dn - 1.0) / 2.0;
  if (groups.size() == 1) {
    r.tau = 0.0;
    r.p = 1.0;
    r.exact = n <= kExactLimit;
    return r;
  }
  r.tau = r.s / std::sqrt(pairs * (pairs - tied_pairs));
  if (n <= kExactLimit) {
    r.exact = true;
    r.p = exact_mk_p(series, r.s);
  } else {
    double z = 0.0;
    if (r.s > 0.0) z = (r.s - 1.0) / std::sqrt(r.variance);
    if (r.s < 0.0) z = (r.s + 1.0) / std::sqrt(r.variance);
    r.p = std::min(1.0, 2.0 * (1.0 - stats::standard_normal_cdf(std::abs(z))));
  }
  return r;
}

SaturationFit saturation_fit(std::span<const SaturationPoint> points) {
  std::vector<double> ns;
  for (const auto& p : points) {
    if (!(p.n > 0.0) || !std::isfinite(p.n)) throw InputError("saturation_fit: model counts must be positive");
    if (!(p.ed > 0.0) || !std::isfinite(p.ed)) throw InputError("saturation_fit: ED values must be positive");
    ns.push_back(p.n);
  }
  std::sort(ns.begin(), ns.end());
  if (std::unique(ns.begin(), ns.end()) - ns.begin() < 3) {
    throw InputError("saturation_fit: need at least 3 distinct model counts");
  }

  std::vector<double> u;
  std::vector<double> y;
  for (const auto& p : points) {
    u.push_back(1.0 / p.n);
    y.push_back(1.0 / p.ed);
  }
  const auto line = stats::fit_line(u, y);
  if (!(line.intercept > 0.0)) throw AnalysisError("saturation_fit: linearized fit gives a non-positive ED_inf");
  double e = 1.0 / line.intercept;
  double h = line.slope * e;
  const double scale_n = ns.back();
  const double h_floor = 1e-9 * scale_n;

  SaturationFit fit;
  if (h < -h_floor) throw AnalysisError("saturation_fit: fitted n_half is negative");
  h = std::max(h, 0.0);

  double rss = rss_of(points, e, h);
  for (std::size_t iter = 0; iter < 100; ++iter) {
    // Normal equations of the 2-parameter Gauss-Newton step.
    double jee = 0.0;
    double jeh = 0.0;
    double jhh = 0.0;
    double ge = 0.0;
    double gh = 0.0;
    for (const auto& p : points) {
      const double d = p.n + h;
      const double de = p.n / d;
      const double dh = -e * p.n / (d * d);
      const double r = p.ed - e * de;
      jee += de * de;
      jeh += de * dh;
      jhh += dh * dh;
      ge += de * r;
      gh += dh * r;
    }
    const double det = jee * jhh - jeh * jeh;
    if (!(std::abs(det) > 0.0)) break;
    const double step_e = (jhh * ge - jeh * gh) / det;
    const double step_h = (jee * gh - jeh * ge) / det;
    double lambda = 1.0;
    bool improved = false;
    while (lambda > 1e-10) {
      const double ne = e + lambda * step_e;
      const double nh = std::max(0.0, h + lambda * step_h);
      if (ne > 0.0) {
        const double nr = rss_of(points, ne, nh);
        if (nr < rss) {
          const double change = std::abs(ne - e) / e + std::abs(nh - h) / std::max(h, 1.0);
          e = ne;
          h = nh;
          rss = nr;
          improved = true;
          fit.iterations = iter + 1;
          if (change < 1e-14) lambda = 0.0;
          break;
        }
      }
      lambda /= 2.0;
    }
    if (!improved || lambda == 0.0) break;
  }
  if (!(e > 0.0)) throw AnalysisError("saturation_fit: fitted ED_inf is not positive");
  fit.ed_inf = e;
  fit.n_half = h;
  fit.rss = rss;
  fit.boundary = h <= h_floor;
  return fit;
}

std::vector<SaturationPoint> ed_vs_model_count(const ScoreMatrix& m, const std::vector<Eigen::Index>& counts,
                                               std::size_t trials, std::uint64_t seed) {
  m.require_complete("ed_vs_model_count");
  if (trials < 1) throw InputError("ed_vs_model_count: need at least one trial");
  const auto n = static_cast<std::size_t>(m.model_count());
  for (Eigen::Index c : counts) {
    if (c < 2 || static_cast<std::size_t>(c) > n) {
      throw InputError("ed_vs_model_count: count " + std::to_string(c) + " outside [2, " + std::to_string(n) + "]");
    }
  }
  std::vector<double> eds(counts.size() * trials, std::numeric_limits<double>::quiet_NaN());
  parallel_for(eds.size(), [&](std::size_t cell) {
    const auto size = static_cast<std::size_t>(counts[cell / trials]);
    Rng rng = substream(seed, cell);
    const auto cols = sample_indices(rng, n, size);
    Eigen::MatrixXd sub(m.task_count(), static_cast<Eigen::Index>(size));
    for (std::size_t c = 0; c < size; ++c) sub.col(static_cast<Eigen::Index>(c)) = m.values().col(static_cast<Eigen::Index>(cols[c]));
    if (const auto ed = try_matrix_ed(center(sub, Centering::task))) eds[cell] = *ed;
  });

  std::vector<SaturationPoint> out;
  for (std::size_t ci = 0; ci < counts.size(); ++ci) {
    std::vector<double> ok;
    for (std::size_t t = 0; t < trials; ++t) {
      const double v = eds[ci * trials + t];
      if (!std::isnan(v)) ok.push_back(v);
    }
    if (ok.empty()) throw AnalysisError("ed_vs_model_count: every subset of " + std::to_string(counts[ci]) + " models is degenerate");
    out.push_back({static_cast<double>(counts[ci]), stats::mean(ok), stats::sample_sd(ok)});
  }
  return out;
}

std::vector<std::string> fixed_variance_subset(const ScoreMatrix& m, const std::vector<std::string>& early_ids,
                                               const std::vector<std::string>& late_ids, double tol) {
  m.require_complete("fixed_variance_subset");
  const auto early = model_positions(m, early_ids, "fixed_variance_subset");
  const auto late = model_positions(m, late_ids, "fixed_variance_subset");
  auto cohort_variance = [&](Eigen::Index task, const std::vector<Eigen::Index>& cols) {
    std::vector<double> v;
    for (Eigen::Index c : cols) v.push_back(m.values()(task, c));
    return stats::variance(v);
  };
  std::vector<std::string> kept;
  for (Eigen::Index t = 0; t < m.task_count(); ++t) {
    const double ve = cohort_variance(t, early);
    const double vl = cohort_variance(t, late);
    if (std::abs(vl - ve) / std::max(ve, 1e-9) < tol) kept.push_back(m.task_ids()[static_cast<std::size_t>(t)]);
  }
  return kept;
}

CohortComparison cohort_bootstrap_compare(const SuiteScores& s, const std::vector<std::string>& group_a,
                                          const std::vector<std::string>& group_b, std::size_t sample,
                                          std::size_t iterations, std::uint64_t seed) {
  if (group_a.size() < 10 || group_b.size() < 10) throw InputError("cohort_bootstrap_compare: groups need 10 models");
  if (sample < 2) throw InputError("cohort_bootstrap_compare: sample must be at least 2");
  if (iterations < 2) throw InputError("cohort_bootstrap_compare: need at least 2 iterations");
  const auto idx_a = s.model_indices(group_a);
  const auto idx_b = s.model_indices(group_b);

  auto resampled_ed = [&](Rng& rng, const std::vector<Eigen::Index>& group) -> double {
    std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
    Eigen::MatrixXd block(s.benchmark_count(), static_cast<Eigen::Index>(sample));
    for (std::size_t c = 0; c < sample; ++c) block.col(static_cast<Eigen::Index>(c)) = s.scores().col(group[pick(rng)]);
    for (Eigen::Index b = 0; b < block.rows(); ++b) {
      block.row(b).array() -= block.row(b).mean();
      const double sd = std::sqrt(block.row(b).squaredNorm() / static_cast<double>(sample));
      if (!(sd > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      block.row(b) /= sd;
    }
    return matrix_ed(block);
  };

  std::vector<double> ed_a(iterations);
  std::vector<double> ed_b(iterations);
  parallel_for(iterations, [&](std::size_t i) {
    Rng rng = substream(seed, i);
    ed_a[i] = resampled_ed(rng, idx_a);
    ed_b[i] = resampled_ed(rng, idx_b);
  });

  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> diff;
  std::size_t wins = 0;
  for (std::size_t i = 0; i < iterations; ++i) {
    if (std::isnan(ed_a[i]) || std::isnan(ed_b[i])) continue;
    a.push_back(ed_a[i]);
    b.push_back(ed_b[i]);
    diff.push_back(ed_b[i] - ed_a[i]);
    if (ed_b[i] > ed_a[i]) ++wins;
  }
  if (diff.size() < 2) throw AnalysisError("cohort_bootstrap_compare: resamples are degenerate");

  CohortComparison r;
  r.iterations = diff.size();
  r.seed = seed;
  r.delta = stats::mean(diff);
  r.ci = {stats::quantile(diff, 0.025), stats::quantile(diff, 0.975)};
  r.mean_a = stats::mean(a);
  r.mean_b = stats::mean(b);
  r.sd_a = stats::sample_sd(a);
  r.sd_b = stats::sample_sd(b);
  const double pooled = std::sqrt((r.sd_a * r.sd_a + r.sd_b * r.sd_b) / 2.0);
  r.cohens_d = pooled > 0.0 ? (r.mean_b - r.mean_a) / pooled : 0.0;
  r.p_direction = static_cast<double>(wins) / static_cast<double>(diff.size());
  return r;
}

DiversityProbe diversity_insertion_probe(const ScoreMatrix& m, const std::vector<std::string>& late_ids,
                                         const std::vector<std::string>& early_ids, std::size_t trials,
                                         std::uint64_t seed) {
  m.require_complete("diversity_insertion_probe");
  if (trials < 1) throw InputError("diversity_insertion_probe: need at least one trial");
  const auto late = model_positions(m, late_ids, "diversity_insertion_probe");
  const auto early = model_positions(m, early_ids, "diversity_insertion_probe");
  if (late.size() < 2) throw InputError("diversity_insertion_probe: late cohort needs two models");

  Eigen::MatrixXd base(m.task_count(), static_cast<Eigen::Index>(late.size()) + 1);
  for (std::size_t c = 0; c < late.size(); ++c) base.col(static_cast<Eigen::Index>(c)) = m.values().col(late[c]);
  const double before = try_matrix_ed(center(base.leftCols(base.cols() - 1).eval(), Centering::task)).value_or(0.0);

  std::vector<char> increased(trials, 0);
  parallel_for(trials, [&](std::size_t i) {
    Rng rng = substream(seed, i);
    const Eigen::Index pick = early[std::uniform_int_distribution<std::size_t>(0, early.size() - 1)(rng)];
    Eigen::MatrixXd with = base;
    with.col(with.cols() - 1) = m.values().col(pick);
    const double after = try_matrix_ed(center(with, Centering::task)).value_or(0.0);
    increased[i] = after > before * (1.0 + 1e-12) ? 1 : 0;
  });

  DiversityProbe r;
  r.ed_late = before;
  r.trials = trials;
  r.seed = seed;
  r.fraction_increase =
      static_cast<double>(std::count(increased.begin(), increased.end(), 1)) / static_cast<double>(trials);
  return r;
}

TemporalDensity temporal_information_density(const EdSeries& series) {
  series.validate();
  const auto fit = stats::fit_line(series.x, series.ed);
  return {fit.slope, fit.slope_se};
}

}  // namespace spectradiag
