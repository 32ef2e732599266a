#include "spectradiag/association.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "spectradiag/error.hpp"
#include "spectradiag/parallel.hpp"
#include "spectradiag/random.hpp"
#include "spectradiag/spectral.hpp"
#include "spectradiag/stats.hpp"

namespace spectradiag {
namespace {

constexpr std::size_t kMinPairs = 3;

void require_same_length(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) throw InputError(std::string(what) + ": series lengths differ");
}

}  // namespace

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "pearson");
  if (x.size() < kMinPairs) return std::nullopt;
  const double mx = stats::mean(x);
  const double my = stats::mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "spearman");
  const auto rx = stats::average_ranks(x);
  const auto ry = stats::average_ranks(y);
  return pearson(rx, ry);
}

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "kendall_tau_b");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double concordant_minus_discordant = 0.0;
  double tied_x = 0.0;
  double tied_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) tied_x += 1.0;
      if (dy == 0.0) tied_y += 1.0;
      if (dx != 0.0 && dy != 0.0) concordant_minus_discordant += (dx > 0.0) == (dy > 0.0) ? 1.0 : -1.0;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double denom = std::sqrt((pairs - tied_x) * (pairs - tied_y));
  if (denom <= 0.0) return std::nullopt;
  return std::clamp(concordant_minus_discordant / denom, -1.0, 1.0);
}

std::optional<double> correlation(std::span<const double> x, std::span<const double> y, CorrMethod method) {
  switch (method) {
    case CorrMethod::pearson: return pearson(x, y);
    case CorrMethod::spearman: return spearman(x, y);
    case CorrMethod::kendall: return kendall_tau_b(x, y);
    case CorrMethod::tetrachoric: break;
  }
  throw InputError("correlation: tetrachoric needs a contingency table");
}

CorrMatrix pairwise_correlation(const std::vector<std::string>& ids, const Eigen::MatrixXd& rows, CorrMethod method) {
  const Eigen::Index p = rows.rows();
  if (static_cast<Eigen::Index>(ids.size()) != p) throw InputError("pairwise_correlation: ids do not match rows");
  if (method == CorrMethod::tetrachoric) {
    for (Eigen::Index i = 0; i < rows.size(); ++i) {
      const double v = rows.data()[i];
      if (!std::isnan(v) && v != 0.0 && v != 1.0) throw InputError("tetrachoric correlation needs binary series");
    }
  }
  CorrMatrix out{ids, Eigen::MatrixXd::Identity(p, p), method};
  parallel_for(static_cast<std::size_t>(p), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    for (Eigen::Index j = i + 1; j < p; ++j) {
      std::vector<double> x;
      std::vector<double> y;
      for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        if (std::isnan(rows(i, c)) || std::isnan(rows(j, c))) continue;
        x.push_back(rows(i, c));
        y.push_back(rows(j, c));
      }
      std::optional<double> r;
      if (x.size() >= kMinPairs) {
        r = method == CorrMethod::tetrachoric ? tetrachoric(contingency(x, y)) : correlation(x, y, method);
      }
      const double v = r.value_or(std::numeric_limits<double>::quiet_NaN());
      out.values(i, j) = v;
      out.values(j, i) = v;
    }
  });
  // A series with no variance is undefined even against itself.
  for (Eigen::Index i = 0; i < p; ++i) {
    bool constant = true;
    double first = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      const double v = rows(i, c);
      if (std::isnan(v)) continue;
      if (std::isnan(first)) {
        first = v;
      } else if (v != first) {
        constant = false;
        break;
      }
    }
    if (constant) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j == i) continue;
        out.values(i, j) = std::numeric_limits<double>::quiet_NaN();
        out.values(j, i) = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return out;
}

Interval correlation_ci(std::span<const double> x, std::span<const double> y, CorrMethod method,
                        std::size_t iterations, double level, std::uint64_t seed) {
  require_same_length(x, y, "correlation_ci");
  if (iterations < 2) throw InputError("correlation_ci: need at least two iterations");
  if (!(level > 0.0 && level < 1.0)) throw InputError("correlation_ci: level must lie in (0,1)");
  std::vector<double> draws(iterations, std::numeric_limits<double>::quiet_NaN());
  parallel_for(iterations, [&](std::size_t it) {
    Rng rng = substream(seed, it);
    const auto idx = resample_indices(rng, x.size());
    std::vector<double> bx(idx.size());
    std::vector<double> by(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      bx[i] = x[idx[i]];
      by[i] = y[idx[i]];
    }
    if (auto r = correlation(bx, by, method)) draws[it] = *r;
  });
  std::erase_if(draws, [](double v) { return std::isnan(v); });
  if (draws.empty()) throw AnalysisError("correlation_ci: every resample was undefined");
  const double alpha = 1.0 - level;
  return Interval{stats::quantile(draws, alpha / 2.0), stats::quantile(draws, 1.0 - alpha / 2.0)};
}

namespace {

std::vector<double> residualize(std::span<const double> v, std::span<const double> z) {
  const auto fit = stats::fit_line(z, v);
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] - fit.intercept - fit.slope * z[i];
  return r;
}

}  // namespace

double partial_correlation(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                           CorrMethod method) {
  require_same_length(x, y, "partial_correlation");
  require_same_length(x, z, "partial_correlation");
  if (x.size() < 10) throw InputError("partial_correlation: need at least 10 observations");
  if (method != CorrMethod::pearson && method != CorrMethod::spearman) {
    throw InputError("partial_correlation supports pearson and spearman");
  }
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::vector<double> zs(z.begin(), z.end());
  if (method == CorrMethod::spearman) {
    xs = stats::average_ranks(xs);
    ys = stats::average_ranks(ys);
    zs = stats::average_ranks(zs);
  }
  if (stats::variance(zs) <= 0.0) throw InputError("partial_correlation: control variable is constant");
  const auto rx = residualize(xs, zs);
  const auto ry = residualize(ys, zs);
  const double vx = stats::variance(xs);
  const double vy = stats::variance(ys);
  constexpr double kExplained = 1e-12;
  if (stats::variance(rx) <= kExplained * vx || stats::variance(ry) <= kExplained * vy) return 0.0;
  return pearson(rx, ry).value_or(0.0);
}

StratifiedCorrelation stratified_correlation(std::span<const double> x, std::span<const double> y,
                                             const std::vector<std::string>& labels,
                                             const std::vector<std::string>& requested) {
  require_same_length(x, y, "stratified_correlation");
  if (labels.size() != x.size()) throw InputError("stratified_correlation: one label per observation required");
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  std::vector<std::string> order = requested;
  if (order.empty()) {
    for (const auto& [label, _] : members) order.push_back(label);
  }
  StratifiedCorrelation out;
  for (const auto& label : order) {
    const auto it = members.find(label);
    if (it == members.end()) {
      out.warnings.push_back("stratum '" + label + "' is empty; omitted");
      continue;
    }
    std::vector<double> sx;
    std::vector<double> sy;
    for (std::size_t i : it->second) {
      sx.push_back(x[i]);
      sy.push_back(y[i]);
    }
    StratumCorrelation s{label, sx.size(), spearman(sx, sy), false};
    s.reliable = s.n >= 5 && s.rho.has_value();
    if (!s.reliable) out.warnings.push_back("stratum '" + label + "' has n=" + std::to_string(s.n) + "; unreliable");
    out.strata.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tetrachoric

ContingencyTable contingency(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "contingency");
  ContingencyTable t;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool a = x[i] > 0.5;
    const bool b = y[i] > 0.5;
    if (a && b) {
      t.both += 1.0;
    } else if (a) {
      t.first_only += 1.0;
    } else if (b) {
      t.second_only += 1.0;
    } else {
      t.neither += 1.0;
    }
  }
  return t;
}

double bivariate_normal_cdf(double h, double k, double rho) {
  if (rho >= 1.0) return stats::standard_normal_cdf(std::min(h, k));
  if (rho <= -1.0) return std::max(0.0, stats::standard_normal_cdf(h) - stats::standard_normal_cdf(-k));
  // With r = sin(theta), d Phi2 / d r = phi2 turns into a smooth integrand in theta.
  const double upper = std::asin(rho);
  auto integrand = [h, k](double theta) {
    const double s = std::sin(theta);
    const double c2 = 1.0 - s * s;
    return std::exp(-(h * h + k * k - 2.0 * h * k * s) / (2.0 * c2));
  };
  double integral = 0.0;
  if (upper != 0.0) {
    integral = upper > 0.0 ? boost::math::quadrature::gauss<double, 64>::integrate(integrand, 0.0, upper)
                           : -boost::math::quadrature::gauss<double, 64>::integrate(integrand, upper, 0.0);
  }
  const double value =
      stats::standard_normal_cdf(h) * stats::standard_normal_cdf(k) + integral / (2.0 * std::numbers::pi);
  return std::clamp(value, 0.0, 1.0);
}

std::optional<double> tetrachoric(const ContingencyTable& table) {
  const double n = table.total();
  const double p1 = (table.both + table.first_only) / n;
  const double p2 = (table.both + table.second_only) / n;
  if (!(n > 0.0) || p1 <= 0.0 || p1 >= 1.0 || p2 <= 0.0 || p2 >= 1.0) return std::nullopt;
  const double p11 = table.both / n;
  const double z1 = stats::standard_normal_quantile(p1);
  const double z2 = stats::standard_normal_quantile(p2);
  auto f = [&](double rho) { return bivariate_normal_cdf(z1, z2, rho) - p11; };

  const double lo = -kTetrachoricClamp;
  const double hi = kTetrachoricClamp;
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo >= 0.0) return lo;
  if (f_hi <= 0.0) return hi;

  boost::uintmax_t max_iter = 200;
  auto tol = [&](double a, double b) { return std::abs(b - a) < 1e-12; };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
  const double root = 0.5 * (a + b);
  if (std::abs(f(root)) >= 1e-6) throw AnalysisError("tetrachoric: root finding did not converge");
  return root;
}

CorrMatrix tetrachoric_matrix(const ScoreMatrix& m) {
  m.require_complete("tetrachoric");
  if (m.kind() != ScoreKind::binary) throw InputError("tetrachoric: matrix must be binary");
  std::vector<Eigen::Index> usable;
  for (Eigen::Index j = 0; j < m.model_count(); ++j) {
    const auto col = m.values().col(j);
    if (col.maxCoeff() > col.minCoeff()) usable.push_back(j);
  }
  std::vector<std::string> ids;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(usable.size()), m.task_count());
  for (std::size_t r = 0; r < usable.size(); ++r) {
    ids.push_back(m.model_ids()[static_cast<std::size_t>(usable[r])]);
    rows.row(static_cast<Eigen::Index>(r)) = m.values().col(usable[r]).transpose();
  }
  return pairwise_correlation(ids, rows, CorrMethod::tetrachoric);
}

double tetrachoric_ed(const ScoreMatrix& m) {
  if (m.model_count() < 3) throw InputError("tetrachoric_ed: need at least three models");
  const CorrMatrix c = tetrachoric_matrix(m);
  if (c.size() < 3) throw InputError("tetrachoric_ed: fewer than three models have non-constant columns");
  if (c.has_undefined()) throw AnalysisError("tetrachoric_ed: undefined pairwise correlations");
  return participation_ratio(symmetric_eigenvalues(c.values));
}

// ---------------------------------------------------------------------------
// Clustering

ClusterGrouping hierarchical_cluster(const CorrMatrix& c, ClusterCut cut) {
  c.validate();
  if (c.has_undefined()) {
    throw InputError("hierarchical_cluster: undefined correlations for " +
                     std::to_string(c.undefined_ids().size()) + " series; drop them first");
  }
  const auto n = static_cast<std::size_t>(c.size());
  if (n == 0) throw InputError("hierarchical_cluster: empty matrix");
  const Eigen::MatrixXd dist = (1.0 - c.values.array().abs()).matrix();

  struct Cluster {
    std::vector<std::size_t> members;
    std::string key;  // smallest member id
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({{i}, c.ids[i]});

  auto average = [&](const Cluster& a, const Cluster& b) {
    double sum = 0.0;
    for (std::size_t i : a.members) {
      for (std::size_t j : b.members) sum += dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return sum / static_cast<double>(a.members.size() * b.members.size());
  };
  auto sorted_ids = [&](const Cluster& a) {
    std::vector<std::string> out;
    for (std::size_t i : a.members) out.push_back(c.ids[i]);
    std::sort(out.begin(), out.end());
    return out;
  };
  auto grouping = [&](const std::vector<Cluster>& cs) {
    std::vector<std::vector<std::string>> groups;
    for (const auto& cl : cs) groups.push_back(sorted_ids(cl));
    std::sort(groups.begin(), groups.end());
    return groups;
  };

  constexpr double kTie = 1e-12;
  ClusterGrouping out;
  std::optional<std::vector<std::vector<std::string>>> frozen;
  auto cut_reached = [&](double next_height) {
    if (const auto* h = std::get_if<CutAtHeight>(&cut)) return next_height >= h->height;
    return clusters.size() <= std::max<std::size_t>(1, std::get<CutToGroups>(cut).groups);
  };

  while (clusters.size() > 1) {
    std::size_t best_a = 0;
    std::size_t best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::string, std::string> best_key;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double d = average(clusters[a], clusters[b]);
        auto key = std::minmax(clusters[a].key, clusters[b].key);
        const std::pair<std::string, std::string> k{key.first, key.second};
        if (d < best - kTie || (std::abs(d - best) <= kTie && k < best_key)) {
          best = d;
          best_a = a;
          best_b = b;
          best_key = k;
        }
      }
    }
    if (!frozen && cut_reached(best)) frozen = grouping(clusters);

    Cluster& left = clusters[best_a];
    Cluster& right = clusters[best_b];
    auto lids = sorted_ids(left);
    auto rids = sorted_ids(right);
    if (rids.front() < lids.front()) std::swap(lids, rids);
    out.merges.push_back({std::move(lids), std::move(rids), std::max(best, 0.0)});

    Cluster merged;
    merged.members = left.members;
    merged.members.insert(merged.members.end(), right.members.begin(), right.members.end());
    merged.key = std::min(left.key, right.key);
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    clusters[best_a] = std::move(merged);
  }
  out.groups = frozen ? *frozen : grouping(clusters);
  return out;
}

RedundancyFlags redundancy_flags(const CorrMatrix& c, RedundancyThresholds thresholds) {
  c.validate();
  RedundancyFlags flags;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    for (Eigen::Index j = i + 1; j < c.size(); ++j) {
      const double r = c.values(i, j);
      if (std::isnan(r)) continue;
      const FlaggedPair pair{c.ids[static_cast<std::size_t>(i)], c.ids[static_cast<std::size_t>(j)], r};
      if (r > thresholds.redundant) flags.redundant.push_back(pair);
      if (r > thresholds.vet) flags.vet_fail.push_back(pair);
      if (r < thresholds.complementary) flags.complementary.push_back(pair);
    }
  }
  return flags;
}

double mean_pairwise_hamming(const ScoreMatrix& m) {
  m.require_complete("mean_pairwise_hamming");
  if (m.kind() != ScoreKind::binary) throw InputError("mean_pairwise_hamming: matrix must be binary");
  const Eigen::Index n = m.model_count();
  const auto& v = m.values();
  double total = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) total += (v.col(a) - v.col(b)).cwiseAbs().mean();
  }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

}  // namespace spectradiag
