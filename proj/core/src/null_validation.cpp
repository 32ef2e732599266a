#include "spectradiag/null_validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spectradiag/error.hpp"
#include "spectradiag/parallel.hpp"
#include "spectradiag/random.hpp"
#include "spectradiag/stats.hpp"

namespace spectradiag {
namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(cols[c]));
  return out;
}

Eigen::MatrixXd select_block(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows,
                             const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          x(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
    }
  }
  return out;
}

Eigen::MatrixXd model_correlation(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const Eigen::RowVectorXd norms = centered.colwise().norm();
  for (Eigen::Index j = 0; j < norms.size(); ++j) {
    if (norms(j) <= 0.0) {
      throw AnalysisError("degenerate correlation matrix: model column " + std::to_string(j) + " is constant");
    }
  }
  centered.array().rowwise() /= norms.array();
  Eigen::MatrixXd corr = centered.transpose() * centered;
  corr.diagonal().setOnes();
  return corr;
}

}  // namespace

double mp_null_ed(Eigen::Index tasks, Eigen::Index models) {
  if (tasks < 1 || models < 1) throw InputError("mp_null_ed: dimensions must be positive");
  const auto t = static_cast<double>(tasks);
  const auto n = static_cast<double>(models);
  return t * n / (t + n);
}

NullSpectrumBand permutation_null(const ScoreMatrix& m, std::size_t replicates, std::uint64_t seed, ShuffleAxis axis,
                                  double quantile) {
  if (replicates < 2) throw InputError("permutation_null: need at least two replicates");
  m.require_complete("permutation_null");
  const Eigen::MatrixXd& x = m.values();
  const auto ranks = static_cast<std::size_t>(std::min(x.rows(), x.cols()));
  std::vector<std::vector<double>> fractions(replicates);

  parallel_for(replicates, [&](std::size_t r) {
    Rng rng = substream(seed, r);
    Eigen::MatrixXd shuffled = x;
    if (axis == ShuffleAxis::within_task) {
      std::vector<double> row(static_cast<std::size_t>(x.cols()));
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
        std::shuffle(row.begin(), row.end(), rng);
        for (Eigen::Index j = 0; j < x.cols(); ++j) shuffled(i, j) = row[static_cast<std::size_t>(j)];
      }
    } else {
      std::vector<double> col(static_cast<std::size_t>(x.rows()));
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) col[static_cast<std::size_t>(i)] = x(i, j);
        std::shuffle(col.begin(), col.end(), rng);
        for (Eigen::Index i = 0; i < x.rows(); ++i) shuffled(i, j) = col[static_cast<std::size_t>(i)];
      }
    }
    fractions[r] = singular_spectrum(center(shuffled, Centering::task)).variance_fractions();
  });

  NullSpectrumBand band;
  band.replicates = replicates;
  band.seed = seed;
  band.quantile = quantile;
  band.axis = axis;
  band.upper.resize(ranks);
  std::vector<double> at_rank(replicates);
  for (std::size_t k = 0; k < ranks; ++k) {
    for (std::size_t r = 0; r < replicates; ++r) at_rank[r] = fractions[r][k];
    band.upper[k] = stats::quantile(at_rank, quantile);
  }
  for (std::size_t k = 1; k < ranks; ++k) band.upper[k] = std::min(band.upper[k], band.upper[k - 1]);
  return band;
}

std::size_t significant_pcs(const ScoreMatrix& m, const NullSpectrumBand& band) {
  const auto observed = singular_spectrum(center(m, Centering::task)).variance_fractions();
  const std::size_t len = std::min(observed.size(), band.upper.size());
  std::size_t count = 0;
  while (count < len && observed[count] > band.upper[count]) ++count;
  return count;
}

Interval bootstrap_ed_ci(const ScoreMatrix& m, std::size_t iterations, double level, std::uint64_t seed,
                         Centering scheme) {
  if (m.model_count() < 5) throw InputError("bootstrap_ed_ci: need at least five models");
  if (iterations < 2) throw InputError("bootstrap_ed_ci: need at least two iterations");
  if (!(level > 0.0 && level < 1.0)) throw InputError("bootstrap_ed_ci: level must lie in (0,1)");
  m.require_complete("bootstrap_ed_ci");
  const Eigen::MatrixXd& x = m.values();
  std::vector<double> eds(iterations, std::numeric_limits<double>::quiet_NaN());
  parallel_for(iterations, [&](std::size_t it) {
    Rng rng = substream(seed, it);
    const auto cols = resample_indices(rng, static_cast<std::size_t>(x.cols()));
    if (auto ed = try_matrix_ed(center(select_columns(x, cols), scheme))) eds[it] = *ed;
  });
  std::erase_if(eds, [](double v) { return std::isnan(v); });
  if (eds.empty()) throw AnalysisError("bootstrap_ed_ci: every resample had a zero spectrum");
  const double alpha = 1.0 - level;
  return Interval{stats::quantile(eds, alpha / 2.0), stats::quantile(eds, 1.0 - alpha / 2.0)};
}

EdReport ed_report(const ScoreMatrix& m, const EdReportOptions& options) {
  const Spectrum s = singular_spectrum(center(m, options.centering));
  EdReport r;
  r.ed = effective_dimensionality(s);
  r.pc1_pct = 100.0 * pc1_fraction(s);
  r.tasks = m.task_count();
  r.models = m.model_count();
  r.ed_null = mp_null_ed(r.tasks, r.models);
  r.ratio = r.ed / r.ed_null;
  r.seed = options.seed;
  r.bootstrap_iterations = options.bootstrap_iterations;
  r.level = options.level;
  r.centering = options.centering;
  if (options.bootstrap_iterations > 0) {
    const Interval ci = bootstrap_ed_ci(m, options.bootstrap_iterations, options.level, options.seed, options.centering);
    r.ci_low = std::min(ci.low, r.ed);
    r.ci_high = std::max(ci.high, r.ed);
  } else {
    r.ci_low = r.ed;
    r.ci_high = r.ed;
  }
  return r;
}

MeanSd matched_dimension_ed(const ScoreMatrix& m, Eigen::Index tasks, Eigen::Index models, std::size_t trials,
                            std::uint64_t seed) {
  if (tasks < 1 || models < 2 || tasks > m.task_count() || models > m.model_count()) {
    throw InputError("matched_dimension_ed: requested " + std::to_string(tasks) + "x" + std::to_string(models) +
                     " exceeds available " + std::to_string(m.task_count()) + "x" + std::to_string(m.model_count()));
  }
  if (trials < 1) throw InputError("matched_dimension_ed: need at least one trial");
  m.require_complete("matched_dimension_ed");
  std::vector<double> eds(trials, std::numeric_limits<double>::quiet_NaN());
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = substream(seed, t);
    const auto rows = sample_indices(rng, static_cast<std::size_t>(m.task_count()), static_cast<std::size_t>(tasks));
    const auto cols = sample_indices(rng, static_cast<std::size_t>(m.model_count()), static_cast<std::size_t>(models));
    if (auto ed = try_matrix_ed(center(select_block(m.values(), rows, cols), Centering::task))) eds[t] = *ed;
  });
  std::erase_if(eds, [](double v) { return std::isnan(v); });
  if (eds.empty()) throw AnalysisError("matched_dimension_ed: every subsample had a zero spectrum");
  return MeanSd{stats::mean(eds), stats::sample_sd(eds)};
}

std::vector<double> split_half_reliability(const ScoreMatrix& m, std::size_t splits, Eigen::Index k,
                                           std::uint64_t seed) {
  if (m.model_count() < 10) throw InputError("split_half_reliability: need at least ten models");
  if (splits < 1) throw InputError("split_half_reliability: need at least one split");
  m.require_complete("split_half_reliability");
  const auto n = static_cast<std::size_t>(m.model_count());
  const Eigen::Index half = static_cast<Eigen::Index>(n / 2);
  if (k < 1 || k > std::min(m.task_count(), half)) {
    throw InputError("split_half_reliability: k must lie in [1, min(T, N/2)]");
  }
  const auto kk = static_cast<std::size_t>(k);
  std::vector<std::vector<double>> per_split(splits, std::vector<double>(kk, 0.0));

  parallel_for(splits, [&](std::size_t s) {
    Rng rng = substream(seed, s);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> a(order.begin(), order.begin() + half);
    std::vector<std::size_t> b(order.begin() + half, order.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto pa = principal_components(center(select_columns(m.values(), a), Centering::task), k);
    const auto pb = principal_components(center(select_columns(m.values(), b), Centering::task), k);

    std::vector<bool> used(kk, false);
    for (std::size_t i = 0; i < kk; ++i) {
      const Eigen::VectorXd ui = pa.loadings.col(static_cast<Eigen::Index>(i));
      double best = -1.0;
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < kk; ++j) {
        if (used[j]) continue;
        const Eigen::VectorXd uj = pb.loadings.col(static_cast<Eigen::Index>(j));
        const double r = std::abs(pearson(std::span<const double>(ui.data(), static_cast<std::size_t>(ui.size())),
                                          std::span<const double>(uj.data(), static_cast<std::size_t>(uj.size())))
                                      .value_or(0.0));
        if (r > best) {
          best = r;
          best_j = j;
        }
      }
      used[best_j] = true;
      per_split[s][i] = std::max(best, 0.0);
    }
  });

  std::vector<double> out(kk, 0.0);
  for (const auto& split : per_split) {
    for (std::size_t i = 0; i < kk; ++i) out[i] += split[i];
  }
  for (double& v : out) v /= static_cast<double>(splits);
  return out;
}

double pc_metadata_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw InputError("pc_metadata_auc: one label per score required");
  double positives = 0.0;
  double negatives = 0.0;
  double wins = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    positives += 1.0;
  }
  negatives = static_cast<double>(scores.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) throw InputError("pc_metadata_auc: labels contain a single class");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  const double auc = wins / (positives * negatives);
  return std::max(auc, 1.0 - auc);
}

AlternativeEstimates alternative_estimators(const ScoreMatrix& m, std::uint64_t seed, std::size_t pa_replicates) {
  m.require_complete("alternative_estimators");
  if (pa_replicates < 1) throw InputError("alternative_estimators: need at least one replicate");
  if (m.task_count() < 3) throw InputError("alternative_estimators: need at least three tasks");
  // Models with a constant score column (all right or all wrong) have no
  // defined correlation and are left out.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < m.model_count(); ++j) {
    const auto col = m.values().col(j);
    if ((col.array() != col(0)).any()) keep.push_back(j);
  }
  if (keep.size() < 2) throw AnalysisError("alternative_estimators: fewer than two models with varying scores");
  const Eigen::MatrixXd x = m.values()(Eigen::all, keep);
  const auto observed = symmetric_eigenvalues(model_correlation(x));
  const std::size_t p = observed.size();

  AlternativeEstimates est;
  est.kaiser = static_cast<std::size_t>(std::count_if(observed.begin(), observed.end(), [](double l) { return l > 1.0; }));

  double total = 0.0;
  for (double l : observed) total += std::max(l, 0.0);
  std::vector<double> fraction(p);
  for (std::size_t i = 0; i < p; ++i) fraction[i] = std::max(observed[i], 0.0) / total;

  auto components_for = [&](double target) {
    double cumulative = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      cumulative += fraction[i];
      if (cumulative >= target - 1e-12) return i + 1;
    }
    return p;
  };
  est.var80 = components_for(0.8);
  est.var90 = components_for(0.9);

  for (std::size_t i = 0; i < p; ++i) {
    double expected = 0.0;
    for (std::size_t j = i + 1; j <= p; ++j) expected += 1.0 / static_cast<double>(j);
    expected /= static_cast<double>(p);
    if (fraction[i] <= expected) break;
    ++est.broken_stick;
  }

  std::vector<std::vector<double>> null_eigs(pa_replicates);
  parallel_for(pa_replicates, [&](std::size_t r) {
    Rng rng = substream(seed, r);
    Eigen::MatrixXd shuffled = x;
    std::vector<double> col(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) col[static_cast<std::size_t>(i)] = x(i, j);
      std::shuffle(col.begin(), col.end(), rng);
      for (Eigen::Index i = 0; i < x.rows(); ++i) shuffled(i, j) = col[static_cast<std::size_t>(i)];
    }
    null_eigs[r] = symmetric_eigenvalues(model_correlation(shuffled));
  });
  for (std::size_t i = 0; i < p; ++i) {
    double mean_null = 0.0;
    for (const auto& eig : null_eigs) mean_null += eig[i];
    mean_null /= static_cast<double>(pa_replicates);
    if (observed[i] <= mean_null) break;
    ++est.parallel_analysis;
  }
  return est;
}

}  // namespace spectradiag
