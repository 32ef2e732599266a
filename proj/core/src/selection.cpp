#include "spectradiag/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spectradiag/association.hpp"
#include "spectradiag/error.hpp"
#include "spectradiag/parallel.hpp"
#include "spectradiag/random.hpp"
#include "spectradiag/stats.hpp"

namespace spectradiag {
namespace {

// Relative tolerance for ED and variance ties; rounding differs by a few ulp
// between mathematically equal rows.
constexpr double kTieTolerance = 1e-10;

bool nearly_equal(double a, double b) { return std::abs(a - b) <= kTieTolerance * std::max(std::abs(a), std::abs(b)); }

Eigen::MatrixXd centered_rows(const ScoreMatrix& m) {
  Eigen::MatrixXd x = m.values();
  for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i).array() -= x.row(i).mean();
  return x;
}

void check_k(const ScoreMatrix& m, Eigen::Index k, std::string_view what) {
  if (k < 1 || k > m.task_count()) {
    throw InputError(std::string(what) + ": k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(m.task_count()) + "]");
  }
}

// ED of the centered rows listed in idx from the Gram identity
// ED = (sum |x_i|^2)^2 / sum_{i,j} (x_i . x_j)^2; 0 when all rows vanish.
double subset_ed(const Eigen::MatrixXd& x, std::span<const Eigen::Index> idx) {
  double a = 0.0;
  double b = 0.0;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const double n = x.row(idx[p]).squaredNorm();
    a += n;
    b += n * n;
    for (std::size_t q = p + 1; q < idx.size(); ++q) {
      const double d = x.row(idx[p]).dot(x.row(idx[q]));
      b += 2.0 * d * d;
    }
  }
  return b > 0.0 ? a * a / b : 0.0;
}

std::vector<double> model_means(const Eigen::MatrixXd& v, std::span<const Eigen::Index> rows) {
  std::vector<double> out(static_cast<std::size_t>(v.cols()), 0.0);
  for (Eigen::Index r : rows) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) out[static_cast<std::size_t>(j)] += v(r, j);
  }
  for (double& o : out) o /= static_cast<double>(rows.size());
  return out;
}

bool is_constant(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

double fidelity_between(const std::vector<double>& sub, const std::vector<double>& full) {
  const bool sub_const = is_constant(sub);
  const bool full_const = is_constant(full);
  if (sub_const || full_const) return sub_const && full_const ? 1.0 : 0.0;
  return kendall_tau_b(sub, full).value_or(0.0);
}

std::vector<Eigen::Index> all_indices(Eigen::Index n) {
  std::vector<Eigen::Index> out(static_cast<std::size_t>(n));
  std::iota(out.begin(), out.end(), Eigen::Index{0});
  return out;
}

// Indices sorted by descending key, ties by ascending task id.
std::vector<Eigen::Index> rank_by(const ScoreMatrix& m, const std::vector<double>& key) {
  auto order = all_indices(m.task_count());
  const auto& ids = m.task_ids();
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ka = key[static_cast<std::size_t>(a)];
    const double kb = key[static_cast<std::size_t>(b)];
    if (ka != kb) return ka > kb;
    return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)];
  });
  return order;
}

std::vector<double> task_variances(const ScoreMatrix& m) {
  const Eigen::MatrixXd x = centered_rows(m);
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = x.row(i).squaredNorm() / static_cast<double>(x.cols());
  }
  return out;
}

std::vector<Eigen::Index> k_medoids(const ScoreMatrix& m, Eigen::Index k, std::uint64_t seed,
                                    std::size_t max_swaps) {
  const Eigen::Index t = m.task_count();
  const auto ut = static_cast<std::size_t>(t);
  const Eigen::MatrixXd& v = m.values();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(t, t);
  parallel_for(ut, [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const Eigen::RowVectorXd ri = v.row(i);
    for (Eigen::Index j = 0; j < t; ++j) {
      if (j == i) continue;
      const Eigen::RowVectorXd rj = v.row(j);
      const auto r = pearson(std::span<const double>(ri.data(), static_cast<std::size_t>(ri.size())),
                             std::span<const double>(rj.data(), static_cast<std::size_t>(rj.size())));
      dist(i, j) = 1.0 - std::abs(r.value_or(0.0));
    }
  });

  std::vector<Eigen::Index> medoids;
  std::vector<char> is_medoid(ut, 0);
  Rng rng = substream(seed, 0);
  const auto first = static_cast<Eigen::Index>(std::uniform_int_distribution<std::size_t>(0, ut - 1)(rng));
  medoids.push_back(first);
  is_medoid[static_cast<std::size_t>(first)] = 1;
  std::vector<double> nearest(ut);
  for (Eigen::Index j = 0; j < t; ++j) nearest[static_cast<std::size_t>(j)] = dist(first, j);

  // BUILD: add the point that lowers total cost the most.
  while (static_cast<Eigen::Index>(medoids.size()) < k) {
    double best_gain = -1.0;
    Eigen::Index best = -1;
    for (Eigen::Index c = 0; c < t; ++c) {
      if (is_medoid[static_cast<std::size_t>(c)]) continue;
      double gain = 0.0;
      for (Eigen::Index j = 0; j < t; ++j) gain += std::max(0.0, nearest[static_cast<std::size_t>(j)] - dist(c, j));
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    medoids.push_back(best);
    is_medoid[static_cast<std::size_t>(best)] = 1;
    for (Eigen::Index j = 0; j < t; ++j) {
      nearest[static_cast<std::size_t>(j)] = std::min(nearest[static_cast<std::size_t>(j)], dist(best, j));
    }
  }

  // SWAP: best single exchange per iteration until no improvement. The cost
  // change of a swap only needs each point's nearest and second-nearest medoid.
  for (std::size_t iter = 0; iter < max_swaps; ++iter) {
    std::vector<std::size_t> near_slot(ut);
    std::vector<double> d1(ut);
    std::vector<double> d2(ut);
    for (Eigen::Index j = 0; j < t; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      d1[uj] = std::numeric_limits<double>::infinity();
      d2[uj] = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < medoids.size(); ++s) {
        const double d = dist(medoids[s], j);
        if (d < d1[uj]) {
          d2[uj] = d1[uj];
          d1[uj] = d;
          near_slot[uj] = s;
        } else if (d < d2[uj]) {
          d2[uj] = d;
        }
      }
    }
    std::vector<double> best_delta(medoids.size(), 0.0);
    std::vector<Eigen::Index> best_in(medoids.size(), -1);
    parallel_for(medoids.size(), [&](std::size_t slot) {
      for (Eigen::Index c = 0; c < t; ++c) {
        if (is_medoid[static_cast<std::size_t>(c)]) continue;
        double delta = 0.0;
        for (Eigen::Index j = 0; j < t; ++j) {
          const auto uj = static_cast<std::size_t>(j);
          const double kept = near_slot[uj] == slot ? d2[uj] : d1[uj];
          delta += std::min(kept, dist(c, j)) - d1[uj];
        }
        if (delta < best_delta[slot] - 1e-12) {
          best_delta[slot] = delta;
          best_in[slot] = c;
        }
      }
    });
    std::size_t slot = 0;
    for (std::size_t s = 1; s < medoids.size(); ++s) {
      if (best_delta[s] < best_delta[slot]) slot = s;
    }
    if (best_in[slot] < 0) break;
    is_medoid[static_cast<std::size_t>(medoids[slot])] = 0;
    medoids[slot] = best_in[slot];
    is_medoid[static_cast<std::size_t>(best_in[slot])] = 1;
  }
  return medoids;
}

SelectionResult finish(const ScoreMatrix& m, SelectionMethod method, std::span<const Eigen::Index> order,
                       std::uint64_t seed) {
  SelectionResult r;
  r.method = method;
  r.seed = seed;
  for (Eigen::Index i : order) r.selected.push_back(m.task_ids()[static_cast<std::size_t>(i)]);
  r.ed_trajectory = ed_trajectory(m, order);
  r.tau_vs_full = ranking_fidelity(m, order);
  return r;
}

std::vector<Eigen::Index> greedy_order(const ScoreMatrix& m, Eigen::Index k) {
  m.require_complete("ed_greedy");
  check_k(m, k, "ed_greedy");
  const Eigen::MatrixXd x = centered_rows(m);
  const Eigen::Index t = x.rows();
  const auto ut = static_cast<std::size_t>(t);
  const Eigen::VectorXd norms = x.rowwise().squaredNorm();
  if ((norms.array() <= 0.0).all()) throw AnalysisError("ed_greedy: every task is degenerate");

  std::vector<double> cross(ut, 0.0);  // sum over selected s of (x_s . x_t)^2
  std::vector<char> taken(ut, 0);
  std::vector<double> score(ut);
  std::vector<Eigen::Index> order;
  double a = 0.0;
  double b = 0.0;
  const auto& ids = m.task_ids();

  for (Eigen::Index step = 0; step < k; ++step) {
    bool any_live = false;
    for (std::size_t i = 0; i < ut; ++i) any_live |= !taken[i] && norms(static_cast<Eigen::Index>(i)) > 0.0;
    parallel_for(ut, [&](std::size_t i) {
      const double n = norms(static_cast<Eigen::Index>(i));
      if (taken[i] || (any_live && n <= 0.0)) {
        score[i] = -std::numeric_limits<double>::infinity();
        return;
      }
      const double aa = a + n;
      const double bb = b + 2.0 * cross[i] + n * n;
      score[i] = bb > 0.0 ? aa * aa / bb : 0.0;
    });
    std::size_t best = ut;
    for (std::size_t i = 0; i < ut; ++i) {
      if (score[i] == -std::numeric_limits<double>::infinity()) continue;
      if (best == ut) {
        best = i;
        continue;
      }
      const double tol = kTieTolerance * std::max(std::abs(score[best]), std::abs(score[i]));
      const double diff = score[i] - score[best];
      if (diff > tol) {
        best = i;
      } else if (diff >= -tol) {
        const double ni = norms(static_cast<Eigen::Index>(i));
        const double nb = norms(static_cast<Eigen::Index>(best));
        if (nearly_equal(ni, nb) ? ids[i] < ids[best] : ni > nb) best = i;
      }
    }
    const auto pick = static_cast<Eigen::Index>(best);
    taken[best] = 1;
    order.push_back(pick);
    const double n = norms(pick);
    b += 2.0 * cross[best] + n * n;
    a += n;
    const Eigen::VectorXd dots = x * x.row(pick).transpose();
    for (std::size_t i = 0; i < ut; ++i) {
      const double d = dots(static_cast<Eigen::Index>(i));
      cross[i] += d * d;
    }
  }
  return order;
}

}  // namespace

std::string_view to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::ed_greedy: return "ed_greedy";
    case SelectionMethod::random: return "random";
    case SelectionMethod::max_variance: return "max_variance";
    case SelectionMethod::irt_discrimination: return "irt_discrimination";
    case SelectionMethod::k_medoids: return "k_medoids";
    case SelectionMethod::two_stage: return "two_stage";
  }
  return "unknown";
}

SelectionMethod parse_selection_method(std::string_view name) {
  for (auto method : {SelectionMethod::ed_greedy, SelectionMethod::random, SelectionMethod::max_variance,
                      SelectionMethod::irt_discrimination, SelectionMethod::k_medoids, SelectionMethod::two_stage}) {
    if (to_string(method) == name) return method;
  }
  throw InputError("unknown selection method '" + std::string(name) + "'");
}

std::vector<double> ed_trajectory(const ScoreMatrix& m, std::span<const Eigen::Index> order) {
  const Eigen::MatrixXd x = centered_rows(m);
  std::vector<double> out;
  double a = 0.0;
  double b = 0.0;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const double n = x.row(order[p]).squaredNorm();
    double c = 0.0;
    for (std::size_t q = 0; q < p; ++q) {
      const double d = x.row(order[p]).dot(x.row(order[q]));
      c += d * d;
    }
    a += n;
    b += 2.0 * c + n * n;
    out.push_back(b > 0.0 ? a * a / b : 0.0);
  }
  return out;
}

SelectionResult ed_greedy(const ScoreMatrix& m, Eigen::Index k) {
  const auto order = greedy_order(m, k);
  return finish(m, SelectionMethod::ed_greedy, order, 0);
}

std::vector<double> task_discrimination(const ScoreMatrix& m) {
  m.require_complete("task_discrimination");
  const auto all = all_indices(m.task_count());
  const auto total = model_means(m.values(), all);
  std::vector<double> out(static_cast<std::size_t>(m.task_count()));
  for (Eigen::Index i = 0; i < m.task_count(); ++i) {
    const Eigen::RowVectorXd row = m.values().row(i);
    out[static_cast<std::size_t>(i)] =
        pearson(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), total).value_or(0.0);
  }
  return out;
}

SelectionResult select_tasks(const ScoreMatrix& m, Eigen::Index k, SelectionMethod method, std::uint64_t seed,
                             BaselineParams params) {
  m.require_complete("select_tasks");
  check_k(m, k, to_string(method));
  std::vector<Eigen::Index> order;
  switch (method) {
    case SelectionMethod::ed_greedy:
      return ed_greedy(m, k);
    case SelectionMethod::random: {
      Rng rng = substream(seed, 0);
      for (std::size_t i : sample_indices(rng, static_cast<std::size_t>(m.task_count()), static_cast<std::size_t>(k))) {
        order.push_back(static_cast<Eigen::Index>(i));
      }
      break;
    }
    case SelectionMethod::max_variance: {
      order = rank_by(m, task_variances(m));
      order.resize(static_cast<std::size_t>(k));
      break;
    }
    case SelectionMethod::irt_discrimination: {
      order = rank_by(m, task_discrimination(m));
      order.resize(static_cast<std::size_t>(k));
      break;
    }
    case SelectionMethod::k_medoids:
      order = k_medoids(m, k, seed, params.max_swaps);
      break;
    case SelectionMethod::two_stage: {
      const auto pool = greedy_order(m, std::min<Eigen::Index>(2 * k, m.task_count()));
      const auto disc = task_discrimination(m);
      order = pool;
      const auto& ids = m.task_ids();
      std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double da = disc[static_cast<std::size_t>(a)];
        const double db = disc[static_cast<std::size_t>(b)];
        if (da != db) return da > db;
        return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)];
      });
      order.resize(static_cast<std::size_t>(k));
      break;
    }
  }
  return finish(m, method, order, seed);
}

double ranking_fidelity(const ScoreMatrix& m, std::span<const Eigen::Index> selected) {
  m.require_complete("ranking_fidelity");
  if (selected.empty()) throw InputError("ranking_fidelity: no tasks selected");
  const auto all = all_indices(m.task_count());
  return fidelity_between(model_means(m.values(), selected), model_means(m.values(), all));
}

double ranking_fidelity(const ScoreMatrix& m, const std::vector<std::string>& selected) {
  std::vector<Eigen::Index> idx;
  for (const auto& id : selected) {
    const auto i = m.task_index(id);
    if (!i) throw InputError("ranking_fidelity: unknown task '" + id + "'");
    idx.push_back(*i);
  }
  return ranking_fidelity(m, idx);
}

CompressionCurve compression_curve(const ScoreMatrix& m, double tau_target, std::size_t trials, std::uint64_t seed) {
  m.require_complete("compression_curve");
  if (trials < 1) throw InputError("compression_curve: need at least one trial");
  const auto t = static_cast<std::size_t>(m.task_count());
  const auto all = all_indices(m.task_count());
  const auto full = model_means(m.values(), all);
  constexpr std::size_t kFractions = std::size(kCompressionFractions);

  auto size_of = [&](double f) {
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(f * static_cast<double>(t))), 1, t);
  };
  // Each trial draws one random task order; every fraction uses a prefix of it,
  // so adjacent points of the curve share their subsets.
  std::vector<double> taus(kFractions * trials);
  parallel_for(trials, [&](std::size_t trial) {
    Rng rng = substream(seed, trial);
    std::vector<Eigen::Index> order = all;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t fi = 0; fi < kFractions; ++fi) {
      const std::span<const Eigen::Index> idx(order.data(), size_of(kCompressionFractions[fi]));
      taus[fi * trials + trial] = fidelity_between(model_means(m.values(), idx), full);
    }
  });

  CompressionCurve out;
  out.tau_target = tau_target;
  for (std::size_t fi = 0; fi < kFractions; ++fi) {
    const double f = kCompressionFractions[fi];
    const std::span<const double> row(taus.data() + fi * trials, trials);
    out.curve.push_back({f, static_cast<Eigen::Index>(size_of(f)), stats::mean(row)});
  }
  for (const auto& p : out.curve) {
    if (p.mean_tau >= tau_target) {
      out.fraction_needed = p.fraction;
      out.reached = true;
      break;
    }
  }
  return out;
}

SubmodularityProbe submodularity_probe(const ScoreMatrix& m, std::size_t samples, std::uint64_t seed) {
  m.require_complete("submodularity_probe");
  const auto t = static_cast<std::size_t>(m.task_count());
  if (t < 5) throw InputError("submodularity_probe: need at least 5 tasks");
  const Eigen::MatrixXd x = centered_rows(m);
  const std::size_t max_small = std::max<std::size_t>(2, t / 4);

  enum class Outcome { invalid, negative, valid };
  std::vector<Outcome> outcome(samples, Outcome::invalid);
  std::vector<double> gamma(samples, 0.0);
  parallel_for(samples, [&](std::size_t i) {
    Rng rng = substream(seed, i);
    // |S'| <= 2|S| and one more task outside S' must exist.
    const std::size_t cap = std::min(max_small, (t - 1) / 2);
    const std::size_t s = std::uniform_int_distribution<std::size_t>(2, std::max<std::size_t>(2, cap))(rng);
    const std::size_t big = std::uniform_int_distribution<std::size_t>(s + 1, std::min(2 * s, t - 1))(rng);
    std::vector<std::size_t> perm(t);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Eigen::Index> small_set(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(s));
    std::vector<Eigen::Index> big_set(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(big));
    const auto extra = static_cast<Eigen::Index>(perm[big]);

    const double ed_s = subset_ed(x, small_set);
    const double ed_b = subset_ed(x, big_set);
    small_set.push_back(extra);
    big_set.push_back(extra);
    const double num = subset_ed(x, small_set) - ed_s;
    const double den = subset_ed(x, big_set) - ed_b;
    if (!(den > 1e-9)) return;
    if (num < 0.0) {
      outcome[i] = Outcome::negative;
      return;
    }
    outcome[i] = Outcome::valid;
    gamma[i] = num / den;
  });

  SubmodularityProbe r;
  r.samples = samples;
  r.seed = seed;
  std::vector<double> valid;
  for (std::size_t i = 0; i < samples; ++i) {
    if (outcome[i] == Outcome::valid) valid.push_back(gamma[i]);
    if (outcome[i] == Outcome::negative) ++r.negative_numerator;
  }
  r.valid = valid.size();
  if (valid.size() < 10) {
    throw AnalysisError("submodularity_probe: only " + std::to_string(valid.size()) + " valid samples (need 10)");
  }
  r.median_gamma = stats::median(valid);
  r.min_gamma = *std::min_element(valid.begin(), valid.end());
  r.below_one_fraction = static_cast<double>(std::count_if(valid.begin(), valid.end(), [](double g) { return g < 1.0; })) /
                         static_cast<double>(valid.size());
  return r;
}

std::vector<ProspectiveRow> prospective_split_eval(const ScoreMatrix& m, double design_fraction,
                                                   const std::vector<SelectionMethod>& methods,
                                                   const std::vector<Eigen::Index>& ks, std::uint64_t seed) {
  m.require_complete("prospective_split_eval");
  if (!(design_fraction > 0.0 && design_fraction < 1.0)) {
    throw InputError("prospective_split_eval: design fraction must lie in (0, 1)");
  }
  const auto n = static_cast<std::size_t>(m.model_count());
  const auto all = all_indices(m.task_count());
  const auto means = model_means(m.values(), all);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& ids = m.model_ids();
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = means[static_cast<std::size_t>(a)];
    const double mb = means[static_cast<std::size_t>(b)];
    if (ma != mb) return ma < mb;
    return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)];
  });
  const auto cut = static_cast<std::size_t>(std::llround(design_fraction * static_cast<double>(n)));
  if (cut < 5 || n - cut < 5) throw InputError("prospective_split_eval: each cohort needs at least 5 models");
  const std::vector<Eigen::Index> design_cols(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  const std::vector<Eigen::Index> future_cols(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  const ScoreMatrix design = m.select_models(design_cols);
  const ScoreMatrix future = m.select_models(future_cols);

  std::vector<ProspectiveRow> rows;
  for (SelectionMethod method : methods) {
    for (Eigen::Index k : ks) {
      const auto sel = select_tasks(design, k, method, seed);
      ProspectiveRow row;
      row.method = method;
      row.k = k;
      row.train_tau = ranking_fidelity(design, sel.selected);
      row.test_tau = ranking_fidelity(future, sel.selected);
      row.gap = row.test_tau - row.train_tau;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace spectradiag
