#include "spectradiag/composite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <unordered_map>

#include "spectradiag/error.hpp"
#include "spectradiag/parallel.hpp"
#include "spectradiag/random.hpp"
#include "spectradiag/spectral.hpp"

namespace spectradiag {
namespace {

void check_ids(const std::vector<std::string>& ids, const char* what) {
  std::set<std::string_view> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw InputError(std::string("suite: empty ") + what + " id");
    if (!seen.insert(id).second) throw InputError(std::string("suite: duplicate ") + what + " id '" + id + "'");
  }
}

// Inversions of `perm` by merge sort.
std::uint64_t count_inversions(std::vector<std::size_t>& perm, std::vector<std::size_t>& scratch, std::size_t lo,
                               std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(perm, scratch, lo, mid) + count_inversions(perm, scratch, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (perm[i] <= perm[j]) {
      scratch[k++] = perm[i++];
    } else {
      inv += mid - i;
      scratch[k++] = perm[j++];
    }
  }
  while (i < mid) scratch[k++] = perm[i++];
  while (j < hi) scratch[k++] = perm[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            perm.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

// Composite scores snapped to a grid of 1e-12 per unit of total weight, so
// rounding noise cannot split models that tie exactly.
std::int64_t tie_key(double composite, double total_weight) {
  return std::llround(composite / (total_weight * 1e-12));
}

std::size_t champion_index(const Eigen::MatrixXd& z, std::span<const double> weights,
                           const std::vector<std::string>& ids) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::size_t best = 0;
  std::int64_t best_score = std::numeric_limits<std::int64_t>::min();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    double sum = 0.0;
    for (Eigen::Index b = 0; b < z.rows(); ++b) sum += weights[static_cast<std::size_t>(b)] * z(b, j);
    const std::int64_t score = tie_key(sum, total);
    const auto uj = static_cast<std::size_t>(j);
    if (score > best_score || (score == best_score && ids[uj] < ids[best])) {
      best = uj;
      best_score = score;
    }
  }
  return best;
}

}  // namespace

SuiteScores::SuiteScores(std::vector<std::string> benchmark_ids, std::vector<std::string> model_ids,
                         Eigen::MatrixXd scores)
    : benchmark_ids_(std::move(benchmark_ids)), model_ids_(std::move(model_ids)), scores_(std::move(scores)) {
  if (benchmark_ids_.empty()) throw InputError("suite has no benchmarks");
  if (model_ids_.size() < 2) throw InputError("suite needs at least two models");
  if (scores_.rows() != static_cast<Eigen::Index>(benchmark_ids_.size()) ||
      scores_.cols() != static_cast<Eigen::Index>(model_ids_.size())) {
    throw InputError("suite shape does not match its ids");
  }
  check_ids(benchmark_ids_, "benchmark");
  check_ids(model_ids_, "model");
  for (Eigen::Index b = 0; b < scores_.rows(); ++b) {
    for (Eigen::Index j = 0; j < scores_.cols(); ++j) {
      if (!std::isfinite(scores_(b, j))) {
        throw InputError("suite: missing or non-finite score for benchmark '" +
                         benchmark_ids_[static_cast<std::size_t>(b)] + "', model '" +
                         model_ids_[static_cast<std::size_t>(j)] + "'");
      }
    }
  }
}

SuiteScores SuiteScores::select_benchmarks(std::span<const Eigen::Index> rows) const {
  std::vector<std::string> ids;
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), scores_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ids.push_back(benchmark_ids_.at(static_cast<std::size_t>(rows[r])));
    sub.row(static_cast<Eigen::Index>(r)) = scores_.row(rows[r]);
  }
  return SuiteScores(std::move(ids), model_ids_, std::move(sub));
}

SuiteScores SuiteScores::select_models(std::span<const Eigen::Index> cols) const {
  std::vector<std::string> ids;
  Eigen::MatrixXd sub(scores_.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    ids.push_back(model_ids_.at(static_cast<std::size_t>(cols[c])));
    sub.col(static_cast<Eigen::Index>(c)) = scores_.col(cols[c]);
  }
  return SuiteScores(benchmark_ids_, std::move(ids), std::move(sub));
}

std::vector<Eigen::Index> SuiteScores::model_indices(const std::vector<std::string>& ids) const {
  std::unordered_map<std::string_view, Eigen::Index> lookup;
  for (std::size_t j = 0; j < model_ids_.size(); ++j) lookup.emplace(model_ids_[j], static_cast<Eigen::Index>(j));
  std::vector<Eigen::Index> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = lookup.find(id);
    if (it == lookup.end()) throw InputError("suite has no model '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

SuiteScores suite_from_table(LabeledTable table) {
  return SuiteScores(std::move(table.row_ids), std::move(table.col_ids), std::move(table.values));
}

SuiteScores load_suite(const std::filesystem::path& path) { return suite_from_table(load_table(path)); }

Eigen::MatrixXd standardized_scores(const SuiteScores& s) {
  Eigen::MatrixXd z = s.scores();
  for (Eigen::Index b = 0; b < z.rows(); ++b) {
    const double mu = z.row(b).mean();
    z.row(b).array() -= mu;
    const double sd = std::sqrt(z.row(b).squaredNorm() / static_cast<double>(z.cols()));
    if (!(sd > 0.0)) {
      throw AnalysisError("benchmark '" + s.benchmark_ids()[static_cast<std::size_t>(b)] + "' has zero variance");
    }
    z.row(b) /= sd;
  }
  return z;
}

double suite_ed(const SuiteScores& s) { return matrix_ed(center(standardized_scores(s), Centering::task)); }

Ranking composite_ranking(const SuiteScores& s, std::span<const double> weights) {
  if (static_cast<Eigen::Index>(weights.size()) != s.benchmark_count()) {
    throw InputError("composite_ranking: one weight per benchmark required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("composite_ranking: weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw InputError("composite_ranking: weights must not all be zero");
  const Eigen::MatrixXd z = standardized_scores(s);
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const Eigen::VectorXd composite = z.transpose() * w;

  std::vector<std::size_t> order(static_cast<std::size_t>(s.model_count()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& ids = s.model_ids();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = tie_key(composite(static_cast<Eigen::Index>(a)), total);
    const auto cb = tie_key(composite(static_cast<Eigen::Index>(b)), total);
    if (ca != cb) return ca > cb;
    return ids[a] < ids[b];
  });
  Ranking r;
  for (std::size_t i : order) {
    r.order.push_back(ids[i]);
    r.composite.push_back(composite(static_cast<Eigen::Index>(i)));
  }
  return r;
}

Ranking equal_weight_ranking(const SuiteScores& s) {
  const std::vector<double> w(static_cast<std::size_t>(s.benchmark_count()), 1.0);
  return composite_ranking(s, w);
}

double kendall_tau(const std::vector<std::string>& rank_a, const std::vector<std::string>& rank_b) {
  std::unordered_map<std::string_view, std::size_t> pos_b;
  for (std::size_t i = 0; i < rank_b.size(); ++i) pos_b.emplace(rank_b[i], i);
  std::vector<std::size_t> shared;
  for (const auto& id : rank_a) {
    const auto it = pos_b.find(id);
    if (it != pos_b.end()) shared.push_back(it->second);
  }
  if (shared.size() < 2) throw InputError("kendall_tau: rankings share fewer than two ids");
  // Positions in b listed in a's order; tau = 1 - 2 * inversions / pairs.
  std::vector<std::size_t> scratch(shared.size());
  const auto inversions = count_inversions(shared, scratch, 0, shared.size());
  const double pairs = static_cast<double>(shared.size()) * static_cast<double>(shared.size() - 1) / 2.0;
  return 1.0 - 2.0 * static_cast<double>(inversions) / pairs;
}

double composite_ceiling(double rho) {
  if (!(rho > -1.0) || rho > 1.0) throw InputError("composite_ceiling: rho must lie in (-1, 1]");
  return std::sqrt((1.0 + rho) / 2.0);
}

CeilingOracle ceiling_oracle(double rho, std::size_t grid) {
  if (!(rho > -1.0) || rho > 1.0) throw InputError("ceiling_oracle: rho must lie in (-1, 1]");
  if (grid < 2) throw InputError("ceiling_oracle: grid needs at least two points");
  CeilingOracle best{-std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < grid; ++i) {
    const double exponent = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double t = std::pow(10.0, exponent);
    // c = s1 + t s2 with unit-variance s1, s2.
    const double norm = std::sqrt(1.0 + t * t + 2.0 * t * rho);
    const double r1 = (1.0 + t * rho) / norm;
    const double r2 = (t + rho) / norm;
    const double worst = std::min(r1, r2);
    if (worst > best.value) best = {worst, t};
  }
  return best;
}

FragilityReport dirichlet_fragility(const SuiteScores& s, double alpha, std::size_t samples, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw InputError("dirichlet_fragility: alpha must be positive");
  if (samples < 1) throw InputError("dirichlet_fragility: need at least one sample");
  const Eigen::MatrixXd z = standardized_scores(s);
  const auto k = static_cast<std::size_t>(s.benchmark_count());
  const auto& ids = s.model_ids();
  const std::vector<double> equal(k, 1.0);
  const std::size_t baseline = champion_index(z, equal, ids);

  std::vector<std::size_t> champions(samples);
  parallel_for(samples, [&](std::size_t i) {
    Rng rng = substream(seed, i);
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> w(k);
    double total = 0.0;
    while (!(total > 0.0)) {
      total = 0.0;
      for (double& v : w) {
        v = gamma(rng);
        total += v;
      }
    }
    for (double& v : w) v /= total;
    champions[i] = champion_index(z, w, ids);
  });

  FragilityReport r;
  r.alpha = alpha;
  r.samples = samples;
  r.seed = seed;
  r.baseline_champion = ids[baseline];
  std::set<std::size_t> distinct(champions.begin(), champions.end());
  r.distinct_champions = distinct.size();
  const auto changed = std::count_if(champions.begin(), champions.end(), [&](std::size_t c) { return c != baseline; });
  r.champion_change_rate = static_cast<double>(changed) / static_cast<double>(samples);
  return r;
}

std::vector<LeaveOneOut> leave_one_out(const SuiteScores& s) {
  const Eigen::Index k = s.benchmark_count();
  if (k < 2) throw InputError("leave_one_out: need at least two benchmarks");
  const double full_ed = suite_ed(s);
  const auto full_rank = equal_weight_ranking(s);
  std::vector<LeaveOneOut> out;
  for (Eigen::Index drop = 0; drop < k; ++drop) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index b = 0; b < k; ++b) {
      if (b != drop) keep.push_back(b);
    }
    const SuiteScores reduced = s.select_benchmarks(keep);
    out.push_back({s.benchmark_ids()[static_cast<std::size_t>(drop)], full_ed - suite_ed(reduced),
                   kendall_tau(full_rank.order, equal_weight_ranking(reduced).order)});
  }
  return out;
}

SubsetSearch best_subset_search(const SuiteScores& s, std::size_t size) {
  const auto k = static_cast<std::size_t>(s.benchmark_count());
  if (size < 1 || size > k) throw InputError("best_subset_search: size must lie in [1, k]");
  double combinations = 1.0;
  for (std::size_t i = 0; i < size; ++i) {
    combinations = combinations * static_cast<double>(k - i) / static_cast<double>(i + 1);
  }
  if (combinations > 1e6) throw InputError("best_subset_search: more than 1e6 subsets");

  // Enumerate subsets in lexicographic order of index sets.
  std::vector<std::vector<Eigen::Index>> subsets;
  std::vector<Eigen::Index> current(size);
  std::iota(current.begin(), current.end(), Eigen::Index{0});
  for (;;) {
    subsets.push_back(current);
    std::size_t i = size;
    while (i > 0 && current[i - 1] == static_cast<Eigen::Index>(k - size + i - 1)) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (std::size_t j = i; j < size; ++j) current[j] = current[j - 1] + 1;
  }

  const auto full_rank = equal_weight_ranking(s);
  std::vector<double> taus(subsets.size());
  parallel_for(subsets.size(), [&](std::size_t i) {
    taus[i] = kendall_tau(full_rank.order, equal_weight_ranking(s.select_benchmarks(subsets[i])).order);
  });

  std::size_t best = 0;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < taus.size(); ++i) {
    if (taus[i] > taus[best]) best = i;
    if (taus[i] < taus[worst]) worst = i;
  }
  auto describe = [&](std::size_t i) {
    SubsetScore score;
    for (Eigen::Index b : subsets[i]) score.benchmarks.push_back(s.benchmark_ids()[static_cast<std::size_t>(b)]);
    score.tau = taus[i];
    return score;
  };
  return SubsetSearch{describe(best), describe(worst), subsets.size()};
}

double information_density(double ed, std::size_t benchmarks) {
  if (benchmarks == 0) throw InputError("information_density: suite has no benchmarks");
  return ed / static_cast<double>(benchmarks);
}

}  // namespace spectradiag
