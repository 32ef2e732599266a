#include "spectradiag/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spectradiag/association.hpp"
#include "spectradiag/error.hpp"
#include "spectradiag/parallel.hpp"
#include "spectradiag/random.hpp"
#include "spectradiag/spectral.hpp"
#include "spectradiag/stats.hpp"

namespace spectradiag {

void IrtSpec::validate() const {
  if (tasks < 1) throw InputError("IRT spec: need at least one task");
  if (models < 2) throw InputError("IRT spec: need at least two models");
  if (k < 1 || k > std::min(tasks, models)) {
    throw InputError("IRT spec: k=" + std::to_string(k) + " outside [1, min(T, N)]");
  }
  if (!(discrimination_scale >= 0.0) || !(difficulty_spread >= 0.0) || !(discrimination_log_sd >= 0.0)) {
    throw InputError("IRT spec: scales must be nonnegative");
  }
}

std::vector<std::string> padded_ids(char prefix, Eigen::Index count, std::size_t min_width) {
  const std::size_t width = std::max(min_width, std::to_string(std::max<Eigen::Index>(count - 1, 0)).size());
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    std::string digits = std::to_string(i);
    out.push_back(std::string(1, prefix) + std::string(width - digits.size(), '0') + digits);
  }
  return out;
}

ScoreMatrix gen_irt_matrix(const IrtSpec& spec) {
  spec.validate();
  const Eigen::Index k = spec.k;
  Eigen::MatrixXd theta(k, spec.models);
  {
    Rng rng = substream(spec.seed, 0);
    std::normal_distribution<double> z;
    for (Eigen::Index j = 0; j < spec.models; ++j) {
      for (Eigen::Index d = 0; d < k; ++d) theta(d, j) = z(rng);
    }
  }

  Eigen::MatrixXd values(spec.tasks, spec.models);
  parallel_for(static_cast<std::size_t>(spec.tasks), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    Rng rng = substream(spec.seed, ui + 1);
    std::normal_distribution<double> z;
    Eigen::VectorXd a(k);
    double norm = 0.0;
    while (!(norm > 0.0)) {
      for (Eigen::Index d = 0; d < k; ++d) a(d) = spec.positive_loadings ? std::abs(z(rng)) : z(rng);
      norm = a.norm();
    }
    double scale = spec.discrimination_scale;
    if (spec.discrimination_log_sd > 0.0) scale *= std::exp(spec.discrimination_log_sd * z(rng));
    a *= scale / norm;
    const double b = spec.difficulty_spread > 0.0 ? spec.difficulty_spread * z(rng) : 0.0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Eigen::Index j = 0; j < spec.models; ++j) {
      const double logit = a.dot(theta.col(j)) - b;
      const double p = 1.0 / (1.0 + std::exp(-logit));
      values(i, j) = u(rng) < p ? 1.0 : 0.0;
    }
  });
  return ScoreMatrix(padded_ids('t', spec.tasks, 4), padded_ids('m', spec.models, 3), std::move(values));
}

LabeledTable gen_iid_matrix(Eigen::Index tasks, Eigen::Index models, IidKind kind, double p, std::uint64_t seed) {
  if (tasks < 1 || models < 1) throw InputError("gen_iid_matrix: dimensions must be positive");
  if (kind == IidKind::bernoulli && !(p >= 0.0 && p <= 1.0)) throw InputError("gen_iid_matrix: p must lie in [0, 1]");
  LabeledTable t;
  t.row_ids = padded_ids('t', tasks, 4);
  t.col_ids = padded_ids('m', models, 3);
  t.values.resize(tasks, models);
  t.missing = MissingMask::Constant(tasks, models, false);
  parallel_for(static_cast<std::size_t>(tasks), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    Rng rng = substream(seed, ui);
    std::normal_distribution<double> z;
    std::bernoulli_distribution coin(p);
    for (Eigen::Index j = 0; j < models; ++j) {
      t.values(i, j) = kind == IidKind::gaussian ? z(rng) : (coin(rng) ? 1.0 : 0.0);
    }
  });
  return t;
}

std::uint64_t rank_recovery_seed(std::uint64_t base_seed, Eigen::Index k, std::size_t replicate) {
  return mix_seed(mix_seed(base_seed, static_cast<std::uint64_t>(k)), replicate);
}

RankRecoveryReport rank_recovery_report(const RankRecoveryOptions& options) {
  if (options.ks.size() < 2) throw InputError("rank_recovery_report: need at least two values of k");
  if (options.seeds < 1) throw InputError("rank_recovery_report: need at least one seed");
  const std::size_t nk = options.ks.size();
  const std::size_t ns = options.seeds;
  RankRecoveryReport r;
  r.options = options;
  r.ks = options.ks;
  r.ed.assign(nk, std::vector<double>(ns, 0.0));

  parallel_for(nk * ns, [&](std::size_t cell) {
    const std::size_t ki = cell / ns;
    const std::size_t si = cell % ns;
    IrtSpec spec;
    spec.k = options.ks[ki];
    spec.tasks = options.tasks;
    spec.models = options.models;
    spec.discrimination_scale = options.discrimination_scale;
    spec.difficulty_spread = options.difficulty_spread;
    spec.seed = rank_recovery_seed(options.base_seed, spec.k, si);
    r.ed[ki][si] = matrix_ed(gen_irt_matrix(spec), Centering::task);
  });

  std::vector<double> kd;
  for (std::size_t ki = 0; ki < nk; ++ki) {
    kd.push_back(static_cast<double>(options.ks[ki]));
    r.mean_ed.push_back(stats::mean(r.ed[ki]));
    r.overestimate_ratio.push_back(r.mean_ed.back() / kd.back());
  }
  r.spearman_rho = spearman(kd, r.mean_ed).value_or(0.0);

  std::vector<double> per_seed;
  const auto lo = static_cast<std::size_t>(std::min_element(kd.begin(), kd.end()) - kd.begin());
  const auto hi = static_cast<std::size_t>(std::max_element(kd.begin(), kd.end()) - kd.begin());
  r.top_exceeds_bottom_every_seed = true;
  for (std::size_t si = 0; si < ns; ++si) {
    std::vector<double> eds;
    for (std::size_t ki = 0; ki < nk; ++ki) eds.push_back(r.ed[ki][si]);
    per_seed.push_back(spearman(kd, eds).value_or(0.0));
    if (!(r.ed[hi][si] > r.ed[lo][si])) r.top_exceeds_bottom_every_seed = false;
  }
  r.per_seed_rho_mean = stats::mean(per_seed);
  r.per_seed_rho_sd = stats::sample_sd(per_seed);
  return r;
}

}  // namespace spectradiag
