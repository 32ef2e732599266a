#pragma once

// Independent reference implementations used to check the library. They
// favour the most direct formula over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectradiag/matrix_io.hpp"

namespace oracle {

inline std::vector<std::string> ids(char prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    std::string d = std::to_string(i);
    out.push_back(std::string(1, prefix) + std::string(4 - std::min<std::size_t>(4, d.size()), '0') + d);
  }
  return out;
}

inline spectradiag::ScoreMatrix matrix(const Eigen::MatrixXd& v) {
  return spectradiag::ScoreMatrix(ids('t', static_cast<int>(v.rows())), ids('m', static_cast<int>(v.cols())), v);
}

inline Eigen::MatrixXd random_binary(std::uint64_t seed, int t, int n, double p = 0.5) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  Eigen::MatrixXd v(t, n);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < n; ++j) v(i, j) = coin(rng) ? 1.0 : 0.0;
  }
  return v;
}

inline Eigen::MatrixXd random_uniform(std::uint64_t seed, int t, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd v(t, n);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < n; ++j) v(i, j) = u(rng);
  }
  return v;
}

inline Eigen::MatrixXd row_centered(Eigen::MatrixXd x) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i).array() -= x.row(i).mean();
  return x;
}

/// tr(G)^2 / tr(G^2) with G = X X^T; equals the participation ratio of the
/// squared singular values without computing them.
inline double gram_ed(const Eigen::MatrixXd& centered) {
  const Eigen::MatrixXd g = centered.rows() <= centered.cols() ? Eigen::MatrixXd(centered * centered.transpose())
                                                               : Eigen::MatrixXd(centered.transpose() * centered);
  const double tr = g.trace();
  return tr * tr / g.squaredNorm();
}

/// ED from a two-sided Jacobi SVD.
inline double jacobi_ed(const Eigen::MatrixXd& centered) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const Eigen::VectorXd s2 = svd.singularValues().array().square();
  const double total = s2.sum();
  if (!(total > 0.0)) return 0.0;
  return total * total / s2.squaredNorm();
}

inline double spectrum_ed(const std::vector<double>& sigmas) {
  double a = 0.0;
  double b = 0.0;
  for (double s : sigmas) {
    a += s * s;
    b += s * s * s * s;
  }
  return a * a / b;
}

/// Greedy ED selection that recomputes every candidate subset with an SVD.
inline std::vector<Eigen::Index> naive_greedy(const spectradiag::ScoreMatrix& m, Eigen::Index k,
                                              std::vector<double>* trajectory = nullptr) {
  const Eigen::MatrixXd x = row_centered(m.values());
  const Eigen::Index t = x.rows();
  std::vector<Eigen::Index> chosen;
  std::vector<char> used(static_cast<std::size_t>(t), 0);
  for (Eigen::Index step = 0; step < k; ++step) {
    bool live = false;
    for (Eigen::Index i = 0; i < t; ++i) live |= !used[static_cast<std::size_t>(i)] && x.row(i).squaredNorm() > 0.0;
    Eigen::Index best = -1;
    double best_ed = 0.0;
    for (Eigen::Index i = 0; i < t; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double var = x.row(i).squaredNorm();
      if (live && !(var > 0.0)) continue;
      Eigen::MatrixXd sub(static_cast<Eigen::Index>(chosen.size()) + 1, x.cols());
      for (std::size_t r = 0; r < chosen.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = x.row(chosen[r]);
      sub.row(sub.rows() - 1) = x.row(i);
      const double ed = jacobi_ed(sub);
      if (best < 0) {
        best = i;
        best_ed = ed;
        continue;
      }
      const double tol = 1e-10 * std::max(ed, best_ed);
      const double bvar = x.row(best).squaredNorm();
      const bool same_var = std::abs(var - bvar) <= 1e-10 * std::max(var, bvar);
      const bool smaller_id = m.task_ids()[static_cast<std::size_t>(i)] < m.task_ids()[static_cast<std::size_t>(best)];
      if (ed > best_ed + tol || (std::abs(ed - best_ed) <= tol && (same_var ? smaller_id : var > bvar))) {
        best = i;
        best_ed = ed;
      }
    }
    chosen.push_back(best);
    used[static_cast<std::size_t>(best)] = 1;
    if (trajectory) trajectory->push_back(best_ed);
  }
  return chosen;
}

/// Mann-Kendall S by definition.
inline double mk_s(const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) s += (x[j] > x[i]) - (x[j] < x[i]);
  }
  return s;
}

/// Two-sided exact p by enumerating all n! index permutations.
inline double mk_exact_p(const std::vector<double>& x) {
  const double s_obs = std::abs(mk_s(x));
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double hit = 0.0;
  double total = 0.0;
  std::vector<double> y(x.size());
  do {
    for (std::size_t i = 0; i < perm.size(); ++i) y[i] = x[perm[i]];
    total += 1.0;
    if (std::abs(mk_s(y)) >= s_obs - 1e-9) hit += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return hit / total;
}

/// max over a log grid of min(corr(c, s1), corr(c, s2)) for c = s1 + t s2.
inline double ceiling_grid(double rho, int points) {
  double best = -2.0;
  for (int i = 0; i < points; ++i) {
    const double t = std::exp(std::log(1e-3) + (std::log(1e3) - std::log(1e-3)) * i / (points - 1));
    const double var = 1.0 + t * t + 2.0 * t * rho;
    const double c1 = (1.0 + t * rho) / std::sqrt(var);
    const double c2 = (t + rho) / std::sqrt(var);
    best = std::max(best, std::min(c1, c2));
  }
  return best;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// P(X <= h, Y <= k) via the conditional form
/// int_{-inf}^{h} phi(x) Phi((k - rho x) / sqrt(1 - rho^2)) dx, Simpson rule.
inline double bvn_cdf(double h, double k, double rho) {
  const double lo = -12.0;
  const int n = 20000;
  const double step = (h - lo) / n;
  const double sd = std::sqrt(1.0 - rho * rho);
  auto f = [&](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI) * normal_cdf((k - rho * x) / sd);
  };
  double sum = f(lo) + f(h);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * step);
  return sum * step / 3.0;
}

/// Tau between two orderings by pair counting.
inline double ordering_tau(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  auto pos = [](const std::vector<std::string>& v, const std::string& id) {
    return std::find(v.begin(), v.end(), id) - v.begin();
  };
  double s = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      s += pos(b, a[i]) < pos(b, a[j]) ? 1.0 : -1.0;
      pairs += 1.0;
    }
  }
  return s / pairs;
}

}  // namespace oracle
