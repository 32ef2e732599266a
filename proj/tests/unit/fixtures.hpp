#pragma once

// Constructed populations shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectradiag/matrix_io.hpp"
#include "spectradiag/synthetic.hpp"

namespace fixture {

struct CeilingPopulation {
  spectradiag::ScoreMatrix matrix;
  std::vector<std::string> early;  ///< models of the first window
  std::vector<std::string> late;   ///< models of the last window
  std::size_t window = 0;
};

/// Models arrive in `windows` consecutive cohorts. Stable tasks follow a
/// one-factor pattern that repeats unchanged in every cohort; ceiling tasks
/// load on five abilities and get easier with each cohort until nearly
/// every model passes them.
inline CeilingPopulation ceiling_population(std::uint64_t seed, int windows = 10, int window = 60,
                                            int stable_tasks = 60, int ceiling_tasks = 60) {
  spectradiag::IrtSpec spec;
  spec.k = 1;
  spec.tasks = stable_tasks;
  spec.models = window;
  spec.discrimination_scale = 2.5;
  spec.seed = seed;
  const Eigen::MatrixXd stable = spectradiag::gen_irt_matrix(spec).values();

  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  constexpr int dims = 5;
  Eigen::MatrixXd load(ceiling_tasks, dims);
  Eigen::VectorXd diff(ceiling_tasks);
  for (int i = 0; i < ceiling_tasks; ++i) {
    for (int d = 0; d < dims; ++d) load(i, d) = z(rng);
    load.row(i) *= 2.5 / load.row(i).norm();
    diff(i) = z(rng);
  }

  const int n = windows * window;
  Eigen::MatrixXd v(stable_tasks + ceiling_tasks, n);
  for (int w = 0; w < windows; ++w) {
    const double shift = 8.0 * w / (windows - 1);
    for (int c = 0; c < window; ++c) {
      const int j = w * window + c;
      v.block(0, j, stable_tasks, 1) = stable.col(c);
      Eigen::VectorXd theta(dims);
      for (auto& t : theta) t = z(rng);
      for (int i = 0; i < ceiling_tasks; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-(load.row(i).dot(theta) - diff(i) + shift)));
        v(stable_tasks + i, j) = u(rng) < p ? 1.0 : 0.0;
      }
    }
  }
  auto tasks = spectradiag::padded_ids('t', stable_tasks + ceiling_tasks, 4);
  auto models = spectradiag::padded_ids('m', n, 4);
  CeilingPopulation out{spectradiag::ScoreMatrix(tasks, models, v), {}, {}, static_cast<std::size_t>(window)};
  out.early.assign(models.begin(), models.begin() + window);
  out.late.assign(models.end() - window, models.end());
  return out;
}

/// Rows of `m` restricted to the given task ids, in matrix order.
inline spectradiag::ScoreMatrix keep_tasks(const spectradiag::ScoreMatrix& m, const std::vector<std::string>& ids) {
  std::vector<std::string> kept;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < m.task_count(); ++i) {
    const auto& id = m.task_ids()[static_cast<std::size_t>(i)];
    for (const auto& want : ids) {
      if (want == id) {
        kept.push_back(id);
        rows.push_back(i);
        break;
      }
    }
  }
  Eigen::MatrixXd v(static_cast<Eigen::Index>(rows.size()), m.model_count());
  for (std::size_t r = 0; r < rows.size(); ++r) v.row(static_cast<Eigen::Index>(r)) = m.values().row(rows[r]);
  return spectradiag::ScoreMatrix(kept, m.model_ids(), v);
}

}  // namespace fixture
