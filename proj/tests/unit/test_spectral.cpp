#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "spectradiag/error.hpp"
#include "spectradiag/spectral.hpp"

using namespace spectradiag;

TEST_CASE("uniform spectrum of K values has ED exactly K") {
  for (int k = 1; k <= 50; ++k) {
    const Spectrum s(std::vector<double>(static_cast<std::size_t>(k), 2.5));
    CHECK(effective_dimensionality(s) == doctest::Approx(k).epsilon(1e-14));
  }
}

TEST_CASE("spectral identities over random spectra") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(1, 40);
  std::exponential_distribution<double> mag(1.0);
  std::bernoulli_distribution zero(0.2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> sig(static_cast<std::size_t>(len(rng)));
    for (double& v : sig) v = zero(rng) ? 0.0 : mag(rng);
    sig[0] = 1.0 + mag(rng);
    const Spectrum s = Spectrum::from_unsorted(sig);
    const double ed = effective_dimensionality(s);
    CHECK(ed == doctest::Approx(renyi2_ed(s)).epsilon(1e-9));
    CHECK(ed == doctest::Approx(oracle::spectrum_ed(sig)).epsilon(1e-12));
    CHECK(ed >= 1.0 - 1e-12);
    CHECK(ed <= static_cast<double>(s.nonzero_count()) + 1e-9);
    CHECK(shannon_effective_rank(s) >= ed - 1e-9);
  }
}

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS(Spectrum({1.0, 2.0}), InputError);
  CHECK_THROWS_AS(Spectrum({1.0, -1.0}), InputError);
  CHECK_THROWS_AS(Spectrum({std::nan("")}), InputError);
  const Spectrum zero({0.0, 0.0});
  CHECK_THROWS_AS(effective_dimensionality(zero), AnalysisError);
  CHECK(zero.variance_fractions() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("pc1 fraction and variance fractions") {
  const Spectrum s({3.0, 1.0});
  CHECK(pc1_fraction(s) == doctest::Approx(0.9));
  const auto f = s.variance_fractions();
  CHECK(f[0] + f[1] == doctest::Approx(1.0));
}

TEST_CASE("centering schemes") {
  Eigen::MatrixXd x(2, 3);
  x << 1, 2, 3, 4, 6, 8;
  const auto task = center(x, Centering::task);
  CHECK(task.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  const auto model = center(x, Centering::model);
  CHECK(model.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  const auto both = center(x, Centering::double_center);
  CHECK(both.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(both.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(center(x, Centering::none) == x);
  CHECK(parse_centering("double") == Centering::double_center);
  CHECK_THROWS_AS(parse_centering("rows"), InputError);
}

TEST_CASE("matrix ED agrees with independent Gram and Jacobi oracles") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd x = oracle::row_centered(oracle::random_binary(seed, 30 + static_cast<int>(seed), 20));
    const double ed = matrix_ed(x);
    CHECK(ed == doctest::Approx(oracle::gram_ed(x)).epsilon(1e-9));
    CHECK(ed == doctest::Approx(oracle::jacobi_ed(x)).epsilon(1e-9));
  }
}

TEST_CASE("large inputs take the Gram route with the same result") {
  const Eigen::MatrixXd x = oracle::row_centered(oracle::random_uniform(5, 5001, 1000));
  REQUIRE(static_cast<double>(x.size()) > kGramRouteCells);
  CHECK(matrix_ed(x) == doctest::Approx(oracle::gram_ed(x)).epsilon(1e-8));
}

TEST_CASE("rank-one and identical rows give ED 1") {
  Eigen::MatrixXd x(4, 5);
  for (int i = 0; i < 4; ++i) x.row(i) << 0, 1, 0, 1, 1;
  CHECK(matrix_ed(oracle::matrix(x)) == doctest::Approx(1.0));
  CHECK_FALSE(try_matrix_ed(center(Eigen::MatrixXd::Ones(3, 3), Centering::task)).has_value());
}

TEST_CASE("three-by-three identity pattern") {
  const ScoreMatrix m = oracle::matrix(Eigen::MatrixXd::Identity(3, 3));
  // Task-centering the identity leaves a rank-2 matrix with equal singular values.
  CHECK(matrix_ed(m) == doctest::Approx(2.0));
}

TEST_CASE("participation ratio clips negative eigenvalues") {
  CHECK(participation_ratio(std::vector<double>{1.0, 1.0, -0.5}) == doctest::Approx(2.0));
  CHECK(participation_ratio(std::vector<double>{4.0}) == doctest::Approx(1.0));
}

TEST_CASE("principal components orientation and reconstruction") {
  const Eigen::MatrixXd x = oracle::row_centered(oracle::random_uniform(9, 12, 8));
  const auto pc = principal_components(x, 3);
  CHECK(pc.loadings.cols() == 3);
  CHECK((pc.loadings.transpose() * pc.loadings - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);
  for (Eigen::Index c = 0; c < 3; ++c) {
    Eigen::Index arg = 0;
    pc.loadings.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(pc.loadings(arg, c) > 0.0);
  }
  // Scores equal X^T u.
  CHECK((x.transpose() * pc.loadings - pc.scores).norm() < 1e-9);
  CHECK_THROWS_AS(principal_components(x, 0), InputError);
  CHECK_THROWS_AS(principal_components(x, 9), InputError);
}

TEST_CASE("ED of a correlation matrix") {
  CorrMatrix c{{"a", "b"}, (Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished(), CorrMethod::pearson};
  CHECK(ed_of_correlation(c) == doctest::Approx(2.0));
  c.values << 1, 1, 1, 1;
  CHECK(ed_of_correlation(c) == doctest::Approx(1.0));
  c.values(0, 1) = std::nan("");
  CHECK_THROWS_AS(ed_of_correlation(c), InputError);
}

TEST_CASE("hand-evaluated spectra") {
  const Spectrum two_one({2.0, 1.0});
  CHECK(effective_dimensionality(two_one) == doctest::Approx(25.0 / 17.0).epsilon(1e-12));
  CHECK(renyi2_ed(two_one) == doctest::Approx(25.0 / 17.0).epsilon(1e-12));
  CHECK(shannon_effective_rank(two_one) ==
        doctest::Approx(std::exp(-0.8 * std::log(0.8) - 0.2 * std::log(0.2))).epsilon(1e-12));
  CHECK(pc1_fraction(two_one) == doctest::Approx(0.8));
  CHECK(effective_dimensionality(Spectrum({5.0, 0.0, 0.0})) == doctest::Approx(1.0));
  CHECK(shannon_effective_rank(Spectrum({5.0, 0.0})) == doctest::Approx(1.0));
  CHECK(shannon_effective_rank(Spectrum({1.0, 1.0, 1.0})) == doctest::Approx(3.0));
  CHECK(pc1_fraction(Spectrum({1.0, 1.0, 1.0, 1.0})) == doctest::Approx(0.25));
}

TEST_CASE("singular spectrum basics") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const Spectrum s = singular_spectrum(d);
  CHECK(s.sigmas()[0] == doctest::Approx(3.0));
  CHECK(s.sigmas()[1] == doctest::Approx(1.0));
  CHECK(singular_spectrum(Eigen::MatrixXd::Zero(3, 2)).nonzero_count() == 0);
  const Eigen::MatrixXd r = oracle::random_uniform(4, 5, 4);
  double sum = 0.0;
  const Spectrum rs = singular_spectrum(r);
  for (double v : rs.sigmas()) sum += v * v;
  CHECK(sum == doctest::Approx(r.squaredNorm()).epsilon(1e-8));
  Eigen::MatrixXd bad = r;
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(singular_spectrum(bad), InputError);
}

TEST_CASE("task centering of a single row") {
  Eigen::MatrixXd x(1, 3);
  x << 1, 0, 1;
  const auto c = center(x, Centering::task);
  CHECK(c(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(c(0, 1) == doctest::Approx(-2.0 / 3.0));
  CHECK(center(Eigen::MatrixXd::Constant(3, 4, 0.7), Centering::task).norm() < 1e-15);
}

TEST_CASE("ED is scale invariant and bounded by min(T,N)") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd x = oracle::row_centered(oracle::random_uniform(seed, 8 + static_cast<int>(seed % 5), 6));
    const double ed = matrix_ed(x);
    CHECK(matrix_ed(Eigen::MatrixXd(x * 7.5)) == doctest::Approx(ed).epsilon(1e-10));
    CHECK(ed <= static_cast<double>(std::min(x.rows(), x.cols())) + 1e-9);
  }
}

TEST_CASE("principal component examples") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const auto pc = principal_components(d, 2);
  CHECK(pc.variance_fraction[0] == doctest::Approx(0.9));
  CHECK(pc.variance_fraction[1] == doctest::Approx(0.1));
  const Eigen::MatrixXd r = oracle::row_centered(oracle::random_uniform(21, 7, 5));
  const auto full = principal_components(r, 5);
  CHECK((full.loadings * full.scores.transpose() - r).norm() < 1e-9);
  const auto one = principal_components(r, 1);
  CHECK(one.variance_fraction[0] == doctest::Approx(pc1_fraction(singular_spectrum(r))));
  const auto sig = singular_spectrum(r).sigmas();
  double tail = 0.0;
  for (std::size_t i = 1; i < sig.size(); ++i) tail += sig[i] * sig[i];
  CHECK((one.loadings * one.scores.transpose() - r).squaredNorm() == doctest::Approx(tail).epsilon(1e-6));
  Eigen::MatrixXd rank1 = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0) * Eigen::RowVectorXd::LinSpaced(3, 1.0, 3.0);
  CHECK(principal_components(rank1, 1).variance_fraction[0] == doctest::Approx(1.0));
}

TEST_CASE("correlation ED examples") {
  CorrMatrix c{oracle::ids('b', 4), Eigen::MatrixXd::Identity(4, 4), CorrMethod::pearson};
  CHECK(ed_of_correlation(c) == doctest::Approx(4.0));
  c.values.setOnes();
  CHECK(ed_of_correlation(c) == doctest::Approx(1.0));
  CorrMatrix half{{"a", "b"}, (Eigen::MatrixXd(2, 2) << 1, 0.5, 0.5, 1).finished(), CorrMethod::pearson};
  CHECK(ed_of_correlation(half) == doctest::Approx(1.6));
  half.values(0, 1) = 0.4;
  CHECK_THROWS_AS(ed_of_correlation(half), InputError);
}
