#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spectradiag/association.hpp"
#include "spectradiag/spectral.hpp"
#include "spectradiag/error.hpp"
#include "spectradiag/synthetic.hpp"

using namespace spectradiag;

namespace {

using Vec = std::vector<double>;

ContingencyTable table_from_joint(double p11, double p1, double p2, double n = 1e6) {
  ContingencyTable t;
  t.both = p11 * n;
  t.first_only = (p1 - p11) * n;
  t.second_only = (p2 - p11) * n;
  t.neither = (1.0 - p1 - p2 + p11) * n;
  return t;
}

CorrMatrix block_corr() {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) v(i, j) = (i == j) ? 1.0 : ((i < 3) == (j < 3) ? 0.9 : 0.0);
  }
  return CorrMatrix{{"a", "b", "c", "d", "e", "f"}, v, CorrMethod::pearson};
}

}  // namespace

TEST_CASE("scalar coefficients on hand cases") {
  const Vec x{1, 2, 3, 4, 5};
  Vec affine;
  Vec cube;
  for (double v : x) {
    affine.push_back(2 * v + 1);
    cube.push_back(v * v * v);
  }
  CHECK(*pearson(x, affine) == doctest::Approx(1.0));
  CHECK(*spearman(x, cube) == doctest::Approx(1.0));
  CHECK(*pearson(x, cube) < 1.0);
  CHECK(*kendall_tau_b(Vec{1, 2, 3}, Vec{3, 2, 1}) == doctest::Approx(-1.0));
  CHECK_FALSE(pearson(x, Vec{1, 1, 1, 1, 1}).has_value());
  CHECK_FALSE(spearman(Vec{1, 2}, Vec{2, 1}).has_value());
  CHECK_THROWS_AS(pearson(x, Vec{1, 2}), InputError);
}

TEST_CASE("tau-b handles ties") {
  // x ties: (1,1,2,3), y = (1,2,2,3). Concordant 4, discordant 0, ties x 1, ties y 1.
  const Vec x{1, 1, 2, 3};
  const Vec y{1, 2, 2, 3};
  CHECK(*kendall_tau_b(x, y) == doctest::Approx(4.0 / std::sqrt(5.0 * 5.0)));
  // Spearman equals Pearson on average ranks.
  CHECK(*spearman(x, y) == doctest::Approx(*pearson(Vec{1.5, 1.5, 3, 4}, Vec{1, 2.5, 2.5, 4})));
}

TEST_CASE("rank coefficients are invariant under monotone transforms") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(30);
    Vec y(30);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = z(rng);
      y[i] = 0.5 * x[i] + z(rng);
    }
    Vec fx;
    Vec gy;
    for (double v : x) fx.push_back(std::exp(v));
    for (double v : y) gy.push_back(v * v * v + 2.0);
    CHECK(*spearman(fx, gy) == doctest::Approx(*spearman(x, y)).epsilon(1e-12));
    CHECK(*kendall_tau_b(fx, gy) == doctest::Approx(*kendall_tau_b(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("pairwise matrix marks undefined entries") {
  Eigen::MatrixXd rows(3, 5);
  rows << 1, 2, 3, 4, 5, 5, 4, 3, 2, 1, 1, 1, 1, 1, 1;
  const CorrMatrix c = pairwise_correlation({"a", "b", "c"}, rows, CorrMethod::spearman);
  CHECK(c.values(0, 1) == doctest::Approx(-1.0));
  CHECK(std::isnan(c.values(0, 2)));
  CHECK(c.undefined_ids() == std::vector<std::string>{"a", "b", "c"});
  CHECK(c.values(2, 2) == 1.0);
  Eigen::MatrixXd gaps = rows.topRows(2);
  gaps(0, 0) = std::nan("");
  const CorrMatrix g = pairwise_correlation({"a", "b"}, gaps, CorrMethod::pearson);
  CHECK(g.values(0, 1) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(hierarchical_cluster(c, CutToGroups{1}), InputError);
}

TEST_CASE("bootstrap correlation interval") {
  Vec x(50);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  const Interval same = correlation_ci(x, x, CorrMethod::spearman, 500, 0.95, 1);
  CHECK(same.low > 0.999);
  const Interval again = correlation_ci(x, x, CorrMethod::spearman, 500, 0.95, 1);
  CHECK(same.low == again.low);

  int covers = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed + 100);
    std::normal_distribution<double> z;
    Vec a(200);
    Vec b(200);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = z(rng);
      b[i] = z(rng);
    }
    const Interval ci = correlation_ci(a, b, CorrMethod::spearman, 1000, 0.95, seed);
    covers += (ci.low <= 0.0 && ci.high >= 0.0) ? 1 : 0;
  }
  CHECK(covers >= 18);
}

TEST_CASE("partial correlation") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  Vec x(500);
  Vec y(500);
  Vec z(500);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = n(rng);
    y[i] = 0.6 * x[i] + n(rng);
    z[i] = n(rng);
  }
  CHECK(std::abs(partial_correlation(x, y, z) - *spearman(x, y)) < 0.05);
  CHECK(partial_correlation(z, z, z) == doctest::Approx(0.0));
  Vec neg;
  for (double v : x) neg.push_back(-v);
  CHECK(partial_correlation(x, neg, z) == doctest::Approx(-1.0));
  CHECK(partial_correlation(x, neg, z, CorrMethod::pearson) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(partial_correlation(x, y, Vec(500, 1.0)), InputError);
  CHECK_THROWS_AS(partial_correlation(Vec{1, 2, 3}, Vec{1, 2, 3}, Vec{3, 1, 2}), InputError);
}

TEST_CASE("stratified correlation shows a Simpson reversal") {
  Vec x;
  Vec y;
  std::vector<std::string> labels;
  for (int g = 0; g < 2; ++g) {
    for (int i = 0; i < 10; ++i) {
      x.push_back(10.0 * g + i);
      y.push_back(10.0 * g - 0.5 * i);
      labels.push_back(g == 0 ? "small" : "large");
    }
  }
  const auto s = stratified_correlation(x, y, labels);
  CHECK(*spearman(x, y) > 0.0);
  REQUIRE(s.strata.size() == 2);
  for (const auto& st : s.strata) {
    CHECK(*st.rho < 0.0);
    CHECK(st.reliable);
  }
  const auto one = stratified_correlation(x, y, std::vector<std::string>(x.size(), "all"));
  CHECK(*one.strata[0].rho == doctest::Approx(*spearman(x, y)));
  const auto req = stratified_correlation(x, y, labels, {"large", "medium"});
  REQUIRE(req.strata.size() == 1);
  CHECK(req.strata[0].label == "large");
  CHECK(req.warnings.size() == 1);

  std::vector<std::string> tiny = labels;
  tiny[0] = "rare";
  const auto t = stratified_correlation(x, y, tiny, {"rare"});
  CHECK_FALSE(t.strata[0].reliable);
}

TEST_CASE("bivariate normal cdf agrees with the quadrature oracle") {
  for (double rho : {-0.95, -0.5, 0.0, 0.3, 0.8, 0.99}) {
    for (double h : {-1.5, 0.0, 0.7}) {
      for (double k : {-0.4, 0.0, 1.2}) {
        CHECK(bivariate_normal_cdf(h, k, rho) == doctest::Approx(oracle::bvn_cdf(h, k, rho)).epsilon(1e-8));
      }
    }
  }
  CHECK(bivariate_normal_cdf(0.0, 0.0, 0.0) == doctest::Approx(0.25));
}

TEST_CASE("tetrachoric closed-form zero-threshold cases") {
  CHECK(*tetrachoric(ContingencyTable{25, 25, 25, 25}) == doctest::Approx(0.0).epsilon(1e-6));
  for (double p11 : {0.05, 0.1, 0.2, 0.25, 1.0 / 3.0, 0.4, 0.45}) {
    const double expected = std::sin(2.0 * M_PI * (p11 - 0.25));
    CHECK(std::abs(*tetrachoric(table_from_joint(p11, 0.5, 0.5)) - expected) < 1e-3);
  }
  CHECK(std::abs(*tetrachoric(table_from_joint(1.0 / 3.0, 0.5, 0.5)) - 0.5) < 1e-3);
  CHECK_FALSE(tetrachoric(ContingencyTable{0, 0, 10, 10}).has_value());
  CHECK(*tetrachoric(ContingencyTable{10, 0, 5, 10}) == doctest::Approx(kTetrachoricClamp));
}

TEST_CASE("tetrachoric recovers latent correlation from thresholded samples") {
  for (double rho : {-0.5, 0.0, 0.5, 0.9}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>((rho + 1.0) * 1000));
    std::normal_distribution<double> z;
    const double tx = 0.3;
    const double ty = -0.5;
    ContingencyTable t;
    for (int i = 0; i < 100000; ++i) {
      const double a = z(rng);
      const double b = rho * a + std::sqrt(1.0 - rho * rho) * z(rng);
      const bool pa = a > tx;
      const bool pb = b > ty;
      if (pa && pb) t.both += 1;
      else if (pa) t.first_only += 1;
      else if (pb) t.second_only += 1;
      else t.neither += 1;
    }
    CHECK(std::abs(*tetrachoric(t) - rho) < 0.05);
  }
}

TEST_CASE("tetrachoric ED") {
  Eigen::MatrixXd same(20, 3);
  for (int i = 0; i < 20; ++i) same.row(i).setConstant(i % 2);
  CHECK(tetrachoric_ed(oracle::matrix(same)) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(tetrachoric_ed(oracle::matrix(same.leftCols(2))), InputError);
  CHECK_THROWS_AS(tetrachoric_ed(oracle::matrix(oracle::random_uniform(1, 5, 4))), InputError);

  const double indep = tetrachoric_ed(oracle::matrix(oracle::random_binary(4, 4000, 10)));
  CHECK(indep > 8.0);

  IrtSpec spec;
  spec.k = 5;
  spec.tasks = 500;
  spec.models = 60;
  spec.discrimination_scale = 2.5;
  spec.seed = 10;
  const ScoreMatrix m = gen_irt_matrix(spec);
  const double ratio = tetrachoric_ed(m) / matrix_ed(m);
  CHECK(ratio >= 0.3);
  CHECK(ratio <= 0.9);
}

TEST_CASE("hierarchical clustering") {
  Eigen::MatrixXd rows(3, 6);
  rows << 1, 2, 3, 4, 5, 7, 1, 2, 3, 4, 5, 7, 3, 1, 4, 1, 5, 9;
  const auto c = pairwise_correlation({"x", "y", "z"}, rows, CorrMethod::pearson);
  const auto g = hierarchical_cluster(c, CutToGroups{2});
  CHECK(g.merges[0].left == std::vector<std::string>{"x"});
  CHECK(g.merges[0].right == std::vector<std::string>{"y"});
  CHECK(g.merges[0].height == doctest::Approx(0.0).epsilon(1e-12));

  const auto blocks = hierarchical_cluster(block_corr(), CutToGroups{2});
  CHECK(blocks.groups == std::vector<std::vector<std::string>>{{"a", "b", "c"}, {"d", "e", "f"}});
  const auto singles = hierarchical_cluster(block_corr(), CutAtHeight{0.0});
  CHECK(singles.groups.size() == 6);
  CHECK(hierarchical_cluster(block_corr(), CutAtHeight{0.5}).groups.size() == 2);
}

TEST_CASE("clustering is invariant to input order") {
  const CorrMatrix base = block_corr();
  const std::vector<int> perm{4, 1, 5, 0, 3, 2};
  CorrMatrix shuffled{{}, Eigen::MatrixXd(6, 6), CorrMethod::pearson};
  for (int i = 0; i < 6; ++i) {
    shuffled.ids.push_back(base.ids[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
    for (int j = 0; j < 6; ++j) shuffled.values(i, j) = base.values(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  for (std::size_t groups = 1; groups <= 6; ++groups) {
    const auto a = hierarchical_cluster(base, CutToGroups{groups});
    const auto b = hierarchical_cluster(shuffled, CutToGroups{groups});
    CHECK(a.groups == b.groups);
    REQUIRE(a.merges.size() == b.merges.size());
    for (std::size_t i = 0; i < a.merges.size(); ++i) {
      CHECK(a.merges[i].left == b.merges[i].left);
      CHECK(a.merges[i].right == b.merges[i].right);
    }
  }
}

TEST_CASE("redundancy flags") {
  CorrMatrix c{{"bbh", "mmlu", "math", "musr"}, Eigen::MatrixXd::Identity(4, 4), CorrMethod::spearman};
  auto set = [&](int i, int j, double v) { c.values(i, j) = c.values(j, i) = v; };
  set(0, 1, 0.96);
  set(0, 2, 0.75);
  set(2, 3, -0.64);
  const auto f = redundancy_flags(c);
  REQUIRE(f.redundant.size() == 1);
  CHECK(f.redundant[0].first == "bbh");
  CHECK(f.redundant[0].second == "mmlu");
  CHECK(f.vet_fail.size() == 2);
  REQUIRE(f.complementary.size() == 1);
  CHECK(f.complementary[0].rho == doctest::Approx(-0.64));
}

TEST_CASE("pairwise Hamming distance") {
  Eigen::MatrixXd v(3, 2);
  v << 0, 1, 1, 1, 1, 0;
  CHECK(mean_pairwise_hamming(oracle::matrix(v)) == doctest::Approx(2.0 / 3.0));
  Eigen::MatrixXd same(3, 2);
  same << 0, 0, 1, 1, 1, 1;
  CHECK(mean_pairwise_hamming(oracle::matrix(same)) == 0.0);
  Eigen::MatrixXd comp(3, 2);
  comp << 0, 1, 1, 0, 1, 0;
  CHECK(mean_pairwise_hamming(oracle::matrix(comp)) == 1.0);
}
