#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nugget/baselines.hpp"
#include "nugget/errors.hpp"

using namespace nugget;
using namespace nugget::testing;

namespace {

// Same construction as oracles/gen_oracles.py.
Matrix oracle_observations() {
  const std::size_t n = 5, k = 40;
  Matrix z(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t g = 0; g < k; ++g)
      z(i, g) = static_cast<double>((i * 7 + g * 13 + i * g * 3 + g * g) % 17) / 16.0 - 0.5;
  const Matrix mix(5, 5, {1, 0, 0, 0, 0, 0.5, 1, 0, 0, 0, 0, -0.5, 1, 0, 0, 0, 0, 0.25, 1, 0, 0, 0, 0, -0.5, 1});
  return mix * z;
}

Matrix sample_gaussian(const Matrix& precision, std::size_t count, Rng& rng) {
  const auto e = sym_eig(precision);
  Matrix x(precision.rows(), count);
  for (std::size_t g = 0; g < count; ++g) {
    const Vector s = mvn_sample(e, rng);
    for (std::size_t i = 0; i < s.size(); ++i) x(i, g) = s[i];
  }
  return x;
}

double min_eigenvalue(const Matrix& m) { return sym_eig(m).values.back(); }

}  // namespace

TEST_CASE("correlation") {
  Rng rng(1);
  SUBCASE("identical and negated rows") {
    Matrix x = random_matrix(3, 10, rng);
    for (std::size_t g = 0; g < 10; ++g) {
      x(1, g) = x(0, g);
      x(2, g) = -x(0, g);
    }
    const EdgeScores s = correlation(x);
    CHECK(s(0, 1) == doctest::Approx(1.0));
    CHECK(s(0, 2) == doctest::Approx(-1.0));
    CHECK(anticorrelation(x)(0, 2) == doctest::Approx(1.0));
  }
  SUBCASE("independent rows are weakly correlated") {
    const EdgeScores s = correlation(random_matrix(6, 1000, rng));
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        if (i != j) CHECK(std::abs(s(i, j)) < 0.1);
  }
  SUBCASE("frozen reference values") {
    const EdgeScores s = correlation(oracle_observations());
    CHECK(s(0, 1) == doctest::Approx(0.7150488633418827).epsilon(1e-12));
    CHECK(s(2, 4) == doctest::Approx(0.09800828092747332).epsilon(1e-10));
  }
  SUBCASE("invariances") {
    const Matrix x = random_matrix(7, 15, rng);
    const EdgeScores base = correlation(x);
    CHECK(max_abs_diff(correlation(permute_cols(x, random_permutation(15, rng))), base) < 1e-12);
    Matrix affine = x;
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t g = 0; g < 15; ++g) affine(i, g) = (1.0 + static_cast<double>(i)) * x(i, g) - 3.0;
    CHECK(max_abs_diff(correlation(affine), base) < 1e-12);
    const auto perm = random_permutation(7, rng);
    CHECK(max_abs_diff(correlation(permute_rows(x, perm)), permute_sym(base, perm)) < 1e-12);
    CHECK(max_abs_diff(anticorrelation(x), -1.0 * base) == 0.0);
    for (double v : base.values()) {
      CHECK(v <= 1.0);
      CHECK(v >= -1.0);
    }
  }
  SUBCASE("constant row scores zero") {
    Matrix x = random_matrix(3, 8, rng);
    for (std::size_t g = 0; g < 8; ++g) x(1, g) = 2.0;
    const EdgeScores s = correlation(x);
    CHECK(s(0, 1) == 0.0);
    CHECK(s(1, 2) == 0.0);
  }
}

TEST_CASE("empirical covariance") {
  const Matrix x(2, 3, {1, 2, 3, 2, 4, 6});
  const Matrix s = empirical_covariance(x);
  // K = 3 > N = 2 and no constant rows, so no jitter
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(0, 1) == doctest::Approx(2.0));
  CHECK(s(1, 1) == doctest::Approx(4.0));
  Rng rng(2);
  const Matrix wide = empirical_covariance(random_matrix(6, 4, rng));
  CHECK(min_eigenvalue(wide) > 0.0);
  CHECK_THROWS_AS(empirical_covariance(Matrix(3, 4, 1.0)), NumericalError);
}

TEST_CASE("graphical lasso") {
  SUBCASE("lambda = 0 inverts the covariance") {
    Rng rng(3);
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix x = random_matrix(6, 60, rng);
      const Matrix s = empirical_covariance(x);
      GlassoOptions opts;
      opts.tol = 1e-10;
      const GlassoResult r = graphical_lasso_cov(s, 0.0, opts);
      CHECK(r.converged);
      CHECK(rel_frobenius(r.precision, inverse(s)) < 1e-4);
    }
  }
  SUBCASE("matches the reference solver") {
    GlassoOptions opts;
    opts.tol = 1e-12;
    const GlassoResult r = graphical_lasso(oracle_observations(), 0.005, opts);
    const Matrix expected(5, 5,
                          {17.76845545731088,    -10.661223343667645, 2.539085823713318,    -0.0,
                           0.6000846959397709,   -10.661223343667645, 14.7516516495863,     0.005272699469496702,
                           -1.0450726229921548,  -0.36343593857042394, 2.539085823713318,   0.005272699469496702,
                           11.57863352329621,    0.0,                 -0.31695524958958443, -0.0,
                           -1.0450726229921548,  0.0,                 13.166452150730086,   3.629614205148287,
                           0.6000846959397709,   -0.36343593857042394, -0.31695524958958443, 3.629614205148287,
                           14.379493740142497});
    CHECK(rel_frobenius(r.precision, expected) < 1e-6);
    CHECK(r.scores(0, 3) == 0.0);
    CHECK(r.scores(2, 3) == 0.0);
  }
  SUBCASE("huge lambda gives a diagonal precision") {
    Rng rng(4);
    const GlassoResult r = graphical_lasso(random_matrix(5, 30, rng), 1e5);
    for (double v : r.scores.values()) CHECK(v == 0.0);
  }
  SUBCASE("objective never increases and the result is positive definite") {
    Rng rng(5);
    for (double lambda : {0.01, 0.1, 0.5}) {
      const GlassoResult r = graphical_lasso(random_matrix(8, 12, rng), lambda);
      for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] <= r.objective[i - 1] + 1e-10);
      CHECK(r.precision.is_symmetric());
      CHECK(min_eigenvalue(r.precision) > 0.0);
    }
  }
  SUBCASE("recovers a chain") {
    const Matrix precision = 4.0 * Matrix(4, 4, {1, -0.4, 0, 0, -0.4, 1, -0.4, 0, 0, -0.4, 1, -0.4, 0, 0, -0.4, 1});
    Rng rng(6);
    const GlassoResult r = graphical_lasso(sample_gaussian(precision, 5000, rng), 0.05);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j) CHECK((r.scores(i, j) > 0.0) == (i + 1 == j || j + 1 == i));
  }
  SUBCASE("node equivariance") {
    Rng rng(7);
    const Matrix x = random_matrix(6, 25, rng);
    const auto perm = random_permutation(6, rng);
    GlassoOptions opts;
    opts.tol = 1e-12;
    const EdgeScores a = graphical_lasso(x, 0.05, opts).scores;
    const EdgeScores b = graphical_lasso(permute_rows(x, perm), 0.05, opts).scores;
    CHECK(max_abs_diff(b, permute_sym(a, perm)) < 1e-8);
  }
  SUBCASE("bad inputs") {
    CHECK_THROWS_AS(graphical_lasso_cov(Matrix::identity(3), -1.0), ArgumentError);
    CHECK_THROWS_AS(graphical_lasso_cov(Matrix(2, 2, {1, 2, 2, 1}), 0.1), NumericalError);
  }
}

TEST_CASE("regularization tuning") {
  GenerationConfig cfg;
  cfg.graph = {GraphModel::ErdosRenyi, 10, 0.3, 0, 1};
  cfg.game = GameSpec::linear_influence(1.0);
  cfg.games = 30;
  cfg.train = 1;
  cfg.val = 4;
  cfg.test = 4;
  cfg.seed = 8;
  const Dataset ds = generate_dataset(cfg);

  const auto grid = default_lambda_grid();
  REQUIRE(grid.size() == 11);
  CHECK(grid.front() == doctest::Approx(1e-5));
  CHECK(grid.back() == doctest::Approx(1e5));

  const TuneResult g = tune_regularization(BaselineMethod::GraphicalLasso, ds, grid);
  CHECK(g.evaluations == 11);
  CHECK(g.test.per_graph.size() == 4);
  CHECK(std::isnan(g.test.mean_acc));

  const std::vector<double> single{0.3};
  CHECK(tune_regularization(BaselineMethod::GraphicalLasso, ds, single).best_lambda == 0.3);

  // both values shrink everything to zero, so the AUCs tie
  const std::vector<double> tie{1e5, 1e4};
  const TuneResult t = tune_regularization(BaselineMethod::GraphicalLasso, ds, tie);
  CHECK(t.val_auc[0] == t.val_auc[1]);
  CHECK(t.best_lambda == 1e4);

  const TuneResult c = tune_regularization(BaselineMethod::Correlation, ds, grid);
  CHECK(c.evaluations == 1);
  CHECK(parse_baseline("glasso") == BaselineMethod::GraphicalLasso);
  CHECK_THROWS_AS(parse_baseline("deepgraph"), ConfigError);
}
