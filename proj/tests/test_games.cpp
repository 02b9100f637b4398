#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nugget/errors.hpp"
#include "nugget/games.hpp"

using namespace nugget;
using namespace nugget::testing;

TEST_CASE("game spec validation and names") {
  CHECK_THROWS_AS(GameSpec::linear_quadratic(1.0, 0.5).validate(), ArgumentError);
  CHECK_THROWS_AS(GameSpec::linear_quadratic(0.5, 1.5).validate(), ArgumentError);
  CHECK_THROWS_AS(GameSpec::barik_honorio(1.0, 0.0).validate(), ArgumentError);
  CHECK_THROWS_AS(GameSpec::barik_honorio(-1.0, 0.2).validate(), ArgumentError);
  CHECK_NOTHROW(GameSpec::linear_quadratic(-0.6, 0.0).validate());
  CHECK(parse_game_kind("lq") == GameKind::LinearQuadratic);
  CHECK(parse_game_kind("lig") == GameKind::LinearInfluence);
  CHECK(parse_game_kind("bh") == GameKind::BarikHonorio);
  CHECK_THROWS_AS(parse_game_kind("zz"), ConfigError);
}

TEST_CASE("benefits") {
  Rng rng(1);
  const NormalizedGraph ng = normalize(hexagon_with_chord());
  SUBCASE("alpha = 0 gives identity covariance") {
    std::vector<Vector> s;
    for (int i = 0; i < 100000; ++i) s.push_back(sample_benefits(ng, 0.0, rng));
    CHECK(rel_frobenius(empirical_cov(s), Matrix::identity(6)) < 0.05);
  }
  SUBCASE("alpha = 1 samples are orthogonal to D^1/2 1") {
    for (int i = 0; i < 100; ++i) {
      const Vector b = sample_benefits(ng, 1.0, rng);
      CHECK(std::abs(dot(b, ng.sqrt_degree)) < 1e-8 * norm2(b));
    }
  }
  SUBCASE("dirichlet energy falls as alpha grows") {
    Rng g(2);
    const NormalizedGraph er = normalize(gen_er(10, 0.4, g));
    double prev = INFINITY;
    for (double alpha : {0.0, 0.5, 0.9}) {
      double energy = 0.0;
      for (int i = 0; i < 20000; ++i) {
        const Vector b = sample_benefits(er, alpha, rng);
        energy += dot(b, er.laplacian * b) / dot(b, b);
      }
      CHECK(energy < prev);
      prev = energy;
    }
  }
}

TEST_CASE("linear quadratic equilibrium") {
  SUBCASE("two-node closed form") {
    const Vector x = equilibrium_lq(normalize(path(2)), 0.5, Vector{1, 1});
    CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("beta = 0 returns b") {
    const Vector b{0.3, -1.0, 2.0, 0.5, 1.5, -0.25};
    CHECK(equilibrium_lq(normalize(hexagon_with_chord()), 0.0, b) == b);
  }
  SUBCASE("frozen reference solution") {
    const Vector b{1.0, -2.0, 0.5, 3.0, -1.0, 0.25};
    const Vector x = equilibrium_lq(normalize(hexagon_with_chord()), 0.6, b);
    const double expected[] = {1.5464357540129225, -1.3288539542270634, 0.9744939801338485,
                               3.5646206275184067, 0.06790057354044189, 0.6491680237949151};
    for (std::size_t i = 0; i < 6; ++i) CHECK(x[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
  SUBCASE("residual on random graphs") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const NormalizedGraph ng = normalize(gen_er(20, 0.2, rng));
      const double beta = rng.uniform(-0.95, 0.95);
      const Vector b = sample_benefits(ng, 0.5, rng);
      CHECK(lq_residual(ng, beta, b, equilibrium_lq(ng, beta, b)) <= 1e-8 * norm_inf(b));
    }
  }
  SUBCASE("|beta| >= 1 rejected") {
    CHECK_THROWS_AS(equilibrium_lq(normalize(path(3)), 1.0, Vector{1, 1, 1}), ArgumentError);
  }
}

TEST_CASE("linear influence equilibrium") {
  SUBCASE("two-node path swaps benefits") {
    const Vector x = equilibrium_lig(normalize(path(2)), Vector{3, 7});
    CHECK(x[0] == doctest::Approx(7.0));
    CHECK(x[1] == doctest::Approx(3.0));
  }
  SUBCASE("frozen pseudoinverse solution") {
    const Vector b{1.0, -2.0, 0.5, 3.0, -1.0, 0.25};
    const Vector x = equilibrium_lig(normalize(hexagon_with_chord()), b);
    const double expected[] = {-13.286607049870572, 4.4494897427831885, 6.84846922834954,
                               -4.224744871391611,  11.348469228349542, 1.4494897427831877};
    for (std::size_t i = 0; i < 6; ++i) CHECK(x[i] == doctest::Approx(expected[i]).epsilon(1e-10));
  }
  SUBCASE("trees with zero eigenvalues keep the range projection") {
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
      const NormalizedGraph ng = normalize(gen_ba(20, 1, rng));
      const Vector b = sample_benefits(ng, 0.3, rng);
      CHECK(lig_residual(ng, b, equilibrium_lig(ng, b)) <= 1e-8 * norm_inf(b));
    }
  }
}

TEST_CASE("barik-honorio equilibrium") {
  SUBCASE("no noise gives the top eigenvector") {
    const NormalizedGraph ng = normalize(path(2));
    Rng rng(5);
    const Vector x = equilibrium_bh(ng, GameSpec::barik_honorio(0.0), rng);
    CHECK(x[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(x[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(bh_residual(ng, x) < 1e-8);
  }
  SUBCASE("epsilon bound holds for every sample") {
    Rng rng(6);
    for (int i = 0; i < 300; ++i) {
      const NormalizedGraph ng = normalize(generate_graph({static_cast<GraphModel>(i % 3), 20, 0.2, 4, 1}, rng));
      CHECK(bh_residual(ng, equilibrium_bh(ng, GameSpec::barik_honorio(1.0, 0.2), rng)) <= 0.2);
    }
  }
  SUBCASE("top eigenvector sign convention") {
    Rng rng(7);
    const Vector u = top_eigenvector(normalize(gen_ba(20, 1, rng)));
    double best = 0.0;
    for (double v : u)
      if (std::abs(v) > std::abs(best)) best = v;
    CHECK(best > 0.0);
  }
}

TEST_CASE("generic equilibrium dispatch") {
  const NormalizedGraph ng = normalize(hexagon_with_chord());
  Rng a(8), b(8);
  const Vector direct = equilibrium_lig(ng, sample_benefits(ng, 0.4, a));
  CHECK(generic_equilibrium(GameSpec::linear_influence(0.4), ng, b) == direct);

  Rng rng(9);
  std::vector<Vector> s;
  for (int i = 0; i < 50000; ++i) s.push_back(generic_equilibrium(GameSpec::linear_quadratic(0.0, 0.0), ng, rng));
  CHECK(rel_frobenius(empirical_cov(s), Matrix::identity(6)) < 0.05);
}

TEST_CASE("analytic covariances match reference values") {
  const NormalizedGraph ng = normalize(hexagon_with_chord());
  const Matrix lq = analytic_covariance(GameSpec::linear_quadratic(0.5, 0.5), ng);
  CHECK(lq(0, 0) == doctest::Approx(2.373434651590064).epsilon(1e-10));
  CHECK(lq(0, 1) == doctest::Approx(1.4374040765279568).epsilon(1e-10));
  CHECK(lq(2, 5) == doctest::Approx(0.5811066979108443).epsilon(1e-10));
  const Matrix lig = analytic_covariance(GameSpec::linear_influence(0.5), ng);
  CHECK(lig(0, 0) == doctest::Approx(21.28671328671328).epsilon(1e-10));
  CHECK(lig(0, 1) == doctest::Approx(1.290407183843767).epsilon(1e-10));
  CHECK(lig(2, 5) == doctest::Approx(-0.990209790209762).epsilon(1e-10));
  CHECK_THROWS_AS(analytic_covariance(GameSpec::barik_honorio(), ng), ArgumentError);
}

TEST_CASE("monte-carlo covariance matches the analytic form") {
  const NormalizedGraph ng = normalize(hexagon_with_chord());
  Rng rng(10);
  for (const GameSpec& spec : {GameSpec::linear_quadratic(0.5, 0.5), GameSpec::linear_influence(0.5)}) {
    std::vector<Vector> s;
    for (int i = 0; i < 100000; ++i) s.push_back(generic_equilibrium(spec, ng, rng));
    CHECK(rel_frobenius(empirical_cov(s), analytic_covariance(spec, ng)) < 0.05);
  }
}

TEST_CASE("relabelling nodes permutes equilibria") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Graph g = gen_er(12, 0.3, rng);
    const auto perm = random_permutation(12, rng);
    const NormalizedGraph ng = normalize(g);
    const NormalizedGraph pg = normalize(g.permuted(perm));
    const Vector b = sample_benefits(ng, 0.5, rng);
    Vector pb(12);
    for (std::size_t i = 0; i < 12; ++i) pb[i] = b[perm[i]];
    const Vector x = equilibrium_lq(ng, 0.7, b);
    const Vector px = equilibrium_lq(pg, 0.7, pb);
    for (std::size_t i = 0; i < 12; ++i) CHECK(px[i] == doctest::Approx(x[perm[i]]).epsilon(1e-10));
  }
}

TEST_CASE("smoothness of LQ actions grows with alpha and beta") {
  Rng rng(12);
  const NormalizedGraph ng = normalize(gen_er(20, 0.2, rng));
  auto energy = [&](const GameSpec& spec) {
    double e = 0.0;
    for (int i = 0; i < 4000; ++i) {
      const Vector x = generic_equilibrium(spec, ng, rng);
      e += dot(x, ng.laplacian * x) / dot(x, x);
    }
    return e / 4000.0;
  };
  const double base = energy(GameSpec::linear_quadratic(0.0, 0.0));
  const double smooth = energy(GameSpec::linear_quadratic(0.9, 0.9));
  CHECK(smooth < 0.5 * base);
}
