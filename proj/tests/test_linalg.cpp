#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nugget/errors.hpp"
#include "nugget/linalg.hpp"
#include "nugget/rng.hpp"

using namespace nugget;
using namespace nugget::testing;

TEST_CASE("rng streams are reproducible and split independently of draws") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  Rng c(42);
  const Rng child_before = c.split(3);
  for (int i = 0; i < 10; ++i) c.normal();
  Rng child_after = c.split(3);
  Rng copy = child_before;
  for (int i = 0; i < 100; ++i) CHECK(copy.next_u32() == child_after.next_u32());
  CHECK(Rng(42).split(1).next_u64() != Rng(42).split(2).next_u64());
}

TEST_CASE("rng uniform and normal moments") {
  Rng rng(7);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("sym_eig small cases") {
  SUBCASE("2x2 swap") {
    const auto e = sym_eig(Matrix(2, 2, {0, 1, 1, 0}));
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(-1.0));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(s));
    CHECK(e.vectors(0, 0) * e.vectors(1, 0) > 0.0);
    CHECK(e.vectors(0, 1) * e.vectors(1, 1) < 0.0);
  }
  SUBCASE("identity") {
    const auto e = sym_eig(Matrix::identity(5));
    for (double v : e.values) CHECK(v == 1.0);
  }
  SUBCASE("non-symmetric input") { CHECK_THROWS_AS(sym_eig(Matrix(2, 2, {0, 1, 2, 0})), ArgumentError); }
}

TEST_CASE("sym_eig reconstruction and orthonormality on random matrices") {
  Rng rng(11);
  for (std::size_t n : {1, 3, 20, 45}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Matrix m = random_symmetric(n, rng);
      const auto e = sym_eig(m);
      CHECK((e.reconstruct() - m).frobenius() <= 1e-8 * m.frobenius());
      const Matrix gram = e.vectors.transposed() * e.vectors;
      CHECK((gram - Matrix::identity(n)).frobenius() <= 1e-8);
      for (std::size_t i = 1; i < n; ++i) CHECK(e.values[i - 1] >= e.values[i]);
    }
  }
}

TEST_CASE("solve examples and residual bound") {
  CHECK(solve(Matrix::identity(2), Vector{3, 4}) == Vector{3, 4});
  const Vector x = solve(Matrix(2, 2, {1, -0.5, -0.5, 1}), Vector{1, 1});
  CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));

  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix m = random_matrix(20, 20, rng);
    for (std::size_t i = 0; i < 20; ++i) m(i, i) += 10.0;
    const Vector rhs = random_matrix(20, 1, rng).values();
    const Vector sol = solve(m, rhs);
    const Vector mx = m * sol;
    double res = 0.0;
    for (std::size_t i = 0; i < 20; ++i) res = std::max(res, std::abs(mx[i] - rhs[i]));
    CHECK(res <= 1e-9 * (m.norm_inf() * norm_inf(sol) + norm_inf(rhs)));
  }
}

TEST_CASE("solve rejects singular systems with a condition estimate") {
  const Matrix singular(2, 2, {1, 2, 2, 4});
  CHECK_THROWS_AS(solve(singular, Vector{1, 1}), SingularityError);
  const Matrix nearly(2, 2, {1, 1, 1, 1 + 1e-14});
  try {
    solve(nearly, Vector{1, 1});
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.condition_estimate() >= kMaxCondition);
  }
}

TEST_CASE("inverse times matrix is identity") {
  Rng rng(2);
  Matrix m = random_matrix(8, 8, rng);
  for (std::size_t i = 0; i < 8; ++i) m(i, i) += 5.0;
  CHECK((inverse(m) * m - Matrix::identity(8)).max_abs() < 1e-12);
}

TEST_CASE("pinv_apply") {
  SUBCASE("diagonal with a zero eigenvalue") {
    const auto e = sym_eig(Matrix::diagonal(Vector{2, 0}));
    const Vector x = pinv_apply(e, Vector{4, 5});
    CHECK(x[0] == doctest::Approx(2.0));
    CHECK(x[1] == 0.0);
  }
  SUBCASE("rhs in the nullspace maps to zero") {
    const Matrix m(2, 2, {1, 1, 1, 1});
    const Vector x = pinv_apply(sym_eig(m), Vector{1, -1});
    CHECK(norm_inf(x) < 1e-14);
  }
  SUBCASE("agrees with solve when invertible") {
    Rng rng(9);
    for (int rep = 0; rep < 100; ++rep) {
      Matrix m = random_symmetric(10, rng);
      for (std::size_t i = 0; i < 10; ++i) m(i, i) += (rep % 2 == 0 ? 6.0 : -6.0);
      const Vector rhs = random_matrix(10, 1, rng).values();
      const Vector a = pinv_apply(sym_eig(m), rhs);
      const Vector b = solve(m, rhs);
      double diff = 0.0;
      for (std::size_t i = 0; i < 10; ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
      CHECK(diff <= 1e-8 * norm_inf(b));
    }
  }
}

TEST_CASE("mvn_sample") {
  SUBCASE("identity precision gives unit covariance") {
    const auto e = sym_eig(Matrix::identity(5));
    Rng rng(1);
    std::vector<Vector> s;
    for (int i = 0; i < 100000; ++i) s.push_back(mvn_sample(e, rng));
    CHECK(rel_frobenius(empirical_cov(s), Matrix::identity(5)) < 0.05);
  }
  SUBCASE("precision with eigenvalues in [0.1, 2]") {
    Rng rng(3);
    const Matrix q = sym_eig(random_symmetric(10, rng)).vectors;
    Vector d(10);
    for (std::size_t i = 0; i < 10; ++i) d[i] = 0.1 + 1.9 * static_cast<double>(i) / 9.0;
    const Matrix precision = q * Matrix::diagonal(d) * q.transposed();
    const auto e = sym_eig(0.5 * (precision + precision.transposed()));
    Vector inv_d(10);
    for (std::size_t i = 0; i < 10; ++i) inv_d[i] = 1.0 / d[i];
    const Matrix cov = q * Matrix::diagonal(inv_d) * q.transposed();
    std::vector<Vector> s;
    Vector mean(10, 0.0);
    for (int i = 0; i < 100000; ++i) {
      s.push_back(mvn_sample(e, rng));
      for (std::size_t j = 0; j < 10; ++j) mean[j] += s.back()[j] / 100000.0;
    }
    CHECK(norm_inf(mean) <= 0.05);
    CHECK(rel_frobenius(empirical_cov(s), cov) < 0.05);
  }
  SUBCASE("zero eigenvalue gets zero variance") {
    const Matrix l(2, 2, {1, -1, -1, 1});
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
      const Vector x = mvn_sample(sym_eig(l), rng);
      CHECK(std::abs(x[0] + x[1]) < 1e-8 * (1 + std::abs(x[0])));
    }
  }
  SUBCASE("negative eigenvalue is rejected") {
    Rng rng(5);
    CHECK_THROWS_AS(mvn_sample(sym_eig(Matrix::diagonal(Vector{1, -1e-6})), rng), ArgumentError);
  }
  SUBCASE("same seed, same draws") {
    const auto e = sym_eig(Matrix(2, 2, {2, 0.5, 0.5, 1}));
    Rng a(77), b(77);
    for (int i = 0; i < 10; ++i) CHECK(mvn_sample(e, a) == mvn_sample(e, b));
  }
}

TEST_CASE("spectral_radius") {
  CHECK(spectral_radius(sym_eig(Matrix::identity(3))) == 1.0);
  CHECK(spectral_radius(sym_eig(Matrix::diagonal(Vector{0.5, -2.0}))) == 2.0);
}
