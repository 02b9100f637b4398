#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nugget/errors.hpp"
#include "nugget/model.hpp"

using namespace nugget;
using namespace nugget::testing;

namespace {

NuggetParams random_params(Rng& rng, ModelConfig cfg = {}) {
  NuggetParams p = init_params(cfg, rng);
  // non-zero biases exercise every path
  for (auto& a : p.arrays)
    if (a.name.find(".b") != std::string::npos)
      for (double& v : a.values) v = 0.1 * rng.normal();
  return p;
}

}  // namespace

TEST_CASE("initialization") {
  Rng a(5), b(5);
  const NuggetParams p = init_params({}, a);
  CHECK(p == init_params({}, b));
  CHECK(p.get("expand.w").values.size() == 10);
  CHECK(p.get("attn.query.9").shape == ad::Shape{10, 10});
  CHECK(p.get("phi.w1").shape == ad::Shape{110, 100});
  CHECK(p.get("phi.w2").shape == ad::Shape{100, 10});
  CHECK(p.get("psi.w1").shape == ad::Shape{10, 100});
  CHECK(p.get("psi.w2").shape == ad::Shape{100, 1});
  CHECK(p.all_finite());
  const double limit = std::sqrt(6.0 / 210.0);
  for (double v : p.get("phi.w1").values) CHECK(std::abs(v) <= limit);
  for (double v : p.get("phi.b1").values) CHECK(v == 0.0);
  CHECK_THROWS_AS(p.get("nope"), ArgumentError);
}

TEST_CASE("encoder output and hand-computed attention") {
  Rng rng(1);
  ModelConfig cfg;
  cfg.heads = 2;
  const NuggetParams p = random_params(rng, cfg);
  const Matrix x(2, 1, {0.7, -0.4});
  const Encoding z = encode(p, x);
  CHECK(z.values.size() == 2 * 1 * 10);

  const auto& w = p.get("expand.w").values;
  const auto& bias = p.get("expand.b").values;
  std::vector<Vector> y(2, Vector(10));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t f = 0; f < 10; ++f) y[i][f] = std::max(0.0, x(i, 0) * w[f] + bias[f]);
  for (std::size_t h = 0; h < 2; ++h) {
    const auto& q = p.get("attn.query." + std::to_string(h)).values;
    const auto& k = p.get("attn.key." + std::to_string(h)).values;
    auto project = [](const Vector& v, const std::vector<double>& m) {
      Vector out(10, 0.0);
      for (std::size_t a = 0; a < 10; ++a)
        for (std::size_t c = 0; c < 10; ++c) out[c] += v[a] * m[a * 10 + c];
      return out;
    };
    for (std::size_t i = 0; i < 2; ++i) {
      const double s0 = dot(project(y[i], q), project(y[0], k));
      const double s1 = dot(project(y[i], q), project(y[1], k));
      const double a0 = 1.0 / (1.0 + std::exp(s1 - s0));
      CHECK(z.attention[h](i, 0) == doctest::Approx(a0).epsilon(1e-12));
      CHECK(z.attention[h](i, 1) == doctest::Approx(1.0 - a0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(encode(p, Matrix(2, 1, {1.0, NAN})), DataError);
  CHECK_THROWS_AS(encode(p, Matrix(1, 3, {1.0, 2.0, 3.0})), ArgumentError);
}

TEST_CASE("attention ignores the order of games") {
  Rng rng(2);
  const NuggetParams p = random_params(rng);
  const Matrix x = random_matrix(6, 4, rng);
  const auto perm = random_permutation(4, rng);
  const Encoding a = encode(p, x), b = encode(p, permute_cols(x, perm));
  for (std::size_t h = 0; h < a.attention.size(); ++h) CHECK(max_abs_diff(a.attention[h], b.attention[h]) < 1e-12);
}

TEST_CASE("decoder") {
  Rng rng(3);
  const NuggetParams p = random_params(rng);
  SUBCASE("exactly symmetric") {
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix logits = decode(p, encode(p, random_matrix(9, 5, rng)));
      CHECK(logits == logits.transposed());
    }
  }
  SUBCASE("zero embedding gives a constant matrix") {
    const Encoding z{5, 3, 10, std::vector<double>(150, 0.0), {}};
    const Matrix logits = decode(p, z);
    for (double v : logits.values()) CHECK(v == logits(0, 0));
  }
}

TEST_CASE("node equivariance and game invariance") {
  Rng rng(4);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = rep % 2 == 0 ? 5 : 20;
    const std::size_t k = rep % 4 < 2 ? 1 : 7;
    const NuggetParams p = random_params(rng);
    const Matrix x = random_matrix(n, k, rng);
    const auto p1 = random_permutation(n, rng);
    const auto p2 = random_permutation(k, rng);
    const Matrix g = forward(p, x);
    const Matrix gp = forward(p, permute_cols(permute_rows(x, p1), p2));
    worst = std::max(worst, max_abs_diff(gp, permute_sym(g, p1)));
    CHECK(g == g.transposed());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("forward works for different graph sizes with one parameter set") {
  Rng rng(5);
  const NuggetParams p = random_params(rng);
  for (std::size_t n : {20, 35}) {
    const Matrix probs = forward(p, random_matrix(n, 4, rng));
    CHECK(probs.rows() == n);
    for (double v : probs.values()) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("full-model gradient matches central differences") {
  Rng rng(6);
  for (int rep = 0; rep < 3; ++rep) {
    NuggetParams p = random_params(rng);
    GameSample s;
    s.actions = random_matrix(5, 3, rng);
    s.adjacency = path(5).binary_adjacency();
    const auto r = model_grad_check(p, s, rng, 300);
    CHECK(r.coordinates == 300);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("games only mix through attention scores") {
  Rng rng(7);
  const NuggetParams p = random_params(rng);
  const Matrix x = random_matrix(6, 2, rng);
  Matrix x0 = x;
  for (std::size_t i = 0; i < 6; ++i) x0(i, 1) = 0.0;

  ad::Tape t1;
  NuggetTape m1(t1, p, false);
  const auto z = m1.encode(x).value();
  const std::vector<Matrix> frozen = m1.attention();

  ad::Tape t2;
  NuggetTape m2(t2, p, false);
  const auto z_frozen = m2.encode(x0, &frozen).value();
  ad::Tape t3;
  NuggetTape m3(t3, p, false);
  const auto z_free = m3.encode(x0).value();

  double frozen_diff = 0.0, free_diff = 0.0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t f = 0; f < 10; ++f) {
      const std::size_t idx = (i * 2 + 0) * 10 + f;
      frozen_diff = std::max(frozen_diff, std::abs(z[idx] - z_frozen[idx]));
      free_diff = std::max(free_diff, std::abs(z[idx] - z_free[idx]));
    }
  CHECK(frozen_diff == 0.0);
  CHECK(free_diff > 0.0);
}

TEST_CASE("predict") {
  Rng rng(8);
  const NuggetParams p = random_params(rng);
  const Matrix x = random_matrix(8, 3, rng);
  for (double threshold : {0.0, 0.5, 1.0}) {
    const Prediction pr = predict(p, x, threshold);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(pr.adjacency(i, i) == 0.0);
      for (std::size_t j = 0; j < 8; ++j) {
        CHECK(pr.adjacency(i, j) == pr.adjacency(j, i));
        if (i != j) CHECK(pr.adjacency(i, j) == (pr.probabilities(i, j) > threshold ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("loss and gradient agree with the value-only path") {
  Rng rng(9);
  const NuggetParams p = random_params(rng);
  GameSample s{random_matrix(7, 4, rng), path(7).binary_adjacency()};
  const LossGrad lg = sample_loss_grad(p, s);
  CHECK(lg.loss == sample_loss(p, s));
  CHECK(lg.grads.size() == p.arrays.size());
  for (std::size_t i = 0; i < p.arrays.size(); ++i) CHECK(lg.grads[i].size() == p.arrays[i].values.size());
}
