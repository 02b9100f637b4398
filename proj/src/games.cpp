#include "nugget/games.hpp"

#include <algorithm>
#include <cmath>

#include "nugget/errors.hpp"
#include "nugget/log.hpp"

namespace nugget {

std::string_view to_string(GameKind k) {
  switch (k) {
    case GameKind::LinearQuadratic: return "lq";
    case GameKind::LinearInfluence: return "lig";
    case GameKind::BarikHonorio: return "bh";
  }
  return "?";
}

GameKind parse_game_kind(std::string_view s) {
  if (s == "lq") return GameKind::LinearQuadratic;
  if (s == "lig") return GameKind::LinearInfluence;
  if (s == "bh") return GameKind::BarikHonorio;
  throw ConfigError("unknown game '" + std::string(s) + "' (expected lq, lig or bh)");
}

void GameSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("game: alpha must lie in [0, 1]");
  if (kind == GameKind::LinearQuadratic && !(std::abs(beta) < 1.0)) {
    throw ArgumentError("linear quadratic game: |beta| must be below 1");
  }
  if (kind == GameKind::BarikHonorio) {
    if (!(epsilon > 0.0)) throw ArgumentError("Barik-Honorio game: epsilon must be positive");
    if (!(noise_std >= 0.0)) throw ArgumentError("Barik-Honorio game: noise_std must be non-negative");
  }
}

EigenDecomposition benefit_precision(const NormalizedGraph& ng, double alpha) {
  return map_spectrum(ng.eig, [alpha](double lambda) { return 1.0 - alpha * lambda; });
}

Vector sample_benefits(const NormalizedGraph& ng, double alpha, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("sample_benefits: alpha must lie in [0, 1]");
  return mvn_sample(benefit_precision(ng, alpha), rng);
}

Vector equilibrium_lq(const NormalizedGraph& ng, double beta, std::span<const double> b) {
  if (!(std::abs(beta) < 1.0)) throw ArgumentError("equilibrium_lq: |beta| must be below 1");
  const std::size_t n = ng.n();
  Matrix m = Matrix::identity(n);
  for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] -= beta * ng.adjacency.values()[i];
  return solve(m, b);
}

Vector equilibrium_lig(const NormalizedGraph& ng, std::span<const double> b) { return pinv_apply(ng.eig, b); }

Vector top_eigenvector(const NormalizedGraph& ng) {
  if (ng.n() >= 2 && ng.eig.values[1] > 1.0 - 1e-10) {
    log::warn("top eigenvalue of the normalised adjacency is not simple; using the first eigenvector");
  }
  Vector u = ng.eig.eigenvector(0);
  std::size_t imax = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
  if (u[imax] < 0.0)
    for (double& v : u) v = -v;
  return u;
}

Vector equilibrium_bh_from_noise(const NormalizedGraph& ng, const GameSpec& spec, std::span<const double> noise) {
  if (spec.kind != GameKind::BarikHonorio) throw ArgumentError("equilibrium_bh: spec is not a Barik-Honorio game");
  spec.validate();
  Vector x = top_eigenvector(ng);
  const Vector an = ng.adjacency * noise;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(noise[i] - an[i]));
  // leave room for the eigenvector's own rounding residual so the bound holds after summation
  const double budget = spec.epsilon * (1.0 - 1e-12) - bh_residual(ng, x);
  const double scale = worst > 0.0 ? std::clamp(budget / worst, 0.0, 1.0) : 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += scale * noise[i];
  return x;
}

Vector equilibrium_bh(const NormalizedGraph& ng, const GameSpec& spec, Rng& rng) {
  Vector noise(ng.n());
  for (double& e : noise) e = spec.noise_std * rng.normal();
  return equilibrium_bh_from_noise(ng, spec, noise);
}

Vector equilibrium_from_inputs(const GameSpec& spec, const NormalizedGraph& ng, std::span<const double> benefits,
                               std::span<const double> noise) {
  switch (spec.kind) {
    case GameKind::LinearQuadratic: return equilibrium_lq(ng, spec.beta, benefits);
    case GameKind::LinearInfluence: return equilibrium_lig(ng, benefits);
    case GameKind::BarikHonorio: return equilibrium_bh_from_noise(ng, spec, noise);
  }
  throw ArgumentError("unknown game kind");
}

Vector generic_equilibrium(const GameSpec& spec, const NormalizedGraph& ng, Rng& rng) {
  spec.validate();
  if (spec.kind == GameKind::BarikHonorio) return equilibrium_bh(ng, spec, rng);
  const Vector b = sample_benefits(ng, spec.alpha, rng);
  return equilibrium_from_inputs(spec, ng, b, {});
}

Matrix analytic_covariance(const GameSpec& spec, const NormalizedGraph& ng) {
  spec.validate();
  if (spec.kind == GameKind::BarikHonorio) {
    throw ArgumentError("analytic_covariance: only defined for benefit-driven games");
  }
  const std::size_t n = ng.n();
  const EigenDecomposition precision = benefit_precision(ng, spec.alpha);
  const double mu_tol = default_pinv_tol(precision);
  const double lambda_tol = default_pinv_tol(ng.eig);
  Vector gain(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = ng.eig.values[k];
    const double mu = 1.0 - spec.alpha * lambda;
    const double var_b = mu > mu_tol ? 1.0 / mu : 0.0;
    double h;
    if (spec.kind == GameKind::LinearQuadratic) {
      h = 1.0 / (1.0 - spec.beta * lambda);
    } else {
      h = std::abs(lambda) > lambda_tol ? 1.0 / lambda : 0.0;
    }
    gain[k] = h * h * var_b;
  }
  return EigenDecomposition{gain, ng.eig.vectors}.reconstruct();
}

double lq_residual(const NormalizedGraph& ng, double beta, std::span<const double> b, std::span<const double> x) {
  const Vector ax = ng.adjacency * x;
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(x[i] - b[i] - beta * ax[i]));
  return r;
}

double lig_residual(const NormalizedGraph& ng, std::span<const double> b, std::span<const double> x) {
  const std::size_t n = ng.n();
  const double tol = default_pinv_tol(ng.eig);
  Vector projected(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(ng.eig.values[k]) <= tol) continue;
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += ng.eig.vectors(i, k) * b[i];
    for (std::size_t i = 0; i < n; ++i) projected[i] += c * ng.eig.vectors(i, k);
  }
  const Vector ax = ng.adjacency * x;
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(ax[i] - projected[i]));
  return r;
}

double bh_residual(const NormalizedGraph& ng, std::span<const double> x) {
  const Vector ax = ng.adjacency * x;
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(x[i] - ax[i]));
  return r;
}

}  // namespace nugget
