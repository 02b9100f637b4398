#pragma once

#include <string>
#include <string_view>

#include "nugget/graphs.hpp"
#include "nugget/linalg.hpp"
#include "nugget/rng.hpp"

namespace nugget {

enum class GameKind { LinearQuadratic, LinearInfluence, BarikHonorio };

std::string_view to_string(GameKind k);
GameKind parse_game_kind(std::string_view s);

/// Utility family plus its scalar parameters.
///
/// `beta` is used by linear quadratic games (|beta| < 1; since the normalised
/// adjacency has spectral radius 1, beta equals the target rho(beta A)).
/// `alpha` controls benefit smoothness for the two benefit-driven games.
/// `noise_std` and `epsilon` define the Barik-Honorio epsilon-PSNE draw.
struct GameSpec {
  GameKind kind = GameKind::LinearQuadratic;
  double beta = 0.0;
  double alpha = 0.0;
  double noise_std = 1.0;
  double epsilon = 0.2;

  static GameSpec linear_quadratic(double beta, double alpha) { return {GameKind::LinearQuadratic, beta, alpha}; }
  static GameSpec linear_influence(double alpha) { return {GameKind::LinearInfluence, 0.0, alpha}; }
  static GameSpec barik_honorio(double noise_std = 1.0, double epsilon = 0.2) {
    return {GameKind::BarikHonorio, 0.0, 0.0, noise_std, epsilon};
  }

  bool uses_benefits() const noexcept { return kind != GameKind::BarikHonorio; }
  // Throws ArgumentError when a parameter is out of range.
  void validate() const;
};

/// b ~ N(0, L_alpha^+) with L_alpha = (1 - alpha) I + alpha L = I - alpha A.
Vector sample_benefits(const NormalizedGraph& ng, double alpha, Rng& rng);

/// Eigendecomposition of L_alpha derived from the cached spectrum of A.
EigenDecomposition benefit_precision(const NormalizedGraph& ng, double alpha);

/// x = (I - beta A)^-1 b.
Vector equilibrium_lq(const NormalizedGraph& ng, double beta, std::span<const double> b);

/// x = A^+ b.
Vector equilibrium_lig(const NormalizedGraph& ng, std::span<const double> b);

/// Unit top eigenvector of A, signed so its largest-magnitude entry is positive.
Vector top_eigenvector(const NormalizedGraph& ng);

/// x = u1 + s e with s = min(1, epsilon / max_i |e_i - (A e)_i|), which makes
/// max_i |x_i - (A x)_i| <= epsilon.
Vector equilibrium_bh_from_noise(const NormalizedGraph& ng, const GameSpec& spec, std::span<const double> noise);
Vector equilibrium_bh(const NormalizedGraph& ng, const GameSpec& spec, Rng& rng);

/// Equilibrium given already-drawn benefits (ignored for Barik-Honorio, where
/// `noise` is used instead).
Vector equilibrium_from_inputs(const GameSpec& spec, const NormalizedGraph& ng, std::span<const double> benefits,
                               std::span<const double> noise);

/// Draws benefits (or BH noise) and returns the equilibrium action vector.
Vector generic_equilibrium(const GameSpec& spec, const NormalizedGraph& ng, Rng& rng);

/// Closed-form covariance of the equilibrium actions:
///   LQ:  U [(I - beta Lambda)^2 (I - alpha Lambda)]^+ U^T
///   LIG: U [Lambda^2 (I - alpha Lambda)]^+ U^T
/// Pseudo-inverses use the same thresholds as the sampling path.
/// Barik-Honorio has no benefit-driven covariance: ArgumentError.
Matrix analytic_covariance(const GameSpec& spec, const NormalizedGraph& ng);

// Best-response residuals used by tests and the acceptance suite.
double lq_residual(const NormalizedGraph& ng, double beta, std::span<const double> b, std::span<const double> x);
double lig_residual(const NormalizedGraph& ng, std::span<const double> b, std::span<const double> x);
double bh_residual(const NormalizedGraph& ng, std::span<const double> x);

}  // namespace nugget
