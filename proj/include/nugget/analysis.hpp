#pragma once

#include <cstddef>
#include <vector>

#include "nugget/games.hpp"
#include "nugget/graphs.hpp"
#include "nugget/parallel.hpp"

namespace nugget {

/// Spectral gain of a game's equilibrium covariance at each eigenvalue.
/// Poles are stored as +infinity.
struct FilterResponse {
  Vector eigenvalues;
  Vector response;

  bool is_pole(std::size_t i) const;
};

inline constexpr double kZeroEigenvalue = 1e-10;

/// LQ: 1/((1 - beta l)^2 (1 - alpha l)), LIG: 1/(l^2 (1 - alpha l)),
/// BH: indicator of the largest eigenvalue.
FilterResponse filter_response(const GameSpec& game, std::span<const double> eigenvalues);

/// |U^T x| / ||x|| in descending-eigenvalue order.
Vector gft_coefficients(const NormalizedGraph& ng, std::span<const double> x);

/// Squared GFT mass on the middle half of the eigenvalue indices, [n/4, 3n/4).
double mid_spectrum_mass(std::span<const double> coefficients);

/// min{|l| : |l| > 1e-10} over the spectrum of the normalised adjacency.
double min_abs_nonzero_eig(const NormalizedGraph& ng);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single value
  std::size_t count = 0;

  double sem() const;
};

MeanStd mean_std(std::span<const double> values);

/// Draws `trials` graphs (trial t uses rng.split(t)) and summarises the
/// smallest non-zero absolute eigenvalue of each.
MeanStd min_abs_nonzero_eig_stats(const GraphSpec& graph, std::size_t trials, const Rng& rng,
                                  Exec exec = Exec::Parallel);

/// Per-eigen-index summary of GFT coefficient magnitudes of one equilibrium
/// action per graph, plus the per-graph mid-spectrum mass.
struct GftProfile {
  std::vector<MeanStd> per_index;
  MeanStd mid_mass;
};

GftProfile gft_profile(const GraphSpec& graph, const GameSpec& game, std::size_t graphs, const Rng& rng,
                       Exec exec = Exec::Parallel);

}  // namespace nugget
