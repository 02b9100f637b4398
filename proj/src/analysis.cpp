#include "nugget/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nugget/errors.hpp"

namespace nugget {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

bool FilterResponse::is_pole(std::size_t i) const { return std::isinf(response.at(i)); }

FilterResponse filter_response(const GameSpec& game, std::span<const double> eigenvalues) {
  FilterResponse out{Vector(eigenvalues.begin(), eigenvalues.end()), Vector(eigenvalues.size())};
  if (eigenvalues.empty()) return out;
  const std::size_t top = static_cast<std::size_t>(
      std::max_element(eigenvalues.begin(), eigenvalues.end()) - eigenvalues.begin());
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues[i];
    switch (game.kind) {
      case GameKind::LinearQuadratic: {
        const double f = 1.0 - game.beta * l;
        const double s = 1.0 - game.alpha * l;
        const bool pole = std::abs(f) <= kZeroEigenvalue || std::abs(s) <= kZeroEigenvalue;
        out.response[i] = pole ? kInf : 1.0 / (f * f * s);
        break;
      }
      case GameKind::LinearInfluence: {
        const bool pole = std::abs(l) <= kZeroEigenvalue || std::abs(1.0 - game.alpha * l) <= kZeroEigenvalue;
        out.response[i] = pole ? kInf : 1.0 / (l * l * (1.0 - game.alpha * l));
        break;
      }
      case GameKind::BarikHonorio:
        out.response[i] = i == top ? 1.0 : 0.0;
        break;
    }
  }
  return out;
}

Vector gft_coefficients(const NormalizedGraph& ng, std::span<const double> x) {
  if (x.size() != ng.n()) throw ArgumentError("gft_coefficients: signal length differs from node count");
  const double norm = norm2(x);
  if (norm == 0.0) throw ArgumentError("gft_coefficients: zero signal");
  const std::size_t n = ng.n();
  Vector c(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += ng.eig.vectors(i, k) * x[i];
    c[k] = std::abs(s / norm);
  }
  return c;
}

double mid_spectrum_mass(std::span<const double> coefficients) {
  const std::size_t n = coefficients.size();
  double mass = 0.0;
  for (std::size_t k = n / 4; k < (3 * n) / 4; ++k) mass += coefficients[k] * coefficients[k];
  return mass;
}

double min_abs_nonzero_eig(const NormalizedGraph& ng) {
  double best = kInf;
  for (double l : ng.eig.values)
    if (std::abs(l) > kZeroEigenvalue) best = std::min(best, std::abs(l));
  return best;
}

double MeanStd::sem() const { return count > 0 ? std / std::sqrt(static_cast<double>(count)) : 0.0; }

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  out.count = values.size();
  if (values.empty()) throw ArgumentError("mean_std: no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    out.mean = values.front();
    return out;
  }
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

MeanStd min_abs_nonzero_eig_stats(const GraphSpec& graph, std::size_t trials, const Rng& rng, Exec exec) {
  if (trials < 1) throw ArgumentError("min_abs_nonzero_eig_stats: need at least one trial");
  Vector values(trials);
  for_each_index(exec, trials, [&](std::size_t t) {
    Rng local = rng.split(t);
    values[t] = min_abs_nonzero_eig(normalize(generate_graph(graph, local)));
  });
  return mean_std(values);
}

GftProfile gft_profile(const GraphSpec& graph, const GameSpec& game, std::size_t graphs, const Rng& rng,
                       Exec exec) {
  if (graphs < 1) throw ArgumentError("gft_profile: need at least one graph");
  std::vector<Vector> coeffs(graphs);
  for_each_index(exec, graphs, [&](std::size_t t) {
    Rng local = rng.split(t);
    const NormalizedGraph ng = normalize(generate_graph(graph, local));
    coeffs[t] = gft_coefficients(ng, generic_equilibrium(game, ng, local));
  });
  GftProfile out;
  const std::size_t n = graph.n;
  Vector column(graphs);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < graphs; ++t) column[t] = coeffs[t][k];
    out.per_index.push_back(mean_std(column));
  }
  for (std::size_t t = 0; t < graphs; ++t) column[t] = mid_spectrum_mass(coeffs[t]);
  out.mid_mass = mean_std(column);
  return out;
}

}  // namespace nugget
