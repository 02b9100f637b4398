#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "nugget/games.hpp"
#include "nugget/graphs.hpp"
#include "nugget/linalg.hpp"
#include "nugget/parallel.hpp"

namespace nugget {

enum class ActionNorm { None, MaxAbs, UnitL2 };
enum class Split { Train, Val, Test };

std::string_view to_string(ActionNorm m);
ActionNorm parse_action_norm(std::string_view s);
std::string_view to_string(Split s);
Split parse_split(std::string_view s);

/// Actions of n players over k games (columns) and the binary ground truth.
struct GameSample {
  Matrix actions;    // n x k
  Matrix adjacency;  // n x n, 0/1, symmetric, zero diagonal

  std::size_t n() const noexcept { return actions.rows(); }
  std::size_t k() const noexcept { return actions.cols(); }
  friend bool operator==(const GameSample&, const GameSample&) = default;
};

struct GenerationConfig {
  GraphSpec graph;
  GameSpec game;
  std::size_t games = 50;  // K
  ActionNorm normalization = ActionNorm::MaxAbs;
  double noise_std = 0.0;
  std::size_t train = 850;
  std::size_t val = 50;
  std::size_t test = 100;
  std::uint64_t seed = 0;

  std::size_t total() const noexcept { return train + val + test; }
  void validate() const;
};

inline constexpr int kDatasetFormatVersion = 1;

struct Dataset {
  GenerationConfig meta;
  std::vector<GameSample> samples;
  std::vector<Split> splits;  // one tag per sample

  std::vector<std::size_t> indices(Split s) const;
  std::size_t count(Split s) const { return indices(s).size(); }
  friend bool operator==(const Dataset& a, const Dataset& b);
};

/// Divides each column by its max |entry| (MaxAbs) or its l2 norm (UnitL2).
/// A zero column under a scaling mode raises DataError naming the column.
Matrix normalize_actions(const Matrix& x, ActionNorm mode);

/// x + eps with eps_ij ~ N(0, std^2), drawn row-major.
Matrix add_observation_noise(const Matrix& x, double std, Rng& rng);

/// One record: graph, normalisation, k equilibria as columns, action
/// normalisation, then observation noise. Uses only `rng`.
GameSample generate_sample(const GenerationConfig& cfg, Rng& rng);

/// Sample s is drawn from Rng(cfg.seed).split(s); splits are laid out as
/// train, val, test in order.
Dataset generate_dataset(const GenerationConfig& cfg, Exec exec = Exec::Parallel);

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace nugget
