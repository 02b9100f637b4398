#include "nugget/dataset.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "nugget/errors.hpp"
#include "nugget/json_io.hpp"

namespace nugget {

using nlohmann::json;

std::string_view to_string(ActionNorm m) {
  switch (m) {
    case ActionNorm::None: return "none";
    case ActionNorm::MaxAbs: return "maxabs";
    case ActionNorm::UnitL2: return "unit_l2";
  }
  return "?";
}

ActionNorm parse_action_norm(std::string_view s) {
  if (s == "none") return ActionNorm::None;
  if (s == "maxabs") return ActionNorm::MaxAbs;
  if (s == "unit_l2") return ActionNorm::UnitL2;
  throw ConfigError("unknown normalisation '" + std::string(s) + "' (expected none, maxabs or unit_l2)");
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw DataError("unknown split tag '" + std::string(s) + "'");
}

void GenerationConfig::validate() const {
  if (train < 1 || val < 1 || test < 1) throw ConfigError("every split needs at least one sample");
  if (games < 1) throw ConfigError("need at least one game per graph");
  if (!(noise_std >= 0.0)) throw ConfigError("noise std must be non-negative");
  try {
    game.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::size_t> Dataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == s) out.push_back(i);
  return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return to_json(a.meta) == to_json(b.meta) && a.samples == b.samples && a.splits == b.splits;
}

Matrix normalize_actions(const Matrix& x, ActionNorm mode) {
  if (mode == ActionNorm::None) return x;
  Matrix out = x;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double scale = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double v = x(r, c);
      scale = mode == ActionNorm::MaxAbs ? std::max(scale, std::abs(v)) : scale + v * v;
    }
    if (mode == ActionNorm::UnitL2) scale = std::sqrt(scale);
    if (scale == 0.0) throw DataError("normalize_actions: column " + std::to_string(c) + " is all zeros");
    for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) = x(r, c) / scale;
  }
  return out;
}

Matrix add_observation_noise(const Matrix& x, double std, Rng& rng) {
  if (!(std >= 0.0)) throw ArgumentError("add_observation_noise: std must be non-negative");
  Matrix out = x;
  if (std == 0.0) return out;
  for (double& v : out.values()) v += std * rng.normal();
  return out;
}

GameSample generate_sample(const GenerationConfig& cfg, Rng& rng) {
  const Graph g = generate_graph(cfg.graph, rng);
  const NormalizedGraph ng = normalize(g);
  Matrix actions(g.n(), cfg.games);
  for (std::size_t k = 0; k < cfg.games; ++k) {
    const Vector x = generic_equilibrium(cfg.game, ng, rng);
    for (std::size_t i = 0; i < g.n(); ++i) actions(i, k) = x[i];
  }
  actions = normalize_actions(actions, cfg.normalization);
  actions = add_observation_noise(actions, cfg.noise_std, rng);
  return GameSample{std::move(actions), g.binary_adjacency()};
}

Dataset generate_dataset(const GenerationConfig& cfg, Exec exec) {
  cfg.validate();
  Dataset ds;
  ds.meta = cfg;
  const std::size_t total = cfg.total();
  ds.samples.resize(total);
  ds.splits.resize(total);
  for (std::size_t s = 0; s < total; ++s) {
    ds.splits[s] = s < cfg.train ? Split::Train : (s < cfg.train + cfg.val ? Split::Val : Split::Test);
  }
  const Rng root(cfg.seed);
  for_each_index(exec, total, [&](std::size_t s) {
    Rng local = root.split(s);
    ds.samples[s] = generate_sample(cfg, local);
  });
  return ds;
}

json to_json(const GraphSpec& g) {
  return json{{"model", std::string(to_string(g.model))}, {"n", g.n}, {"p", g.p}, {"k", g.k}, {"m", g.m}};
}

json to_json(const GameSpec& g) {
  return json{{"kind", std::string(to_string(g.kind))},
              {"beta", g.beta},
              {"alpha", g.alpha},
              {"noise_std", g.noise_std},
              {"epsilon", g.epsilon}};
}

json to_json(const GenerationConfig& c) {
  return json{{"graph", to_json(c.graph)},
              {"game", to_json(c.game)},
              {"games", c.games},
              {"normalization", std::string(to_string(c.normalization))},
              {"noise_std", c.noise_std},
              {"splits", {c.train, c.val, c.test}},
              {"seed", c.seed}};
}

GraphSpec graph_spec_from_json(const json& j) {
  GraphSpec g;
  g.model = parse_graph_model(j.at("model").get<std::string>());
  g.n = j.at("n").get<std::size_t>();
  g.p = j.at("p").get<double>();
  g.k = j.at("k").get<std::size_t>();
  g.m = j.at("m").get<std::size_t>();
  return g;
}

GameSpec game_spec_from_json(const json& j) {
  GameSpec g;
  g.kind = parse_game_kind(j.at("kind").get<std::string>());
  g.beta = j.at("beta").get<double>();
  g.alpha = j.at("alpha").get<double>();
  g.noise_std = j.at("noise_std").get<double>();
  g.epsilon = j.at("epsilon").get<double>();
  return g;
}

GenerationConfig generation_config_from_json(const json& j) {
  GenerationConfig c;
  c.graph = graph_spec_from_json(j.at("graph"));
  c.game = game_spec_from_json(j.at("game"));
  c.games = j.at("games").get<std::size_t>();
  c.normalization = parse_action_norm(j.at("normalization").get<std::string>());
  c.noise_std = j.at("noise_std").get<double>();
  const auto& splits = j.at("splits");
  c.train = splits.at(0).get<std::size_t>();
  c.val = splits.at(1).get<std::size_t>();
  c.test = splits.at(2).get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

namespace {

std::string upper_triangle_bits(const Matrix& a) {
  std::string bits;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) bits.push_back(a(i, j) != 0.0 ? '1' : '0');
  return bits;
}

Matrix adjacency_from_bits(std::size_t n, const std::string& bits, std::size_t line) {
  if (bits.size() != n * (n - 1) / 2) throw MalformedRecordError("adjacency bit string has wrong length", line);
  Matrix a(n, n);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++pos) {
      const char c = bits[pos];
      if (c != '0' && c != '1') throw MalformedRecordError("adjacency bit string must contain only 0/1", line);
      a(i, j) = a(j, i) = c == '1' ? 1.0 : 0.0;
    }
  }
  return a;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const json header{{"format", "nugget-dataset"},
                    {"version", kDatasetFormatVersion},
                    {"count", ds.samples.size()},
                    {"meta", to_json(ds.meta)}};
  out << header.dump() << '\n';
  for (std::size_t s = 0; s < ds.samples.size(); ++s) {
    const GameSample& sample = ds.samples[s];
    const json record{{"split", std::string(to_string(ds.splits[s]))},
                      {"n", sample.n()},
                      {"k", sample.k()},
                      {"adjacency", upper_triangle_bits(sample.adjacency)},
                      {"actions", sample.actions.values()}};
    out << record.dump() << '\n';
  }
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw MalformedRecordError("missing header", 1);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw MalformedRecordError(std::string("header is not valid JSON: ") + e.what(), 1);
  }
  if (!header.is_object() || header.value("format", "") != "nugget-dataset") {
    throw MalformedRecordError("header does not describe a nugget dataset", 1);
  }
  const int version = header.value("version", -1);
  if (version != kDatasetFormatVersion) {
    throw VersionError("dataset format version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kDatasetFormatVersion) + ")");
  }
  Dataset ds;
  std::size_t expected = 0;
  try {
    ds.meta = generation_config_from_json(header.at("meta"));
    expected = header.at("count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw MalformedRecordError(std::string("bad header: ") + e.what(), 1);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      const auto n = rec.at("n").get<std::size_t>();
      const auto k = rec.at("k").get<std::size_t>();
      auto values = rec.at("actions").get<std::vector<double>>();
      if (n < 2 || values.size() != n * k) throw MalformedRecordError("actions array has wrong length", line_no);
      GameSample sample{Matrix(n, k, std::move(values)),
                        adjacency_from_bits(n, rec.at("adjacency").get<std::string>(), line_no)};
      ds.splits.push_back(parse_split(rec.at("split").get<std::string>()));
      ds.samples.push_back(std::move(sample));
    } catch (const json::exception& e) {
      throw MalformedRecordError(e.what(), line_no);
    } catch (const MalformedRecordError&) {
      throw;
    } catch (const DataError& e) {
      throw MalformedRecordError(e.what(), line_no);
    }
  }
  if (ds.samples.size() != expected) {
    throw MalformedRecordError("expected " + std::to_string(expected) + " records, found " +
                                   std::to_string(ds.samples.size()) + " (truncated file?)",
                               line_no + 1);
  }
  return ds;
}

}  // namespace nugget
