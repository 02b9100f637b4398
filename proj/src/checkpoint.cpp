#include "nugget/checkpoint.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "nugget/errors.hpp"
#include "nugget/rng.hpp"

namespace nugget {

using nlohmann::json;

namespace {

json config_to_json(const ModelConfig& c) {
  return {{"features", c.features},
          {"key_features", c.key_features},
          {"heads", c.heads},
          {"phi_hidden", c.phi_hidden},
          {"psi_hidden", c.psi_hidden}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.features = j.at("features").get<std::size_t>();
  c.key_features = j.at("key_features").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.phi_hidden = j.at("phi_hidden").get<std::size_t>();
  c.psi_hidden = j.at("psi_hidden").get<std::size_t>();
  return c;
}

}  // namespace

void save_checkpoint(const NuggetParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  json layout = json::array();
  for (const auto& a : params.arrays) layout.push_back({{"name", a.name}, {"shape", a.shape}});
  const json header{{"format", "nugget-checkpoint"},
                    {"version", kCheckpointFormatVersion},
                    {"config", config_to_json(params.config)},
                    {"arrays", layout}};
  out << header.dump() << '\n';
  for (const auto& a : params.arrays) {
    out << json{{"name", a.name}, {"shape", a.shape}, {"values", a.values}}.dump() << '\n';
  }
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

NuggetParams load_checkpoint(const std::filesystem::path& path) {
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
  if (!header.is_object() || header.value("format", "") != "nugget-checkpoint") {
    throw MalformedRecordError("header does not describe a nugget checkpoint", 1);
  }
  const int version = header.value("version", -1);
  if (version != kCheckpointFormatVersion) {
    throw VersionError("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kCheckpointFormatVersion) + ")");
  }
  ModelConfig config;
  try {
    config = config_from_json(header.at("config"));
  } catch (const json::exception& e) {
    throw MalformedRecordError(std::string("bad header: ") + e.what(), 1);
  }
  Rng unused(0);
  NuggetParams params;
  try {
    params = init_params(config, unused);
  } catch (const ArgumentError& e) {
    throw MalformedRecordError(std::string("bad model config: ") + e.what(), 1);
  }

  std::size_t line_no = 1;
  for (auto& expected : params.arrays) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw MalformedRecordError("truncated checkpoint: missing array '" + expected.name + "'", line_no);
    }
    try {
      const json record = json::parse(line);
      const auto name = record.at("name").get<std::string>();
      const auto shape = record.at("shape").get<ad::Shape>();
      if (name != expected.name || shape != expected.shape) {
        throw MalformedRecordError("expected array '" + expected.name + "' of shape " + ad::to_string(expected.shape) +
                                       ", found '" + name + "' of shape " + ad::to_string(shape),
                                   line_no);
      }
      auto values = record.at("values").get<std::vector<double>>();
      if (values.size() != expected.values.size()) {
        throw MalformedRecordError("array '" + name + "' has " + std::to_string(values.size()) + " values, expected " +
                                       std::to_string(expected.values.size()),
                                   line_no);
      }
      expected.values = std::move(values);
    } catch (const json::exception& e) {
      throw MalformedRecordError(e.what(), line_no);
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty()) throw MalformedRecordError("unexpected trailing record", line_no);
  }
  return params;
}

}  // namespace nugget
