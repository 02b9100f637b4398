#pragma once

#include <json.hpp>

#include "nugget/dataset.hpp"

namespace nugget {

nlohmann::json to_json(const GraphSpec& g);
nlohmann::json to_json(const GameSpec& g);
nlohmann::json to_json(const GenerationConfig& c);

GraphSpec graph_spec_from_json(const nlohmann::json& j);
GameSpec game_spec_from_json(const nlohmann::json& j);
GenerationConfig generation_config_from_json(const nlohmann::json& j);

}  // namespace nugget
