#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "poalab/basis.hpp"
#include "poalab/characterize.hpp"
#include "poalab/game.hpp"
#include "poalab/optimize.hpp"

namespace poalab {

using Json = nlohmann::ordered_json;

// {"n", "side", "pairs": [{"label", "c", "f"}]}
BasisClass basis_class_from_json(const Json& doc);
Json basis_class_to_json(const BasisClass& cls);

// {"n", "side", "resources": [{"c", "f"}], "actions": [[[r, ...], ...]]}
// plus an optional free-form "meta" object carried through unchanged.
struct GameDocument {
  GameInstance game;
  Json meta = Json::object();
};
GameDocument game_from_json(const Json& doc);
Json game_to_json(const GameInstance& game, const Json& meta = Json::object());

Json report_to_json(const PoaReport& report);
Json rule_to_json(const OptimalRule& rule);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace poalab
