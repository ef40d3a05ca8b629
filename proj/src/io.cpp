#include "poalab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace poalab {

namespace {

template <typename T>
T field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

// JSON cannot carry infinities; they are written as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

BasisClass basis_class_from_json(const Json& doc) {
  BasisClass cls;
  cls.n = field<int>(doc, "n");
  cls.side = side_from_string(field<std::string>(doc, "side"));
  const auto pairs = field<Json>(doc, "pairs");
  if (!pairs.is_array() || pairs.empty()) {
    throw ValidationError("'pairs' must be a nonempty array");
  }
  for (const auto& p : pairs) {
    cls.pairs.emplace_back(cls.n, field<std::vector<double>>(p, "c"),
                           field<std::vector<double>>(p, "f"),
                           p.contains("label") ? field<std::string>(p, "label")
                                               : "pair" + std::to_string(cls.pairs.size()),
                           cls.side);
  }
  return cls;
}

Json basis_class_to_json(const BasisClass& cls) {
  Json doc;
  doc["n"] = cls.n;
  doc["side"] = std::string(to_string(cls.side));
  doc["pairs"] = Json::array();
  for (const auto& p : cls.pairs) {
    doc["pairs"].push_back(
        {{"label", p.label()},
         {"c", std::vector<double>(p.c_values().begin(), p.c_values().end())},
         {"f", std::vector<double>(p.f_values().begin(), p.f_values().end())}});
  }
  return doc;
}

GameDocument game_from_json(const Json& doc) {
  GameDocument out;
  auto& game = out.game;
  game.n_users = field<int>(doc, "n");
  game.side = side_from_string(field<std::string>(doc, "side"));
  for (const auto& r : field<Json>(doc, "resources")) {
    game.resources.push_back(
        {field<std::vector<double>>(r, "c"), field<std::vector<double>>(r, "f")});
  }
  game.actions = field<std::vector<std::vector<Action>>>(doc, "actions");
  if (doc.contains("meta")) out.meta = doc.at("meta");
  validate_game(game);
  return out;
}

Json game_to_json(const GameInstance& game, const Json& meta) {
  Json doc;
  doc["n"] = game.n_users;
  doc["side"] = std::string(to_string(game.side));
  doc["resources"] = Json::array();
  for (const auto& r : game.resources) {
    doc["resources"].push_back({{"c", r.c}, {"f", r.f}});
  }
  doc["actions"] = game.actions;
  if (!meta.empty()) doc["meta"] = meta;
  return doc;
}

Json report_to_json(const PoaReport& report) {
  Json doc;
  doc["side"] = std::string(to_string(report.side));
  doc["poa"] = number(report.poa);
  doc["rho_star"] = number(report.rho_star);
  doc["nu_star"] = number(report.nu_star);
  doc["bounded"] = report.bounded;
  doc["nu_ceiling"] = number(report.nu_ceiling);
  doc["active"] = Json::array();
  for (const auto& row : report.active) {
    doc["active"].push_back({{"basis", row.basis},
                             {"x", row.triplet.x},
                             {"y", row.triplet.y},
                             {"z", row.triplet.z},
                             {"ceiling", row.ceiling}});
  }
  return doc;
}

Json rule_to_json(const OptimalRule& rule) {
  Json doc;
  doc["label"] = rule.label;
  doc["f_opt"] = rule.f_opt;
  doc["poa"] = number(rule.poa);
  return doc;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

}  // namespace poalab
