#include "mwp/vocabulary.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "mwp/builtin_data.h"

namespace mwp {
namespace {

bool valid_token(const std::string& s) {
  if (s.empty() || s.front() == ' ' || s.back() == ' ') return false;
  return s.find_first_of(".?!{}\n\t") == std::string::npos;
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw VocabularyError(std::string("vocabulary: missing field ") + field);
  const auto& arr = j.at(field);
  if (!arr.is_array()) throw VocabularyError(std::string("vocabulary: ") + field + " must be an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw VocabularyError(std::string("vocabulary: ") + field + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> agents, std::vector<EntityInfo> entities,
                       std::vector<std::string> units, std::vector<std::string> attributes)
    : agents_(std::move(agents)),
      entities_(std::move(entities)),
      units_(std::move(units)),
      attributes_(std::move(attributes)) {
  index();
}

void Vocabulary::index() {
  if (agents_.empty()) throw VocabularyError("vocabulary: no agents");
  if (entities_.empty()) throw VocabularyError("vocabulary: no entities");

  std::set<std::string> seen;
  for (const auto& a : agents_) {
    if (!valid_token(a)) throw VocabularyError("vocabulary: invalid agent token '" + a + "'");
    if (!seen.insert(a).second) throw VocabularyError("vocabulary: duplicate agent " + a);
  }
  for (const auto& u : units_) {
    if (!valid_token(u)) throw VocabularyError("vocabulary: invalid unit token '" + u + "'");
    if (!plural_to_unit_.emplace(unit_plural(u), u).second)
      throw VocabularyError("vocabulary: duplicate unit " + u);
  }
  for (const auto& a : attributes_)
    if (!valid_token(a)) throw VocabularyError("vocabulary: invalid attribute token '" + a + "'");

  for (std::size_t i = 0; i < entities_.size(); ++i) {
    const EntityInfo& e = entities_[i];
    if (!valid_token(e.name)) throw VocabularyError("vocabulary: invalid entity token '" + e.name + "'");
    if (e.plural && !valid_token(*e.plural))
      throw VocabularyError("vocabulary: invalid plural for " + e.name);
    if (!entity_index_.emplace(e.name, i).second)
      throw VocabularyError("vocabulary: duplicate entity " + e.name);
    const std::string plural = e.plural.value_or(e.name + "s");
    if (!plural_to_entity_.emplace(plural, e.name).second)
      throw VocabularyError("vocabulary: plural '" + plural + "' is shared by two entities");
    for (const auto& u : e.units)
      if (!contains(units_, u)) throw VocabularyError("vocabulary: entity " + e.name + " uses unknown unit " + u);
    for (const auto& a : e.attributes)
      if (!contains(attributes_, a))
        throw VocabularyError("vocabulary: entity " + e.name + " uses unknown attribute " + a);
  }
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw VocabularyError("vocabulary: top level must be an object");
  std::vector<EntityInfo> entities;
  if (!j.contains("entities") || !j.at("entities").is_array())
    throw VocabularyError("vocabulary: entities must be an array");
  for (const auto& ej : j.at("entities")) {
    if (!ej.is_object() || !ej.contains("name") || !ej.at("name").is_string())
      throw VocabularyError("vocabulary: every entity needs a string name");
    EntityInfo e;
    e.name = ej.at("name").get<std::string>();
    if (ej.contains("plural")) {
      if (!ej.at("plural").is_string()) throw VocabularyError("vocabulary: plural must be a string");
      e.plural = ej.at("plural").get<std::string>();
    }
    if (ej.contains("units")) e.units = string_list(ej, "units");
    if (ej.contains("attributes")) e.attributes = string_list(ej, "attributes");
    entities.push_back(std::move(e));
  }
  return Vocabulary(string_list(j, "agents"), std::move(entities), string_list(j, "units"),
                    string_list(j, "attributes"));
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw VocabularyError("cannot open vocabulary file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw VocabularyError("vocabulary file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

const Vocabulary& Vocabulary::builtin() {
  static const Vocabulary v = from_json(nlohmann::json::parse(builtin::kVocabularyJson));
  return v;
}

nlohmann::ordered_json Vocabulary::to_json() const {
  nlohmann::ordered_json j;
  j["agents"] = agents_;
  nlohmann::ordered_json ents = nlohmann::ordered_json::array();
  for (const auto& e : entities_) {
    nlohmann::ordered_json ej;
    ej["name"] = e.name;
    if (e.plural) ej["plural"] = *e.plural;
    ej["units"] = e.units;
    ej["attributes"] = e.attributes;
    ents.push_back(std::move(ej));
  }
  j["entities"] = std::move(ents);
  j["units"] = units_;
  j["attributes"] = attributes_;
  return j;
}

const EntityInfo* Vocabulary::find_entity(const std::string& name) const {
  auto it = entity_index_.find(name);
  return it == entity_index_.end() ? nullptr : &entities_[it->second];
}

bool Vocabulary::is_agent(const std::string& name) const { return contains(agents_, name); }
bool Vocabulary::is_unit(const std::string& name) const { return contains(units_, name); }
bool Vocabulary::is_attribute(const std::string& name) const { return contains(attributes_, name); }

std::string Vocabulary::entity_plural(const std::string& name) const {
  const EntityInfo* e = find_entity(name);
  if (e != nullptr && e->plural) return *e->plural;
  return name + "s";
}

std::optional<std::string> Vocabulary::entity_from_plural(const std::string& plural) const {
  auto it = plural_to_entity_.find(plural);
  if (it == plural_to_entity_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Vocabulary::unit_from_plural(const std::string& plural) const {
  auto it = plural_to_unit_.find(plural);
  if (it == plural_to_unit_.end()) return std::nullopt;
  return it->second;
}

}  // namespace mwp
