// Handwritten lexical inventory for agents, entities, units and attributes.
//
// File format (UTF-8 JSON):
//   {"agents": [...],
//    "entities": [{"name": ..., "plural": ..., "units": [...], "attributes": [...]}],
//    "units": [...], "attributes": [...]}
// `plural` is optional; the default plural appends "s".
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mwp {

struct EntityInfo {
  std::string name;
  std::optional<std::string> plural;
  std::vector<std::string> units;
  std::vector<std::string> attributes;
};

class VocabularyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> agents, std::vector<EntityInfo> entities,
             std::vector<std::string> units, std::vector<std::string> attributes);

  static Vocabulary from_json(const nlohmann::json& j);
  static Vocabulary load(const std::filesystem::path& path);
  static const Vocabulary& builtin();

  nlohmann::ordered_json to_json() const;

  const std::vector<std::string>& agents() const { return agents_; }
  const std::vector<EntityInfo>& entities() const { return entities_; }
  const std::vector<std::string>& units() const { return units_; }
  const std::vector<std::string>& attributes() const { return attributes_; }

  const EntityInfo* find_entity(const std::string& name) const;
  bool is_agent(const std::string& name) const;
  bool is_unit(const std::string& name) const;
  bool is_attribute(const std::string& name) const;

  std::string entity_plural(const std::string& name) const;
  static std::string unit_plural(const std::string& unit) { return unit + "s"; }

  // Reverse lookups used by the inverse parser.
  std::optional<std::string> entity_from_plural(const std::string& plural) const;
  std::optional<std::string> unit_from_plural(const std::string& plural) const;

 private:
  void index();

  std::vector<std::string> agents_;
  std::vector<EntityInfo> entities_;
  std::vector<std::string> units_;
  std::vector<std::string> attributes_;

  std::map<std::string, std::size_t> entity_index_;
  std::map<std::string, std::string> plural_to_entity_;
  std::map<std::string, std::string> plural_to_unit_;
};

}  // namespace mwp
