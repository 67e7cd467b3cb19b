#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace a4f {

using Tuple = std::vector<std::string>;

/// A finite valuation of every signature and field.
///
/// Atoms are named `Sig$index` after their top-level signature. Atom and
/// tuple lists follow universe order (top-level sigs by name, then index).
struct Instance {
  std::vector<std::string> universe;
  std::map<std::string, std::vector<std::string>> sigs;
  std::map<std::string, std::vector<Tuple>> fields;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Wire form: `{"sigs": {..}, "fields": {..}, "universe": [..]}`.
nlohmann::json to_json(const Instance& instance);

/// Parses the wire form; throws std::invalid_argument when malformed.
Instance instance_from_json(const nlohmann::json& doc);

}  // namespace a4f
