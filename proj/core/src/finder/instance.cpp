#include "a4f/finder/instance.hpp"

#include <stdexcept>

namespace a4f {

nlohmann::json to_json(const Instance& instance) {
  nlohmann::json sigs = nlohmann::json::object();
  for (const auto& [name, atoms] : instance.sigs) sigs[name] = atoms;
  nlohmann::json fields = nlohmann::json::object();
  for (const auto& [name, tuples] : instance.fields) fields[name] = tuples;
  return {{"sigs", sigs}, {"fields", fields}, {"universe", instance.universe}};
}

namespace {

std::vector<std::string> atom_list(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array of atoms");
  std::vector<std::string> out;
  for (const auto& a : j) {
    if (!a.is_string()) throw std::invalid_argument(std::string(what) + " must contain strings");
    out.push_back(a.get<std::string>());
  }
  return out;
}

}  // namespace

Instance instance_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("instance must be an object");
  for (const char* key : {"sigs", "fields", "universe"}) {
    if (!doc.contains(key)) throw std::invalid_argument(std::string("instance lacks '") + key + "'");
  }
  Instance out;
  out.universe = atom_list(doc.at("universe"), "universe");
  if (!doc.at("sigs").is_object() || !doc.at("fields").is_object()) {
    throw std::invalid_argument("instance sigs and fields must be objects");
  }
  for (const auto& [name, atoms] : doc.at("sigs").items()) out.sigs[name] = atom_list(atoms, "sig");
  for (const auto& [name, tuples] : doc.at("fields").items()) {
    if (!tuples.is_array()) throw std::invalid_argument("field must be an array of tuples");
    auto& dst = out.fields[name];
    for (const auto& t : tuples) dst.push_back(atom_list(t, "tuple"));
  }
  return out;
}

}  // namespace a4f
