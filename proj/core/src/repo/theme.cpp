#include "a4f/repo/theme.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace a4f {

namespace {

using nlohmann::json;

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Ellipse: return "ellipse";
    case Shape::Rectangle: return "rectangle";
    case Shape::Hexagon: return "hexagon";
  }
  return "ellipse";
}

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("malformed theme: " + what); }

const json& object(const json& doc, const std::string& what) {
  if (!doc.is_object()) bad(what + " must be an object");
  return doc;
}

std::string color(const json& v, const std::string& what) {
  if (!v.is_string()) bad(what + " color must be a string");
  auto s = v.get<std::string>();
  if (s.size() != 7 || s[0] != '#' ||
      !std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isxdigit(c); })) {
    bad(what + " color must look like #rrggbb");
  }
  return s;
}

bool boolean(const json& v, const std::string& what) {
  if (!v.is_boolean()) bad(what + " visible must be a boolean");
  return v.get<bool>();
}

void only_keys(const json& o, std::initializer_list<const char*> keys, const std::string& what) {
  for (const auto& [k, v] : o.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
      bad("unknown member '" + k + "' in " + what);
    }
  }
}

}  // namespace

json to_json(const Theme& theme) {
  json per_sig = json::object();
  for (const auto& [sig, s] : theme.per_sig) {
    per_sig[sig] = {{"color", s.color}, {"shape", shape_name(s.shape)}, {"visible", s.visible}, {"label", s.label}};
  }
  json per_field = json::object();
  for (const auto& [field, f] : theme.per_field) per_field[field] = {{"color", f.color}, {"visible", f.visible}};
  return {{"perSig", per_sig}, {"perField", per_field}, {"projection", theme.projection}};
}

Theme theme_from_json(const json& doc) {
  object(doc, "theme");
  only_keys(doc, {"perSig", "perField", "projection"}, "theme");
  Theme t;
  if (doc.contains("perSig")) {
    for (const auto& [sig, v] : object(doc["perSig"], "perSig").items()) {
      object(v, "style of " + sig);
      only_keys(v, {"color", "shape", "visible", "label"}, "style of " + sig);
      SigStyle s;
      if (v.contains("color")) s.color = color(v["color"], sig);
      if (v.contains("shape")) {
        const json& sh = v["shape"];
        if (sh == "ellipse") s.shape = Shape::Ellipse;
        else if (sh == "rectangle") s.shape = Shape::Rectangle;
        else if (sh == "hexagon") s.shape = Shape::Hexagon;
        else bad("unknown shape for " + sig);
      }
      if (v.contains("visible")) s.visible = boolean(v["visible"], sig);
      if (v.contains("label")) {
        if (!v["label"].is_string()) bad(sig + " label must be a string");
        s.label = v["label"].get<std::string>();
      }
      t.per_sig[sig] = s;
    }
  }
  if (doc.contains("perField")) {
    for (const auto& [field, v] : object(doc["perField"], "perField").items()) {
      object(v, "style of " + field);
      only_keys(v, {"color", "visible"}, "style of " + field);
      FieldStyle f;
      if (v.contains("color")) f.color = color(v["color"], field);
      if (v.contains("visible")) f.visible = boolean(v["visible"], field);
      t.per_field[field] = f;
    }
  }
  if (doc.contains("projection")) {
    const json& p = doc["projection"];
    if (!p.is_array()) bad("projection must be an array");
    for (const auto& s : p) {
      if (!s.is_string()) bad("projection entries must be sig names");
      t.projection.push_back(s.get<std::string>());
    }
  }
  return t;
}

void check_projection(const Theme& theme, const std::vector<std::string>& sig_names) {
  for (const auto& s : theme.projection) {
    if (std::find(sig_names.begin(), sig_names.end(), s) == sig_names.end()) {
      throw std::invalid_argument("projection names unknown sig '" + s + "'");
    }
  }
}

json to_json(const Layout& layout) {
  json out = json::object();
  for (const auto& [atom, p] : layout) out[atom] = {{"x", p.x}, {"y", p.y}};
  return out;
}

Layout layout_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("malformed layout: must be an object");
  Layout out;
  for (const auto& [atom, v] : doc.items()) {
    if (!v.is_object() || v.size() != 2 || !v.contains("x") || !v.contains("y") || !v["x"].is_number() ||
        !v["y"].is_number()) {
      throw std::invalid_argument("malformed layout: position of " + atom + " needs numeric x and y");
    }
    Point p{v["x"].get<double>(), v["y"].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("malformed layout: position of " + atom + " is not finite");
    }
    out[atom] = p;
  }
  return out;
}

}  // namespace a4f
