#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace a4f {

enum class Shape { Ellipse, Rectangle, Hexagon };

struct SigStyle {
  std::string color = "#ffd966";
  Shape shape = Shape::Ellipse;
  bool visible = true;
  std::string label;

  friend bool operator==(const SigStyle&, const SigStyle&) = default;
};

struct FieldStyle {
  std::string color = "#000000";
  bool visible = true;

  friend bool operator==(const FieldStyle&, const FieldStyle&) = default;
};

/// Display settings a user attaches to a shared model or instance.
struct Theme {
  std::map<std::string, SigStyle> per_sig;
  std::map<std::string, FieldStyle> per_field;
  /// Sigs the instance is projected over, one frame per atom tuple.
  std::vector<std::string> projection;

  friend bool operator==(const Theme&, const Theme&) = default;
};

/// `{"perSig": {sig: {color, shape, visible, label}}, "perField": {field:
/// {color, visible}}, "projection": [sig]}`; every member is optional.
nlohmann::json to_json(const Theme& theme);
/// Throws std::invalid_argument on wrong types, unknown shapes or colors
/// that are not `#rrggbb`.
Theme theme_from_json(const nlohmann::json& doc);
/// Throws std::invalid_argument when the projection names an unknown sig.
void check_projection(const Theme& theme, const std::vector<std::string>& sig_names);

struct Point {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Atom positions: `{atom: {"x": number, "y": number}}`.
using Layout = std::map<std::string, Point>;

nlohmann::json to_json(const Layout& layout);
Layout layout_from_json(const nlohmann::json& doc);

}  // namespace a4f
