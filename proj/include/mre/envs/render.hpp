#pragma once

#include <array>
#include <string>
#include <vector>

namespace mre::envs {

inline constexpr int kRenderSchemaVersion = 1;

/// A drawing primitive in normalized coordinates: x and y in [0, 1], origin
/// at the bottom-left of the viewport.
struct Shape {
  enum class Kind { Line, Circle, Polygon, Text };
  Kind kind = Kind::Line;
  std::vector<std::array<double, 2>> points;  // line: polyline; circle/text: anchor
  double radius = 0.0;                        // circle only
  std::string text;                           // text only
  std::string color = "#ffffff";
  bool operator==(const Shape&) const = default;
};

struct RenderFrame {
  int version = kRenderSchemaVersion;
  std::vector<Shape> shapes;
  bool operator==(const RenderFrame&) const = default;
};

const char* to_string(Shape::Kind k);

}  // namespace mre::envs
