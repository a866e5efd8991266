#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace radargap {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2&) const = default;

  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  [[nodiscard]] constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

/// Unit vector at angle `a` (rad, counter-clockwise from +x).
inline Vec2 heading(double a) { return {std::cos(a), std::sin(a)}; }

/// Rotates `v` by `a` radians counter-clockwise.
inline Vec2 rotate(Vec2 v, double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Rectangle with a heading. `length` runs along the heading, `width` across it.
struct OrientedBox {
  Vec2 center;
  double yaw{0.0};
  double length{1.0};
  double width{1.0};

  /// Corners counter-clockwise: front-left, rear-left, rear-right, front-right.
  [[nodiscard]] std::array<Vec2, 4> corners() const;
  [[nodiscard]] double area() const { return length * width; }
  /// Point expressed in the box frame (x along heading).
  [[nodiscard]] Vec2 to_local(Vec2 p) const { return rotate(p - center, -yaw); }
  [[nodiscard]] Vec2 to_world(Vec2 local) const { return center + rotate(local, yaw); }
  [[nodiscard]] bool contains(Vec2 p, double tol = 0.0) const;

  bool operator==(const OrientedBox&) const = default;
  [[nodiscard]] double perimeter() const { return 2.0 * (length + width); }
  /// Point at arc length `s` along the perimeter, starting at the front-right corner, CCW.
  [[nodiscard]] Vec2 perimeter_point(double s) const;
};

struct RayHit {
  double distance{0.0};  ///< along the unit ray direction
  Vec2 normal;           ///< outward unit normal of the struck edge
  double edge_length{0.0};
};

/// First intersection of a ray (unit `dir`) with the box boundary, for an origin outside the box.
std::optional<RayHit> intersect_ray(Vec2 origin, Vec2 dir, const OrientedBox& box);

/// True when the open segment (a, b) passes through the box with non-zero length.
/// Grazing contact along a single point is not counted.
bool segment_crosses(Vec2 a, Vec2 b, const OrientedBox& box, double tol = 1e-9);

/// Shoelace area, positive for counter-clockwise polygons.
double signed_area(std::span<const Vec2> polygon);

/// Sutherland-Hodgman clip of a polygon against a convex counter-clockwise clip polygon.
std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

double intersection_area(const OrientedBox& a, const OrientedBox& b);

/// Intersection over union of two oriented rectangles. Throws on zero-area input.
double box_iou(const OrientedBox& a, const OrientedBox& b);

}  // namespace radargap
