#pragma once

// Polygon oracle backed by Boost.Geometry. Kept apart from oracles.hpp because it is
// expensive to compile. Coordinate rescaling is switched off: it costs about 1e-8 of accuracy.

#define BOOST_GEOMETRY_NO_ROBUSTNESS

#include <cmath>
#include <vector>

#include <boost/geometry/algorithms/append.hpp>
#include <boost/geometry/algorithms/area.hpp>
#include <boost/geometry/algorithms/correct.hpp>
#include <boost/geometry/algorithms/intersection.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

namespace oracle {


namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint>;

/// Rectangle polygon from center, heading and extents.
inline BPolygon rectangle(double cx, double cy, double yaw, double length, double width) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double hl = length / 2, hw = width / 2;
  const double local[4][2] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
  BPolygon poly;
  for (const auto& q : local) bg::append(poly.outer(), BPoint(cx + c * q[0] - s * q[1], cy + s * q[0] + c * q[1]));
  bg::append(poly.outer(), poly.outer().front());
  bg::correct(poly);
  return poly;
}

inline double iou(const BPolygon& a, const BPolygon& b) {
  std::vector<BPolygon> inter;
  bg::intersection(a, b, inter);
  double ia = 0.0;
  for (const auto& p : inter) ia += bg::area(p);
  return ia / (bg::area(a) + bg::area(b) - ia);
}

}  // namespace oracle
