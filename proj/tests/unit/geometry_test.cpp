#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "polygon_oracle.hpp"
#include "radargap/geometry.hpp"

using namespace radargap;

namespace {

OrientedBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0), yaw(-std::numbers::pi, std::numbers::pi), ext(0.5, 6.0);
  return {{pos(rng), pos(rng)}, yaw(rng), ext(rng), ext(rng)};
}

}  // namespace

TEST(Geometry, WrapAngleStaysInHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(wrap_angle(0.25 + 8 * std::numbers::pi), 0.25, 1e-12);
}

TEST(Geometry, CornersAreCounterClockwiseFromFrontLeft) {
  const OrientedBox box{{1.0, 2.0}, 0.0, 4.0, 2.0};
  const auto c = box.corners();
  EXPECT_NEAR(c[0].x, 3.0, 1e-12);
  EXPECT_NEAR(c[0].y, 3.0, 1e-12);
  EXPECT_NEAR(c[2].x, -1.0, 1e-12);
  EXPECT_NEAR(c[2].y, 1.0, 1e-12);
  EXPECT_GT(signed_area(c), 0.0);
  EXPECT_NEAR(signed_area(c), box.area(), 1e-12);
}

TEST(Geometry, PerimeterPointWalksTheOutline) {
  const OrientedBox box{{0.0, 0.0}, 0.3, 4.5, 1.8};
  for (int k = 0; k < 50; ++k) {
    const double s = box.perimeter() * k / 50.0;
    const Vec2 local = box.to_local(box.perimeter_point(s));
    const double on_edge = std::min(std::abs(std::abs(local.x) - 2.25), std::abs(std::abs(local.y) - 0.9));
    EXPECT_LT(on_edge, 1e-9);
    EXPECT_TRUE(box.contains(box.perimeter_point(s), 1e-9));
  }
  const Vec2 start = box.to_local(box.perimeter_point(0.0));
  EXPECT_NEAR(start.x, 2.25, 1e-12);
  EXPECT_NEAR(start.y, -0.9, 1e-12);
}

TEST(Geometry, RayHitMatchesMarching) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  int hits = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const OrientedBox box = random_box(rng);
    const Vec2 origin = box.center + heading(ang(rng)) * 12.0;
    const Vec2 dir = heading(ang(rng));
    const auto hit = intersect_ray(origin, dir, box);
    // March along the ray in small steps to find the first interior point.
    double first = -1.0;
    for (double t = 0.0; t < 30.0; t += 1e-3) {
      if (box.contains(origin + dir * t)) {
        first = t;
        break;
      }
    }
    if (first < 0.0) {
      EXPECT_FALSE(hit.has_value());
      continue;
    }
    ASSERT_TRUE(hit.has_value());
    ++hits;
    EXPECT_NEAR(hit->distance, first, 2e-3);
    EXPECT_LT(hit->normal.dot(dir), 0.0);
    EXPECT_NEAR(hit->normal.norm(), 1.0, 1e-12);
  }
  EXPECT_GT(hits, 20);
}

TEST(Geometry, IouAgreesWithPolygonLibrary) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const OrientedBox a = random_box(rng);
    OrientedBox b = random_box(rng);
    if (trial % 3 == 0) b.center = a.center + Vec2{0.5, -0.3};
    const double expected = oracle::iou(oracle::rectangle(a.center.x, a.center.y, a.yaw, a.length, a.width),
                                        oracle::rectangle(b.center.x, b.center.y, b.yaw, b.length, b.width));
    EXPECT_NEAR(box_iou(a, b), expected, 1e-9);
  }
}

TEST(Geometry, IouOfIdenticalBoxesIsExactlyOne) {
  const OrientedBox box{{12.3, -4.5}, 0.77, 4.5, 1.8};
  EXPECT_EQ(box_iou(box, box), 1.0);
}

TEST(Geometry, IouRejectsDegenerateBoxes) {
  EXPECT_THROW(box_iou({{0, 0}, 0.0, 0.0, 1.0}, {{0, 0}, 0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST(Geometry, SegmentCrossingMatchesSampling) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  for (int trial = 0; trial < 400; ++trial) {
    const OrientedBox box = random_box(rng);
    const Vec2 a{pos(rng), pos(rng)};
    const Vec2 b{pos(rng), pos(rng)};
    const bool expected = oracle::segment_hits_rectangle(a.x, a.y, b.x, b.y, box.center.x, box.center.y, box.yaw,
                                                         box.length, box.width, 20000);
    // Skip grazing configurations the sampler cannot resolve.
    OrientedBox inner = box, outer = box;
    inner.length -= 0.02;
    inner.width -= 0.02;
    outer.length += 0.02;
    outer.width += 0.02;
    if (segment_crosses(a, b, inner) != segment_crosses(a, b, outer)) continue;
    EXPECT_EQ(segment_crosses(a, b, box), expected) << "trial " << trial;
  }
}
