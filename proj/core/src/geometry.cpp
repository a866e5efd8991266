#include "radargap/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace radargap {

std::array<Vec2, 4> OrientedBox::corners() const {
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  return {to_world({hl, hw}), to_world({-hl, hw}), to_world({-hl, -hw}), to_world({hl, -hw})};
}

bool OrientedBox::contains(Vec2 p, double tol) const {
  const Vec2 l = to_local(p);
  return std::abs(l.x) <= 0.5 * length + tol && std::abs(l.y) <= 0.5 * width + tol;
}

Vec2 OrientedBox::perimeter_point(double s) const {
  const double p = perimeter();
  s = std::fmod(s, p);
  if (s < 0.0) s += p;
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  // front edge (x = +hl) from y=-hw up to +hw, then left, rear, right.
  if (s < width) return to_world({hl, -hw + s});
  s -= width;
  if (s < length) return to_world({hl - s, hw});
  s -= length;
  if (s < width) return to_world({-hl, hw - s});
  s -= width;
  return to_world({-hl + s, -hw});
}

namespace {

// Slab test in the box frame. Returns the parametric entry/exit of the line o + t d
// and which axis produced the entry.
struct SlabResult {
  double t_enter;
  double t_exit;
  int enter_axis;  // 0: x slab, 1: y slab
  double enter_sign;
};

std::optional<SlabResult> slab(Vec2 o, Vec2 d, double hx, double hy) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  int axis = -1;
  double sign = 0.0;
  const double oc[2] = {o.x, o.y};
  const double dc[2] = {d.x, d.y};
  const double h[2] = {hx, hy};
  for (int k = 0; k < 2; ++k) {
    if (std::abs(dc[k]) < 1e-15) {
      if (oc[k] < -h[k] || oc[k] > h[k]) return std::nullopt;
      continue;
    }
    double t1 = (-h[k] - oc[k]) / dc[k];
    double t2 = (h[k] - oc[k]) / dc[k];
    double s = -1.0;  // entering through the negative face
    if (t1 > t2) {
      std::swap(t1, t2);
      s = 1.0;
    }
    if (t1 > t_enter) {
      t_enter = t1;
      axis = k;
      sign = s;
    }
    t_exit = std::min(t_exit, t2);
  }
  if (t_enter > t_exit) return std::nullopt;
  return SlabResult{t_enter, t_exit, axis, sign};
}

}  // namespace

std::optional<RayHit> intersect_ray(Vec2 origin, Vec2 dir, const OrientedBox& box) {
  const Vec2 o = box.to_local(origin);
  const Vec2 d = rotate(dir, -box.yaw);
  const auto s = slab(o, d, 0.5 * box.length, 0.5 * box.width);
  if (!s || s->t_enter < 0.0 || s->enter_axis < 0) return std::nullopt;
  Vec2 n_local = s->enter_axis == 0 ? Vec2{s->enter_sign, 0.0} : Vec2{0.0, s->enter_sign};
  const double edge = s->enter_axis == 0 ? box.width : box.length;
  return RayHit{s->t_enter, rotate(n_local, box.yaw), edge};
}

bool segment_crosses(Vec2 a, Vec2 b, const OrientedBox& box, double tol) {
  const Vec2 o = box.to_local(a);
  const Vec2 d = rotate(b - a, -box.yaw);
  const auto s = slab(o, d, 0.5 * box.length, 0.5 * box.width);
  if (!s) return false;
  const double lo = std::max(s->t_enter, 0.0);
  const double hi = std::min(s->t_exit, 1.0);
  return hi - lo > tol;
}

double signed_area(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += polygon[i].cross(polygon[(i + 1) % n]);
  return 0.5 * acc;
}

std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  std::vector<Vec2> out(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 b = clip[(e + 1) % m];
    const Vec2 edge = b - a;
    auto side = [&](Vec2 p) { return edge.cross(p - a); };  // >= 0 inside for CCW clip
    std::vector<Vec2> in = std::move(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2 cur = in[i];
      const Vec2 nxt = in[(i + 1) % in.size()];
      const double sc = side(cur);
      const double sn = side(nxt);
      if (sc >= 0.0) out.push_back(cur);
      if ((sc >= 0.0) != (sn >= 0.0)) {
        const double t = sc / (sc - sn);
        out.push_back(cur + (nxt - cur) * t);
      }
    }
  }
  return out;
}

double intersection_area(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const auto poly = clip_convex(ca, cb);
  return std::max(0.0, signed_area(poly));
}

double box_iou(const OrientedBox& a, const OrientedBox& b) {
  if (!(a.area() > 0.0) || !(b.area() > 0.0)) {
    throw std::invalid_argument("box_iou: degenerate box with zero area");
  }
  if (a == b) return 1.0;  // exact, without polygon-clipping round-off
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace radargap
