#include "monotone_lab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "monotone_lab/errors.hpp"
#include "monotone_lab/predicates.hpp"

namespace monotone_lab {

double shoelace_area(const std::vector<Vec2>& loop) {
  const std::size_t n = loop.size();
  if (n < 3) return 0.0;
  // Centering about the first vertex reduces cancellation.
  const Vec2 o = loop[0];
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) sum += cross(loop[i] - o, loop[i + 1] - o);
  return 0.5 * sum;
}

int winding_number(const std::vector<Vec2>& loop, Vec2 p) {
  int wn = 0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = loop[i];
    const Vec2 b = loop[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && predicates::orient2d(a, b, p) > 0) ++wn;
    } else if (b.y <= p.y && predicates::orient2d(a, b, p) < 0) {
      --wn;
    }
  }
  return wn;
}

double segment_distance(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 d = b - a;
  const double len2 = norm2(d);
  if (len2 == 0.0) return distance(a, p);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return distance(a + t * d, p);
}

PlanarDomain::PlanarDomain(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw GeometryError("polygon needs at least 3 vertices, got " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (vertices_[i] == vertices_[(i + 1) % n]) {
      std::ostringstream msg;
      msg << "polygon has repeated consecutive vertex at index " << i;
      throw GeometryError(msg.str());
    }
  }
  area_ = shoelace_area(vertices_);
  if (!(area_ > 0.0)) {
    std::ostringstream msg;
    msg << "degenerate or clockwise polygon: signed area " << area_;
    throw GeometryError(msg.str());
  }
  // Simplicity: non-adjacent edges must not meet; adjacent edges meet only at the shared vertex.
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 c = vertices_[j], d = vertices_[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (!adjacent) {
        if (predicates::segments_intersect(a, b, c, d)) {
          std::ostringstream msg;
          msg << "polygon is not simple: edges " << i << " and " << j << " intersect";
          throw GeometryError(msg.str());
        }
      } else {
        // Shared vertex s; the far endpoint of one edge must not lie on the other.
        const bool forward = (j == i + 1);
        const Vec2 far_a = forward ? a : b;  // endpoint of edge i not shared
        const Vec2 far_c = forward ? d : c;  // endpoint of edge j not shared
        const Vec2 shared = forward ? b : a;
        if (predicates::orient2d(far_a, shared, far_c) == 0 &&
            dot(far_a - shared, far_c - shared) > 0.0) {
          std::ostringstream msg;
          msg << "polygon folds back on itself at edges " << i << " and " << j;
          throw GeometryError(msg.str());
        }
      }
    }
  }
  cumulative_.resize(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cumulative_[i + 1] = cumulative_[i] + distance(vertices_[i], vertices_[(i + 1) % n]);
  perimeter_ = cumulative_[n];
  bbox_ = {vertices_[0], vertices_[0]};
  for (const Vec2& v : vertices_) {
    bbox_.lo.x = std::min(bbox_.lo.x, v.x);
    bbox_.lo.y = std::min(bbox_.lo.y, v.y);
    bbox_.hi.x = std::max(bbox_.hi.x, v.x);
    bbox_.hi.y = std::max(bbox_.hi.y, v.y);
  }
}

PlanarDomain PlanarDomain::unit_square() { return rectangle(0.0, 1.0, 0.0, 1.0); }

PlanarDomain PlanarDomain::rectangle(double x0, double x1, double y0, double y1) {
  return PlanarDomain({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

PlanarDomain PlanarDomain::unit_disk(int segments) {
  if (segments < 3) throw GeometryError("disk polygon needs at least 3 segments");
  std::vector<Vec2> v;
  v.reserve(segments);
  for (int i = 0; i < segments; ++i) {
    const double t = 2.0 * std::numbers::pi * i / segments;
    v.push_back({std::cos(t), std::sin(t)});
  }
  v[0] = {1.0, 0.0};
  return PlanarDomain(std::move(v));
}

PlanarDomain::Side PlanarDomain::classify(Vec2 p) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i)
    if (predicates::on_segment(vertices_[i], vertices_[(i + 1) % n], p)) return Side::boundary;
  return winding_number(vertices_, p) != 0 ? Side::inside : Side::outside;
}

double PlanarDomain::distance_to_boundary(Vec2 p) const {
  double best = INFINITY;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, segment_distance(vertices_[i], vertices_[(i + 1) % n], p));
  return best;
}

double PlanarDomain::distance_outside(Vec2 p) const {
  return classify(p) == Side::outside ? distance_to_boundary(p) : 0.0;
}

bool PlanarDomain::is_convex() const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i)
    if (predicates::orient2d(vertices_[i], vertices_[(i + 1) % n], vertices_[(i + 2) % n]) < 0) return false;
  return true;
}

std::optional<double> PlanarDomain::boundary_parameter(Vec2 p, double tol) const {
  const std::size_t n = vertices_.size();
  double best = INFINITY;
  double best_s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n];
    const Vec2 d = b - a;
    const double len = cumulative_[i + 1] - cumulative_[i];
    const double t = std::clamp(dot(p - a, d) / norm2(d), 0.0, 1.0);
    const double dist = distance(a + t * d, p);
    if (dist < best) {
      best = dist;
      best_s = cumulative_[i] + t * len;
    }
  }
  if (best > tol) return std::nullopt;
  if (best_s >= perimeter_) best_s -= perimeter_;
  return best_s;
}

Vec2 PlanarDomain::point_at(double s) const {
  s = std::fmod(s, perimeter_);
  if (s < 0) s += perimeter_;
  const std::size_t n = vertices_.size();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
  i = std::min(i, n - 1);
  const double len = cumulative_[i + 1] - cumulative_[i];
  const double t = len > 0 ? (s - cumulative_[i]) / len : 0.0;
  const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n];
  return a + t * (b - a);
}

Vec2 PlanarDomain::inward_normal_at(double s) const {
  s = std::fmod(s, perimeter_);
  if (s < 0) s += perimeter_;
  const std::size_t n = vertices_.size();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
  i = std::min(i, n - 1);
  const Vec2 d = vertices_[(i + 1) % n] - vertices_[i];
  return perp(d) / norm(d);
}

}  // namespace monotone_lab
