#pragma once

#include <optional>
#include <vector>

#include "monotone_lab/vec2.hpp"

namespace monotone_lab {

struct BBox {
  Vec2 lo;
  Vec2 hi;
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
};

/// Shoelace signed area of a closed polyline (positive when counterclockwise).
double shoelace_area(const std::vector<Vec2>& loop);

/// Winding number of the closed polyline about p, evaluated with exact orientation
/// tests. Points on the polyline get an arbitrary but deterministic answer; callers
/// that care check the distance first.
int winding_number(const std::vector<Vec2>& loop, Vec2 p);

/// Distance from p to the closed segment [a, b].
double segment_distance(Vec2 a, Vec2 b, Vec2 p);

/// Simple counterclockwise polygon. Stand-in for a bounded Lipschitz domain.
class PlanarDomain {
 public:
  enum class Side { inside, boundary, outside };

  /// Validates: >= 3 vertices, consecutive vertices distinct, simple, positive area.
  /// Throws GeometryError with a diagnostic otherwise.
  explicit PlanarDomain(std::vector<Vec2> vertices);

  static PlanarDomain unit_square();
  static PlanarDomain rectangle(double x0, double x1, double y0, double y1);
  /// Regular polygon with `segments` vertices on the unit circle, first vertex at (1, 0).
  static PlanarDomain unit_disk(int segments = 128);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double area() const { return area_; }
  double perimeter() const { return perimeter_; }
  BBox bbox() const { return bbox_; }

  Side classify(Vec2 p) const;
  /// Closed-set membership.
  bool contains(Vec2 p) const { return classify(p) != Side::outside; }
  double distance_to_boundary(Vec2 p) const;
  /// Zero inside or on the boundary; distance to the boundary outside.
  double distance_outside(Vec2 p) const;
  /// Weakly convex (collinear consecutive vertices allowed).
  bool is_convex() const;

  /// Arc-length parameter in [0, perimeter) of a point within `tol` of the boundary.
  std::optional<double> boundary_parameter(Vec2 p, double tol) const;
  Vec2 point_at(double s) const;
  /// Unit inward normal of the edge containing arc-length parameter s.
  Vec2 inward_normal_at(double s) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<double> cumulative_;  // arc length at each vertex
  double area_ = 0.0;
  double perimeter_ = 0.0;
  BBox bbox_;
};

}  // namespace monotone_lab
