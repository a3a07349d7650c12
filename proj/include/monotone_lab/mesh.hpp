#pragma once

#include <array>
#include <memory>
#include <variant>
#include <vector>

#include "monotone_lab/domain.hpp"
#include "monotone_lab/vec2.hpp"

namespace monotone_lab {

using Triangle = std::array<int, 3>;

struct InteriorLocation {
  int triangle = -1;
  std::array<double, 3> bary{};
};

/// Point on the boundary loop segment boundary[edge] -> boundary[edge + 1], at
/// parameter t in [0, 1]. `triangle` and `bary` give the incident triangle.
struct BoundaryLocation {
  int edge = -1;
  double t = 0.0;
  int triangle = -1;
  std::array<double, 3> bary{};
};

struct OutsideLocation {};

using Location = std::variant<InteriorLocation, BoundaryLocation, OutsideLocation>;

/// Conforming, consistently oriented triangulation of a simple polygon with a
/// single counterclockwise boundary loop. Immutable after construction.
class TriMesh {
 public:
  /// Validates every invariant (positive triangles, edge-to-edge conformity,
  /// boundary loop equals the set of unshared edges, no unused vertices).
  /// Throws GeometryError describing the first violation.
  TriMesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles, std::vector<int> boundary);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<int>& boundary() const { return boundary_; }
  Vec2 vertex(int v) const { return vertices_[v]; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  double area(int t) const;
  double total_area() const;
  double max_edge_length() const;
  BBox bbox() const { return bbox_; }

  /// neighbor(t)[i] is the triangle across edge (v[i], v[i+1]), or -1 on the boundary.
  const std::array<int, 3>& neighbors(int t) const { return neighbors_[t]; }
  bool is_boundary_vertex(int v) const { return boundary_position_[v] >= 0; }
  /// Position of v in the boundary loop, or -1.
  int boundary_position(int v) const { return boundary_position_[v]; }
  /// Triangles incident to v, ascending.
  const std::vector<int>& vertex_triangles(int v) const { return vertex_triangles_[v]; }
  /// Vertices adjacent to v by an edge, ascending.
  std::vector<int> vertex_neighbors(int v) const;
  /// Boundary polygon traced by the mesh.
  PlanarDomain boundary_polygon() const;

  /// Exact point location. Points on shared edges or vertices go to the lowest-index
  /// incident triangle; points on the boundary loop are reported as BoundaryLocation.
  Location locate(Vec2 p) const;

 private:
  void build_grid();

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> boundary_;
  std::vector<std::array<int, 3>> neighbors_;
  std::vector<int> boundary_position_;
  std::vector<std::vector<int>> vertex_triangles_;
  BBox bbox_;

  // Uniform bucket grid over the bounding box; each cell lists overlapping triangles ascending.
  int grid_nx_ = 1, grid_ny_ = 1;
  double cell_w_ = 1.0, cell_h_ = 1.0;
  std::vector<std::vector<int>> grid_;
};

using MeshPtr = std::shared_ptr<const TriMesh>;

}  // namespace monotone_lab
