#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "monotone_lab/deformation.hpp"
#include "monotone_lab/mesh.hpp"

namespace monotone_lab {

/// Nonempty set of triangles of a mesh together with its oriented boundary.
class Region {
 public:
  Region(MeshPtr mesh, std::vector<int> triangles);
  static Region whole(MeshPtr mesh);

  const std::vector<int>& triangles() const { return triangles_; }
  const TriMesh& mesh() const { return *mesh_; }
  bool contains(int t) const;

  /// Directed edges (a, b) of region triangles whose twin is not in the region,
  /// oriented as in their triangle (region interior on the left).
  const std::vector<std::pair<int, int>>& boundary_edges() const { return boundary_edges_; }
  /// The boundary edges chained into closed vertex loops.
  std::vector<std::vector<int>> boundary_loops() const;
  bool touches_mesh_boundary() const;

 private:
  MeshPtr mesh_;
  std::vector<int> triangles_;
  std::vector<char> member_;
  std::vector<std::pair<int, int>> boundary_edges_;
};

/// Distance below which a query point counts as lying on the image of the region boundary.
inline constexpr double kDegreeBoundaryTolerance = 1e-12;

double distance_to_image_boundary(const Deformation& def, const Region& region, Vec2 y);

/// Winding number of the image of the oriented region boundary about y.
/// Throws DegreeUndefined if y is within kDegreeBoundaryTolerance of that image.
int degree_winding(const Deformation& def, const Region& region, Vec2 y);

/// Signed count: sum of sgn J_T over triangles whose open image contains y.
/// Throws DegreeUndefined near the boundary image and NonGenericPoint when y lies on
/// the image of any triangle edge.
int degree_simplex(const Deformation& def, const Region& region, Vec2 y);

/// Distance from y to the image triangle of t (zero inside).
double image_triangle_distance(const Deformation& def, int t, Vec2 y);

struct PreimageComponent {
  std::vector<int> triangles;
  bool touches_boundary = false;
  /// Winding degree on the component's boundary; absent for components touching the
  /// mesh boundary or when y lies on the component boundary image.
  std::optional<int> degree;
};

struct PreimageComponents {
  Vec2 y;
  double eps = 0.0;
  std::vector<PreimageComponent> components;
};

/// Default radius used when none is given: twice the longest image edge.
double default_eps(const Deformation& def);

/// Edge-adjacency components of {T : dist(f(T), y) < eps}, ordered by lowest triangle index.
PreimageComponents preimage_components(const Deformation& def, Vec2 y, double eps);

struct JacobianIdentityEntry {
  std::size_t component = 0;
  int degree = 0;
  /// (1/|V|) * integral of J over the exact preimage of V inside the component, where V
  /// is the 64-gon inscribed in B_eps(y).
  double jacobian_average = 0.0;
  double gap = 0.0;
};

struct JacobianIdentityReport {
  Vec2 y;
  double eps = 0.0;
  /// 1 - |V| / |B_eps|: relative area lost by the polygonal ball.
  double polygon_error = 0.0;
  std::vector<JacobianIdentityEntry> entries;
  /// Components skipped because their degree is not defined.
  std::size_t skipped = 0;
};

JacobianIdentityReport degree_jacobian_identity(const Deformation& def, Vec2 y, double eps);

}  // namespace monotone_lab
