#pragma once

#include <span>
#include <vector>

#include "monotone_lab/mesh.hpp"
#include "monotone_lab/vec2.hpp"

namespace monotone_lab {

/// Piecewise-affine map on a reference mesh, given by the image of every vertex.
/// Derivative and Jacobian are constant per triangle. Positivity of the Jacobian
/// is not an invariant; callers check it.
class Deformation {
 public:
  Deformation(MeshPtr mesh, std::vector<Vec2> image);
  static Deformation identity(MeshPtr mesh);

  const TriMesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const std::vector<Vec2>& image() const { return image_; }
  Vec2 image(int v) const { return image_[v]; }

  Mat2 derivative(int t) const;
  /// Signed image area over reference area.
  double jacobian(int t) const;
  /// Signed area of the image triangle (= jacobian(t) * area(t)).
  double image_signed_area(int t) const;
  double min_jacobian() const;

  /// Barycentric interpolation on the located triangle. Throws DomainError outside.
  Vec2 evaluate(Vec2 p) const;

  /// Images of the boundary loop vertices, in loop order.
  std::vector<Vec2> image_boundary() const;
  double max_image_edge_length() const;

 private:
  MeshPtr mesh_;
  std::vector<Vec2> image_;
};

inline double triangle_jacobian(const Deformation& def, int t) { return def.jacobian(t); }

/// Sum of J_T * |T| over the region; exact up to rounding since J is constant per triangle.
double integrate_jacobian(const Deformation& def, std::span<const int> region);
double integrate_jacobian(const Deformation& def);

}  // namespace monotone_lab
