#include "monotone_lab/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "monotone_lab/errors.hpp"

namespace monotone_lab {

Deformation::Deformation(MeshPtr mesh, std::vector<Vec2> image) : mesh_(std::move(mesh)), image_(std::move(image)) {
  if (!mesh_) throw GeometryError("deformation requires a mesh");
  if (static_cast<int>(image_.size()) != mesh_->num_vertices()) {
    std::ostringstream msg;
    msg << "deformation image has " << image_.size() << " points for " << mesh_->num_vertices() << " vertices";
    throw GeometryError(msg.str());
  }
}

Deformation Deformation::identity(MeshPtr mesh) {
  std::vector<Vec2> image = mesh->vertices();
  return Deformation(std::move(mesh), std::move(image));
}

Mat2 Deformation::derivative(int t) const {
  const Triangle& tri = mesh_->triangles()[t];
  const Mat2 ref = Mat2::from_columns(mesh_->vertex(tri[1]) - mesh_->vertex(tri[0]),
                                      mesh_->vertex(tri[2]) - mesh_->vertex(tri[0]));
  const Mat2 img = Mat2::from_columns(image_[tri[1]] - image_[tri[0]], image_[tri[2]] - image_[tri[0]]);
  return img * ((1.0 / ref.det()) * ref.adjugate());
}

double Deformation::image_signed_area(int t) const {
  const Triangle& tri = mesh_->triangles()[t];
  return 0.5 * cross(image_[tri[1]] - image_[tri[0]], image_[tri[2]] - image_[tri[0]]);
}

double Deformation::jacobian(int t) const { return image_signed_area(t) / mesh_->area(t); }

double Deformation::min_jacobian() const {
  double best = INFINITY;
  for (int t = 0; t < mesh_->num_triangles(); ++t) best = std::min(best, jacobian(t));
  return best;
}

Vec2 Deformation::evaluate(Vec2 p) const {
  const Location loc = mesh_->locate(p);
  auto interpolate = [&](int t, const std::array<double, 3>& bary) {
    const Triangle& tri = mesh_->triangles()[t];
    // Exact node reproduction.
    for (int i = 0; i < 3; ++i)
      if (bary[i] == 1.0) return image_[tri[i]];
    return bary[0] * image_[tri[0]] + bary[1] * image_[tri[1]] + bary[2] * image_[tri[2]];
  };
  if (const auto* in = std::get_if<InteriorLocation>(&loc)) return interpolate(in->triangle, in->bary);
  if (const auto* on = std::get_if<BoundaryLocation>(&loc)) return interpolate(on->triangle, on->bary);
  std::ostringstream msg;
  msg << "point (" << p.x << ", " << p.y << ") is outside the mesh";
  throw DomainError(msg.str());
}

std::vector<Vec2> Deformation::image_boundary() const {
  std::vector<Vec2> loop;
  loop.reserve(mesh_->boundary().size());
  for (int v : mesh_->boundary()) loop.push_back(image_[v]);
  return loop;
}

double Deformation::max_image_edge_length() const {
  double best = 0.0;
  for (const Triangle& tri : mesh_->triangles())
    for (int i = 0; i < 3; ++i) best = std::max(best, distance(image_[tri[i]], image_[tri[(i + 1) % 3]]));
  return best;
}

double integrate_jacobian(const Deformation& def, std::span<const int> region) {
  double sum = 0.0;
  for (int t : region) sum += def.image_signed_area(t);
  return sum;
}

double integrate_jacobian(const Deformation& def) {
  double sum = 0.0;
  for (int t = 0; t < def.mesh().num_triangles(); ++t) sum += def.image_signed_area(t);
  return sum;
}

}  // namespace monotone_lab
