#include "monotone_lab/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "monotone_lab/errors.hpp"

namespace monotone_lab {

HomeomorphismCheck check_homeomorphism(const BoundaryHomeomorphism& phi, double tol) {
  HomeomorphismCheck out;
  const std::size_t n = phi.target.size();
  if (n < 3 || phi.source.size() != n) return out;
  const PlanarDomain& y = phi.target_domain;

  std::vector<double> params(n);
  out.on_target_boundary = true;
  for (std::size_t i = 0; i < n; ++i) {
    out.max_boundary_distance = std::max(out.max_boundary_distance, y.distance_to_boundary(phi.target[i]));
    const auto s = y.boundary_parameter(phi.target[i], tol);
    if (!s) {
      out.on_target_boundary = false;
      return out;
    }
    params[i] = *s;
  }

  const double perimeter = y.perimeter();
  double total = 0.0;
  bool strictly_advancing = true;
  for (std::size_t i = 0; i < n; ++i) {
    double d = params[(i + 1) % n] - params[i];
    if (d < 0.0) d += perimeter;
    if (!(d > 0.0)) strictly_advancing = false;
    total += d;
  }
  out.order_preserving = strictly_advancing && std::abs(total - perimeter) <= 1e-9 * perimeter;

  out.covers_corners = true;
  for (const Vec2& corner : y.vertices()) {
    const bool hit = std::any_of(phi.target.begin(), phi.target.end(),
                                 [&](Vec2 t) { return distance(t, corner) <= tol; });
    if (!hit) out.covers_corners = false;
  }
  return out;
}

BoundaryHomeomorphism make_boundary_map(const TriMesh& mesh, const PlanarDomain& target,
                                        const std::function<Vec2(Vec2)>& f) {
  BoundaryHomeomorphism phi{mesh.boundary(), {}, target};
  phi.target.reserve(mesh.boundary().size());
  for (int v : mesh.boundary()) phi.target.push_back(f(mesh.vertex(v)));
  return phi;
}

BoundaryTrace boundary_trace(const Deformation& def, const PlanarDomain& target) {
  BoundaryHomeomorphism phi{def.mesh().boundary(), def.image_boundary(), target};
  const HomeomorphismCheck check = check_homeomorphism(phi);
  return {std::move(phi), check};
}

bool trace_matches(const Deformation& def, const BoundaryHomeomorphism& phi, double tol) {
  if (phi.source.size() != phi.target.size()) return false;
  for (std::size_t i = 0; i < phi.source.size(); ++i) {
    const int v = phi.source[i];
    if (v < 0 || v >= def.mesh().num_vertices() || !def.mesh().is_boundary_vertex(v)) return false;
    if (distance(def.image(v), phi.target[i]) > tol) return false;
  }
  return phi.source.size() == def.mesh().boundary().size();
}

Vec2 boundary_preimage(const TriMesh& mesh, const BoundaryHomeomorphism& phi, Vec2 y, double tol) {
  const PlanarDomain& dom = phi.target_domain;
  const auto sy = dom.boundary_parameter(y, tol);
  if (!sy) throw DomainError("point is not on the target boundary");
  const std::size_t n = phi.target.size();
  const double perimeter = dom.perimeter();
  for (std::size_t i = 0; i < n; ++i) {
    const auto si = dom.boundary_parameter(phi.target[i], 1e-9);
    const auto sj = dom.boundary_parameter(phi.target[(i + 1) % n], 1e-9);
    if (!si || !sj) continue;
    double span = *sj - *si;
    if (span <= 0.0) span += perimeter;
    double off = *sy - *si;
    if (off < 0.0) off += perimeter;
    if (off <= span) {
      const double lambda = span > 0.0 ? off / span : 0.0;
      const Vec2 a = mesh.vertex(phi.source[i]);
      const Vec2 b = mesh.vertex(phi.source[(i + 1) % n]);
      return a + lambda * (b - a);
    }
  }
  throw DomainError("boundary data does not cover the point");
}

}  // namespace monotone_lab
