#pragma once

#include <functional>
#include <vector>

#include "monotone_lab/deformation.hpp"
#include "monotone_lab/domain.hpp"
#include "monotone_lab/mesh.hpp"

namespace monotone_lab {

/// Boundary data phi restricted to the mesh boundary: source[i] (a boundary loop
/// vertex) goes to target[i] on the boundary of `target_domain`. The map along each
/// boundary edge is the linear interpolant.
struct BoundaryHomeomorphism {
  std::vector<int> source;
  std::vector<Vec2> target;
  PlanarDomain target_domain;
};

struct HomeomorphismCheck {
  /// Every target point within tolerance of the target boundary.
  bool on_target_boundary = false;
  /// Targets advance counterclockwise along the target boundary and wind exactly once.
  bool order_preserving = false;
  /// Every target polygon corner is a target point, so the interpolant traces the
  /// target boundary itself rather than chords of it.
  bool covers_corners = false;
  double max_boundary_distance = 0.0;

  bool valid() const { return on_target_boundary && order_preserving && covers_corners; }
};

HomeomorphismCheck check_homeomorphism(const BoundaryHomeomorphism& phi, double tol = 1e-10);

/// Boundary data obtained by applying `f` to every boundary loop vertex of the mesh.
BoundaryHomeomorphism make_boundary_map(const TriMesh& mesh, const PlanarDomain& target,
                                        const std::function<Vec2(Vec2)>& f);

struct BoundaryTrace {
  BoundaryHomeomorphism candidate;
  HomeomorphismCheck check;
};

/// Restriction of the deformation to the boundary loop, checked against the target polygon.
BoundaryTrace boundary_trace(const Deformation& def, const PlanarDomain& target);

/// Vertex-wise agreement of the deformation's boundary images with phi (tolerance 1e-12).
bool trace_matches(const Deformation& def, const BoundaryHomeomorphism& phi, double tol = 1e-12);

/// Reference-side point mapped by the boundary interpolant to y, for y on the target
/// boundary. Throws DomainError if y is farther than `tol` from the target boundary.
Vec2 boundary_preimage(const TriMesh& mesh, const BoundaryHomeomorphism& phi, Vec2 y, double tol = 1e-9);

}  // namespace monotone_lab
