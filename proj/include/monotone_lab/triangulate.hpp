#pragma once

#include <vector>

#include "monotone_lab/domain.hpp"
#include "monotone_lab/mesh.hpp"

namespace monotone_lab {

struct ExclusionDisc {
  Vec2 center;
  double radius = 0.0;
};

struct TriangulateOptions {
  /// Extra vertices, strictly inside the domain, kept verbatim.
  std::vector<Vec2> required_points;
  /// Background grid points inside these discs are dropped (used around clusters
  /// of required points).
  std::vector<ExclusionDisc> exclusions;
};

/// Constrained Delaunay triangulation of the polygon. Edges are subdivided to
/// length <= h, an axis-aligned background grid of spacing <= h fills the
/// interior, and over-long interior edges are split until every edge is <= 2h.
TriMesh triangulate(const PlanarDomain& domain, double h, const TriangulateOptions& options = {});

/// Structured polar mesh of PlanarDomain::unit_disk(segments): concentric regular
/// rings with spacing <= h, every radius in `ring_radii` (in (0, 1)) present exactly
/// as a ring, a center vertex, and rings zipped together by angle.
TriMesh triangulate_disk(int segments, double h, const std::vector<double>& ring_radii = {});

}  // namespace monotone_lab
