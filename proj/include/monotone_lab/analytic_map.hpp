#pragma once

#include <string>
#include <vector>

#include "monotone_lab/deformation.hpp"
#include "monotone_lab/domain.hpp"
#include "monotone_lab/mesh.hpp"
#include "monotone_lab/vec2.hpp"

namespace monotone_lab {

enum class AnalyticKind { identity, affine, disk_bubbles, radial_collapse, rectangle_pinch };

/// One bubble of the disk-bubbles map: center omega_k = 1 - 1/k, inner scale s_k = 10^-k,
/// support radius 2 s_k.
struct Bubble {
  int k = 0;
  double center = 0.0;
  double scale = 0.0;
  double log_scale = 0.0;
};

/// Closed-form maps with closed-form derivatives.
///
/// disk-bubbles (unit disk): identity outside the bubbles; on bubble k with
/// z = omega + r e^{i theta},
///   omega + 2 (r - s) e^{i theta}          for s <= r <= 2s,
///   omega + c log(s / r) / k^4             for s e^{-k^4} < r < s,
///   omega + 2                              for r <= s e^{-k^4}.
/// c = 2 makes the profile continuous; c = 1 is the literal variant with a jump.
///
/// radial-collapse (unit disk): 2 (r - 1/2) e^{i theta} for r >= 1/2, 1 - 2r inside.
///
/// rectangle-pinch on [-1, 1] x [-2, 2]:
///   (x1, |x1| x2)                                           for |x2| <= 1,
///   (x1, [2 (|x2| - 1) + (2 - |x2|) |x1|] sgn(x2))          for 1 < |x2| <= 2.
class AnalyticMap {
 public:
  static AnalyticMap identity();
  static AnalyticMap affine(const Mat2& linear, Vec2 offset);
  static AnalyticMap disk_bubbles(int truncation = 5, double profile = 2.0);
  static AnalyticMap radial_collapse();
  static AnalyticMap rectangle_pinch();
  /// Looks up by CLI name: identity, disk-bubbles, radial-collapse, pinch-H
  /// (alias rectangle-pinch). Affine maps are built with affine().
  static AnalyticMap by_name(const std::string& name, int truncation = 5, double profile = 2.0);

  AnalyticKind kind() const { return kind_; }
  std::string name() const;
  int truncation() const { return truncation_; }
  double profile() const { return profile_; }
  const std::vector<Bubble>& bubbles() const { return bubbles_; }

  bool in_domain(Vec2 p) const;
  /// Throws DomainError outside the map's domain.
  Vec2 eval(Vec2 p) const;
  Mat2 derivative(Vec2 p) const;
  double jacobian(Vec2 p) const { return derivative(p).det(); }

  /// Polygonal domain the map is meant to be sampled on (unit disk maps use a
  /// regular polygon with `segments` sides). Identity and affine use the unit square.
  PlanarDomain natural_domain(int segments = 128) const;
  /// A mesh of natural_domain suited to the map: the collapse circle r = 1/2 is
  /// a mesh ring, bubble centers and radii s_k, 2 s_k carry vertices, and the
  /// pinch lines x1 = 0, |x2| = 1 are grid lines.
  TriMesh natural_mesh(double h, int segments = 128) const;

 private:
  AnalyticKind kind_ = AnalyticKind::identity;
  Mat2 linear_ = Mat2::identity();
  Vec2 offset_{};
  int truncation_ = 0;
  double profile_ = 2.0;
  std::vector<Bubble> bubbles_;
};

/// image[v] = map.eval(vertex v).
Deformation sample_analytic(const AnalyticMap& map, MeshPtr mesh);

}  // namespace monotone_lab
