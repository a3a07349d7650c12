#pragma once

#include "monotone_lab/vec2.hpp"

namespace monotone_lab::predicates {

// Exact-sign geometric predicates. A floating-point filter with a static error
// bound answers most queries; undecided cases are re-evaluated in exact
// rational arithmetic, so the returned sign is always the true sign for the
// given double inputs.

/// Sign of the signed area of (a, b, c): +1 counterclockwise, -1 clockwise, 0 collinear.
int orient2d(Vec2 a, Vec2 b, Vec2 c);

/// +1 if d is strictly inside the circumcircle of (a, b, c), -1 outside, 0 cocircular.
/// (a, b, c) must be counterclockwise.
int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Twice the signed area of (a, b, c) in plain double arithmetic.
inline double orient2d_fast(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

/// p lies on the closed segment [a, b] (exact).
bool on_segment(Vec2 a, Vec2 b, Vec2 p);

/// Closed segments [a, b] and [c, d] intersect (exact).
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

enum class TriangleSide { outside, interior, edge, vertex };

struct TriangleTest {
  TriangleSide side = TriangleSide::outside;
  /// For edge: index i of the edge (v[i], v[i+1]). For vertex: the vertex index.
  int index = -1;
};

/// Classifies p against the non-degenerate triangle (a, b, c) of either orientation.
TriangleTest classify_in_triangle(Vec2 a, Vec2 b, Vec2 c, Vec2 p);

}  // namespace monotone_lab::predicates
