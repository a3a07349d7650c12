#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "monotone_lab/analytic_map.hpp"
#include "monotone_lab/boundary.hpp"
#include "monotone_lab/deformation.hpp"
#include "monotone_lab/domain.hpp"
#include "monotone_lab/mesh.hpp"
#include "monotone_lab/triangulate.hpp"

namespace support {

using namespace monotone_lab;
using Rational = boost::multiprecision::cpp_rational;

inline MeshPtr share(TriMesh m) { return std::make_shared<const TriMesh>(std::move(m)); }

inline MeshPtr square_mesh(double h) { return share(triangulate(PlanarDomain::unit_square(), h)); }

// ---- oracles -------------------------------------------------------------

/// Exact orientation sign in rational arithmetic.
inline int oracle_orient(Vec2 a, Vec2 b, Vec2 c) {
  const Rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  const Rational d = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

/// Exact incircle sign in rational arithmetic.
inline int oracle_incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const Rational adx = Rational(a.x) - Rational(d.x), ady = Rational(a.y) - Rational(d.y);
  const Rational bdx = Rational(b.x) - Rational(d.x), bdy = Rational(b.y) - Rational(d.y);
  const Rational cdx = Rational(c.x) - Rational(d.x), cdy = Rational(c.y) - Rational(d.y);
  const Rational det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
                       (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                       (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

/// Crossing-number point-in-polygon test (strict interior, ignores boundary hits).
inline bool oracle_inside(const std::vector<Vec2>& poly, Vec2 p) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

/// Winding number by summing turning angles.
inline int oracle_winding(const std::vector<Vec2>& loop, Vec2 p) {
  double total = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = loop[i] - p, b = loop[(i + 1) % n] - p;
    total += std::atan2(cross(a, b), dot(a, b));
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

/// Shoelace area in long double.
inline long double oracle_area(const std::vector<Vec2>& loop) {
  long double s = 0.0L;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = loop[i], b = loop[(i + 1) % n];
    s += static_cast<long double>(a.x) * b.y - static_cast<long double>(b.x) * a.y;
  }
  return 0.5L * s;
}

// ---- constructed maps ----------------------------------------------------

/// Structured nx x ny grid on [x0, x1] x [y0, y1], diagonals alternating.
inline MeshPtr grid_mesh(double x0, double x1, double y0, double y1, int nx, int ny) {
  std::vector<Vec2> v;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) v.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
  std::vector<Triangle> t;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        t.push_back({a, b, c});
        t.push_back({a, c, d});
      } else {
        t.push_back({a, b, d});
        t.push_back({b, c, d});
      }
    }
  }
  std::vector<int> b;
  for (int i = 0; i < nx; ++i) b.push_back(id(i, 0));
  for (int j = 0; j < ny; ++j) b.push_back(id(nx, j));
  for (int i = nx; i > 0; --i) b.push_back(id(i, ny));
  for (int j = ny; j > 0; --j) b.push_back(id(0, j));
  return share(TriMesh(std::move(v), std::move(t), std::move(b)));
}

/// A strip wound once around an annulus plus an extra angle `overlap`, so the first
/// `overlap_cells` columns land exactly on the last ones. J > 0 on every triangle.
struct SpiralMap {
  int columns = 0;
  int overlap_cells = 0;
  double inner = 1.0;
  double outer = 1.5;
  double overlap = 0.0;
  Deformation def;

  /// Exact image area counted with multiplicity (sum of image triangle areas).
  double covered_with_multiplicity() const {
    double s = 0.0;
    for (int t = 0; t < def.mesh().num_triangles(); ++t) s += def.image_signed_area(t);
    return s;
  }
  /// Exact area of the doubly covered region (the first overlap_cells columns).
  double double_area() const {
    double s = 0.0;
    for (int t = 0; t < def.mesh().num_triangles(); ++t)
      if ((t / 2) % columns < overlap_cells) s += def.image_signed_area(t);
    return s;
  }
};

inline SpiralMap spiral_map(int columns = 96, int overlap_cells = 16, int rows = 6) {
  const double dtheta = 2.0 * std::numbers::pi / (columns - overlap_cells);
  auto mesh = grid_mesh(0.0, static_cast<double>(columns), 0.0, 1.0, columns, rows);
  std::vector<Vec2> img;
  for (Vec2 p : mesh->vertices()) {
    const double th = p.x * dtheta;
    const double r = 1.5 - 0.5 * p.y;
    img.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return {columns, overlap_cells, 1.0, 1.5, overlap_cells * dtheta, Deformation(mesh, std::move(img))};
}

/// Regular polygon of the given radius about the origin.
inline PlanarDomain disk_polygon(double radius, int segments) {
  std::vector<Vec2> v;
  for (int i = 0; i < segments; ++i) {
    const double t = 2.0 * std::numbers::pi * i / segments;
    v.push_back({radius * std::cos(t), radius * std::sin(t)});
  }
  return PlanarDomain(std::move(v));
}

/// Square boundary reparameterised by s -> s + a s (1 - s) on each side.
inline Vec2 square_reparam(Vec2 p, double a) {
  auto g = [a](double s) { return s + a * s * (1.0 - s); };
  constexpr double e = 1e-14;
  if (std::abs(p.y) < e) return {g(p.x), 0.0};
  if (std::abs(p.x - 1.0) < e) return {1.0, g(p.y)};
  if (std::abs(p.y - 1.0) < e) return {1.0 - g(1.0 - p.x), 1.0};
  if (std::abs(p.x) < e) return {0.0, 1.0 - g(1.0 - p.y)};
  return p;
}

/// Interior vertices moved by uniform noise of size `scale` * h, halved until all J_T > 0.
inline Deformation random_feasible(const Deformation& base, std::mt19937_64& rng, double scale) {
  const TriMesh& mesh = base.mesh();
  const double h = mesh.max_edge_length();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> noise(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.is_boundary_vertex(v)) noise[v] = {u(rng), u(rng)};
  double s = scale * h;
  for (;;) {
    std::vector<Vec2> img = base.image();
    for (int v = 0; v < mesh.num_vertices(); ++v) img[v] += s * noise[v];
    Deformation d(base.mesh_ptr(), std::move(img));
    if (d.min_jacobian() > 0.0) return d;
    s *= 0.5;
  }
}

}  // namespace support
