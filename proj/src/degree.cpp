#include "monotone_lab/degree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "monotone_lab/domain.hpp"
#include "monotone_lab/errors.hpp"
#include "monotone_lab/predicates.hpp"

namespace monotone_lab {
namespace {

constexpr int kBallPolygonSides = 64;

Vec2 offset_off_edge(Vec2 a, Vec2 b, Vec2 y) {
  Vec2 d = b - a;
  if (norm(d) == 0.0) d = {1.0, 0.0};
  return (1e-9 * std::max(1.0, norm(y)) / norm(d)) * perp(d);
}

[[noreturn]] void throw_nongeneric(Vec2 a, Vec2 b, Vec2 y, int t) {
  std::ostringstream msg;
  msg << "query point (" << y.x << ", " << y.y << ") lies on the image of an edge of triangle " << t
      << "; perturb it explicitly";
  throw NonGenericPoint(msg.str(), offset_off_edge(a, b, y));
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double clipped_area(Vec2 a, Vec2 b, Vec2 c, const std::vector<Vec2>& clip) {
  std::vector<Vec2> poly{a, b, c};
  if (cross(b - a, c - a) < 0.0) std::swap(poly[1], poly[2]);
  const std::size_t m = clip.size();
  std::vector<Vec2> next;
  for (std::size_t j = 0; j < m && !poly.empty(); ++j) {
    const Vec2 p = clip[j], q = clip[(j + 1) % m];
    const Vec2 e = q - p;
    next.clear();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 s = poly[i], t = poly[(i + 1) % n];
      const double ds = cross(e, s - p), dt = cross(e, t - p);
      if (ds >= 0.0) next.push_back(s);
      if ((ds >= 0.0) != (dt >= 0.0)) {
        const double lambda = ds / (ds - dt);
        next.push_back(s + lambda * (t - s));
      }
    }
    poly.swap(next);
  }
  return poly.size() < 3 ? 0.0 : shoelace_area(poly);
}

}  // namespace

Region::Region(MeshPtr mesh, std::vector<int> triangles) : mesh_(std::move(mesh)), triangles_(std::move(triangles)) {
  std::sort(triangles_.begin(), triangles_.end());
  triangles_.erase(std::unique(triangles_.begin(), triangles_.end()), triangles_.end());
  if (triangles_.empty()) throw GeometryError("region must contain at least one triangle");
  member_.assign(mesh_->num_triangles(), 0);
  for (int t : triangles_) {
    if (t < 0 || t >= mesh_->num_triangles()) throw GeometryError("region triangle index out of range");
    member_[t] = 1;
  }
  for (int t : triangles_) {
    const Triangle& tri = mesh_->triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const int n = mesh_->neighbors(t)[i];
      if (n < 0 || !member_[n]) boundary_edges_.emplace_back(tri[i], tri[(i + 1) % 3]);
    }
  }
}

Region Region::whole(MeshPtr mesh) {
  std::vector<int> all(mesh->num_triangles());
  std::iota(all.begin(), all.end(), 0);
  return Region(std::move(mesh), std::move(all));
}

bool Region::contains(int t) const { return t >= 0 && t < static_cast<int>(member_.size()) && member_[t]; }

std::vector<std::vector<int>> Region::boundary_loops() const {
  std::unordered_multimap<int, std::size_t> outgoing;
  for (std::size_t e = 0; e < boundary_edges_.size(); ++e) outgoing.emplace(boundary_edges_[e].first, e);
  std::vector<char> used(boundary_edges_.size(), 0);
  std::vector<std::vector<int>> loops;
  for (std::size_t start = 0; start < boundary_edges_.size(); ++start) {
    if (used[start]) continue;
    std::vector<int> loop;
    std::size_t e = start;
    while (!used[e]) {
      used[e] = 1;
      loop.push_back(boundary_edges_[e].first);
      const int head = boundary_edges_[e].second;
      auto [lo, hi] = outgoing.equal_range(head);
      std::size_t next = e;
      for (auto it = lo; it != hi; ++it)
        if (!used[it->second]) {
          next = it->second;
          break;
        }
      if (next == e) break;
      e = next;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

bool Region::touches_mesh_boundary() const {
  for (int t : triangles_)
    for (int v : mesh_->triangles()[t])
      if (mesh_->is_boundary_vertex(v)) return true;
  return false;
}

double distance_to_image_boundary(const Deformation& def, const Region& region, Vec2 y) {
  double best = INFINITY;
  for (const auto& [a, b] : region.boundary_edges()) best = std::min(best, segment_distance(def.image(a), def.image(b), y));
  return best;
}

int degree_winding(const Deformation& def, const Region& region, Vec2 y) {
  const double dist = distance_to_image_boundary(def, region, y);
  if (dist <= kDegreeBoundaryTolerance) {
    std::ostringstream msg;
    msg << "degree undefined: (" << y.x << ", " << y.y << ") is within " << dist << " of the boundary image";
    throw DegreeUndefined(msg.str());
  }
  int wn = 0;
  for (const auto& [ia, ib] : region.boundary_edges()) {
    const Vec2 a = def.image(ia), b = def.image(ib);
    if (a.y <= y.y) {
      if (b.y > y.y && predicates::orient2d(a, b, y) > 0) ++wn;
    } else if (b.y <= y.y && predicates::orient2d(a, b, y) < 0) {
      --wn;
    }
  }
  return wn;
}

int degree_simplex(const Deformation& def, const Region& region, Vec2 y) {
  const double dist = distance_to_image_boundary(def, region, y);
  if (dist <= kDegreeBoundaryTolerance) {
    std::ostringstream msg;
    msg << "degree undefined: (" << y.x << ", " << y.y << ") is within " << dist << " of the boundary image";
    throw DegreeUndefined(msg.str());
  }
  int degree = 0;
  for (int t : region.triangles()) {
    const Triangle& tri = def.mesh().triangles()[t];
    const Vec2 a = def.image(tri[0]), b = def.image(tri[1]), c = def.image(tri[2]);
    const int o = predicates::orient2d(a, b, c);
    if (o == 0) {
      // Degenerate image: a segment. Hitting it is hitting an image edge.
      if (predicates::on_segment(a, b, y)) throw_nongeneric(a, b, y, t);
      if (predicates::on_segment(b, c, y)) throw_nongeneric(b, c, y, t);
      if (predicates::on_segment(c, a, y)) throw_nongeneric(c, a, y, t);
      continue;
    }
    const predicates::TriangleTest test = predicates::classify_in_triangle(a, b, c, y);
    switch (test.side) {
      case predicates::TriangleSide::outside: break;
      case predicates::TriangleSide::interior: degree += o; break;
      case predicates::TriangleSide::edge: {
        const Vec2 p = def.image(tri[test.index]), q = def.image(tri[(test.index + 1) % 3]);
        throw_nongeneric(p, q, y, t);
      }
      case predicates::TriangleSide::vertex: {
        const Vec2 p = def.image(tri[test.index]), q = def.image(tri[(test.index + 1) % 3]);
        throw_nongeneric(p, q, y, t);
      }
    }
  }
  return degree;
}

double image_triangle_distance(const Deformation& def, int t, Vec2 y) {
  const Triangle& tri = def.mesh().triangles()[t];
  const Vec2 a = def.image(tri[0]), b = def.image(tri[1]), c = def.image(tri[2]);
  if (predicates::orient2d(a, b, c) != 0 &&
      predicates::classify_in_triangle(a, b, c, y).side != predicates::TriangleSide::outside)
    return 0.0;
  return std::min({segment_distance(a, b, y), segment_distance(b, c, y), segment_distance(c, a, y)});
}

double default_eps(const Deformation& def) { return 2.0 * def.max_image_edge_length(); }

PreimageComponents preimage_components(const Deformation& def, Vec2 y, double eps) {
  if (!(eps > 0.0)) throw ConfigError("preimage radius eps must be positive");
  const TriMesh& mesh = def.mesh();
  const int nt = mesh.num_triangles();
  std::vector<char> candidate(nt, 0);
  std::vector<int> candidates;
  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = mesh.triangles()[t];
    // Bounding-box rejection before the exact distance.
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (int v : tri) {
      const Vec2 q = def.image(v);
      x0 = std::min(x0, q.x);
      x1 = std::max(x1, q.x);
      y0 = std::min(y0, q.y);
      y1 = std::max(y1, q.y);
    }
    if (y.x < x0 - eps || y.x > x1 + eps || y.y < y0 - eps || y.y > y1 + eps) continue;
    if (image_triangle_distance(def, t, y) < eps) {
      candidate[t] = 1;
      candidates.push_back(t);
    }
  }

  PreimageComponents out{y, eps, {}};
  if (candidates.empty()) return out;
  UnionFind uf(nt);
  for (int t : candidates)
    for (int n : mesh.neighbors(t))
      if (n >= 0 && candidate[n]) uf.unite(t, n);

  std::unordered_map<int, std::size_t> slot;
  for (int t : candidates) {
    const int root = uf.find(t);
    auto it = slot.find(root);
    if (it == slot.end()) {
      it = slot.emplace(root, out.components.size()).first;
      out.components.emplace_back();
    }
    out.components[it->second].triangles.push_back(t);
  }
  for (PreimageComponent& comp : out.components) {
    const Region region(def.mesh_ptr(), comp.triangles);
    comp.touches_boundary = region.touches_mesh_boundary();
    if (!comp.touches_boundary && distance_to_image_boundary(def, region, y) > kDegreeBoundaryTolerance)
      comp.degree = degree_winding(def, region, y);
  }
  return out;
}

JacobianIdentityReport degree_jacobian_identity(const Deformation& def, Vec2 y, double eps) {
  JacobianIdentityReport report;
  report.y = y;
  report.eps = eps;
  std::vector<Vec2> ball;
  ball.reserve(kBallPolygonSides);
  for (int j = 0; j < kBallPolygonSides; ++j) {
    const double t = 2.0 * std::numbers::pi * j / kBallPolygonSides;
    ball.push_back({y.x + eps * std::cos(t), y.y + eps * std::sin(t)});
  }
  const double ball_area = 0.5 * kBallPolygonSides * eps * eps * std::sin(2.0 * std::numbers::pi / kBallPolygonSides);
  report.polygon_error = 1.0 - ball_area / (std::numbers::pi * eps * eps);

  const PreimageComponents pc = preimage_components(def, y, eps);
  for (std::size_t i = 0; i < pc.components.size(); ++i) {
    const PreimageComponent& comp = pc.components[i];
    if (!comp.degree) {
      ++report.skipped;
      continue;
    }
    // J_T * |T cap f^{-1}(V)| = sgn(J_T) * |f(T) cap V| for an affine piece.
    double integral = 0.0;
    for (int t : comp.triangles) {
      const Triangle& tri = def.mesh().triangles()[t];
      const Vec2 a = def.image(tri[0]), b = def.image(tri[1]), c = def.image(tri[2]);
      const int o = predicates::orient2d(a, b, c);
      if (o == 0) continue;
      integral += o * clipped_area(a, b, c, ball);
    }
    JacobianIdentityEntry entry;
    entry.component = i;
    entry.degree = *comp.degree;
    entry.jacobian_average = integral / ball_area;
    entry.gap = std::abs(entry.degree - entry.jacobian_average);
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace monotone_lab
