#include "monotone_lab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "monotone_lab/errors.hpp"
#include "monotone_lab/predicates.hpp"

namespace monotone_lab {
namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

[[noreturn]] void fail(const std::string& what) { throw GeometryError("invalid mesh: " + what); }

}  // namespace

TriMesh::TriMesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles, std::vector<int> boundary)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), boundary_(std::move(boundary)) {
  const int nv = num_vertices();
  const int nt = num_triangles();
  if (nt == 0) fail("no triangles");

  vertex_triangles_.assign(nv, {});
  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = triangles_[t];
    for (int v : tri)
      if (v < 0 || v >= nv) fail("triangle " + std::to_string(t) + " references vertex out of range");
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) fail("triangle " + std::to_string(t) + " repeats a vertex");
    if (predicates::orient2d(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]) <= 0)
      fail("triangle " + std::to_string(t) + " has non-positive signed area");
    for (int v : tri) vertex_triangles_[v].push_back(t);
  }
  for (int v = 0; v < nv; ++v)
    if (vertex_triangles_[v].empty()) fail("vertex " + std::to_string(v) + " belongs to no triangle");

  // Edge-to-edge conformity and neighbor table.
  struct EdgeUse {
    int t0 = -1, i0 = -1, from0 = -1;
    int t1 = -1, i1 = -1;
  };
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(static_cast<std::size_t>(nt) * 2);
  neighbors_.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) {
      const int a = triangles_[t][i], b = triangles_[t][(i + 1) % 3];
      EdgeUse& use = edges[edge_key(a, b)];
      if (use.t0 < 0) {
        use.t0 = t;
        use.i0 = i;
        use.from0 = a;
      } else if (use.t1 < 0) {
        if (use.from0 == a) fail("edge " + std::to_string(a) + "-" + std::to_string(b) + " used twice in the same direction");
        use.t1 = t;
        use.i1 = i;
        neighbors_[t][i] = use.t0;
        neighbors_[use.t0][use.i0] = t;
      } else {
        fail("edge " + std::to_string(a) + "-" + std::to_string(b) + " shared by more than two triangles");
      }
    }
  }

  // Boundary loop must be exactly the set of unshared directed edges.
  const int nb = static_cast<int>(boundary_.size());
  if (nb < 3) fail("boundary loop has fewer than 3 vertices");
  boundary_position_.assign(nv, -1);
  for (int i = 0; i < nb; ++i) {
    const int v = boundary_[i];
    if (v < 0 || v >= nv) fail("boundary vertex out of range");
    if (boundary_position_[v] >= 0) fail("boundary loop visits vertex " + std::to_string(v) + " twice");
    boundary_position_[v] = i;
  }
  int unshared = 0;
  for (const auto& [key, use] : edges) {
    if (use.t1 >= 0) continue;
    ++unshared;
    const Triangle& tri = triangles_[use.t0];
    const int a = tri[use.i0], b = tri[(use.i0 + 1) % 3];
    const int pa = boundary_position_[a];
    if (pa < 0 || boundary_[(pa + 1) % nb] != b)
      fail("unshared edge " + std::to_string(a) + "-" + std::to_string(b) + " is not on the boundary loop");
  }
  if (unshared != nb) fail("boundary loop does not trace the mesh boundary");

  std::vector<Vec2> loop;
  loop.reserve(nb);
  for (int v : boundary_) loop.push_back(vertices_[v]);
  const double enclosed = shoelace_area(loop);
  const double covered = total_area();
  if (std::abs(enclosed - covered) > 1e-9 * std::max(1.0, std::abs(enclosed)))
    fail("triangles overlap: covered area " + std::to_string(covered) + " vs enclosed " + std::to_string(enclosed));

  bbox_ = {vertices_[0], vertices_[0]};
  for (const Vec2& v : vertices_) {
    bbox_.lo.x = std::min(bbox_.lo.x, v.x);
    bbox_.lo.y = std::min(bbox_.lo.y, v.y);
    bbox_.hi.x = std::max(bbox_.hi.x, v.x);
    bbox_.hi.y = std::max(bbox_.hi.y, v.y);
  }
  build_grid();
}

double TriMesh::area(int t) const {
  const Triangle& tri = triangles_[t];
  return 0.5 * cross(vertices_[tri[1]] - vertices_[tri[0]], vertices_[tri[2]] - vertices_[tri[0]]);
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (int t = 0; t < num_triangles(); ++t) sum += area(t);
  return sum;
}

double TriMesh::max_edge_length() const {
  double best = 0.0;
  for (const Triangle& tri : triangles_)
    for (int i = 0; i < 3; ++i) best = std::max(best, distance(vertices_[tri[i]], vertices_[tri[(i + 1) % 3]]));
  return best;
}

std::vector<int> TriMesh::vertex_neighbors(int v) const {
  std::vector<int> out;
  for (int t : vertex_triangles_[v])
    for (int w : triangles_[t])
      if (w != v) out.push_back(w);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PlanarDomain TriMesh::boundary_polygon() const {
  std::vector<Vec2> loop;
  loop.reserve(boundary_.size());
  for (int v : boundary_) loop.push_back(vertices_[v]);
  return PlanarDomain(std::move(loop));
}

void TriMesh::build_grid() {
  const double w = std::max(bbox_.width(), 1e-300);
  const double h = std::max(bbox_.height(), 1e-300);
  const double cells = std::max(1.0, static_cast<double>(num_triangles()));
  grid_nx_ = std::clamp(static_cast<int>(std::ceil(std::sqrt(cells * w / h))), 1, 4096);
  grid_ny_ = std::clamp(static_cast<int>(std::ceil(cells / grid_nx_)), 1, 4096);
  cell_w_ = w / grid_nx_;
  cell_h_ = h / grid_ny_;
  grid_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_, {});
  auto cell_x = [&](double x) { return std::clamp(static_cast<int>((x - bbox_.lo.x) / cell_w_), 0, grid_nx_ - 1); };
  auto cell_y = [&](double y) { return std::clamp(static_cast<int>((y - bbox_.lo.y) / cell_h_), 0, grid_ny_ - 1); };
  for (int t = 0; t < num_triangles(); ++t) {
    const Triangle& tri = triangles_[t];
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (int v : tri) {
      x0 = std::min(x0, vertices_[v].x);
      x1 = std::max(x1, vertices_[v].x);
      y0 = std::min(y0, vertices_[v].y);
      y1 = std::max(y1, vertices_[v].y);
    }
    // One cell of slack covers points that round into a neighboring cell.
    const int cx0 = std::max(cell_x(x0) - 1, 0), cx1 = std::min(cell_x(x1) + 1, grid_nx_ - 1);
    const int cy0 = std::max(cell_y(y0) - 1, 0), cy1 = std::min(cell_y(y1) + 1, grid_ny_ - 1);
    for (int j = cy0; j <= cy1; ++j)
      for (int i = cx0; i <= cx1; ++i) grid_[static_cast<std::size_t>(j) * grid_nx_ + i].push_back(t);
  }
}

Location TriMesh::locate(Vec2 p) const {
  if (p.x < bbox_.lo.x || p.x > bbox_.hi.x || p.y < bbox_.lo.y || p.y > bbox_.hi.y) return OutsideLocation{};
  const int cx = std::clamp(static_cast<int>((p.x - bbox_.lo.x) / cell_w_), 0, grid_nx_ - 1);
  const int cy = std::clamp(static_cast<int>((p.y - bbox_.lo.y) / cell_h_), 0, grid_ny_ - 1);
  for (int t : grid_[static_cast<std::size_t>(cy) * grid_nx_ + cx]) {
    const Triangle& tri = triangles_[t];
    const Vec2 a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
    const predicates::TriangleTest test = predicates::classify_in_triangle(a, b, c, p);
    if (test.side == predicates::TriangleSide::outside) continue;

    std::array<double, 3> bary{};
    if (test.side == predicates::TriangleSide::vertex) {
      bary[test.index] = 1.0;
    } else {
      const double total = predicates::orient2d_fast(a, b, c);
      bary = {predicates::orient2d_fast(p, b, c) / total, predicates::orient2d_fast(a, p, c) / total,
              predicates::orient2d_fast(a, b, p) / total};
      if (test.side == predicates::TriangleSide::edge) bary[(test.index + 2) % 3] = 0.0;
      for (double& l : bary) l = std::max(l, 0.0);
      const double s = bary[0] + bary[1] + bary[2];
      for (double& l : bary) l /= s;
    }

    if (test.side == predicates::TriangleSide::vertex) {
      const int v = tri[test.index];
      if (boundary_position_[v] >= 0) return BoundaryLocation{boundary_position_[v], 0.0, t, bary};
    } else if (test.side == predicates::TriangleSide::edge && neighbors_[t][test.index] < 0) {
      const int va = tri[test.index];
      const int vb = tri[(test.index + 1) % 3];
      const double len2 = norm2(vertices_[vb] - vertices_[va]);
      const double param = std::clamp(dot(p - vertices_[va], vertices_[vb] - vertices_[va]) / len2, 0.0, 1.0);
      return BoundaryLocation{boundary_position_[va], param, t, bary};
    }
    return InteriorLocation{t, bary};
  }
  return OutsideLocation{};
}

}  // namespace monotone_lab
