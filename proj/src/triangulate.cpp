#include "monotone_lab/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "monotone_lab/errors.hpp"
#include "monotone_lab/predicates.hpp"

namespace monotone_lab {
namespace {

using predicates::incircle;
using predicates::orient2d;

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

// Incremental Bowyer-Watson triangulation with constraint recovery by cavity
// retriangulation. Vertices 0..2 form an enclosing super-triangle.
class ConstrainedDelaunay {
 public:
  explicit ConstrainedDelaunay(BBox box) {
    const Vec2 c{0.5 * (box.lo.x + box.hi.x), 0.5 * (box.lo.y + box.hi.y)};
    const double r = 64.0 * std::max({box.width(), box.height(), 1e-6});
    pts_ = {{c.x - 2.0 * r, c.y - r}, {c.x + 2.0 * r, c.y - r}, {c.x, c.y + 2.0 * r}};
    tri_.push_back({0, 1, 2});
    nbr_.push_back({-1, -1, -1});
    alive_.push_back(1);
    vt_ = {0, 0, 0};
  }

  int insert(Vec2 p) {
    const int t = locate(p);
    for (int v : tri_[t])
      if (pts_[v] == p) return v;

    const int pi = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vt_.push_back(-1);

    // Cavity: triangles whose circumcircle strictly contains p, grown from t.
    std::vector<int> cavity{t};
    mark_.resize(tri_.size(), 0);
    mark_[t] = 1;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const int c = cavity[k];
      for (int i = 0; i < 3; ++i) {
        const int n = nbr_[c][i];
        if (n < 0 || mark_[n]) continue;
        const Triangle& tn = tri_[n];
        if (incircle(pts_[tn[0]], pts_[tn[1]], pts_[tn[2]], p) > 0) {
          mark_[n] = 1;
          cavity.push_back(n);
        }
      }
    }

    struct Rim {
      int a, b, outer;
    };
    std::vector<Rim> rim;
    for (int c : cavity)
      for (int i = 0; i < 3; ++i) {
        const int n = nbr_[c][i];
        if (n < 0 || !mark_[n]) rim.push_back({tri_[c][i], tri_[c][(i + 1) % 3], n});
      }
    for (int c : cavity) {
      mark_[c] = 0;
      alive_[c] = 0;
      free_.push_back(c);
    }

    std::unordered_map<int, int> starts_at;
    std::vector<int> created;
    created.reserve(rim.size());
    for (const Rim& e : rim) {
      const int nt = allocate({e.a, e.b, pi});
      created.push_back(nt);
      starts_at[e.a] = nt;
      nbr_[nt][0] = e.outer;
      if (e.outer >= 0) {
        for (int j = 0; j < 3; ++j)
          if (tri_[e.outer][j] == e.b && tri_[e.outer][(j + 1) % 3] == e.a) nbr_[e.outer][j] = nt;
      }
      vt_[e.a] = nt;
      vt_[e.b] = nt;
    }
    for (int nt : created) {
      const int a = tri_[nt][0], b = tri_[nt][1];
      nbr_[nt][1] = starts_at.at(b);
      // The triangle whose rim edge ends at a owns edge (a, p) reversed.
      for (int other : created) {
        if (tri_[other][1] == a) {
          nbr_[nt][2] = other;
          break;
        }
      }
    }
    vt_[pi] = created.front();
    last_ = created.front();
    return pi;
  }

  void insert_constraint(int a, int b) {
    if (a == b) return;
    // Scan the fan around a.
    const int start = vt_[a];
    int t = start;
    int t0 = -1, k0 = -1;
    do {
      const Triangle& tr = tri_[t];
      const int k = index_of(t, a);
      const int u = tr[(k + 1) % 3], w = tr[(k + 2) % 3];
      if (u == b || w == b) {
        constrained_.insert(edge_key(a, b));
        return;
      }
      for (int q : {u, w}) {
        if (q > 2 && orient2d(pts_[a], pts_[q], pts_[b]) == 0 && dot(pts_[q] - pts_[a], pts_[b] - pts_[a]) > 0.0) {
          insert_constraint(a, q);
          insert_constraint(q, b);
          return;
        }
      }
      if (t0 < 0 && orient2d(pts_[a], pts_[u], pts_[b]) > 0 && orient2d(pts_[a], pts_[b], pts_[w]) > 0) {
        t0 = t;
        k0 = k;
      }
      t = nbr_[t][(k + 2) % 3];
    } while (t >= 0 && t != start);
    if (t0 < 0) throw GeometryError("constraint recovery failed: no triangle around vertex crosses the segment");

    std::vector<int> crossed{t0};
    std::vector<int> left{tri_[t0][(k0 + 2) % 3]};
    std::vector<int> right{tri_[t0][(k0 + 1) % 3]};
    int L = left.back(), R = right.back();
    int cur = t0;
    while (true) {
      const int j = edge_index(cur, R, L);
      const int next = nbr_[cur][j];
      if (next < 0) throw GeometryError("constraint recovery walked off the triangulation");
      crossed.push_back(next);
      const int v = third_vertex(next, L, R);
      if (v == b) break;
      const int o = orient2d(pts_[a], pts_[b], pts_[v]);
      if (o == 0) {
        // Vertex on the segment: split and recover both halves.
        insert_constraint(a, v);
        insert_constraint(v, b);
        return;
      }
      if (o > 0) {
        left.push_back(v);
        L = v;
      } else {
        right.push_back(v);
        R = v;
      }
      cur = next;
    }

    for (int c : crossed) {
      alive_[c] = 0;
      free_.push_back(c);
    }
    triangulate_pseudo_polygon(a, b, left);
    std::reverse(right.begin(), right.end());
    triangulate_pseudo_polygon(b, a, right);
    rebuild_adjacency();
    constrained_.insert(edge_key(a, b));
  }

  /// Triangles inside the constraint loop (not reachable from the super-triangle
  /// without crossing a constrained edge).
  std::vector<int> interior_triangles() const {
    std::vector<char> outside(tri_.size(), 0);
    std::vector<int> stack;
    for (std::size_t t = 0; t < tri_.size(); ++t) {
      if (!alive_[t]) continue;
      const Triangle& tr = tri_[t];
      if (tr[0] < 3 || tr[1] < 3 || tr[2] < 3) {
        outside[t] = 1;
        stack.push_back(static_cast<int>(t));
      }
    }
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int i = 0; i < 3; ++i) {
        const int n = nbr_[t][i];
        if (n < 0 || outside[n]) continue;
        if (constrained_.count(edge_key(tri_[t][i], tri_[t][(i + 1) % 3]))) continue;
        outside[n] = 1;
        stack.push_back(n);
      }
    }
    std::vector<int> inside;
    for (std::size_t t = 0; t < tri_.size(); ++t)
      if (alive_[t] && !outside[t]) inside.push_back(static_cast<int>(t));
    return inside;
  }

  const std::vector<Vec2>& points() const { return pts_; }
  const Triangle& triangle(int t) const { return tri_[t]; }

 private:
  int allocate(Triangle tr) {
    if (!free_.empty()) {
      const int t = free_.back();
      free_.pop_back();
      tri_[t] = tr;
      nbr_[t] = {-1, -1, -1};
      alive_[t] = 1;
      return t;
    }
    tri_.push_back(tr);
    nbr_.push_back({-1, -1, -1});
    alive_.push_back(1);
    mark_.push_back(0);
    return static_cast<int>(tri_.size()) - 1;
  }

  int locate(Vec2 p) {
    int t = (last_ >= 0 && last_ < static_cast<int>(tri_.size()) && alive_[last_]) ? last_ : first_alive();
    std::size_t steps = 0;
    // Visibility walk; the rotating start edge prevents cycling.
    while (true) {
      bool moved = false;
      const int offset = static_cast<int>(steps % 3);
      for (int s = 0; s < 3; ++s) {
        const int i = (s + offset) % 3;
        const Triangle& tr = tri_[t];
        if (orient2d(pts_[tr[i]], pts_[tr[(i + 1) % 3]], p) < 0) {
          const int n = nbr_[t][i];
          if (n < 0) throw GeometryError("point outside the enclosing triangle");
          t = n;
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      if (++steps > 4 * tri_.size() + 64) throw GeometryError("point location did not terminate");
    }
  }

  int first_alive() const {
    for (std::size_t t = 0; t < alive_.size(); ++t)
      if (alive_[t]) return static_cast<int>(t);
    throw GeometryError("empty triangulation");
  }

  int index_of(int t, int v) const {
    for (int k = 0; k < 3; ++k)
      if (tri_[t][k] == v) return k;
    throw GeometryError("vertex not in triangle");
  }

  int edge_index(int t, int from, int to) const {
    for (int j = 0; j < 3; ++j)
      if (tri_[t][j] == from && tri_[t][(j + 1) % 3] == to) return j;
    throw GeometryError("edge not in triangle");
  }

  int third_vertex(int t, int x, int y) const {
    for (int v : tri_[t])
      if (v != x && v != y) return v;
    throw GeometryError("degenerate triangle");
  }

  // Chain lies strictly left of a->b, ordered along the polygon from a to b.
  void triangulate_pseudo_polygon(int a, int b, const std::vector<int>& chain) {
    if (chain.empty()) return;
    std::size_t c = 0;
    for (std::size_t i = 1; i < chain.size(); ++i)
      if (incircle(pts_[a], pts_[b], pts_[chain[c]], pts_[chain[i]]) > 0) c = i;
    allocate({a, b, chain[c]});
    triangulate_pseudo_polygon(a, chain[c], std::vector<int>(chain.begin(), chain.begin() + c));
    triangulate_pseudo_polygon(chain[c], b, std::vector<int>(chain.begin() + c + 1, chain.end()));
  }

  void rebuild_adjacency() {
    std::unordered_map<std::uint64_t, std::pair<int, int>> first;
    for (std::size_t t = 0; t < tri_.size(); ++t) {
      if (!alive_[t]) continue;
      nbr_[t] = {-1, -1, -1};
    }
    for (std::size_t t = 0; t < tri_.size(); ++t) {
      if (!alive_[t]) continue;
      for (int i = 0; i < 3; ++i) {
        const std::uint64_t key = edge_key(tri_[t][i], tri_[t][(i + 1) % 3]);
        auto it = first.find(key);
        if (it == first.end()) {
          first.emplace(key, std::make_pair(static_cast<int>(t), i));
        } else {
          nbr_[t][i] = it->second.first;
          nbr_[it->second.first][it->second.second] = static_cast<int>(t);
        }
      }
      for (int v : tri_[t]) vt_[v] = static_cast<int>(t);
    }
    last_ = first_alive();
  }

  std::vector<Vec2> pts_;
  std::vector<Triangle> tri_;
  std::vector<std::array<int, 3>> nbr_;
  std::vector<char> alive_;
  std::vector<char> mark_;
  std::vector<int> free_;
  std::vector<int> vt_;
  std::unordered_set<std::uint64_t> constrained_;
  int last_ = 0;
};

struct Assembled {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<int> boundary;
};

Assembled build_cdt(const PlanarDomain& domain, const std::vector<Vec2>& boundary_pts,
                    const std::vector<Vec2>& interior_pts, double h) {
  ConstrainedDelaunay cdt(domain.bbox());

  std::vector<Vec2> order = interior_pts;
  // Row-snake order keeps the location walks short.
  const BBox box = domain.bbox();
  auto row = [&](Vec2 p) { return static_cast<long>(std::floor((p.y - box.lo.y) / h)); };
  std::stable_sort(order.begin(), order.end(), [&](Vec2 p, Vec2 q) {
    const long rp = row(p), rq = row(q);
    if (rp != rq) return rp < rq;
    return (rp % 2 == 0) ? p.x < q.x : p.x > q.x;
  });

  std::vector<int> boundary_ids;
  boundary_ids.reserve(boundary_pts.size());
  for (Vec2 p : boundary_pts) boundary_ids.push_back(cdt.insert(p));
  for (Vec2 p : order) cdt.insert(p);
  const std::size_t nb = boundary_ids.size();
  for (std::size_t i = 0; i < nb; ++i) cdt.insert_constraint(boundary_ids[i], boundary_ids[(i + 1) % nb]);

  const std::vector<int> inside = cdt.interior_triangles();
  std::vector<int> remap(cdt.points().size(), -1);
  Assembled out;
  // Boundary vertices first, in loop order.
  for (int id : boundary_ids) {
    if (remap[id] >= 0) throw GeometryError("boundary subdivision produced a repeated point");
    remap[id] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(cdt.points()[id]);
    out.boundary.push_back(remap[id]);
  }
  for (int t : inside) {
    Triangle tr = cdt.triangle(t);
    for (int& v : tr) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(cdt.points()[v]);
      }
      v = remap[v];
    }
    out.triangles.push_back(tr);
  }
  return out;
}

}  // namespace

TriMesh triangulate(const PlanarDomain& domain, double h, const TriangulateOptions& options) {
  if (!(h > 0.0)) throw GeometryError("target edge length h must be positive");

  const auto& poly = domain.vertices();
  const std::size_t n = poly.size();
  std::vector<Vec2> boundary_pts;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    const int m = std::max(1, static_cast<int>(std::ceil(distance(a, b) / h - 1e-9)));
    for (int k = 0; k < m; ++k) {
      if (k == 0) {
        boundary_pts.push_back(a);
      } else {
        boundary_pts.push_back({a.x + (b.x - a.x) * k / m, a.y + (b.y - a.y) * k / m});
      }
    }
  }

  for (Vec2 p : options.required_points)
    if (domain.classify(p) != PlanarDomain::Side::inside)
      throw GeometryError("required point is not strictly inside the domain");

  const BBox box = domain.bbox();
  const int nx = std::max(1, static_cast<int>(std::ceil(box.width() / h - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(box.height() / h - 1e-9)));
  const double hx = box.width() / nx, hy = box.height() / ny;
  const double clearance = 0.5 * std::min(hx, hy);
  std::vector<Vec2> interior = options.required_points;
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const Vec2 p{box.lo.x + box.width() * i / nx, box.lo.y + box.height() * j / ny};
      if (domain.classify(p) != PlanarDomain::Side::inside) continue;
      if (domain.distance_to_boundary(p) < clearance) continue;
      bool keep = true;
      for (const ExclusionDisc& d : options.exclusions)
        if (distance(p, d.center) < d.radius) keep = false;
      for (Vec2 q : options.required_points)
        if (distance(p, q) < clearance) keep = false;
      if (keep) interior.push_back(p);
    }
  }

  for (int round = 0;; ++round) {
    Assembled a = build_cdt(domain, boundary_pts, interior, std::min(hx, hy));
    // Split interior edges longer than 2h at their midpoints.
    std::vector<Vec2> extra;
    std::unordered_set<std::uint64_t> seen;
    for (const Triangle& tr : a.triangles) {
      for (int i = 0; i < 3; ++i) {
        const int u = tr[i], v = tr[(i + 1) % 3];
        if (distance(a.vertices[u], a.vertices[v]) <= 2.0 * h) continue;
        if (!seen.insert(edge_key(u, v)).second) continue;
        extra.push_back(0.5 * (a.vertices[u] + a.vertices[v]));
      }
    }
    if (extra.empty()) return TriMesh(std::move(a.vertices), std::move(a.triangles), std::move(a.boundary));
    if (round >= 16) throw GeometryError("edge-length refinement did not converge");
    for (Vec2 p : extra) {
      if (domain.classify(p) == PlanarDomain::Side::inside) {
        interior.push_back(p);
      } else {
        throw GeometryError("over-long boundary edge; subdivision failed");
      }
    }
  }
}

TriMesh triangulate_disk(int segments, double h, const std::vector<double>& ring_radii) {
  if (!(h > 0.0)) throw GeometryError("target edge length h must be positive");
  if (segments < 3) throw GeometryError("disk polygon needs at least 3 segments");

  std::vector<double> breaks{0.0};
  for (double r : ring_radii) {
    if (!(r > 0.0 && r < 1.0)) throw GeometryError("ring radius must lie in (0, 1)");
    breaks.push_back(r);
  }
  breaks.push_back(1.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> radii;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double len = breaks[k + 1] - breaks[k];
    const int m = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
    for (int i = 1; i < m; ++i) radii.push_back(breaks[k] + len * i / m);
    radii.push_back(breaks[k + 1]);
  }

  const PlanarDomain disk = PlanarDomain::unit_disk(segments);
  std::vector<Vec2> vertices{{0.0, 0.0}};
  std::vector<std::pair<int, int>> rings;  // (first index, count)
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const bool outer = (j + 1 == radii.size());
    int count = outer ? segments
                      : std::clamp(static_cast<int>(std::ceil(2.0 * std::numbers::pi * radii[j] / h - 1e-9)), 6, segments);
    if (!rings.empty()) count = std::max(count, rings.back().second);
    rings.push_back({static_cast<int>(vertices.size()), count});
    for (int i = 0; i < count; ++i) {
      if (outer) {
        vertices.push_back(disk.vertices()[i]);
      } else {
        const double t = 2.0 * std::numbers::pi * i / count;
        vertices.push_back(i == 0 ? Vec2{radii[j], 0.0} : Vec2{radii[j] * std::cos(t), radii[j] * std::sin(t)});
      }
    }
  }

  std::vector<Triangle> triangles;
  {
    const auto [first, count] = rings.front();
    for (int i = 0; i < count; ++i) triangles.push_back({0, first + i, first + (i + 1) % count});
  }
  for (std::size_t j = 0; j + 1 < rings.size(); ++j) {
    const auto [fa, na] = rings[j];
    const auto [fb, nb] = rings[j + 1];
    int i = 0, k = 0;
    while (i < na || k < nb) {
      // Compare next angles (i+1)/na and (k+1)/nb exactly.
      const bool advance_outer =
          k < nb && (i >= na || static_cast<long>(k + 1) * na <= static_cast<long>(i + 1) * nb);
      const int ai = fa + i % na;
      const int bk = fb + k % nb;
      if (advance_outer) {
        triangles.push_back({ai, bk, fb + (k + 1) % nb});
        ++k;
      } else {
        triangles.push_back({ai, bk, fa + (i + 1) % na});
        ++i;
      }
    }
  }

  std::vector<int> boundary;
  const auto [fo, no] = rings.back();
  for (int i = 0; i < no; ++i) boundary.push_back(fo + i);
  return TriMesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

}  // namespace monotone_lab
