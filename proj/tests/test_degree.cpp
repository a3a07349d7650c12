#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "monotone_lab/degree.hpp"
#include "monotone_lab/errors.hpp"
#include "support.hpp"

using namespace monotone_lab;
using namespace support;

namespace {

Deformation scaled(const MeshPtr& m, double s) {
  std::vector<Vec2> img;
  for (Vec2 p : m->vertices()) img.push_back(s * p);
  return Deformation(m, std::move(img));
}

// Smooth random map with J of either sign: identity plus a random low-mode field.
Deformation random_map(const MeshPtr& m, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double c[8];
  for (double& x : c) x = amplitude * u(rng);
  std::vector<Vec2> img;
  for (Vec2 p : m->vertices()) {
    const double s1 = std::sin(3.0 * p.x + 2.0 * p.y), s2 = std::cos(2.0 * p.x - 3.0 * p.y);
    img.push_back({p.x + c[0] * s1 + c[1] * s2 + c[2] * p.x * p.y, p.y + c[3] * s1 + c[4] * s2 + c[5] * p.x * p.x});
  }
  return Deformation(m, std::move(img));
}

}  // namespace

TEST_SUITE("degree") {

TEST_CASE("Region boundary and loops") {
  const MeshPtr m = square_mesh(0.2);
  const Region whole = Region::whole(m);
  CHECK(whole.boundary_edges().size() == m->boundary().size());
  const auto loops = whole.boundary_loops();
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].size() == m->boundary().size());
  CHECK(whole.touches_mesh_boundary());
  CHECK_THROWS(Region(m, {}));
  // Single triangle region.
  const Region one(m, {5, 5});
  CHECK(one.triangles().size() == 1);
  CHECK(one.boundary_edges().size() == 3);
}

TEST_CASE("degree_winding examples") {
  const MeshPtr m = square_mesh(0.1);
  const Deformation id = Deformation::identity(m);
  const Region whole = Region::whole(m);
  CHECK(degree_winding(id, whole, {0.5, 0.5}) == 1);
  CHECK(degree_winding(id, whole, {2.0, 2.0}) == 0);
  CHECK_THROWS_AS(degree_winding(id, whole, {1.0, 0.5}), DegreeUndefined);

  const AnalyticMap H = AnalyticMap::rectangle_pinch();
  const Deformation hd = sample_analytic(H, share(H.natural_mesh(0.1)));
  CHECK(degree_winding(hd, Region::whole(hd.mesh_ptr()), {0.5, 0.25}) == 1);
}

TEST_CASE("degree_simplex examples") {
  const MeshPtr m = square_mesh(0.1);
  const Deformation id = Deformation::identity(m);
  CHECK(degree_simplex(id, Region::whole(m), {0.5031, 0.4987}) == 1);
  // One-triangle region whose image misses y.
  int far = -1;
  for (int t = 0; t < m->num_triangles() && far < 0; ++t)
    if (image_triangle_distance(id, t, {0.9, 0.9}) > 0.3) far = t;
  REQUIRE(far >= 0);
  CHECK(degree_simplex(id, Region(m, {far}), {0.9, 0.9}) == 0);
}

TEST_CASE("non-generic points are refused with a usable offset") {
  const MeshPtr m = square_mesh(0.1);
  const Deformation id = Deformation::identity(m);
  const Region whole = Region::whole(m);
  int interior = -1;
  for (int v = 0; v < m->num_vertices() && interior < 0; ++v)
    if (!m->is_boundary_vertex(v)) interior = v;
  const Vec2 y = m->vertex(interior);
  try {
    degree_simplex(id, whole, y);
    FAIL("expected NonGenericPoint");
  } catch (const NonGenericPoint& e) {
    CHECK(norm(e.suggested_offset()) > 0.0);
    CHECK(norm(e.suggested_offset()) < 1e-6);
    CHECK(degree_simplex(id, whole, y + e.suggested_offset()) == 1);
  }
}

TEST_CASE("cross-validation: winding equals signed simplex count") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-0.3, 1.3);
  int compared = 0, nonzero = 0;
  const MeshPtr m = square_mesh(0.125);
  for (int i = 0; i < 1000; ++i) {
    const Deformation d = random_map(m, rng, 0.6);
    bool nonsingular = true;
    for (int t = 0; t < m->num_triangles(); ++t) nonsingular = nonsingular && d.jacobian(t) != 0.0;
    if (!nonsingular) continue;
    const Vec2 y{u(rng), u(rng)};
    const Region whole = Region::whole(m);
    if (distance_to_image_boundary(d, whole, y) <= kDegreeBoundaryTolerance) continue;
    const int w = degree_winding(d, whole, y);
    try {
      const int s = degree_simplex(d, whole, y);
      CHECK(w == s);
      ++compared;
      nonzero += (w != 0);
    } catch (const NonGenericPoint&) {
    }
  }
  CHECK(compared > 900);
  CHECK(nonzero > 100);
}

TEST_CASE("winding agrees with an angle-sum oracle") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.3, 1.3);
  const MeshPtr m = square_mesh(0.2);
  for (int i = 0; i < 200; ++i) {
    const Deformation d = random_map(m, rng, 0.8);
    const Vec2 y{u(rng), u(rng)};
    const Region whole = Region::whole(m);
    if (distance_to_image_boundary(d, whole, y) < 1e-6) continue;
    CHECK(degree_winding(d, whole, y) == oracle_winding(d.image_boundary(), y));
  }
}

TEST_CASE("additivity over preimage components") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  const MeshPtr m = square_mesh(0.05);
  int tested = 0;
  for (int i = 0; i < 200; ++i) {
    const Deformation d = random_map(m, rng, 0.5);
    const Vec2 y{u(rng), u(rng)};
    const PreimageComponents pc = preimage_components(d, y, 0.05);
    bool ok = !pc.components.empty();
    int sum = 0;
    for (const PreimageComponent& c : pc.components) {
      ok = ok && !c.touches_boundary && c.degree.has_value();
      if (c.degree) sum += *c.degree;
    }
    const Region whole = Region::whole(m);
    if (!ok || distance_to_image_boundary(d, whole, y) <= kDegreeBoundaryTolerance) continue;
    CHECK(sum == degree_winding(d, whole, y));
    ++tested;
  }
  CHECK(tested > 60);
}

TEST_CASE("components are disjoint and cover the candidate set") {
  const AnalyticMap G = AnalyticMap::radial_collapse();
  const Deformation gd = sample_analytic(G, share(G.natural_mesh(0.05)));
  const PreimageComponents pc = preimage_components(gd, {0.5, 0.0}, 0.05);
  std::set<int> seen;
  std::size_t total = 0;
  for (const PreimageComponent& c : pc.components) {
    total += c.triangles.size();
    seen.insert(c.triangles.begin(), c.triangles.end());
  }
  CHECK(seen.size() == total);
  std::size_t candidates = 0;
  for (int t = 0; t < gd.mesh().num_triangles(); ++t)
    if (image_triangle_distance(gd, t, {0.5, 0.0}) < 0.05) ++candidates;
  CHECK(candidates == total);
}

TEST_CASE("boundary dependence: equal boundary images give equal degrees") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  const MeshPtr m = square_mesh(0.1);
  for (int i = 0; i < 30; ++i) {
    const Deformation a = random_map(m, rng, 0.4);
    std::vector<Vec2> img = a.image();
    std::normal_distribution<double> n(0.0, 0.3);
    for (int v = 0; v < m->num_vertices(); ++v)
      if (!m->is_boundary_vertex(v)) img[v] += Vec2{n(rng), n(rng)};
    const Deformation b(m, img);
    const Region whole = Region::whole(m);
    for (int k = 0; k < 10; ++k) {
      const Vec2 y{u(rng), u(rng)};
      if (distance_to_image_boundary(a, whole, y) <= kDegreeBoundaryTolerance) continue;
      CHECK(degree_winding(a, whole, y) == degree_winding(b, whole, y));
    }
  }
}

TEST_CASE("degree is constant along paths avoiding the image boundary") {
  const MeshPtr m = square_mesh(0.1);
  std::mt19937_64 rng(4);
  const Deformation d = random_map(m, rng, 0.1);
  const Region whole = Region::whole(m);
  // Straight path from the centre of the unit square: stays away from f(boundary).
  const Vec2 a{0.45, 0.45}, b{0.55, 0.6};
  const double margin = std::min(distance_to_image_boundary(d, whole, a), distance_to_image_boundary(d, whole, b));
  REQUIRE(margin > 0.1);
  const int deg = degree_winding(d, whole, a);
  for (int i = 0; i <= 100; ++i) CHECK(degree_winding(d, whole, a + (i / 100.0) * (b - a)) == deg);
}

TEST_CASE("preimage_components examples") {
  const MeshPtr m = square_mesh(0.1);
  const PreimageComponents id = preimage_components(Deformation::identity(m), {0.5, 0.5}, 0.1);
  REQUIRE(id.components.size() == 1);
  CHECK_FALSE(id.components[0].touches_boundary);
  REQUIRE(id.components[0].degree);
  CHECK(*id.components[0].degree == 1);

  const AnalyticMap G = AnalyticMap::radial_collapse();
  const Deformation gd = sample_analytic(G, share(G.natural_mesh(0.05)));
  const PreimageComponents rc = preimage_components(gd, {0.5, 0.0}, 0.05);
  REQUIRE(rc.components.size() == 2);
  // One component is an annulus around r = 1/4, the other a patch near (0.75, 0).
  auto centroid_radius = [&](const PreimageComponent& c) {
    double r = 0.0;
    for (int t : c.triangles)
      for (int v : gd.mesh().triangles()[t]) r += norm(gd.mesh().vertex(v)) / (3.0 * c.triangles.size());
    return r;
  };
  std::vector<double> radii = {centroid_radius(rc.components[0]), centroid_radius(rc.components[1])};
  std::sort(radii.begin(), radii.end());
  CHECK(std::abs(radii[0] - 0.25) < 0.05);
  CHECK(std::abs(radii[1] - 0.75) < 0.05);

  const AnalyticMap H = AnalyticMap::rectangle_pinch();
  const Deformation hd = sample_analytic(H, share(H.natural_mesh(0.1)));
  const PreimageComponents hc = preimage_components(hd, {0.0, 0.0}, 0.05);
  REQUIRE(hc.components.size() == 1);
  // Contains the whole fiber {0} x [-1, 1].
  for (double t = -1.0; t <= 1.0; t += 0.05) {
    const Location loc = hd.mesh().locate({0.0, t});
    int tri = -1;
    if (const auto* p = std::get_if<InteriorLocation>(&loc)) tri = p->triangle;
    REQUIRE(tri >= 0);
    const auto& tris = hc.components[0].triangles;
    CHECK(std::binary_search(tris.begin(), tris.end(), tri));
  }
  CHECK(preimage_components(Deformation::identity(m), {5.0, 5.0}, 0.1).components.empty());
  CHECK_THROWS(preimage_components(Deformation::identity(m), {0.5, 0.5}, 0.0));
}

TEST_CASE("two distinct preimages separate below some eps") {
  const SpiralMap s = spiral_map();
  const Vec2 y = 1.25 * Vec2{std::cos(0.5 * s.overlap + 0.013), std::sin(0.5 * s.overlap + 0.013)};
  REQUIRE(preimage_components(s.def, y, 0.02).components.size() == 2);
  // Large eps merges nothing spurious but may join through the strip: at least one component.
  CHECK(preimage_components(s.def, y, 3.0).components.size() >= 1);
}

TEST_CASE("Jacobian-average identity") {
  const MeshPtr m = square_mesh(0.1);
  const JacobianIdentityReport id = degree_jacobian_identity(Deformation::identity(m), {0.5, 0.5}, 0.05);
  REQUIRE(id.entries.size() == 1);
  CHECK(id.entries[0].degree == 1);
  CHECK(std::abs(id.entries[0].jacobian_average - 1.0) < 0.05);
  CHECK(id.polygon_error > 0.0);
  CHECK(id.polygon_error < 0.01);

  const JacobianIdentityReport two = degree_jacobian_identity(scaled(m, 2.0), {1.0, 1.0}, 0.05);
  REQUIRE(two.entries.size() == 1);
  CHECK(two.entries[0].degree == 1);
  CHECK(std::abs(two.entries[0].jacobian_average - 1.0) < 0.05);

  const AnalyticMap G = AnalyticMap::radial_collapse();
  const Deformation gd = sample_analytic(G, share(G.natural_mesh(0.05)));
  const JacobianIdentityReport rc = degree_jacobian_identity(gd, {0.5, 0.0}, 0.05);
  bool saw_zero = false;
  for (const JacobianIdentityEntry& e : rc.entries) {
    if (e.degree == 0) {
      saw_zero = true;
      CHECK(std::abs(e.jacobian_average) < 1e-10);
    }
  }
  CHECK(saw_zero);
}

}  // TEST_SUITE
