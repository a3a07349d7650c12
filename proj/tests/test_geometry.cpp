#include <cmath>
#include <random>

#include "doctest.h"
#include "monotone_lab/errors.hpp"
#include "monotone_lab/predicates.hpp"
#include "support.hpp"

using namespace monotone_lab;
using namespace support;

TEST_SUITE("geometry") {

TEST_CASE("orient2d matches the rational oracle on random and near-degenerate input") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const Vec2 c = a + (0.5 + 1e-3 * u(rng)) * (b - a);
    const Vec2 d = a + std::ldexp(1.0, -(i % 40)) * (b - a);  // on the line up to rounding
    const Vec2 e{u(rng), u(rng)};
    CHECK(predicates::orient2d(a, b, c) == oracle_orient(a, b, c));
    CHECK(predicates::orient2d(a, b, d) == oracle_orient(a, b, d));
    CHECK(predicates::orient2d(a, b, e) == oracle_orient(a, b, e));
  }
  CHECK(predicates::orient2d({0, 0}, {1, 0}, {2, 0}) == 0);
  CHECK(predicates::orient2d({0, 0}, {1, 0}, {0, 1}) == 1);
  CHECK(predicates::orient2d({0, 0}, {0, 1}, {1, 0}) == -1);
  // Tiny coordinates whose products underflow in double.
  CHECK(predicates::orient2d({0, 0}, {1e-200, 0}, {0, 1e-200}) == 1);
}

TEST_CASE("incircle matches the rational oracle") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  while (checked < 2000) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    if (oracle_orient(a, b, c) <= 0) continue;
    const double th = u(rng) * std::numbers::pi;
    // Candidate near the circumcircle of a unit-circle triangle.
    const Vec2 d{u(rng), u(rng)};
    CHECK(predicates::incircle(a, b, c, d) == oracle_incircle(a, b, c, d));
    const Vec2 p{std::cos(0.1), std::sin(0.1)}, q{std::cos(2.0), std::sin(2.0)}, r{std::cos(4.0), std::sin(4.0)};
    const Vec2 s{std::cos(th), std::sin(th)};
    CHECK(predicates::incircle(p, q, r, s) == oracle_incircle(p, q, r, s));
    ++checked;
  }
  CHECK(predicates::incircle({0, 0}, {1, 0}, {1, 1}, {0, 1}) == 0);
}

TEST_CASE("classify_in_triangle distinguishes interior, edges and vertices") {
  const Vec2 a{0, 0}, b{1, 0}, c{0, 1};
  CHECK(predicates::classify_in_triangle(a, b, c, {0.2, 0.2}).side == predicates::TriangleSide::interior);
  const auto e = predicates::classify_in_triangle(a, b, c, {0.5, 0.0});
  CHECK(e.side == predicates::TriangleSide::edge);
  CHECK(e.index == 0);
  const auto v = predicates::classify_in_triangle(a, b, c, {0.0, 1.0});
  CHECK(v.side == predicates::TriangleSide::vertex);
  CHECK(v.index == 2);
  CHECK(predicates::classify_in_triangle(a, c, b, {0.2, 0.2}).side == predicates::TriangleSide::interior);
  CHECK(predicates::classify_in_triangle(a, b, c, {0.6, 0.6}).side == predicates::TriangleSide::outside);
}

TEST_CASE("segment predicates") {
  CHECK(predicates::on_segment({0, 0}, {2, 2}, {1, 1}));
  CHECK_FALSE(predicates::on_segment({0, 0}, {2, 2}, {3, 3}));
  CHECK(predicates::segments_intersect({0, 0}, {1, 1}, {0, 1}, {1, 0}));
  CHECK(predicates::segments_intersect({0, 0}, {1, 0}, {1, 0}, {2, 5}));
  CHECK_FALSE(predicates::segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
}

TEST_CASE("PlanarDomain validates its invariants") {
  CHECK_THROWS_AS(PlanarDomain({{0, 0}, {1, 0}}), GeometryError);
  CHECK_THROWS_AS(PlanarDomain({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), GeometryError);
  CHECK_THROWS_AS(PlanarDomain({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), GeometryError);  // clockwise
  CHECK_THROWS_AS(PlanarDomain({{0, 0}, {1, 0}, {2, 0}}), GeometryError);          // zero area
  CHECK_THROWS_AS(PlanarDomain({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), GeometryError);  // bow tie
  const PlanarDomain sq = PlanarDomain::unit_square();
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.perimeter() == doctest::Approx(4.0));
  CHECK(sq.is_convex());
  CHECK(sq.classify({0.5, 0.5}) == PlanarDomain::Side::inside);
  CHECK(sq.classify({1.0, 0.5}) == PlanarDomain::Side::boundary);
  CHECK(sq.classify({1.5, 0.5}) == PlanarDomain::Side::outside);
  const PlanarDomain disk = PlanarDomain::unit_disk(64);
  CHECK(disk.vertices().front() == Vec2{1.0, 0.0});
  CHECK(disk.size() == 64);
  const PlanarDomain ell({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  CHECK_FALSE(ell.is_convex());
  CHECK(ell.area() == doctest::Approx(3.0));
}

TEST_CASE("PlanarDomain classification agrees with a crossing-number oracle") {
  const PlanarDomain star({{0, -1}, {0.3, -0.3}, {1, 0}, {0.3, 0.3}, {0, 1}, {-0.3, 0.3}, {-1, 0}, {-0.3, -0.3}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 5000; ++i) {
    const Vec2 p{u(rng), u(rng)};
    const auto side = star.classify(p);
    if (side == PlanarDomain::Side::boundary) continue;
    CHECK((side == PlanarDomain::Side::inside) == oracle_inside(star.vertices(), p));
  }
}

TEST_CASE("arc-length helpers on the boundary") {
  const PlanarDomain sq = PlanarDomain::unit_square();
  CHECK(sq.point_at(0.5).x == doctest::Approx(0.5));
  const Vec2 p = sq.point_at(1.5);
  CHECK(p.x == doctest::Approx(1.0));
  CHECK(p.y == doctest::Approx(0.5));
  const auto s = sq.boundary_parameter({1.0, 0.5}, 1e-12);
  REQUIRE(s);
  CHECK(*s == doctest::Approx(1.5));
  CHECK_FALSE(sq.boundary_parameter({0.5, 0.5}, 1e-12));
  const Vec2 n = sq.inward_normal_at(1.5);
  CHECK(n.x == doctest::Approx(-1.0));
  CHECK(n.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("triangulate: unit square examples") {
  const TriMesh coarse = triangulate(PlanarDomain::unit_square(), 0.5);
  CHECK(coarse.num_triangles() >= 8);
  CHECK(std::abs(coarse.total_area() - 1.0) < 1e-12);
  const TriMesh fine = triangulate(PlanarDomain::unit_square(), 0.1);
  CHECK(std::abs(fine.total_area() - 1.0) < 1e-12);
  CHECK(fine.max_edge_length() <= 0.2);
}

TEST_CASE("triangulate: rectangle R area") {
  const TriMesh m = triangulate(PlanarDomain::rectangle(-1, 1, -2, 2), 0.25);
  CHECK(std::abs(m.total_area() - static_cast<double>(oracle_area(PlanarDomain::rectangle(-1, 1, -2, 2).vertices()))) <
        1e-12);
  CHECK(std::abs(m.total_area() - 8.0) < 1e-12);
}

TEST_CASE("triangulate: degenerate input is rejected") {
  CHECK_THROWS(triangulate(PlanarDomain::unit_square(), 0.0));
  CHECK_THROWS(triangulate(PlanarDomain::unit_square(), -1.0));
}

TEST_CASE("triangulate: area, edge length and boundary properties over several polygons") {
  const std::vector<PlanarDomain> domains = {
      PlanarDomain::unit_square(),
      PlanarDomain::rectangle(-1, 1, -2, 2),
      PlanarDomain({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}),
      PlanarDomain({{0, -1}, {0.3, -0.3}, {1, 0}, {0.3, 0.3}, {0, 1}, {-0.3, 0.3}, {-1, 0}, {-0.3, -0.3}}),
      PlanarDomain::unit_disk(48),
      PlanarDomain({{0, 0}, {3, 0}, {3, 0.2}, {0.2, 0.2}, {0.2, 2}, {0, 2}}),
  };
  for (const PlanarDomain& dom : domains) {
    for (double h : {0.4, 0.15, 0.07}) {
      const TriMesh m = triangulate(dom, h);
      const double shoelace = static_cast<double>(oracle_area(dom.vertices()));
      CHECK(std::abs(m.total_area() - shoelace) < 1e-12);
      CHECK(m.max_edge_length() <= 2.0 * h);
      for (int v : m.boundary()) CHECK(dom.distance_to_boundary(m.vertex(v)) < 1e-12);
      CHECK(std::abs(static_cast<double>(oracle_area(m.boundary_polygon().vertices())) - shoelace) < 1e-12);
    }
  }
}

TEST_CASE("triangulate: required points and exclusions") {
  TriangulateOptions opts;
  opts.required_points = {{0.5, 0.5}, {0.25, 0.75}};
  const TriMesh m = triangulate(PlanarDomain::unit_square(), 0.2, opts);
  int found = 0;
  for (Vec2 p : m.vertices())
    if (p == Vec2{0.5, 0.5} || p == Vec2{0.25, 0.75}) ++found;
  CHECK(found == 2);
  opts.required_points = {{1.0, 0.5}};
  CHECK_THROWS(triangulate(PlanarDomain::unit_square(), 0.2, opts));
}

TEST_CASE("triangulate_disk: rings and boundary") {
  const TriMesh m = triangulate_disk(128, 0.05, {0.5});
  const PlanarDomain disk = PlanarDomain::unit_disk(128);
  REQUIRE(m.boundary().size() == 128);
  for (std::size_t i = 0; i < 128; ++i) CHECK(m.vertex(m.boundary()[i]) == disk.vertices()[i]);
  CHECK(std::abs(m.total_area() - disk.area()) < 1e-12);
  CHECK(m.max_edge_length() <= 0.1);
  // No triangle straddles r = 1/2.
  for (const Triangle& t : m.triangles()) {
    bool in = false, out = false;
    for (int v : t) {
      const double r = norm(m.vertex(v));
      if (r < 0.5 - 1e-12) in = true;
      if (r > 0.5 + 1e-12) out = true;
    }
    CHECK_FALSE((in && out));
  }
}

TEST_CASE("TriMesh rejects invalid input") {
  const std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK_NOTHROW(TriMesh(v, {{0, 1, 2}, {0, 2, 3}}, {0, 1, 2, 3}));
  CHECK_THROWS_AS(TriMesh(v, {{0, 2, 1}, {0, 2, 3}}, {0, 1, 2, 3}), GeometryError);  // clockwise
  CHECK_THROWS_AS(TriMesh(v, {{0, 1, 2}}, {0, 1, 2}), GeometryError);               // unused vertex
  CHECK_THROWS_AS(TriMesh(v, {{0, 1, 2}, {0, 2, 3}}, {0, 3, 2, 1}), GeometryError);  // wrong loop
  CHECK_THROWS_AS(TriMesh(v, {{0, 1, 2}, {0, 2, 4}}, {0, 1, 2, 3}), GeometryError);  // bad index
}

TEST_CASE("locate: examples") {
  const MeshPtr m = square_mesh(0.1);
  const Location in = m->locate({0.53, 0.47});
  REQUIRE(std::holds_alternative<InteriorLocation>(in));
  const auto& il = std::get<InteriorLocation>(in);
  CHECK(std::abs(il.bary[0] + il.bary[1] + il.bary[2] - 1.0) < 1e-12);
  CHECK(std::holds_alternative<OutsideLocation>(m->locate({2, 2})));

  // Vertex: lowest-index incident triangle, one coordinate exactly 1.
  for (int v = 0; v < m->num_vertices(); ++v) {
    const Location loc = m->locate(m->vertex(v));
    const int lowest = m->vertex_triangles(v).front();
    int tri = -1;
    std::array<double, 3> bary{};
    if (const auto* p = std::get_if<InteriorLocation>(&loc)) {
      tri = p->triangle;
      bary = p->bary;
      CHECK_FALSE(m->is_boundary_vertex(v));
    } else if (const auto* q = std::get_if<BoundaryLocation>(&loc)) {
      tri = q->triangle;
      bary = q->bary;
      CHECK(m->is_boundary_vertex(v));
    }
    CHECK(tri == lowest);
    CHECK(std::count(bary.begin(), bary.end(), 1.0) == 1);
  }
}

TEST_CASE("locate: shared edges go to the lowest-index triangle") {
  const MeshPtr m = square_mesh(0.2);
  for (int t = 0; t < m->num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int n = m->neighbors(t)[i];
      if (n < 0) continue;
      const Triangle& tri = m->triangles()[t];
      const Vec2 mid = 0.5 * (m->vertex(tri[i]) + m->vertex(tri[(i + 1) % 3]));
      if (predicates::orient2d(m->vertex(tri[i]), m->vertex(tri[(i + 1) % 3]), mid) != 0) continue;
      const Location loc = m->locate(mid);
      REQUIRE(std::holds_alternative<InteriorLocation>(loc));
      CHECK(std::get<InteriorLocation>(loc).triangle == std::min(t, n));
    }
  }
}

TEST_CASE("locate: random points agree with the polygon oracle and reconstruct") {
  const PlanarDomain ell({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  const MeshPtr m = share(triangulate(ell, 0.1));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.1, 2.1);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 p{u(rng), u(rng)};
    const Location loc = m->locate(p);
    if (oracle_inside(ell.vertices(), p)) CHECK_FALSE(std::holds_alternative<OutsideLocation>(loc));
    if (ell.classify(p) == PlanarDomain::Side::outside) CHECK(std::holds_alternative<OutsideLocation>(loc));
    if (const auto* in = std::get_if<InteriorLocation>(&loc)) {
      const Triangle& t = m->triangles()[in->triangle];
      Vec2 q{0, 0};
      for (int k = 0; k < 3; ++k) {
        CHECK(in->bary[k] >= 0.0);
        q += in->bary[k] * m->vertex(t[k]);
      }
      CHECK(distance(p, q) < 1e-10);
    }
  }
}

}  // TEST_SUITE
