#include <cmath>
#include <random>

#include "doctest.h"
#include "monotone_lab/energy.hpp"
#include "monotone_lab/errors.hpp"
#include "monotone_lab/minimize.hpp"
#include "monotone_lab/verify.hpp"
#include "support.hpp"

using namespace monotone_lab;
using namespace support;

namespace {

Deformation scaled(const MeshPtr& m, double s) {
  std::vector<Vec2> img;
  for (Vec2 p : m->vertices()) img.push_back(s * p);
  return Deformation(m, std::move(img));
}

// Largest componentwise relative error between the analytic gradient and central differences.
double fd_gradient_error(const Deformation& d, const EnergyParams& params) {
  const std::vector<Vec2> g = energy_gradient_full(d, params);
  double ginf = 0.0;
  for (Vec2 v : g) ginf = std::max({ginf, std::abs(v.x), std::abs(v.y)});
  const double step = 1e-6;
  double worst = 0.0;
  for (int v = 0; v < d.mesh().num_vertices(); ++v) {
    for (int c = 0; c < 2; ++c) {
      std::vector<Vec2> plus = d.image(), minus = d.image();
      (c == 0 ? plus[v].x : plus[v].y) += step;
      (c == 0 ? minus[v].x : minus[v].y) -= step;
      const double fd = (energy(Deformation(d.mesh_ptr(), plus), params) -
                         energy(Deformation(d.mesh_ptr(), minus), params)) / (2.0 * step);
      const double an = c == 0 ? g[v].x : g[v].y;
      const double denom = std::max({std::abs(fd), std::abs(an), 1e-3 * ginf});
      worst = std::max(worst, std::abs(fd - an) / denom);
    }
  }
  return worst;
}

BoundaryHomeomorphism identity_boundary(const TriMesh& m) {
  return make_boundary_map(m, PlanarDomain::unit_square(), [](Vec2 p) { return p; });
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("EnergyParams validation") {
  CHECK_NOTHROW((EnergyParams{2.0, 1.0}.validate()));
  CHECK_THROWS_AS((EnergyParams{1.5, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((EnergyParams{2.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((EnergyParams{NAN, 1.0}.validate()), ConfigError);
}

TEST_CASE("energy examples") {
  const MeshPtr m = square_mesh(0.1);
  CHECK(energy(Deformation::identity(m), {}) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(energy(scaled(m, 2.0), {}) == doctest::Approx(8.25).epsilon(1e-13));
  std::vector<Vec2> img = m->vertices();
  int interior = -1;
  for (int v = 0; v < m->num_vertices() && interior < 0; ++v)
    if (!m->is_boundary_vertex(v)) interior = v;
  img[interior] += Vec2{0.5, 0.5};
  const Deformation flipped(m, img);
  REQUIRE(flipped.min_jacobian() <= 0.0);
  CHECK(std::isinf(energy(flipped, {})));
  CHECK_THROWS_AS(energy_gradient(flipped, {}), InfeasibleError);
  const EnergyParts parts = energy_parts(Deformation::identity(m), {});
  CHECK(parts.stretch == doctest::Approx(2.0));
  CHECK(parts.barrier == doctest::Approx(1.0));
}

TEST_CASE("identity is a discrete critical point; boundary entries are zero") {
  const MeshPtr m = square_mesh(0.1);
  const Deformation id = Deformation::identity(m);
  const std::vector<Vec2> g = energy_gradient(id, {});
  double ginf = 0.0;
  for (Vec2 v : g) ginf = std::max({ginf, std::abs(v.x), std::abs(v.y)});
  CHECK(ginf < 1e-10);
  std::mt19937_64 rng(5);
  const Deformation r = random_feasible(id, rng, 0.3);
  const std::vector<Vec2> gr = energy_gradient(r, {2.0, 1.0});
  for (int v : m->boundary()) {
    CHECK(gr[v].x == 0.0);
    CHECK(gr[v].y == 0.0);
  }
}

TEST_CASE("identity gradient agrees with finite differences") {
  const MeshPtr m = square_mesh(0.25);
  const Deformation id = Deformation::identity(m);
  const std::vector<Vec2> g = energy_gradient(id, {});
  const double step = 1e-6;
  for (int v = 0; v < m->num_vertices(); ++v) {
    if (m->is_boundary_vertex(v)) continue;
    std::vector<Vec2> plus = id.image(), minus = id.image();
    plus[v].x += step;
    minus[v].x -= step;
    const double fd = (energy(Deformation(m, plus), {}) - energy(Deformation(m, minus), {})) / (2 * step);
    CHECK(std::abs(fd - g[v].x) < 1e-5);
  }
}

TEST_CASE("gradient matches central finite differences on random feasible states") {
  const MeshPtr m = square_mesh(0.25);
  std::mt19937_64 rng(99);
  for (const EnergyParams params : {EnergyParams{2.0, 1.0}, EnergyParams{2.0, 2.0}, EnergyParams{3.0, 1.0}}) {
    for (int k = 0; k < 10; ++k) {
      const Deformation d = random_feasible(Deformation::identity(m), rng, 0.35);
      CHECK(fd_gradient_error(d, params) < 1e-5);
    }
  }
}

TEST_CASE("frame indifference and scaling law") {
  const MeshPtr m = square_mesh(0.1);
  std::mt19937_64 rng(6);
  const Deformation d = random_feasible(Deformation::identity(m), rng, 0.3);
  const EnergyParams params{3.0, 2.0};
  const double c = std::cos(1.1), s = std::sin(1.1);
  std::vector<Vec2> rot, big;
  const double lambda = 1.7;
  for (Vec2 p : d.image()) {
    rot.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
    big.push_back(lambda * p);
  }
  CHECK(std::abs(energy(Deformation(m, rot), params) - energy(d, params)) < 1e-12);

  const Deformation scaled_def(m, big);
  for (int t = 0; t < m->num_triangles(); ++t) {
    const double st = m->area(t) * std::pow(d.derivative(t).frobenius2(), 0.5 * params.p);
    const double bt = m->area(t) * std::pow(d.jacobian(t), -params.alpha);
    const double st2 = m->area(t) * std::pow(scaled_def.derivative(t).frobenius2(), 0.5 * params.p);
    const double bt2 = m->area(t) * std::pow(scaled_def.jacobian(t), -params.alpha);
    CHECK(st2 == doctest::Approx(std::pow(lambda, params.p) * st).epsilon(1e-12));
    CHECK(bt2 == doctest::Approx(std::pow(lambda, -2.0 * params.alpha) * bt).epsilon(1e-12));
  }
  const EnergyParts p0 = energy_parts(d, params), p1 = energy_parts(scaled_def, params);
  CHECK(p1.stretch == doctest::Approx(std::pow(lambda, params.p) * p0.stretch).epsilon(1e-12));
  CHECK(p1.barrier == doctest::Approx(std::pow(lambda, -2.0 * params.alpha) * p0.barrier).epsilon(1e-12));
}

TEST_CASE("tutte_init: identity and rotated boundary") {
  const MeshPtr m = square_mesh(0.1);
  const Deformation t = tutte_init(m, identity_boundary(*m));
  for (int k = 0; k < m->num_triangles(); ++k) CHECK(triangle_jacobian(t, k) > 0.0);
  // Interior vertices are the average of their neighbours.
  for (int v = 0; v < m->num_vertices(); ++v) {
    if (m->is_boundary_vertex(v)) continue;
    Vec2 avg{0, 0};
    const auto nb = m->vertex_neighbors(v);
    for (int w : nb) avg += t.image(w);
    avg = (1.0 / nb.size()) * avg;
    CHECK(distance(avg, t.image(v)) < 1e-12);
  }
  const PlanarDomain rotated({{0, 0}, {0, 1}, {-1, 1}, {-1, 0}});
  const BoundaryHomeomorphism phi = make_boundary_map(*m, rotated, [](Vec2 p) { return Vec2{-p.y, p.x}; });
  const Deformation r = tutte_init(m, phi);
  CHECK(r.min_jacobian() > 0.0);
  for (std::size_t i = 0; i < phi.source.size(); ++i) CHECK(r.image(phi.source[i]) == phi.target[i]);
}

TEST_CASE("tutte_init rejects a nonconvex target") {
  const PlanarDomain ell({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  const MeshPtr m = share(triangulate(ell, 0.25));
  const BoundaryHomeomorphism phi = make_boundary_map(*m, ell, [](Vec2 p) { return p; });
  CHECK_THROWS_AS(tutte_init(m, phi), InfeasibleError);
  // Supplying an initial state works.
  MinimizeOptions opts;
  opts.initial = Deformation::identity(m);
  opts.max_iterations = 50;
  const MinimizeResult res = minimize(m, phi, {}, opts);
  CHECK(res.report.min_j_final > 0.0);
}

TEST_CASE("MinimizeOptions validation") {
  MinimizeOptions o;
  CHECK_NOTHROW(o.validate());
  o.armijo = 0.6;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.backtrack = 1.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.fraction_to_boundary = 0.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.grad_tol = 0.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
}

TEST_CASE("max_feasible_step finds the first Jacobian root") {
  const MeshPtr m = grid_mesh(0, 1, 0, 1, 1, 1);
  const Deformation d = Deformation::identity(m);
  // Moving vertex 3 = (1, 1) along (-1, -1) collapses both triangles at s = 1.
  std::vector<Vec2> dir(m->num_vertices());
  dir[3] = {-1.0, -1.0};
  CHECK(max_feasible_step(d, dir) == doctest::Approx(1.0));
  std::vector<Vec2> none(m->num_vertices());
  CHECK(std::isinf(max_feasible_step(d, none)));
}

TEST_CASE("minimize from identity boundary data stays at the identity") {
  const MeshPtr m = square_mesh(0.1);
  MinimizeOptions opts;
  opts.grad_tol = 1e-8;
  const MinimizeResult res = minimize(m, identity_boundary(*m), {2.0, 1.0}, opts);
  CHECK(res.report.termination == Termination::converged);
  CHECK(res.report.energy_trace.back() <= 3.0 + 1e-9);
  double disp = 0.0;
  for (int v = 0; v < m->num_vertices(); ++v) disp = std::max(disp, distance(res.deformation.image(v), m->vertex(v)));
  CHECK(disp < 1e-6);
}

TEST_CASE("minimize from a random feasible start: monotone trace and feasibility") {
  const MeshPtr m = square_mesh(0.1);
  std::mt19937_64 rng(12);
  MinimizeOptions opts;
  opts.initial = random_feasible(Deformation::identity(m), rng, 0.4);
  const double e0 = energy(*opts.initial, {});
  const MinimizeResult res = minimize(m, identity_boundary(*m), {2.0, 1.0}, opts);
  const auto& tr = res.report.energy_trace;
  CHECK(tr.front() == doctest::Approx(e0));
  for (std::size_t i = 1; i < tr.size(); ++i) {
    CHECK(std::isfinite(tr[i]));
    CHECK(tr[i] <= tr[i - 1]);
  }
  for (const StepRecord& s : res.report.steps) {
    CHECK(s.decrease <= s.armijo_bound);
    CHECK(s.accepted_step <= 0.9 * s.feasible_step);
  }
  CHECK(tr.back() <= e0);
  CHECK(res.report.min_j_final > 0.0);
  CHECK(res.report.min_j_overall > 0.0);
  CHECK(res.report.termination == Termination::converged);
  CHECK(trace_matches(res.deformation, identity_boundary(*m)));
}

TEST_CASE("minimize rejects infeasible or mismatched initial states") {
  const MeshPtr m = square_mesh(0.2);
  MinimizeOptions opts;
  std::vector<Vec2> img = m->vertices();
  img[m->boundary()[1]] += Vec2{0.0, 0.05};
  opts.initial = Deformation(m, img);
  CHECK_THROWS_AS(minimize(m, identity_boundary(*m), {}, opts), InfeasibleError);
}

TEST_CASE("max_iterations termination is reported") {
  const MeshPtr m = square_mesh(0.1);
  std::mt19937_64 rng(13);
  MinimizeOptions opts;
  opts.initial = random_feasible(Deformation::identity(m), rng, 0.4);
  opts.max_iterations = 3;
  const MinimizeResult res = minimize(m, identity_boundary(*m), {}, opts);
  CHECK(res.report.termination == Termination::max_iterations);
  CHECK(res.report.iterations == 3);
  CHECK(res.report.energy_trace.size() == 4);
}

TEST_CASE("a genuine minimizer passes the verification suite") {
  const MeshPtr m = square_mesh(0.1);
  const PlanarDomain sq = PlanarDomain::unit_square();
  const BoundaryHomeomorphism phi = make_boundary_map(*m, sq, [](Vec2 p) { return square_reparam(p, 0.5); });
  const MinimizeResult res = minimize(m, phi, {2.0, 1.0}, {});
  REQUIRE(res.report.termination == Termination::converged);
  CHECK(res.report.final_grad_inf < 1e-8);
  CHECK(res.deformation.min_jacobian() > 0.0);
  CHECK(trace_matches(res.deformation, phi));
  CHECK(std::abs(integrate_jacobian(res.deformation) - 1.0) < 1e-10);
  const MonotonicityReport mono = verify_monotone(res.deformation, sq, {100, 0, 1, {}});
  CHECK(mono.verdict);
  const InvertibilityReport inv = verify_invertibility(res.deformation, sq, 2000, 1);
  CHECK(inv.single_fraction == 1.0);
  const SurjectivityReport sur = verify_surjectivity(res.deformation, sq, {25, 25, 0.0});
  CHECK(sur.covered_fraction == 1.0);
  CHECK(sur.escapes.empty());
}

}  // TEST_SUITE
