#include "monotone_lab/verify.hpp"

#include <boost/math/distributions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>

#include "monotone_lab/degree.hpp"
#include "monotone_lab/errors.hpp"
#include "monotone_lab/kernels.hpp"
#include "monotone_lab/parallel.hpp"
#include "monotone_lab/predicates.hpp"

namespace monotone_lab {
namespace {

void require_trace(const HypothesisStatus& h, const VerifyOptions& options) {
  if (!options.require_valid_trace || h.trace_valid()) return;
  std::ostringstream msg;
  msg << "boundary trace is not a homeomorphism onto the target (on boundary: " << h.trace.on_target_boundary
      << ", order preserving: " << h.trace.order_preserving << ", covers corners: " << h.trace.covers_corners
      << ", max distance: " << h.trace.max_boundary_distance << ")";
  throw HypothesisError(msg.str());
}

std::vector<Vec2> uniform_samples(const PlanarDomain& target, std::size_t count, std::mt19937_64& rng) {
  const BBox box = target.bbox();
  std::uniform_real_distribution<double> ux(box.lo.x, box.hi.x), uy(box.lo.y, box.hi.y);
  std::vector<Vec2> out;
  out.reserve(count);
  while (out.size() < count) {
    const Vec2 p{ux(rng), uy(rng)};
    if (target.classify(p) == PlanarDomain::Side::inside) out.push_back(p);
  }
  return out;
}

// Runs body(i) for i in [0, n) on the worker pool; the first exception is rethrown.
template <class Body>
void parallel_for(long n, Body body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(monotone_lab_verify_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

double point_triangle_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  if (predicates::classify_in_triangle(a, b, c, p).side != predicates::TriangleSide::outside) return 0.0;
  return std::min({segment_distance(a, b, p), segment_distance(b, c, p), segment_distance(c, a, p)});
}

double coord_of(Vec2 v, int coord) { return coord == 1 ? v.x : v.y; }

}  // namespace

HypothesisStatus check_hypotheses(const Deformation& def, const PlanarDomain& target) {
  HypothesisStatus h;
  h.trace = boundary_trace(def, target).check;
  h.min_jacobian = def.min_jacobian();
  h.positive_jacobian = h.min_jacobian > 0.0;
  return h;
}

std::vector<double> default_eps_ladder(const Deformation& def) {
  const double e = default_eps(def);
  return {4.0 * e, 2.0 * e, e};
}

MonotonicityReport verify_monotone(const Deformation& def, const PlanarDomain& target, const SampleSpec& sampling,
                                   std::vector<double> eps_ladder, const VerifyOptions& options) {
  MonotonicityReport report;
  report.seed = sampling.seed;
  report.hypotheses = check_hypotheses(def, target);
  require_trace(report.hypotheses, options);

  if (eps_ladder.empty()) eps_ladder = default_eps_ladder(def);
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0)) throw ConfigError("eps ladder entries must be positive");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1])) throw ConfigError("eps ladder must be strictly decreasing");
  }
  report.eps_ladder = eps_ladder;
  report.mesh_cell = def.mesh().max_edge_length();

  // Sample generation is serial so the sequence depends only on the seed.
  std::mt19937_64 rng(sampling.seed);
  std::vector<std::pair<Vec2, std::optional<double>>> targets;  // point, boundary arc-length
  for (Vec2 p : sampling.points) targets.emplace_back(p, target.boundary_parameter(p, 1e-12));
  for (Vec2 p : uniform_samples(target, sampling.interior, rng)) targets.emplace_back(p, std::nullopt);
  std::uniform_real_distribution<double> us(0.0, target.perimeter());
  for (std::size_t i = 0; i < sampling.boundary; ++i) {
    const double s = us(rng);
    targets.emplace_back(target.point_at(s), s);
  }

  const BoundaryHomeomorphism phi = boundary_trace(def, target).candidate;
  report.samples.resize(targets.size());
  parallel_for(static_cast<long>(targets.size()), [&](long i) {
    const auto& [y, arc] = targets[i];
    MonotoneSample& sample = report.samples[i];
    sample.y = y;
    sample.on_boundary = arc.has_value();
    const Vec2 normal = arc ? target.inward_normal_at(*arc) : Vec2{0.0, 0.0};
    PreimageComponents last;
    for (double eps : eps_ladder) {
      const Vec2 q = y + (0.5 * eps) * normal;
      sample.queries.push_back(q);
      last = preimage_components(def, q, eps);
      sample.counts.push_back(static_cast<int>(last.components.size()));
    }
    for (const PreimageComponent& c : last.components) sample.components.push_back(c.triangles);
    bool near = true;
    if (sample.on_boundary && report.hypotheses.trace_valid()) {
      const Vec2 x0 = boundary_preimage(def.mesh(), phi, y);
      for (const std::vector<int>& comp : sample.components) {
        double best = INFINITY;
        for (int t : comp)
          for (int v : def.mesh().triangles()[t]) best = std::min(best, distance(def.mesh().vertex(v), x0));
        sample.preimage_distances.push_back(best);
        near = near && best <= report.mesh_cell;
      }
      sample.preimage_near_all = near;
    }
    sample.monotone = sample.counts.back() <= 1 && near;
  });

  for (const MonotoneSample& s : report.samples)
    if (!s.monotone) ++report.failures;
  report.verdict = report.failures == 0;
  return report;
}

int multiplicity(const Deformation& def, Vec2 y) {
  const kernels::PointMultiplicity m = kernels::point_multiplicity(def, y);
  if (!m.generic) {
    std::ostringstream msg;
    msg << "point (" << y.x << ", " << y.y << ") lies on an image edge of triangle " << m.offending_triangle;
    const Triangle& tri = def.mesh().triangles()[m.offending_triangle];
    Vec2 d = def.image(tri[1]) - def.image(tri[0]);
    if (norm(d) == 0.0) d = {1.0, 0.0};
    throw NonGenericPoint(msg.str(), (1e-9 * std::max(1.0, norm(y)) / norm(d)) * perp(d));
  }
  return m.count;
}

Interval clopper_pearson(std::size_t k, std::size_t n, double confidence) {
  if (n == 0) return {0.0, 1.0};
  const double a = 0.5 * (1.0 - confidence);
  Interval out;
  out.lower = k == 0 ? 0.0
                     : boost::math::quantile(boost::math::beta_distribution<double>(static_cast<double>(k),
                                                                                     static_cast<double>(n - k + 1)),
                                             a);
  out.upper = k == n ? 1.0
                     : boost::math::quantile(boost::math::beta_distribution<double>(static_cast<double>(k + 1),
                                                                                     static_cast<double>(n - k)),
                                             1.0 - a);
  return out;
}

InvertibilityReport verify_invertibility(const Deformation& def, const PlanarDomain& target, std::size_t samples,
                                         std::uint64_t seed, const VerifyOptions& options) {
  InvertibilityReport report;
  report.seed = seed;
  report.requested = samples;
  report.hypotheses = check_hypotheses(def, target);
  require_trace(report.hypotheses, options);

  std::mt19937_64 rng(seed);
  report.points = uniform_samples(target, samples, rng);
  const std::vector<kernels::PointMultiplicity> mult = kernels::multiplicity_batch_parallel(def, report.points);

  std::vector<char> witness_triangle(def.mesh().num_triangles(), 0);
  report.multiplicities.reserve(mult.size());
  for (std::size_t i = 0; i < mult.size(); ++i) {
    if (!mult[i].generic) {
      ++report.non_generic;
      report.multiplicities.push_back(-1);
      continue;
    }
    ++report.generic;
    report.multiplicities.push_back(mult[i].count);
    if (mult[i].count == 1) {
      ++report.single;
    } else if (mult[i].count == 0) {
      ++report.zero;
    } else {
      ++report.multiple;
      report.witnesses.push_back({report.points[i], mult[i].count});
      for (int t = 0; t < def.mesh().num_triangles(); ++t) {
        const Triangle& tri = def.mesh().triangles()[t];
        const Vec2 a = def.image(tri[0]), b = def.image(tri[1]), c = def.image(tri[2]);
        if (predicates::orient2d(a, b, c) != 0 &&
            predicates::classify_in_triangle(a, b, c, report.points[i]).side == predicates::TriangleSide::interior)
          witness_triangle[t] = 1;
      }
    }
  }
  for (int t = 0; t < def.mesh().num_triangles(); ++t)
    if (witness_triangle[t]) report.witness_preimage_triangles.push_back(t);

  report.single_fraction = report.generic ? static_cast<double>(report.single) / report.generic : 0.0;
  report.single_interval = clopper_pearson(report.single, report.generic);
  report.target_area = target.area();
  const Interval y0 = clopper_pearson(report.multiple, report.generic);
  report.y0_measure = report.generic ? report.target_area * report.multiple / report.generic : 0.0;
  report.y0_measure_interval = {report.target_area * y0.lower, report.target_area * y0.upper};
  report.jacobian_integral = integrate_jacobian(def);
  report.area_residual = std::abs(report.jacobian_integral - report.target_area);
  report.verdict = report.generic > 0 && report.single == report.generic && report.area_residual < 1e-10;
  return report;
}

SurjectivityReport verify_surjectivity(const Deformation& def, const PlanarDomain& target, const GridSpec& grid,
                                       const VerifyOptions& options) {
  SurjectivityReport report;
  report.grid = grid;
  report.hypotheses = check_hypotheses(def, target);
  require_trace(report.hypotheses, options);

  const BBox box = target.bbox();
  int nx = grid.nx, ny = grid.ny;
  if (grid.spacing > 0.0) {
    nx = std::max(1, static_cast<int>(std::ceil(box.width() / grid.spacing)));
    ny = std::max(1, static_cast<int>(std::ceil(box.height() / grid.spacing)));
  }
  if (nx < 1 || ny < 1) throw ConfigError("surjectivity grid needs at least one cell per axis");
  report.nx = nx;
  report.ny = ny;

  std::vector<Vec2> points;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 p{box.lo.x + (i + 0.5) * box.width() / nx, box.lo.y + (j + 0.5) * box.height() / ny};
      if (target.classify(p) == PlanarDomain::Side::inside) points.push_back(p);
    }
  }
  report.grid_points = points.size();

  const std::vector<std::optional<int>> degrees = kernels::degree_batch_parallel(def, points);
  const std::vector<kernels::PointMultiplicity> mult = kernels::multiplicity_batch_parallel(def, points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool hit = (degrees[i] && *degrees[i] != 0) || (mult[i].generic && mult[i].count >= 1) ||
                     !mult[i].generic || mult[i].fiber_segments > 0;
    if (hit) ++report.covered;
    else report.uncovered.push_back(points[i]);
  }
  report.covered_fraction = points.empty() ? 0.0 : static_cast<double>(report.covered) / points.size();

  for (int v = 0; v < def.mesh().num_vertices(); ++v) {
    const Vec2 q = def.image(v);
    const double d = target.distance_outside(q);
    if (d > kEscapeTolerance) report.escapes.push_back({v, q, d});
  }
  report.verdict = !points.empty() && report.covered == points.size() && report.escapes.empty();
  return report;
}

OscillationProfile oscillation_profile(const Deformation& def, Vec2 center, double outer_radius,
                                       std::vector<double> radii) {
  if (!(outer_radius > 0.0)) throw ConfigError("oscillation outer radius must be positive");
  for (double r : radii)
    if (!(r > 0.0 && r < 0.5 * outer_radius)) throw ConfigError("oscillation radii must lie in (0, R/2)");
  const TriMesh& mesh = def.mesh();

  OscillationProfile prof;
  prof.center = center;
  prof.outer_radius = outer_radius;
  prof.radii = radii;

  // Reference sample points with their images: vertices and edge midpoints.
  std::vector<std::pair<Vec2, Vec2>> pts;
  for (int v = 0; v < mesh.num_vertices(); ++v) pts.emplace_back(mesh.vertex(v), def.image(v));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i], b = tri[(i + 1) % 3];
      const int n = mesh.neighbors(t)[i];
      if (n >= 0 && n < t) continue;  // each interior edge once
      pts.emplace_back(0.5 * (mesh.vertex(a) + mesh.vertex(b)), 0.5 * (def.image(a) + def.image(b)));
    }
  }

  for (double r : radii) {
    std::vector<Vec2> imgs;
    for (const auto& [x, fx] : pts)
      if (distance(x, center) <= r) imgs.push_back(fx);
    if (imgs.empty()) {
      std::ostringstream msg;
      msg << "ball of radius " << r << " about (" << center.x << ", " << center.y << ") holds no sample points";
      throw DomainError(msg.str());
    }
    double diam = 0.0;
    for (std::size_t i = 0; i < imgs.size(); ++i)
      for (std::size_t j = i + 1; j < imgs.size(); ++j) diam = std::max(diam, distance(imgs[i], imgs[j]));
    prof.oscillation.push_back(diam);
    prof.sample_counts.push_back(imgs.size());
  }

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    if (point_triangle_distance(mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2]), center) <= outer_radius)
      prof.energy += mesh.area(t) * def.derivative(t).frobenius2();
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double q = prof.oscillation[i] * prof.oscillation[i] * std::log(outer_radius / (2.0 * radii[i])) / prof.energy;
    prof.ratios.push_back(q);
    sum += q;
  }
  if (!radii.empty()) {
    // Calibrate on the largest radius.
    const std::size_t outer = static_cast<std::size_t>(std::max_element(radii.begin(), radii.end()) - radii.begin());
    prof.fitted_c = prof.ratios[outer];
    prof.least_squares_c = sum / radii.size();
  }
  bool all = std::isfinite(prof.fitted_c);
  for (double q : prof.ratios) {
    const bool ok = std::isfinite(q) && q <= prof.fitted_c * (1.0 + 1e-9);
    prof.flags.push_back(ok);
    all = all && ok;
  }
  prof.verdict = all && !radii.empty();
  return prof;
}

WeakMonotoneReport weak_monotone_check(const Deformation& def, int coord, Vec2 center, double radius) {
  if (coord != 1 && coord != 2) throw ConfigError("coordinate must be 1 or 2");
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  const TriMesh& mesh = def.mesh();
  WeakMonotoneReport rep;
  rep.coord = coord;
  rep.center = center;
  rep.radius = radius;
  rep.interior_min = rep.boundary_min = INFINITY;
  rep.interior_max = rep.boundary_max = -INFINITY;

  auto interior = [&](double v) {
    ++rep.interior_samples;
    rep.interior_min = std::min(rep.interior_min, v);
    rep.interior_max = std::max(rep.interior_max, v);
  };
  auto ring = [&](double v) {
    ++rep.boundary_samples;
    rep.boundary_min = std::min(rep.boundary_min, v);
    rep.boundary_max = std::max(rep.boundary_max, v);
  };

  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double d = distance(mesh.vertex(v), center);
    if (d > radius) continue;
    if (mesh.is_boundary_vertex(v) || d == radius) ring(coord_of(def.image(v), coord));
    else interior(coord_of(def.image(v), coord));
  }

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i], b = tri[(i + 1) % 3];
      const int n = mesh.neighbors(t)[i];
      if (n >= 0 && n < t) continue;
      const Vec2 pa = mesh.vertex(a), pb = mesh.vertex(b);
      const Vec2 fa = def.image(a), fb = def.image(b);
      const Vec2 mid = 0.5 * (pa + pb);
      if (n >= 0 && distance(mid, center) < radius) interior(coord_of(0.5 * (fa + fb), coord));
      // Edge crossings of the circle: |pa + s (pb - pa) - center| = radius.
      const Vec2 d = pb - pa, w = pa - center;
      const double A = dot(d, d), B = 2.0 * dot(w, d), C = dot(w, w) - radius * radius;
      const double disc = B * B - 4.0 * A * C;
      if (A == 0.0 || disc < 0.0) continue;
      for (double s : {(-B - std::sqrt(disc)) / (2.0 * A), (-B + std::sqrt(disc)) / (2.0 * A)})
        if (s >= 0.0 && s <= 1.0) ring(coord_of(fa + s * (fb - fa), coord));
    }
  }

  constexpr int kCircleSamples = 512;
  for (int k = 0; k < kCircleSamples; ++k) {
    const double th = 2.0 * std::numbers::pi * k / kCircleSamples;
    const Vec2 p = center + radius * Vec2{std::cos(th), std::sin(th)};
    if (std::holds_alternative<OutsideLocation>(mesh.locate(p))) continue;
    ring(coord_of(def.evaluate(p), coord));
  }

  if (rep.boundary_samples == 0) throw DomainError("ball does not meet the mesh");
  rep.verdict = rep.interior_samples == 0 || (rep.interior_max <= rep.boundary_max + kWeakMonotoneTolerance &&
                                              rep.interior_min >= rep.boundary_min - kWeakMonotoneTolerance);
  return rep;
}

}  // namespace monotone_lab
