#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "monotone_lab/boundary.hpp"
#include "monotone_lab/deformation.hpp"
#include "monotone_lab/domain.hpp"

namespace monotone_lab {

/// Boundary trace and Jacobian sign of a deformation relative to a declared target.
struct HypothesisStatus {
  HomeomorphismCheck trace;
  double min_jacobian = 0.0;
  bool positive_jacobian = false;
  bool trace_valid() const { return trace.valid(); }
};

HypothesisStatus check_hypotheses(const Deformation& def, const PlanarDomain& target);

/// Target points: `interior` seeded uniform samples of Y, `boundary` seeded uniform
/// arc-length samples of its boundary, plus explicit points.
struct SampleSpec {
  std::size_t interior = 100;
  std::size_t boundary = 0;
  std::uint64_t seed = 0;
  std::vector<Vec2> points;
};

struct MonotoneSample {
  Vec2 y;
  bool on_boundary = false;
  /// Query point per ladder entry (y nudged inward by eps/2 for boundary samples).
  std::vector<Vec2> queries;
  std::vector<int> counts;
  /// Components at the smallest eps.
  std::vector<std::vector<int>> components;
  /// Boundary samples only: distance from the reference preimage of y to the nearest
  /// vertex of each component, and whether all are within one mesh cell.
  std::vector<double> preimage_distances;
  std::optional<bool> preimage_near_all;
  bool monotone = false;
};

struct MonotonicityReport {
  std::uint64_t seed = 0;
  std::vector<double> eps_ladder;
  HypothesisStatus hypotheses;
  double mesh_cell = 0.0;
  std::vector<MonotoneSample> samples;
  std::size_t failures = 0;
  bool verdict = false;
};

struct VerifyOptions {
  /// Reject deformations whose boundary trace is not a homeomorphism onto the target.
  bool require_valid_trace = true;
};

/// Strictly decreasing ladder {4e, 2e, e}, e = default_eps(def).
std::vector<double> default_eps_ladder(const Deformation& def);

MonotonicityReport verify_monotone(const Deformation& def, const PlanarDomain& target, const SampleSpec& samples,
                                   std::vector<double> eps_ladder = {}, const VerifyOptions& options = {});

/// N(y, f, X). Throws NonGenericPoint if y lies on an image edge.
int multiplicity(const Deformation& def, Vec2 y);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Two-sided Clopper-Pearson interval for k successes out of n at the given confidence.
Interval clopper_pearson(std::size_t k, std::size_t n, double confidence = 0.95);

struct MultiplicityWitness {
  Vec2 y;
  int count = 0;
};

struct InvertibilityReport {
  std::uint64_t seed = 0;
  std::size_t requested = 0;
  /// Samples landing on an image edge; excluded from the fractions.
  std::size_t non_generic = 0;
  std::size_t generic = 0;
  std::vector<Vec2> points;
  std::vector<int> multiplicities;
  std::size_t single = 0;
  std::size_t zero = 0;
  std::size_t multiple = 0;
  double single_fraction = 0.0;
  Interval single_interval;
  /// Estimated |Y0| = |{N > 1}| and its confidence interval.
  double y0_measure = 0.0;
  Interval y0_measure_interval;
  double jacobian_integral = 0.0;
  double target_area = 0.0;
  double area_residual = 0.0;
  std::vector<MultiplicityWitness> witnesses;
  /// Triangles whose image contains a witness; X_f is the mesh minus these.
  std::vector<int> witness_preimage_triangles;
  HypothesisStatus hypotheses;
  bool verdict = false;
};

InvertibilityReport verify_invertibility(const Deformation& def, const PlanarDomain& target, std::size_t samples,
                                         std::uint64_t seed, const VerifyOptions& options = {});

/// Cell-centred grid over the target bounding box; `spacing` > 0 overrides nx, ny.
struct GridSpec {
  int nx = 50;
  int ny = 50;
  double spacing = 0.0;
};

struct EscapeWitness {
  int vertex = -1;
  Vec2 image;
  double distance = 0.0;
};

struct SurjectivityReport {
  GridSpec grid;
  int nx = 0;
  int ny = 0;
  std::size_t grid_points = 0;
  std::size_t covered = 0;
  double covered_fraction = 0.0;
  std::vector<Vec2> uncovered;
  std::vector<EscapeWitness> escapes;
  HypothesisStatus hypotheses;
  bool verdict = false;
};

/// Escape tolerance: images farther than this outside the closed target are witnesses.
inline constexpr double kEscapeTolerance = 1e-9;

SurjectivityReport verify_surjectivity(const Deformation& def, const PlanarDomain& target, const GridSpec& grid = {},
                                       const VerifyOptions& options = {});

struct OscillationProfile {
  Vec2 center;
  double outer_radius = 0.0;
  std::vector<double> radii;
  std::vector<double> oscillation;
  std::vector<std::size_t> sample_counts;
  /// Integral of |Df|_F^2 over triangles meeting the outer ball.
  double energy = 0.0;
  /// q_i = osc_i^2 log(R / 2 r_i) / energy.
  std::vector<double> ratios;
  /// C calibrated on the outermost radius; flags test q_i <= C on every radius.
  double fitted_c = 0.0;
  /// Least-squares constant for q_i ~ C.
  double least_squares_c = 0.0;
  std::vector<bool> flags;
  bool verdict = false;
};

/// Radii must lie in (0, R/2); throws DomainError if a ball holds no sample points.
OscillationProfile oscillation_profile(const Deformation& def, Vec2 center, double outer_radius,
                                       std::vector<double> radii);

struct WeakMonotoneReport {
  int coord = 1;
  Vec2 center;
  double radius = 0.0;
  std::size_t interior_samples = 0;
  std::size_t boundary_samples = 0;
  double interior_min = 0.0;
  double interior_max = 0.0;
  double boundary_min = 0.0;
  double boundary_max = 0.0;
  bool verdict = false;
};

inline constexpr double kWeakMonotoneTolerance = 1e-9;

/// Max/min principle for coordinate `coord` (1 or 2) of f on the ball intersected with the mesh.
WeakMonotoneReport weak_monotone_check(const Deformation& def, int coord, Vec2 center, double radius);

}  // namespace monotone_lab
