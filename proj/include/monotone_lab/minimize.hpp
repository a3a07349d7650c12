#pragma once

#include <optional>
#include <string>
#include <vector>

#include "monotone_lab/boundary.hpp"
#include "monotone_lab/deformation.hpp"
#include "monotone_lab/energy.hpp"

namespace monotone_lab {

struct MinimizeOptions {
  int max_iterations = 10000;
  double grad_tol = 1e-8;
  double armijo = 1e-4;
  double backtrack = 0.5;
  double fraction_to_boundary = 0.9;
  std::optional<Deformation> initial;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

enum class Termination { converged, max_iterations, stalled };
std::string to_string(Termination t);

struct StepRecord {
  double trial_step = 0.0;
  /// Largest step keeping every J_T > 0 along the search direction (inf if unbounded).
  double feasible_step = 0.0;
  double accepted_step = 0.0;
  int backtracks = 0;
  /// Energy change and the Armijo bound it satisfied (decrease <= -armijo * step * |g|^2).
  double decrease = 0.0;
  double armijo_bound = 0.0;
};

struct MinimizeReport {
  int iterations = 0;
  /// Initial energy followed by the running sum of accepted per-step decreases.
  std::vector<double> energy_trace;
  std::vector<StepRecord> steps;
  /// Energy of the returned deformation, evaluated directly.
  double final_energy = 0.0;
  double final_grad_inf = 0.0;
  double min_j_overall = 0.0;
  double min_j_final = 0.0;
  Termination termination = Termination::max_iterations;
};

struct MinimizeResult {
  Deformation deformation;
  MinimizeReport report;
};

/// Uniform-weight barycentric embedding with boundary images taken from phi.
/// Throws InfeasibleError for a nonconvex target or if some J_T <= 0 results.
Deformation tutte_init(MeshPtr mesh, const BoundaryHomeomorphism& phi);

/// Smallest s > 0 at which some triangle's Jacobian vanishes along image + s * direction.
double max_feasible_step(const Deformation& def, const std::vector<Vec2>& direction);

/// Gradient descent with a feasibility cap and Armijo backtracking, boundary fixed to phi.
MinimizeResult minimize(MeshPtr mesh, const BoundaryHomeomorphism& phi, const EnergyParams& params,
                        const MinimizeOptions& options = {});

}  // namespace monotone_lab
