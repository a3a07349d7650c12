#pragma once

#include <vector>

#include "monotone_lab/deformation.hpp"

namespace monotone_lab {

/// Exponents of the Neohookean functional  sum_T |T| (|Df_T|_F^p + J_T^-alpha).
struct EnergyParams {
  double p = 2.0;
  double alpha = 1.0;

  /// Throws ConfigError unless p >= 2 and alpha > 0.
  void validate() const;
};

/// Energy of a deformation, or +infinity when some J_T <= 0.
double energy(const Deformation& def, const EnergyParams& params);

/// Exact gradient with respect to vertex images; boundary entries are zero.
/// Throws InfeasibleError if some J_T <= 0.
std::vector<Vec2> energy_gradient(const Deformation& def, const EnergyParams& params);

/// Gradient including boundary entries (used by the finite-difference checks).
std::vector<Vec2> energy_gradient_full(const Deformation& def, const EnergyParams& params);

/// Dirichlet-type and barrier parts separately: sum |T| |Df|^p and sum |T| J^-alpha.
struct EnergyParts {
  double stretch = 0.0;
  double barrier = 0.0;
};
EnergyParts energy_parts(const Deformation& def, const EnergyParams& params);

}  // namespace monotone_lab
