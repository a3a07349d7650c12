#include "monotone_lab/energy.hpp"

#include <cmath>
#include <sstream>

#include "monotone_lab/errors.hpp"
#include "monotone_lab/kernels.hpp"

namespace monotone_lab {

void EnergyParams::validate() const {
  if (!(p >= 2.0) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << "energy exponent p must be >= 2, got " << p;
    throw ConfigError(msg.str());
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    std::ostringstream msg;
    msg << "barrier exponent alpha must be > 0, got " << alpha;
    throw ConfigError(msg.str());
  }
}

double energy(const Deformation& def, const EnergyParams& params) {
  std::vector<double> per(def.mesh().num_triangles());
  kernels::triangle_energies_parallel(def, params, per);
  return kernels::ordered_sum(per);
}

std::vector<Vec2> energy_gradient_full(const Deformation& def, const EnergyParams& params) {
  for (int t = 0; t < def.mesh().num_triangles(); ++t) {
    if (!(def.jacobian(t) > 0.0)) {
      std::ostringstream msg;
      msg << "gradient undefined: triangle " << t << " has Jacobian " << def.jacobian(t);
      throw InfeasibleError(msg.str());
    }
  }
  std::vector<std::array<Vec2, 3>> local(def.mesh().num_triangles());
  kernels::triangle_gradients_parallel(def, params, local);
  return kernels::scatter_gradients(def.mesh(), local);
}

std::vector<Vec2> energy_gradient(const Deformation& def, const EnergyParams& params) {
  std::vector<Vec2> grad = energy_gradient_full(def, params);
  for (int v : def.mesh().boundary()) grad[v] = {0.0, 0.0};
  return grad;
}

EnergyParts energy_parts(const Deformation& def, const EnergyParams& params) {
  EnergyParts parts;
  for (int t = 0; t < def.mesh().num_triangles(); ++t) {
    const double area = def.mesh().area(t);
    const double j = def.jacobian(t);
    parts.stretch += area * std::pow(def.derivative(t).frobenius2(), 0.5 * params.p);
    parts.barrier += j > 0.0 ? area * std::pow(j, -params.alpha) : INFINITY;
  }
  return parts;
}

}  // namespace monotone_lab
