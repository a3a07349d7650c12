#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "monotone_lab/deformation.hpp"
#include "monotone_lab/energy.hpp"

namespace monotone_lab::kernels {

// Data-parallel kernels. Each has a serial reference implementation; the OpenMP
// versions write per-item results into indexed slots and reduce in index order, so
// their output is bitwise identical to the serial one for any thread count.

/// out[t] = |T| (|Df_T|^p + J_T^-alpha), or +inf when J_T <= 0.
void triangle_energies_serial(const Deformation& def, const EnergyParams& params, std::span<double> out);
void triangle_energies_parallel(const Deformation& def, const EnergyParams& params, std::span<double> out);

/// out[t][i]: derivative of triangle t's energy with respect to its i-th vertex image.
/// Requires J_T > 0.
void triangle_gradients_serial(const Deformation& def, const EnergyParams& params,
                               std::span<std::array<Vec2, 3>> out);
void triangle_gradients_parallel(const Deformation& def, const EnergyParams& params,
                                 std::span<std::array<Vec2, 3>> out);

/// out[t] = E_T(f + displacement) - E_T(f), evaluated without cancellation against E_T;
/// +inf when either state has J_T <= 0.
void triangle_energy_changes_serial(const Deformation& def, std::span<const Vec2> displacement,
                                   const EnergyParams& params, std::span<double> out);
void triangle_energy_changes_parallel(const Deformation& def, std::span<const Vec2> displacement,
                                     const EnergyParams& params, std::span<double> out);

/// Sum in index order.
double ordered_sum(std::span<const double> values);
/// Scatter per-triangle gradients onto vertices in triangle order.
std::vector<Vec2> scatter_gradients(const TriMesh& mesh, std::span<const std::array<Vec2, 3>> local);

struct PointMultiplicity {
  int count = 0;
  int fiber_segments = 0;
  /// False when y lies on the image of an edge of a non-degenerate triangle.
  bool generic = true;
  int offending_triangle = -1;
};

PointMultiplicity point_multiplicity(const Deformation& def, Vec2 y);
std::vector<PointMultiplicity> multiplicity_batch_serial(const Deformation& def, std::span<const Vec2> ys);
std::vector<PointMultiplicity> multiplicity_batch_parallel(const Deformation& def, std::span<const Vec2> ys);

/// Whole-mesh winding degree per point; nullopt where undefined.
std::vector<std::optional<int>> degree_batch_serial(const Deformation& def, std::span<const Vec2> ys);
std::vector<std::optional<int>> degree_batch_parallel(const Deformation& def, std::span<const Vec2> ys);

}  // namespace monotone_lab::kernels
