#include "monotone_lab/minimize.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "monotone_lab/errors.hpp"
#include "monotone_lab/kernels.hpp"

namespace monotone_lab {

void MinimizeOptions::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("minimize option " + what); };
  if (max_iterations < 0) fail("max_iterations must be >= 0");
  if (!(grad_tol > 0.0)) fail("grad_tol must be > 0");
  if (!(armijo > 0.0 && armijo <= 0.5)) fail("armijo must lie in (0, 1/2]");
  if (!(backtrack > 0.0 && backtrack < 1.0)) fail("backtrack must lie in (0, 1)");
  if (!(fraction_to_boundary > 0.0 && fraction_to_boundary < 1.0)) fail("fraction_to_boundary must lie in (0, 1)");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max_iterations";
    case Termination::stalled: return "stalled";
  }
  return "unknown";
}

namespace {

std::vector<Vec2> boundary_images(const TriMesh& mesh, const BoundaryHomeomorphism& phi) {
  if (phi.source.size() != phi.target.size()) throw GeometryError("boundary map source/target size mismatch");
  std::vector<Vec2> image(mesh.num_vertices(), Vec2{NAN, NAN});
  for (std::size_t i = 0; i < phi.source.size(); ++i) {
    const int v = phi.source[i];
    if (v < 0 || v >= mesh.num_vertices() || !mesh.is_boundary_vertex(v))
      throw GeometryError("boundary map source is not a boundary vertex");
    image[v] = phi.target[i];
  }
  for (int v : mesh.boundary())
    if (std::isnan(image[v].x)) throw GeometryError("boundary map does not cover every boundary vertex");
  return image;
}

double inf_norm(const std::vector<Vec2>& g) {
  double m = 0.0;
  for (const Vec2& v : g) m = std::max({m, std::abs(v.x), std::abs(v.y)});
  return m;
}

double dot_all(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += dot(a[i], b[i]);
  return s;
}

// Smallest positive root of c0 + c1 s + c2 s^2, or +inf.
double first_positive_root(double c0, double c1, double c2) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2)});
  if (scale == 0.0) return inf;
  if (std::abs(c2) <= 1e-14 * scale) {
    if (c1 == 0.0) return inf;
    const double s = -c0 / c1;
    return s > 0.0 ? s : inf;
  }
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return inf;
  // Numerically stable pair of roots.
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  double best = inf;
  for (double s : {q / c2, q != 0.0 ? c0 / q : inf})
    if (s > 0.0) best = std::min(best, s);
  return best;
}

}  // namespace

double max_feasible_step(const Deformation& def, const std::vector<Vec2>& direction) {
  double best = std::numeric_limits<double>::infinity();
  for (const Triangle& tri : def.mesh().triangles()) {
    const Vec2 e1 = def.image(tri[1]) - def.image(tri[0]), e2 = def.image(tri[2]) - def.image(tri[0]);
    const Vec2 d1 = direction[tri[1]] - direction[tri[0]], d2 = direction[tri[2]] - direction[tri[0]];
    best = std::min(best, first_positive_root(cross(e1, e2), cross(e1, d2) + cross(d1, e2), cross(d1, d2)));
  }
  return best;
}

Deformation tutte_init(MeshPtr mesh, const BoundaryHomeomorphism& phi) {
  if (!phi.target_domain.is_convex())
    throw InfeasibleError(
        "barycentric initialisation needs a convex target polygon; supply MinimizeOptions.initial instead");
  std::vector<Vec2> image = boundary_images(*mesh, phi);

  const int nv = mesh->num_vertices();
  std::vector<int> slot(nv, -1);
  int n = 0;
  for (int v = 0; v < nv; ++v)
    if (!mesh->is_boundary_vertex(v)) slot[v] = n++;

  if (n > 0) {
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 2);
    for (int v = 0; v < nv; ++v) {
      if (slot[v] < 0) continue;
      const std::vector<int>& nbrs = mesh->vertex_neighbors(v);
      entries.emplace_back(slot[v], slot[v], static_cast<double>(nbrs.size()));
      for (int w : nbrs) {
        if (slot[w] >= 0) {
          entries.emplace_back(slot[v], slot[w], -1.0);
        } else {
          rhs(slot[v], 0) += image[w].x;
          rhs(slot[v], 1) += image[w].y;
        }
      }
    }
    Eigen::SparseMatrix<double> laplacian(n, n);
    laplacian.setFromTriplets(entries.begin(), entries.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(laplacian);
    if (solver.info() != Eigen::Success) throw InfeasibleError("barycentric system could not be factored");
    const Eigen::MatrixXd sol = solver.solve(rhs);
    for (int v = 0; v < nv; ++v)
      if (slot[v] >= 0) image[v] = {sol(slot[v], 0), sol(slot[v], 1)};
  }

  Deformation def(std::move(mesh), std::move(image));
  const double min_j = def.min_jacobian();
  if (!(min_j > 0.0)) {
    std::ostringstream msg;
    msg << "barycentric initialisation produced min Jacobian " << min_j;
    throw InfeasibleError(msg.str());
  }
  return def;
}

MinimizeResult minimize(MeshPtr mesh, const BoundaryHomeomorphism& phi, const EnergyParams& params,
                        const MinimizeOptions& options) {
  params.validate();
  options.validate();

  Deformation current = [&] {
    if (!options.initial) return tutte_init(mesh, phi);
    const Deformation& init = *options.initial;
    if (init.mesh_ptr() != mesh && init.mesh().num_vertices() != mesh->num_vertices())
      throw InfeasibleError("initial deformation lives on a different mesh");
    if (!(init.min_jacobian() > 0.0)) throw InfeasibleError("initial deformation has a non-positive Jacobian");
    if (!trace_matches(init, phi)) throw InfeasibleError("initial deformation does not match the boundary data");
    std::vector<Vec2> image = init.image();
    // Pin the boundary exactly to phi.
    const std::vector<Vec2> fixed = boundary_images(*mesh, phi);
    for (int v : mesh->boundary()) image[v] = fixed[v];
    return Deformation(mesh, std::move(image));
  }();

  const int nt = mesh->num_triangles();
  MinimizeReport report;
  std::vector<double> per(nt), change(nt);
  kernels::triangle_energies_parallel(current, params, per);
  report.energy_trace.push_back(kernels::ordered_sum(per));
  report.min_j_overall = current.min_jacobian();

  std::vector<Vec2> grad = energy_gradient(current, params);
  std::vector<Vec2> prev_x, prev_g;
  double last_step = 1.0;

  for (;;) {
    report.final_grad_inf = inf_norm(grad);
    if (report.final_grad_inf < options.grad_tol) {
      report.termination = Termination::converged;
      break;
    }
    if (report.iterations >= options.max_iterations) {
      report.termination = Termination::max_iterations;
      break;
    }

    std::vector<Vec2> direction(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) direction[i] = -grad[i];
    const double slope = dot_all(grad, grad);

    // Barzilai-Borwein trial step, falling back to growth of the last accepted step.
    double trial = 2.0 * last_step;
    if (!prev_x.empty()) {
      std::vector<Vec2> dx(grad.size()), dg(grad.size());
      for (std::size_t i = 0; i < grad.size(); ++i) {
        dx[i] = current.image(static_cast<int>(i)) - prev_x[i];
        dg[i] = grad[i] - prev_g[i];
      }
      const double sy = dot_all(dx, dg);
      if (sy > 0.0) trial = dot_all(dx, dx) / sy;
    }

    StepRecord rec;
    rec.trial_step = trial;
    rec.feasible_step = max_feasible_step(current, direction);
    double step = std::min(trial, options.fraction_to_boundary * rec.feasible_step);

    bool accepted = false;
    std::vector<Vec2> image(current.image().size()), displacement(image.size());
    double decrease = 0.0;
    for (int k = 0; k < 200 && step > 0.0; ++k) {
      for (std::size_t i = 0; i < image.size(); ++i)
        image[i] = current.image(static_cast<int>(i)) + step * direction[i];
      for (int v : mesh->boundary()) image[v] = current.image(v);
      for (std::size_t i = 0; i < image.size(); ++i) displacement[i] = image[i] - current.image(static_cast<int>(i));
      kernels::triangle_energy_changes_parallel(current, displacement, params, change);
      decrease = kernels::ordered_sum(change);
      const double bound = -options.armijo * step * slope;
      if (std::isfinite(decrease) && decrease <= bound && decrease < 0.0) {
        rec.accepted_step = step;
        rec.decrease = decrease;
        rec.armijo_bound = bound;
        accepted = true;
        break;
      }
      step *= options.backtrack;
      ++rec.backtracks;
    }
    if (!accepted) {
      report.termination = Termination::stalled;
      break;
    }

    prev_x = current.image();
    prev_g = grad;
    current = Deformation(mesh, image);
    last_step = rec.accepted_step;
    ++report.iterations;
    report.steps.push_back(rec);
    // Accumulated, so decreases below one ulp of E still register.
    report.energy_trace.push_back(report.energy_trace.back() + decrease);
    report.min_j_overall = std::min(report.min_j_overall, current.min_jacobian());
    grad = energy_gradient(current, params);
  }

  report.min_j_final = current.min_jacobian();
  kernels::triangle_energies_parallel(current, params, per);
  report.final_energy = kernels::ordered_sum(per);
  return {std::move(current), std::move(report)};
}

}  // namespace monotone_lab
