#include "monotone_lab/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "monotone_lab/degree.hpp"
#include "monotone_lab/parallel.hpp"
#include "monotone_lab/predicates.hpp"

namespace monotone_lab {

int thread_count() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("MONOTONE_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(n, 1);
}

namespace kernels {
namespace {

struct TriangleFrame {
  Mat2 ref_inverse;
  double area;
  Mat2 deriv;
  double jac;
};

TriangleFrame frame(const Deformation& def, int t) {
  const TriMesh& mesh = def.mesh();
  const Triangle& tri = mesh.triangles()[t];
  const Mat2 ref = Mat2::from_columns(mesh.vertex(tri[1]) - mesh.vertex(tri[0]), mesh.vertex(tri[2]) - mesh.vertex(tri[0]));
  const Mat2 img = Mat2::from_columns(def.image(tri[1]) - def.image(tri[0]), def.image(tri[2]) - def.image(tri[0]));
  const double ref_det = ref.det();
  const Mat2 inv = (1.0 / ref_det) * ref.adjugate();
  return {inv, 0.5 * ref_det, img * inv, img.det() / ref_det};
}

inline double triangle_energy(const Deformation& def, const EnergyParams& params, int t) {
  const TriangleFrame f = frame(def, t);
  if (!(f.jac > 0.0)) return INFINITY;
  const double fro2 = f.deriv.frobenius2();
  const double stretch = params.p == 2.0 ? fro2 : std::pow(fro2, 0.5 * params.p);
  const double barrier = params.alpha == 1.0 ? 1.0 / f.jac : std::pow(f.jac, -params.alpha);
  return f.area * (stretch + barrier);
}

inline std::array<Vec2, 3> triangle_gradient(const Deformation& def, const EnergyParams& params, int t) {
  const TriangleFrame f = frame(def, t);
  const double fro2 = f.deriv.frobenius2();
  const double stretch_coeff = params.p == 2.0 ? 2.0 : params.p * std::pow(fro2, 0.5 * params.p - 1.0);
  const double barrier_coeff = -params.alpha * std::pow(f.jac, -params.alpha - 1.0);
  // dE/dF, then chain through F = P * ref^-1: dE/dP = dE/dF * ref^-T.
  const Mat2 dF = f.area * (stretch_coeff * f.deriv + barrier_coeff * f.deriv.cofactor());
  const Mat2 dP = dF * f.ref_inverse.transpose();
  const Vec2 g1 = dP.col0(), g2 = dP.col1();
  return {-(g1 + g2), g1, g2};
}

// E_T(P + Q) - E_T(P) without forming either energy.
inline double triangle_energy_change(const Deformation& def, std::span<const Vec2> disp, const EnergyParams& params,
                                     int t) {
  const TriangleFrame f = frame(def, t);
  const Triangle& tri = def.mesh().triangles()[t];
  const Mat2 D = Mat2::from_columns(disp[tri[1]] - disp[tri[0]], disp[tri[2]] - disp[tri[0]]) * f.ref_inverse;
  const Mat2& F = f.deriv;
  const double dj = (F.a * D.d + D.a * F.d - F.b * D.c - D.b * F.c) + D.det();
  const double jac = f.jac + dj;
  if (!(jac > 0.0) || !(f.jac > 0.0)) return INFINITY;
  const double fro2 = F.frobenius2();
  const double dfro2 = 2.0 * (F.a * D.a + F.b * D.b + F.c * D.c + F.d * D.d) + D.frobenius2();
  const double stretch = params.p == 2.0
                             ? dfro2
                             : std::pow(fro2, 0.5 * params.p) * std::expm1(0.5 * params.p * std::log1p(dfro2 / fro2));
  const double barrier = params.alpha == 1.0
                             ? -dj / (f.jac * jac)
                             : std::pow(f.jac, -params.alpha) * std::expm1(-params.alpha * std::log1p(dj / f.jac));
  return f.area * (stretch + barrier);
}

bool edge_hit(const predicates::TriangleTest& test) {
  return test.side == predicates::TriangleSide::edge || test.side == predicates::TriangleSide::vertex;
}

// Adds triangle t's contribution to `m`. Returns false on a non-generic hit.
bool accumulate(const Deformation& def, int t, Vec2 y, PointMultiplicity& m) {
  const Triangle& tri = def.mesh().triangles()[t];
  const Vec2 a = def.image(tri[0]), b = def.image(tri[1]), c = def.image(tri[2]);
  if (predicates::orient2d(a, b, c) == 0) {
    if (predicates::on_segment(a, b, y) || predicates::on_segment(b, c, y) || predicates::on_segment(c, a, y))
      ++m.fiber_segments;
    return true;
  }
  const predicates::TriangleTest test = predicates::classify_in_triangle(a, b, c, y);
  if (test.side == predicates::TriangleSide::interior) {
    ++m.count;
  } else if (edge_hit(test)) {
    m.generic = false;
    m.offending_triangle = t;
    return false;
  }
  return true;
}

// Uniform bucket grid over image-triangle bounding boxes.
class ImageIndex {
 public:
  explicit ImageIndex(const Deformation& def) {
    const int nt = def.mesh().num_triangles();
    lo_ = {INFINITY, INFINITY};
    hi_ = {-INFINITY, -INFINITY};
    for (const Vec2& q : def.image()) {
      lo_.x = std::min(lo_.x, q.x);
      lo_.y = std::min(lo_.y, q.y);
      hi_.x = std::max(hi_.x, q.x);
      hi_.y = std::max(hi_.y, q.y);
    }
    const double w = std::max(hi_.x - lo_.x, 1e-300), h = std::max(hi_.y - lo_.y, 1e-300);
    nx_ = std::clamp(static_cast<int>(std::ceil(std::sqrt(nt * w / h))), 1, 1024);
    ny_ = std::clamp(static_cast<int>(std::ceil(static_cast<double>(nt) / nx_)), 1, 1024);
    cw_ = w / nx_;
    ch_ = h / ny_;
    cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (int t = 0; t < nt; ++t) {
      const Triangle& tri = def.mesh().triangles()[t];
      double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
      for (int v : tri) {
        x0 = std::min(x0, def.image(v).x);
        x1 = std::max(x1, def.image(v).x);
        y0 = std::min(y0, def.image(v).y);
        y1 = std::max(y1, def.image(v).y);
      }
      const int i0 = std::max(cx(x0) - 1, 0), i1 = std::min(cx(x1) + 1, nx_ - 1);
      const int j0 = std::max(cy(y0) - 1, 0), j1 = std::min(cy(y1) + 1, ny_ - 1);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
    }
  }

  const std::vector<int>* cell(Vec2 y) const {
    if (y.x < lo_.x || y.x > hi_.x || y.y < lo_.y || y.y > hi_.y) return nullptr;
    return &cells_[static_cast<std::size_t>(cy(y.y)) * nx_ + cx(y.x)];
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>((x - lo_.x) / cw_), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>((y - lo_.y) / ch_), 0, ny_ - 1); }

  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  double cw_ = 1.0, ch_ = 1.0;
  std::vector<std::vector<int>> cells_;
};

PointMultiplicity indexed_multiplicity(const Deformation& def, const ImageIndex& index, Vec2 y) {
  PointMultiplicity m;
  const std::vector<int>* cell = index.cell(y);
  if (!cell) return m;
  for (int t : *cell)
    if (!accumulate(def, t, y, m)) return m;
  return m;
}

std::optional<int> whole_degree(const Deformation& def, const Region& whole, Vec2 y) {
  if (distance_to_image_boundary(def, whole, y) <= kDegreeBoundaryTolerance) return std::nullopt;
  return degree_winding(def, whole, y);
}

}  // namespace

void triangle_energies_serial(const Deformation& def, const EnergyParams& params, std::span<double> out) {
  const int nt = def.mesh().num_triangles();
  for (int t = 0; t < nt; ++t) out[t] = triangle_energy(def, params, t);
}

void triangle_energies_parallel(const Deformation& def, const EnergyParams& params, std::span<double> out) {
  const int nt = def.mesh().num_triangles();
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (int t = 0; t < nt; ++t) out[t] = triangle_energy(def, params, t);
}

void triangle_gradients_serial(const Deformation& def, const EnergyParams& params,
                               std::span<std::array<Vec2, 3>> out) {
  const int nt = def.mesh().num_triangles();
  for (int t = 0; t < nt; ++t) out[t] = triangle_gradient(def, params, t);
}

void triangle_gradients_parallel(const Deformation& def, const EnergyParams& params,
                                 std::span<std::array<Vec2, 3>> out) {
  const int nt = def.mesh().num_triangles();
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (int t = 0; t < nt; ++t) out[t] = triangle_gradient(def, params, t);
}

void triangle_energy_changes_serial(const Deformation& def, std::span<const Vec2> displacement,
                                   const EnergyParams& params, std::span<double> out) {
  const int nt = def.mesh().num_triangles();
  for (int t = 0; t < nt; ++t) out[t] = triangle_energy_change(def, displacement, params, t);
}

void triangle_energy_changes_parallel(const Deformation& def, std::span<const Vec2> displacement,
                                     const EnergyParams& params, std::span<double> out) {
  const int nt = def.mesh().num_triangles();
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (int t = 0; t < nt; ++t) out[t] = triangle_energy_change(def, displacement, params, t);
}

double ordered_sum(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

std::vector<Vec2> scatter_gradients(const TriMesh& mesh, std::span<const std::array<Vec2, 3>> local) {
  std::vector<Vec2> grad(mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) grad[tri[i]] += local[t][i];
  }
  return grad;
}

PointMultiplicity point_multiplicity(const Deformation& def, Vec2 y) {
  PointMultiplicity m;
  for (int t = 0; t < def.mesh().num_triangles(); ++t)
    if (!accumulate(def, t, y, m)) return m;
  return m;
}

std::vector<PointMultiplicity> multiplicity_batch_serial(const Deformation& def, std::span<const Vec2> ys) {
  std::vector<PointMultiplicity> out(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out[i] = point_multiplicity(def, ys[i]);
  return out;
}

std::vector<PointMultiplicity> multiplicity_batch_parallel(const Deformation& def, std::span<const Vec2> ys) {
  const ImageIndex index(def);
  std::vector<PointMultiplicity> out(ys.size());
  const long n = static_cast<long>(ys.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(thread_count())
  for (long i = 0; i < n; ++i) out[i] = indexed_multiplicity(def, index, ys[i]);
  return out;
}

std::vector<std::optional<int>> degree_batch_serial(const Deformation& def, std::span<const Vec2> ys) {
  const Region whole = Region::whole(def.mesh_ptr());
  std::vector<std::optional<int>> out(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out[i] = whole_degree(def, whole, ys[i]);
  return out;
}

std::vector<std::optional<int>> degree_batch_parallel(const Deformation& def, std::span<const Vec2> ys) {
  const Region whole = Region::whole(def.mesh_ptr());
  std::vector<std::optional<int>> out(ys.size());
  const long n = static_cast<long>(ys.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(thread_count())
  for (long i = 0; i < n; ++i) out[i] = whole_degree(def, whole, ys[i]);
  return out;
}

}  // namespace kernels
}  // namespace monotone_lab
