#include "monotone_lab/analytic_map.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "monotone_lab/errors.hpp"
#include "monotone_lab/triangulate.hpp"

namespace monotone_lab {
namespace {

constexpr double kDomainSlack = 1e-12;

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

void check_identity_on_boundary(const AnalyticMap& map) {
  constexpr int kSamples = 1000;
  for (int i = 0; i < kSamples; ++i) {
    Vec2 p;
    if (map.kind() == AnalyticKind::radial_collapse) {
      const double t = 2.0 * std::numbers::pi * i / kSamples;
      p = {std::cos(t), std::sin(t)};
    } else {
      // Perimeter of [-1, 1] x [-2, 2] is 12.
      const double s = 12.0 * i / kSamples;
      if (s < 2.0) p = {-1.0 + s, -2.0};
      else if (s < 6.0) p = {1.0, -2.0 + (s - 2.0)};
      else if (s < 8.0) p = {1.0 - (s - 6.0), 2.0};
      else p = {-1.0, 2.0 - (s - 8.0)};
    }
    const Vec2 q = map.eval(p);
    if (distance(p, q) > 1e-12) {
      std::ostringstream msg;
      msg << map.name() << " is not the identity on the boundary at (" << p.x << ", " << p.y << ")";
      throw GeometryError(msg.str());
    }
  }
}

}  // namespace

AnalyticMap AnalyticMap::identity() { return AnalyticMap{}; }

AnalyticMap AnalyticMap::affine(const Mat2& linear, Vec2 offset) {
  AnalyticMap m;
  m.kind_ = AnalyticKind::affine;
  m.linear_ = linear;
  m.offset_ = offset;
  return m;
}

AnalyticMap AnalyticMap::disk_bubbles(int truncation, double profile) {
  if (truncation < 1 || truncation > 12) throw ConfigError("disk-bubbles truncation must be in [1, 12]");
  if (!(profile > 0.0)) throw ConfigError("disk-bubbles profile constant must be positive");
  AnalyticMap m;
  m.kind_ = AnalyticKind::disk_bubbles;
  m.truncation_ = truncation;
  m.profile_ = profile;
  for (int k = 1; k <= truncation; ++k) {
    Bubble b;
    b.k = k;
    b.center = 1.0 - 1.0 / k;
    b.scale = std::pow(10.0, -k);
    b.log_scale = -k * std::numbers::ln10;
    m.bubbles_.push_back(b);
  }
  for (std::size_t i = 0; i < m.bubbles_.size(); ++i) {
    const Bubble& b = m.bubbles_[i];
    if (!(std::abs(b.center) + 2.0 * b.scale < 1.0)) throw GeometryError("bubble leaves the unit disk");
    for (std::size_t j = i + 1; j < m.bubbles_.size(); ++j) {
      const Bubble& c = m.bubbles_[j];
      if (!(std::abs(b.center - c.center) > 2.0 * (b.scale + c.scale))) throw GeometryError("bubbles overlap");
    }
  }
  return m;
}

AnalyticMap AnalyticMap::radial_collapse() {
  AnalyticMap m;
  m.kind_ = AnalyticKind::radial_collapse;
  check_identity_on_boundary(m);
  return m;
}

AnalyticMap AnalyticMap::rectangle_pinch() {
  AnalyticMap m;
  m.kind_ = AnalyticKind::rectangle_pinch;
  check_identity_on_boundary(m);
  return m;
}

AnalyticMap AnalyticMap::by_name(const std::string& name, int truncation, double profile) {
  if (name == "identity") return identity();
  if (name == "disk-bubbles") return disk_bubbles(truncation, profile);
  if (name == "radial-collapse") return radial_collapse();
  if (name == "pinch-H" || name == "rectangle-pinch") return rectangle_pinch();
  throw ConfigError("unknown analytic map '" + name + "'");
}

std::string AnalyticMap::name() const {
  switch (kind_) {
    case AnalyticKind::identity: return "identity";
    case AnalyticKind::affine: return "affine";
    case AnalyticKind::disk_bubbles: return "disk-bubbles";
    case AnalyticKind::radial_collapse: return "radial-collapse";
    case AnalyticKind::rectangle_pinch: return "pinch-H";
  }
  return "unknown";
}

bool AnalyticMap::in_domain(Vec2 p) const {
  switch (kind_) {
    case AnalyticKind::identity:
    case AnalyticKind::affine: return std::isfinite(p.x) && std::isfinite(p.y);
    case AnalyticKind::disk_bubbles:
    case AnalyticKind::radial_collapse: return norm(p) <= 1.0 + kDomainSlack;
    case AnalyticKind::rectangle_pinch:
      return std::abs(p.x) <= 1.0 + kDomainSlack && std::abs(p.y) <= 2.0 + kDomainSlack;
  }
  return false;
}

Vec2 AnalyticMap::eval(Vec2 p) const {
  if (!in_domain(p)) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") is outside the domain of " << name();
    throw DomainError(msg.str());
  }
  switch (kind_) {
    case AnalyticKind::identity: return p;
    case AnalyticKind::affine: return linear_ * p + offset_;
    case AnalyticKind::disk_bubbles: {
      for (const Bubble& b : bubbles_) {
        const Vec2 u{p.x - b.center, p.y};
        const double r = norm(u);
        if (r > 2.0 * b.scale) continue;
        if (r >= b.scale) return Vec2{b.center, 0.0} + (2.0 * (r - b.scale) / r) * u;
        // Compare on the log scale: s e^{-k^4} underflows for k >= 6.
        const double k4 = std::pow(static_cast<double>(b.k), 4);
        const double log_r = std::log(r);  // -inf at the center
        if (log_r > b.log_scale - k4) return {b.center + profile_ * (b.log_scale - log_r) / k4, 0.0};
        return {b.center + 2.0, 0.0};
      }
      return p;
    }
    case AnalyticKind::radial_collapse: {
      const double r = norm(p);
      if (r >= 0.5) return (2.0 - 1.0 / r) * p;
      return {1.0 - 2.0 * r, 0.0};
    }
    case AnalyticKind::rectangle_pinch: {
      const double ax = std::abs(p.x), ay = std::abs(p.y);
      if (ay <= 1.0) return {p.x, ax * p.y};
      return {p.x, (2.0 * (ay - 1.0) + (2.0 - ay) * ax) * sgn(p.y)};
    }
  }
  return p;
}

Mat2 AnalyticMap::derivative(Vec2 p) const {
  if (!in_domain(p)) throw DomainError("derivative requested outside the domain of " + name());
  switch (kind_) {
    case AnalyticKind::identity: return Mat2::identity();
    case AnalyticKind::affine: return linear_;
    case AnalyticKind::disk_bubbles: {
      for (const Bubble& b : bubbles_) {
        const Vec2 u{p.x - b.center, p.y};
        const double r = norm(u);
        if (r > 2.0 * b.scale) continue;
        if (r >= b.scale) {
          const double f = 2.0 * (1.0 - b.scale / r);
          const double g = 2.0 * b.scale / (r * r * r);
          return {f + g * u.x * u.x, g * u.x * u.y, g * u.x * u.y, f + g * u.y * u.y};
        }
        const double k4 = std::pow(static_cast<double>(b.k), 4);
        if (r > 0.0 && std::log(r) > b.log_scale - k4) {
          const double g = -profile_ / (k4 * r * r);
          return {g * u.x, g * u.y, 0.0, 0.0};
        }
        return {};
      }
      return Mat2::identity();
    }
    case AnalyticKind::radial_collapse: {
      const double r = norm(p);
      if (r >= 0.5) {
        const double f = 2.0 - 1.0 / r;
        const double g = 1.0 / (r * r * r);
        return {f + g * p.x * p.x, g * p.x * p.y, g * p.x * p.y, f + g * p.y * p.y};
      }
      if (r == 0.0) return {};
      return {-2.0 * p.x / r, -2.0 * p.y / r, 0.0, 0.0};
    }
    case AnalyticKind::rectangle_pinch: {
      const double ax = std::abs(p.x), ay = std::abs(p.y);
      if (ay <= 1.0) return {1.0, 0.0, sgn(p.x) * p.y, ax};
      return {1.0, 0.0, sgn(p.y) * (2.0 - ay) * sgn(p.x), 2.0 - ax};
    }
  }
  return Mat2::identity();
}

PlanarDomain AnalyticMap::natural_domain(int segments) const {
  switch (kind_) {
    case AnalyticKind::disk_bubbles:
    case AnalyticKind::radial_collapse: return PlanarDomain::unit_disk(segments);
    case AnalyticKind::rectangle_pinch: return PlanarDomain::rectangle(-1.0, 1.0, -2.0, 2.0);
    default: return PlanarDomain::unit_square();
  }
}

TriMesh AnalyticMap::natural_mesh(double h, int segments) const {
  switch (kind_) {
    case AnalyticKind::radial_collapse: return triangulate_disk(segments, h, {0.5});
    case AnalyticKind::disk_bubbles: {
      TriangulateOptions opts;
      for (const Bubble& b : bubbles_) {
        const Vec2 c{b.center, 0.0};
        opts.required_points.push_back(c);
        std::vector<double> radii{b.scale, 1.5 * b.scale, 2.0 * b.scale};
        const double middle = b.scale * std::exp(-0.5 * std::pow(static_cast<double>(b.k), 4));
        if (middle > 1e-9) radii.push_back(middle);
        for (double r : radii) {
          const int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / h)));
          for (int i = 0; i < n; ++i) {
            const double t = 2.0 * std::numbers::pi * i / n;
            opts.required_points.push_back({c.x + r * std::cos(t), r * std::sin(t)});
          }
        }
        opts.exclusions.push_back({c, 2.0 * b.scale + 0.5 * h});
      }
      return triangulate(natural_domain(segments), h, opts);
    }
    default: return triangulate(natural_domain(segments), h);
  }
}

Deformation sample_analytic(const AnalyticMap& map, MeshPtr mesh) {
  std::vector<Vec2> image;
  image.reserve(mesh->num_vertices());
  for (const Vec2& v : mesh->vertices()) image.push_back(map.eval(v));
  return Deformation(std::move(mesh), std::move(image));
}

}  // namespace monotone_lab
