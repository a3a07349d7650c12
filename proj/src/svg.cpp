#include "monotone_lab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "monotone_lab/errors.hpp"

namespace monotone_lab::svg {
namespace {

constexpr double kPanel = 480.0;
constexpr double kMargin = 16.0;
constexpr const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628"};

struct Frame {
  double x0, y0, scale, offset;
  Vec2 map(Vec2 p) const {
    return {offset + kMargin + (p.x - x0) * scale, kMargin + kPanel - (p.y - y0) * scale};
  }
};

Frame fit(const std::vector<Vec2>& pts, double offset) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (Vec2 p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  if (!(x1 >= x0)) x0 = x1 = y0 = y1 = 0.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  return {x0, y0, kPanel / span, offset};
}

void triangle_path(std::ostream& out, const Frame& f, Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 pa = f.map(a), pb = f.map(b), pc = f.map(c);
  out << "M" << pa.x << "," << pa.y << "L" << pb.x << "," << pb.y << "L" << pc.x << "," << pc.y << "Z";
}

void panel(std::ostream& out, const Deformation& def, const OverlayLayers& layers, bool image_side) {
  const TriMesh& mesh = def.mesh();
  auto pos = [&](int v) { return image_side ? def.image(v) : mesh.vertex(v); };
  const Frame f = fit(image_side ? def.image() : mesh.vertices(), image_side ? kPanel + 2 * kMargin : 0.0);

  out << "<path fill=\"none\" stroke=\"" << (image_side ? "#555555" : "#999999")
      << "\" stroke-width=\"0.4\" d=\"";
  for (const Triangle& t : mesh.triangles()) triangle_path(out, f, pos(t[0]), pos(t[1]), pos(t[2]));
  out << "\"/>\n";

  if (image_side) {
    // Flipped or degenerate image triangles.
    out << "<path fill=\"#000000\" fill-opacity=\"0.35\" stroke=\"none\" d=\"";
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      if (def.jacobian(t) > 0.0) continue;
      const Triangle& tri = mesh.triangles()[t];
      triangle_path(out, f, pos(tri[0]), pos(tri[1]), pos(tri[2]));
    }
    out << "\"/>\n";
  }

  for (std::size_t k = 0; k < layers.components.size(); ++k) {
    out << "<path fill=\"" << kPalette[k % std::size(kPalette)] << "\" fill-opacity=\"0.5\" stroke=\"none\" d=\"";
    for (int t : layers.components[k]) {
      const Triangle& tri = mesh.triangles()[t];
      triangle_path(out, f, pos(tri[0]), pos(tri[1]), pos(tri[2]));
    }
    out << "\"/>\n";
  }

  for (const EscapeWitness& e : layers.escapes) {
    const Vec2 p = f.map(pos(e.vertex));
    out << "<circle cx=\"" << p.x << "\" cy=\"" << p.y << "\" r=\"3\" fill=\"#d95f02\"/>\n";
  }
  if (image_side) {
    for (Vec2 m : layers.markers) {
      const Vec2 p = f.map(m);
      out << "<path stroke=\"#1b9e77\" stroke-width=\"1\" d=\"M" << p.x - 3 << "," << p.y << "h6M" << p.x << ","
          << p.y - 3 << "v6\"/>\n";
    }
  }
}

}  // namespace

std::string overlay(const Deformation& def, const OverlayLayers& layers) {
  std::ostringstream out;
  out << std::setprecision(6);
  const double width = 2 * kPanel + 4 * kMargin, height = kPanel + 2 * kMargin;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  panel(out, def, layers, false);
  panel(out, def, layers, true);
  out << "</svg>\n";
  return out.str();
}

void write_overlay(const std::filesystem::path& path, const Deformation& def, const OverlayLayers& layers) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << overlay(def, layers);
}

}  // namespace monotone_lab::svg
