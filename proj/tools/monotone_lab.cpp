#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "monotone_lab/analytic_map.hpp"
#include "monotone_lab/boundary.hpp"
#include "monotone_lab/degree.hpp"
#include "monotone_lab/energy.hpp"
#include "monotone_lab/errors.hpp"
#include "monotone_lab/io.hpp"
#include "monotone_lab/minimize.hpp"
#include "monotone_lab/svg.hpp"
#include "monotone_lab/triangulate.hpp"
#include "monotone_lab/verify.hpp"

namespace fs = std::filesystem;
using namespace monotone_lab;
using io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitConfig = 2;

// ---- option registry ------------------------------------------------------
//
// Every option is a CLI flag and a config key of the same name. Flags win over
// config values, config values over defaults.

class Settings {
 public:
  explicit Settings(CLI::App& app) : app_(app) {}

  template <class T>
  void add(const std::string& name, const std::string& help) {
    auto& slot = strings_[name];
    CLI::Option* opt = app_.add_option("--" + name, slot, help);
    if constexpr (std::is_same_v<T, std::vector<double>>) opt->delimiter(',');
    else opt->expected(1);
    options_[name] = opt;
  }
  void flag(const std::string& name, const std::string& help) { options_[name] = app_.add_flag("--" + name, help); }

  void load_config(const Json& config) {
    for (const auto& [key, value] : config.items()) {
      if (key == "command") continue;
      if (!options_.count(key)) throw ConfigError("unknown config key '" + key + "'");
      config_[key] = value;
    }
  }

  bool given(const std::string& name) const { return on_command_line(name) || config_.count(name); }

  bool enabled(const std::string& name) const {
    if (on_command_line(name)) return true;
    const auto it = config_.find(name);
    if (it == config_.end()) return false;
    if (!it->second.is_boolean()) throw ConfigError("config key '" + name + "' must be a boolean");
    return it->second.get<bool>();
  }

  std::optional<Json> raw(const std::string& name) const {
    if (on_command_line(name)) {
      const auto& v = strings_.at(name);
      if (v.size() == 1) return Json(v[0]);
      return Json(v);
    }
    const auto it = config_.find(name);
    if (it == config_.end()) return std::nullopt;
    return it->second;
  }

  std::string str(const std::string& name, const std::string& fallback = "") const {
    const auto v = raw(name);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError("option '" + name + "' must be a string");
    return v->get<std::string>();
  }

  double num(const std::string& name, double fallback) const {
    const auto v = raw(name);
    if (!v) return fallback;
    return to_number(name, *v);
  }

  long long integer(const std::string& name, long long fallback) const {
    const auto v = raw(name);
    if (!v) return fallback;
    const double x = to_number(name, *v);
    if (x != std::floor(x)) throw ConfigError("option '" + name + "' must be an integer");
    return static_cast<long long>(x);
  }

  std::vector<double> list(const std::string& name) const {
    const auto v = raw(name);
    if (!v) return {};
    std::vector<double> out;
    if (v->is_array()) {
      for (const Json& e : *v) out.push_back(to_number(name, e));
    } else {
      out.push_back(to_number(name, *v));
    }
    return out;
  }

  std::optional<Vec2> point(const std::string& name) const {
    const auto v = raw(name);
    if (!v) return std::nullopt;
    const std::vector<double> xs = list(name);
    if (xs.size() != 2) throw ConfigError("option '" + name + "' expects two coordinates x,y");
    return Vec2{xs[0], xs[1]};
  }

  std::vector<Vec2> points(const std::string& name) const {
    const auto v = raw(name);
    if (!v) return {};
    std::vector<Vec2> out;
    if (v->is_array() && !v->empty() && v->front().is_array()) {
      for (const Json& p : *v) out.push_back(io::vec2_from_json(p));
      return out;
    }
    const std::vector<double> xs = list(name);
    if (xs.size() % 2 != 0) throw ConfigError("option '" + name + "' expects coordinate pairs x1,y1,x2,y2,...");
    for (std::size_t i = 0; i < xs.size(); i += 2) out.push_back({xs[i], xs[i + 1]});
    return out;
  }

 private:
  bool on_command_line(const std::string& name) const {
    const auto it = options_.find(name);
    return it != options_.end() && it->second->count() > 0;
  }

  static double to_number(const std::string& name, const Json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      std::size_t used = 0;
      try {
        const double x = std::stod(s, &used);
        if (used == s.size()) return x;
      } catch (const std::exception&) {
      }
    }
    throw ConfigError("option '" + name + "' expects a number, got " + v.dump());
  }

  CLI::App& app_;
  std::map<std::string, std::vector<std::string>> strings_;
  std::map<std::string, CLI::Option*> options_;
  std::map<std::string, Json> config_;
};

// Nested config sections are flattened onto option names.
Json flatten_config(const Json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  Json flat = Json::object();
  for (const auto& [key, value] : config.items()) {
    if (key == "domain" && value.is_object()) {
      for (const auto& [k, v] : value.items()) flat[k] = v;
    } else if (key == "map" && value.is_object()) {
      for (const auto& [k, v] : value.items()) {
        if (k == "name") flat["map"] = v;
        else if (k == "params" && v.is_object())
          for (const auto& [pk, pv] : v.items()) flat[pk] = pv;
        else flat[k] = v;
      }
    } else if ((key == "minimize" || key == "verify") && value.is_object()) {
      for (const auto& [k, v] : value.items()) flat[k] = v;
    } else {
      flat[key] = value;
    }
  }
  return flat;
}

// ---- pipeline pieces ------------------------------------------------------

struct Source {
  Deformation deformation;
  PlanarDomain target;
  Json description;
  std::vector<Vec2> probes;
  std::optional<AnalyticMap> analytic;
};

PlanarDomain builtin_domain(const std::string& name, int segments) {
  if (name == "unit-square") return PlanarDomain::unit_square();
  if (name == "unit-disk") return PlanarDomain::unit_disk(segments);
  if (name == "rectangle-R") return PlanarDomain::rectangle(-1, 1, -2, 2);
  throw ConfigError("unknown builtin domain '" + name + "' (unit-square, unit-disk, rectangle-R)");
}

PlanarDomain polygon_option(const Settings& s, const std::string& name) {
  const Json v = *s.raw(name);
  if (v.is_string()) return io::polygon_from_json(io::read_json(v.get<std::string>()));
  return io::polygon_from_json(v);
}

int segments_of(const Settings& s) {
  const long long n = s.integer("segments", 128);
  if (n < 3) throw ConfigError("--segments must be at least 3");
  return static_cast<int>(n);
}

double mesh_h(const Settings& s) {
  const double h = s.num("h", 0.1);
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("--h must be positive");
  return h;
}

std::optional<PlanarDomain> explicit_domain(const Settings& s) {
  const int sources = s.given("builtin") + s.given("polygon") + s.given("mesh");
  if (sources > 1) throw ConfigError("give at most one of --builtin, --polygon, --mesh");
  if (s.given("builtin")) return builtin_domain(s.str("builtin"), segments_of(s));
  if (s.given("polygon")) return polygon_option(s, "polygon");
  return std::nullopt;
}

MeshPtr mesh_for_domain(const Settings& s, const PlanarDomain& domain) {
  const double h = mesh_h(s);
  if (s.given("builtin") && s.str("builtin") == "unit-disk")
    return std::make_shared<TriMesh>(triangulate_disk(segments_of(s), h));
  return std::make_shared<TriMesh>(triangulate(domain, h));
}

PlanarDomain reference_polygon(const TriMesh& mesh) {
  std::vector<Vec2> loop;
  for (int v : mesh.boundary()) loop.push_back(mesh.vertex(v));
  return PlanarDomain(std::move(loop));
}

// Mesh selected by --mesh, --builtin or --polygon; unit square by default.
MeshPtr reference_mesh(const Settings& s) {
  if (s.given("mesh")) return std::make_shared<TriMesh>(io::mesh_from_json(io::read_json(s.str("mesh"))));
  const std::optional<PlanarDomain> d = explicit_domain(s);
  return mesh_for_domain(s, d ? *d : PlanarDomain::unit_square());
}

PlanarDomain target_option(const Settings& s, const PlanarDomain& fallback) {
  if (!s.given("target")) return fallback;
  const Json v = *s.raw("target");
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "unit-square" || name == "unit-disk" || name == "rectangle-R") return builtin_domain(name, segments_of(s));
    return io::polygon_from_json(io::read_json(name));
  }
  return io::polygon_from_json(v);
}

std::vector<Vec2> analytic_probes(const AnalyticMap& map) {
  switch (map.kind()) {
    case AnalyticKind::radial_collapse: return {{0.5, 0.0}};
    case AnalyticKind::rectangle_pinch: return {{0.0, 0.0}};
    case AnalyticKind::disk_bubbles: {
      std::vector<Vec2> out;
      for (const Bubble& b : map.bubbles()) out.push_back({b.center, 0.0});
      return out;
    }
    default: return {};
  }
}

// Per-edge reparametrization t -> t + a t (1 - t) of the polygon boundary.
Vec2 edge_reparam(const PlanarDomain& domain, Vec2 p, double a) {
  const auto& vs = domain.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Vec2 u = vs[i], w = vs[(i + 1) % vs.size()];
    if (segment_distance(u, w, p) > 1e-12) continue;
    const double len = distance(u, w);
    const double t = std::clamp(distance(u, p) / len, 0.0, 1.0);
    const double g = t + a * t * (1.0 - t);
    return u + g * (w - u);
  }
  throw DomainError("boundary vertex does not lie on the domain polygon");
}

BoundaryHomeomorphism boundary_data(const Settings& s, const TriMesh& mesh) {
  const PlanarDomain domain = reference_polygon(mesh);
  const std::string kind = s.str("boundary", "identity");
  if (kind == "identity") return make_boundary_map(mesh, domain, [](Vec2 p) { return p; });
  if (kind == "reparam") {
    const double a = s.num("amplitude", 0.5);
    if (!(std::abs(a) < 1.0)) throw ConfigError("--amplitude must lie in (-1, 1) for a monotone reparametrization");
    return make_boundary_map(mesh, domain, [&](Vec2 p) { return edge_reparam(domain, p, a); });
  }
  if (kind == "scale") {
    const double k = s.num("scale", 2.0);
    if (!(k > 0.0)) throw ConfigError("--scale must be positive");
    std::vector<Vec2> poly;
    for (Vec2 v : domain.vertices()) poly.push_back(k * v);
    return make_boundary_map(mesh, PlanarDomain(poly), [k](Vec2 p) { return k * p; });
  }
  if (kind == "rotate") {
    const double t = s.num("angle", 90.0) * std::acos(-1.0) / 180.0;
    const double c = std::cos(t), sn = std::sin(t);
    auto rot = [c, sn](Vec2 p) { return Vec2{c * p.x - sn * p.y, sn * p.x + c * p.y}; };
    std::vector<Vec2> poly;
    for (Vec2 v : domain.vertices()) poly.push_back(rot(v));
    return make_boundary_map(mesh, PlanarDomain(poly), rot);
  }
  throw ConfigError("unknown --boundary '" + kind + "' (identity, reparam, scale, rotate)");
}

EnergyParams energy_params(const Settings& s) {
  EnergyParams p{s.num("p", 2.0), s.num("alpha", 1.0)};
  p.validate();
  return p;
}

MinimizeOptions minimize_options(const Settings& s, const MeshPtr& mesh) {
  MinimizeOptions o;
  o.max_iterations = static_cast<int>(s.integer("max-iterations", o.max_iterations));
  o.grad_tol = s.num("tol", o.grad_tol);
  o.armijo = s.num("armijo", o.armijo);
  o.backtrack = s.num("backtrack", o.backtrack);
  o.fraction_to_boundary = s.num("fraction-to-boundary", o.fraction_to_boundary);
  if (s.given("initial")) {
    const Deformation init = io::deformation_from_json(io::read_json(s.str("initial")));
    if (init.mesh().num_vertices() != mesh->num_vertices())
      throw ConfigError("--initial deformation has a different vertex count than the mesh");
    o.initial = Deformation(mesh, init.image());
  }
  o.validate();
  return o;
}

struct MinimizeRun {
  MinimizeResult result;
  BoundaryHomeomorphism phi;
};

MinimizeRun run_minimizer(const Settings& s, const MeshPtr& mesh) {
  BoundaryHomeomorphism phi = boundary_data(s, *mesh);
  const EnergyParams params = energy_params(s);
  const MinimizeOptions options = minimize_options(s, mesh);
  return {minimize(mesh, phi, params, options), std::move(phi)};
}

Source load_source(const Settings& s, std::optional<MinimizeRun>* minimized = nullptr) {
  const bool has_map = s.given("map"), has_def = s.given("deformation");
  if (has_map + has_def != 1) throw ConfigError("give exactly one map source: --map <name> or --deformation <file>");

  if (has_def) {
    if (s.given("builtin") || s.given("polygon") || s.given("mesh"))
      throw ConfigError("--deformation carries its own mesh; drop --builtin/--polygon/--mesh");
    Deformation d = io::deformation_from_json(io::read_json(s.str("deformation")));
    const PlanarDomain target = target_option(s, reference_polygon(d.mesh()));
    return {std::move(d), target, Json{{"deformation", s.str("deformation")}}, {}, std::nullopt};
  }

  const std::string name = s.str("map");
  if (name == "minimize") {
    const MeshPtr mesh = reference_mesh(s);
    MinimizeRun run = run_minimizer(s, mesh);
    const PlanarDomain target = run.phi.target_domain;
    Json desc{{"map", "minimize"},
              {"boundary", s.str("boundary", "identity")},
              {"termination", to_string(run.result.report.termination)},
              {"iterations", run.result.report.iterations}};
    Deformation d = run.result.deformation;
    if (minimized) *minimized = std::move(run);
    return {std::move(d), target_option(s, target), desc, {}, std::nullopt};
  }

  const int truncation = static_cast<int>(s.integer("truncation", 5));
  const double profile = s.num("profile", 2.0);
  if (truncation < 1) throw ConfigError("--truncation must be at least 1");
  AnalyticMap map = [&] {
    try {
      return AnalyticMap::by_name(name, truncation, profile);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }();
  const int segments = segments_of(s);
  const PlanarDomain natural = map.natural_domain(segments);
  MeshPtr mesh;
  if (s.given("mesh") || s.given("polygon")) {
    mesh = reference_mesh(s);
  } else if (s.given("builtin")) {
    const PlanarDomain chosen = builtin_domain(s.str("builtin"), segments);
    if (chosen.vertices() != natural.vertices())
      throw ConfigError("map '" + name + "' is defined on a different builtin domain");
    mesh = std::make_shared<TriMesh>(map.natural_mesh(mesh_h(s), segments));
  } else {
    mesh = std::make_shared<TriMesh>(map.natural_mesh(mesh_h(s), segments));
  }
  Deformation d = [&] {
    try {
      return sample_analytic(map, mesh);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("mesh does not fit the map's domain: ") + e.what());
    }
  }();
  Json desc{{"map", map.name()}};
  if (map.kind() == AnalyticKind::disk_bubbles) {
    desc["truncation"] = truncation;
    desc["profile"] = profile;
  }
  return {std::move(d), target_option(s, natural), desc, analytic_probes(map), map};
}

std::uint64_t required_seed(const Settings& s) {
  if (!s.given("seed")) throw ConfigError("--seed is required when sampling verifiers are enabled");
  const long long seed = s.integer("seed", 0);
  if (seed < 0) throw ConfigError("--seed must be non-negative");
  return static_cast<std::uint64_t>(seed);
}

Json mesh_summary(const TriMesh& m) {
  return {{"vertices", m.num_vertices()},
          {"triangles", m.num_triangles()},
          {"boundary_vertices", m.boundary().size()},
          {"area", m.total_area()},
          {"max_edge_length", m.max_edge_length()}};
}

struct Output {
  fs::path dir;
  bool svg = true;
};

Output output_of(const Settings& s) { return {s.str("out", "out"), !s.enabled("no-svg")}; }

void finish(const Output& out, Json& report, const Deformation& def, const svg::OverlayLayers& layers) {
  io::write_json(out.dir / "report.json", report);
  if (out.svg) svg::write_overlay(out.dir / "overlay.svg", def, layers);
}

const char* yes(bool b) { return b ? "pass" : "FAIL"; }

// ---- subcommands ----------------------------------------------------------

int cmd_mesh(const Settings& s) {
  const MeshPtr mesh = reference_mesh(s);
  const Output out = output_of(s);
  Json report{{"command", "mesh"}, {"h", mesh_h(s)}, {"mesh", mesh_summary(*mesh)}, {"verdict", true}};
  io::write_json(out.dir / "mesh.json", io::to_json(*mesh));
  finish(out, report, Deformation::identity(mesh), {});
  std::printf("mesh: %d vertices, %d triangles, max edge %.4g -> %s\n", mesh->num_vertices(), mesh->num_triangles(),
              mesh->max_edge_length(), (out.dir / "mesh.json").c_str());
  return kExitOk;
}

int cmd_example(const Settings& s) {
  const Source src = load_source(s);
  const Output out = output_of(s);
  const Deformation& d = src.deformation;
  const HypothesisStatus hyp = check_hypotheses(d, src.target);
  Json report{{"command", "example"}, {"source", src.description}, {"mesh", mesh_summary(d.mesh())},
              {"hypotheses", io::to_json(hyp)},
              {"jacobian_integral", integrate_jacobian(d)}, {"target_area", src.target.area()}};
  const EnergyParts parts = energy_parts(d, {2.0, 1.0});
  report["dirichlet_energy"] = parts.stretch;
  report["verdict"] = true;
  io::write_json(out.dir / "deformation.json", io::to_json(d));
  finish(out, report, d, {});
  std::printf("example %s: %d triangles, min J %.3g, trace valid %s -> %s\n",
              src.description.value("map", "").c_str(), d.mesh().num_triangles(), hyp.min_jacobian,
              hyp.trace_valid() ? "yes" : "no", (out.dir / "deformation.json").c_str());
  return kExitOk;
}

int cmd_degree(const Settings& s) {
  const Source src = load_source(s);
  const Output out = output_of(s);
  const Deformation& d = src.deformation;
  const std::optional<Vec2> y = s.point("y");
  if (!y) throw ConfigError("--y x,y is required");
  const double eps = s.num("eps", default_eps(d));
  if (!(eps > 0.0)) throw ConfigError("--eps must be positive");

  Json report{{"command", "degree"}, {"source", src.description}, {"y", io::to_json(*y)}, {"eps", eps}};
  const Region whole = Region::whole(d.mesh_ptr());
  bool defined = true;
  try {
    report["degree"] = degree_winding(d, whole, *y);
  } catch (const DegreeUndefined& e) {
    report["degree"] = nullptr;
    report["degree_note"] = e.what();
    defined = false;
  }
  const PreimageComponents pc = preimage_components(d, *y, eps);
  const JacobianIdentityReport jid = degree_jacobian_identity(d, *y, eps);
  Json comps = Json::array();
  svg::OverlayLayers layers;
  for (std::size_t i = 0; i < pc.components.size(); ++i) {
    const PreimageComponent& c = pc.components[i];
    Json jc{{"triangles", c.triangles},
            {"touches_boundary", c.touches_boundary},
            {"degree", c.degree ? Json(*c.degree) : Json(nullptr)},
            {"jac_avg", nullptr}};
    for (const JacobianIdentityEntry& e : jid.entries)
      if (e.component == i) jc["jac_avg"] = e.jacobian_average;
    comps.push_back(jc);
    layers.components.push_back(c.triangles);
  }
  report["components"] = comps;
  report["jacobian_identity"] = io::to_json(jid);
  report["verdict"] = defined;
  layers.markers.push_back(*y);
  finish(out, report, d, layers);
  std::printf("degree at (%g, %g): %s; %zu components at eps %.3g\n", y->x, y->y,
              defined ? std::to_string(report["degree"].get<int>()).c_str() : "undefined", pc.components.size(), eps);
  return defined ? kExitOk : kExitVerification;
}

int cmd_verify(const Settings& s) {
  bool mono = s.enabled("monotone"), inv = s.enabled("invertibility"), surj = s.enabled("surjectivity");
  bool osc = s.enabled("oscillation"), weak = s.enabled("weak");
  if (s.enabled("all")) mono = inv = surj = osc = true;
  if (!(mono || inv || surj || osc || weak))
    throw ConfigError("enable at least one of --monotone, --invertibility, --surjectivity, --oscillation, --weak, --all");
  const std::uint64_t seed = (mono || inv) ? required_seed(s) : 0;
  const Output out = output_of(s);

  std::optional<MinimizeRun> minimized;
  const Source src = load_source(s, &minimized);
  const Deformation& d = src.deformation;
  const PlanarDomain& target = src.target;
  const VerifyOptions vopts{!s.enabled("allow-invalid-trace")};

  // Validate every option before the first verifier runs.
  const std::vector<double> ladder = s.list("eps");
  std::vector<Vec2> points = s.points("points");
  if (!s.enabled("no-probes")) points.insert(points.begin(), src.probes.begin(), src.probes.end());
  const long long interior = s.integer("samples", 100), boundary = s.integer("boundary-samples", 0);
  const long long inv_samples = s.integer("invertibility-samples", 10000);
  const long long grid = s.integer("grid", 50);
  if (interior < 0 || boundary < 0 || inv_samples < 1 || grid < 1) throw ConfigError("sample counts must be positive");
  const BBox box = target.bbox();
  const Vec2 centre = s.point("center").value_or(Vec2{0.5 * (box.lo.x + box.hi.x), 0.5 * (box.lo.y + box.hi.y)});
  const double radius = s.num("radius", target.contains(centre) ? target.distance_to_boundary(centre) : 0.0);
  std::vector<double> radii = s.list("radii");
  if (radii.empty()) radii = {0.2 * radius, 0.1 * radius, 0.05 * radius, 0.025 * radius};
  const int coord = static_cast<int>(s.integer("coord", 1));
  if ((osc || weak) && !(radius > 0.0)) throw ConfigError("--radius must be positive");
  if (weak && coord != 1 && coord != 2) throw ConfigError("--coord must be 1 or 2");

  Json report{{"command", "verify"}, {"source", src.description}, {"mesh", mesh_summary(d.mesh())}};
  if (minimized) report["minimize"] = io::to_json(minimized->result.report);
  report["hypotheses"] = io::to_json(check_hypotheses(d, target));
  bool all_pass = true;
  svg::OverlayLayers layers;
  Json verdicts = Json::object();

  if (mono) {
    const MonotonicityReport r = verify_monotone(
        d, target, {static_cast<std::size_t>(interior), static_cast<std::size_t>(boundary), seed, points}, ladder, vopts);
    Json jr = io::to_json(r);
    for (const MonotoneSample& m : r.samples) {
      if (m.monotone) continue;
      jr["witness"] = {{"y", io::to_json(m.y)}, {"components", m.components.size()}};
      for (const auto& c : m.components) layers.components.push_back(c);
      layers.markers.push_back(m.y);
      break;
    }
    report["monotone"] = jr;
    verdicts["monotone"] = r.verdict;
    all_pass = all_pass && r.verdict;
    std::printf("monotone: %s (%zu/%zu samples fail)\n", yes(r.verdict), r.failures, r.samples.size());
  }
  if (inv) {
    const InvertibilityReport r =
        verify_invertibility(d, target, static_cast<std::size_t>(inv_samples), seed, vopts);
    report["invertibility"] = io::to_json(r);
    verdicts["invertibility"] = r.verdict;
    all_pass = all_pass && r.verdict;
    for (const MultiplicityWitness& w : r.witnesses) layers.markers.push_back(w.y);
    std::printf("invertibility: %s (N=1 fraction %.4f, area residual %.2e)\n", yes(r.verdict), r.single_fraction,
                r.area_residual);
  }
  if (surj) {
    const SurjectivityReport r = verify_surjectivity(d, target, {static_cast<int>(grid), static_cast<int>(grid), 0.0}, vopts);
    report["surjectivity"] = io::to_json(r);
    verdicts["surjectivity"] = r.verdict;
    all_pass = all_pass && r.verdict;
    layers.escapes = r.escapes;
    std::printf("surjectivity: %s (covered %.4f, %zu escapes)\n", yes(r.verdict), r.covered_fraction,
                r.escapes.size());
  }
  if (osc) {
    const OscillationProfile r = [&] {
      try {
        return oscillation_profile(d, centre, radius, radii);
      } catch (const DomainError& e) {
        throw ConfigError(std::string(e.what()) + "; choose larger --radii or another --center");
      }
    }();
    report["oscillation"] = io::to_json(r);
    verdicts["oscillation"] = r.verdict;
    all_pass = all_pass && r.verdict;
    std::printf("oscillation: %s (C = %.4g)\n", yes(r.verdict), r.fitted_c);
  }
  if (weak) {
    const WeakMonotoneReport r = weak_monotone_check(d, coord, centre, radius);
    report["weak_monotone"] = io::to_json(r);
    verdicts["weak_monotone"] = r.verdict;
    all_pass = all_pass && r.verdict;
    std::printf("weak monotone (coordinate %d): %s\n", coord, yes(r.verdict));
  }
  report["verdicts"] = verdicts;
  report["verdict"] = all_pass;
  finish(out, report, d, layers);
  return all_pass ? kExitOk : kExitVerification;
}

int cmd_minimize(const Settings& s) {
  const Output out = output_of(s);
  const MeshPtr mesh = reference_mesh(s);
  const MinimizeRun run = run_minimizer(s, mesh);
  const MinimizeReport& r = run.result.report;
  const bool ok = r.termination == Termination::converged && r.min_j_final > 0.0 &&
                  trace_matches(run.result.deformation, run.phi);
  Json report{{"command", "minimize"},
              {"boundary", s.str("boundary", "identity")},
              {"params", {{"p", s.num("p", 2.0)}, {"alpha", s.num("alpha", 1.0)}}},
              {"mesh", mesh_summary(*mesh)},
              {"minimize", io::to_json(r)},
              {"verdict", ok}};
  io::write_json(out.dir / "deformation.json", io::to_json(run.result.deformation));
  finish(out, report, run.result.deformation, {});
  std::printf("minimize: %s after %d iterations, energy %.12g, grad %.2e, min J %.4g\n",
              to_string(r.termination).c_str(), r.iterations, r.final_energy, r.final_grad_inf, r.min_j_final);
  return ok ? kExitOk : kExitVerification;
}

void add_common(Settings& s) {
  s.add<std::string>("config", "JSON config file; flags override its values");
  s.add<std::string>("out", "output directory for report.json and overlay.svg (default: out)");
  s.flag("no-svg", "skip overlay.svg");
}

void add_domain(Settings& s) {
  s.add<std::string>("builtin", "builtin domain: unit-square, unit-disk, rectangle-R");
  s.add<std::string>("polygon", "polygon JSON file {\"vertices\": [[x, y], ...]}");
  s.add<std::string>("mesh", "mesh JSON file");
  s.add<int>("segments", "sides of the unit-disk polygon (default 128)");
  s.add<double>("h", "mesh size (default 0.1)");
}

void add_map(Settings& s) {
  s.add<std::string>("map", "identity, disk-bubbles, radial-collapse, pinch-H or minimize");
  s.add<std::string>("deformation", "deformation JSON file");
  s.add<int>("truncation", "disk-bubbles: number of bubbles (default 5)");
  s.add<double>("profile", "disk-bubbles: profile constant (default 2)");
  s.add<std::string>("target", "target domain: builtin name or polygon JSON file");
}

void add_minimize(Settings& s) {
  s.add<std::string>("boundary", "boundary data: identity, reparam, scale, rotate (default identity)");
  s.add<double>("amplitude", "reparam amplitude in (-1, 1) (default 0.5)");
  s.add<double>("scale", "scale factor (default 2)");
  s.add<double>("angle", "rotation angle in degrees (default 90)");
  s.add<double>("p", "stretch exponent p >= 2 (default 2)");
  s.add<double>("alpha", "barrier exponent alpha > 0 (default 1)");
  s.add<double>("tol", "gradient infinity-norm tolerance (default 1e-8)");
  s.add<int>("max-iterations", "iteration cap (default 10000)");
  s.add<double>("armijo", "Armijo slope parameter (default 1e-4)");
  s.add<double>("backtrack", "backtracking factor (default 0.5)");
  s.add<double>("fraction-to-boundary", "step safeguard (default 0.9)");
  s.add<std::string>("initial", "initial deformation JSON file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise-affine deformations: meshing, energy minimization and degree-based verification"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::unique_ptr<Settings> settings;
    int (*run)(const Settings&);
  };
  std::vector<Command> commands;
  auto add_command = [&](const char* name, const char* help, int (*run)(const Settings&)) -> Settings& {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.push_back({sub, std::make_unique<Settings>(*sub), run});
    Settings& s = *commands.back().settings;
    add_common(s);
    return s;
  };

  {
    Settings& s = add_command("mesh", "triangulate a domain", cmd_mesh);
    add_domain(s);
  }
  {
    Settings& s = add_command("example", "sample an example map on its mesh", cmd_example);
    add_domain(s);
    add_map(s);
  }
  {
    Settings& s = add_command("degree", "degree and preimage components at a point", cmd_degree);
    add_domain(s);
    add_map(s);
    add_minimize(s);
    s.add<std::vector<double>>("y", "query point x,y");
    s.add<double>("eps", "preimage ball radius (default: mesh-derived)");
  }
  {
    Settings& s = add_command("verify", "run the verification suite", cmd_verify);
    add_domain(s);
    add_map(s);
    add_minimize(s);
    s.add<long long>("seed", "sampling seed (required for --monotone and --invertibility)");
    s.flag("all", "monotone, invertibility, surjectivity and oscillation");
    s.flag("monotone", "connected preimages via degree on eps-components");
    s.flag("invertibility", "N(y) = 1 almost everywhere and the area identity");
    s.flag("surjectivity", "grid coverage and escape witnesses");
    s.flag("oscillation", "oscillation decay against the energy");
    s.flag("weak", "max/min principle for one coordinate");
    s.flag("no-probes", "do not add the example map's characteristic points to the monotone samples");
    s.flag("allow-invalid-trace", "run even if the boundary trace is not a homeomorphism onto the target");
    s.add<long long>("samples", "monotone interior samples (default 100)");
    s.add<long long>("boundary-samples", "monotone boundary samples (default 0)");
    s.add<std::vector<double>>("points", "extra monotone samples x1,y1,x2,y2,...");
    s.add<std::vector<double>>("eps", "strictly decreasing eps ladder (default 4e,2e,e)");
    s.add<long long>("invertibility-samples", "invertibility samples (default 10000)");
    s.add<long long>("grid", "surjectivity grid resolution per axis (default 50)");
    s.add<std::vector<double>>("center", "oscillation/weak ball centre x,y (default: target bbox centre)");
    s.add<double>("radius", "outer ball radius (default: distance from centre to boundary)");
    s.add<std::vector<double>>("radii", "oscillation radii in (0, radius/2)");
    s.add<int>("coord", "weak check coordinate 1 or 2 (default 1)");
  }
  {
    Settings& s = add_command("minimize", "minimize the energy under boundary data", cmd_minimize);
    add_domain(s);
    add_minimize(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (Command& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      if (c.settings->given("config")) {
        const Json config = io::read_json(c.settings->str("config"));
        if (config.is_object() && config.contains("command") && config["command"] != c.app->get_name())
          throw ConfigError("config is for command '" + config["command"].get<std::string>() + "'");
        c.settings->load_config(flatten_config(config));
      }
      return c.run(*c.settings);
    } catch (const ConfigError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return kExitConfig;
    } catch (const GeometryError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return kExitConfig;
    } catch (const InfeasibleError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return kExitConfig;
    } catch (const HypothesisError& e) {
      std::fprintf(stderr, "verification failed: %s\n", e.what());
      return kExitVerification;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kExitConfig;
    }
  }
  return kExitConfig;
}
