#include "monotone_lab/io.hpp"

#include <fstream>
#include <sstream>

#include "monotone_lab/errors.hpp"

namespace monotone_lab::io {
namespace {

Json points(const std::vector<Vec2>& pts) {
  Json a = Json::array();
  for (Vec2 p : pts) a.push_back(to_json(p));
  return a;
}

std::vector<Vec2> points_from(const Json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of points");
  std::vector<Vec2> out;
  out.reserve(j.size());
  for (const Json& p : j) out.push_back(vec2_from_json(p));
  return out;
}

Json interval(const Interval& i) { return {{"lower", i.lower}, {"upper", i.upper}}; }

}  // namespace

Json to_json(Vec2 p) { return Json::array({p.x, p.y}); }

Vec2 vec2_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("expected a point [x, y], got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const TriMesh& mesh) {
  Json tris = Json::array();
  for (const Triangle& t : mesh.triangles()) tris.push_back(Json::array({t[0], t[1], t[2]}));
  return {{"vertices", points(mesh.vertices())}, {"triangles", tris}, {"boundary", mesh.boundary()}};
}

TriMesh mesh_from_json(const Json& j) {
  try {
    std::vector<Triangle> tris;
    for (const Json& t : j.at("triangles")) tris.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    return TriMesh(points_from(j.at("vertices")), std::move(tris), j.at("boundary").get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed mesh: ") + e.what());
  }
}

Json to_json(const PlanarDomain& domain) { return {{"vertices", points(domain.vertices())}}; }

PlanarDomain polygon_from_json(const Json& j) {
  if (j.is_object()) {
    if (!j.contains("vertices")) throw ConfigError("polygon needs 'vertices'");
    return PlanarDomain(points_from(j["vertices"]));
  }
  return PlanarDomain(points_from(j));
}

Json to_json(const Deformation& def) { return {{"mesh", to_json(def.mesh())}, {"image", points(def.image())}}; }

Deformation deformation_from_json(const Json& j) {
  if (!j.contains("mesh") || !j.contains("image")) throw ConfigError("deformation needs 'mesh' and 'image'");
  auto mesh = std::make_shared<const TriMesh>(mesh_from_json(j["mesh"]));
  return Deformation(std::move(mesh), points_from(j["image"]));
}

Json to_json(const HomeomorphismCheck& c) {
  return {{"valid", c.valid()},
          {"on_target_boundary", c.on_target_boundary},
          {"order_preserving", c.order_preserving},
          {"covers_corners", c.covers_corners},
          {"max_boundary_distance", c.max_boundary_distance}};
}

Json to_json(const HypothesisStatus& h) {
  return {{"boundary_trace", to_json(h.trace)},
          {"min_jacobian", h.min_jacobian},
          {"positive_jacobian", h.positive_jacobian}};
}

Json to_json(const PreimageComponents& c) {
  Json comps = Json::array();
  for (const PreimageComponent& p : c.components) {
    Json e = {{"triangles", p.triangles}, {"touches_boundary", p.touches_boundary}};
    e["degree"] = p.degree ? Json(*p.degree) : Json(nullptr);
    comps.push_back(e);
  }
  return {{"y", to_json(c.y)}, {"eps", c.eps}, {"count", c.components.size()}, {"components", comps}};
}

Json to_json(const JacobianIdentityReport& r) {
  Json entries = Json::array();
  bool ok = true;
  for (const JacobianIdentityEntry& e : r.entries) {
    entries.push_back({{"component", e.component},
                       {"degree", e.degree},
                       {"jacobian_average", e.jacobian_average},
                       {"gap", e.gap}});
    ok = ok && e.gap < 0.05;
  }
  return {{"y", to_json(r.y)},      {"eps", r.eps}, {"polygon_error", r.polygon_error},
          {"entries", entries},     {"skipped", r.skipped}, {"verdict", ok}};
}

Json to_json(const MonotonicityReport& r) {
  Json samples = Json::array();
  Json witnesses = Json::array();
  for (const MonotoneSample& s : r.samples) {
    Json e = {{"y", to_json(s.y)},
              {"on_boundary", s.on_boundary},
              {"queries", points(s.queries)},
              {"counts", s.counts},
              {"monotone", s.monotone}};
    if (s.preimage_near_all) {
      e["preimage_distances"] = s.preimage_distances;
      e["preimage_near_all"] = *s.preimage_near_all;
    }
    if (!s.monotone) {
      witnesses.push_back({{"y", to_json(s.y)}, {"count", s.counts.back()}, {"components", s.components}});
    }
    samples.push_back(std::move(e));
  }
  return {{"seed", r.seed},           {"eps_ladder", r.eps_ladder}, {"mesh_cell", r.mesh_cell},
          {"hypotheses", to_json(r.hypotheses)}, {"failures", r.failures}, {"witnesses", witnesses},
          {"samples", samples},       {"verdict", r.verdict}};
}

Json to_json(const InvertibilityReport& r) {
  Json witnesses = Json::array();
  for (const MultiplicityWitness& w : r.witnesses) witnesses.push_back({{"y", to_json(w.y)}, {"count", w.count}});
  return {{"seed", r.seed},
          {"samples", r.requested},
          {"generic", r.generic},
          {"non_generic", r.non_generic},
          {"single", r.single},
          {"zero", r.zero},
          {"multiple", r.multiple},
          {"single_fraction", r.single_fraction},
          {"single_interval", interval(r.single_interval)},
          {"y0_measure", r.y0_measure},
          {"y0_measure_interval", interval(r.y0_measure_interval)},
          {"jacobian_integral", r.jacobian_integral},
          {"target_area", r.target_area},
          {"area_residual", r.area_residual},
          {"witnesses", witnesses},
          {"witness_preimage_triangles", r.witness_preimage_triangles},
          {"multiplicities", r.multiplicities},
          {"hypotheses", to_json(r.hypotheses)},
          {"verdict", r.verdict}};
}

Json to_json(const SurjectivityReport& r) {
  Json escapes = Json::array();
  for (const EscapeWitness& e : r.escapes)
    escapes.push_back({{"vertex", e.vertex}, {"image", to_json(e.image)}, {"distance", e.distance}});
  return {{"grid", {{"nx", r.nx}, {"ny", r.ny}, {"spacing", r.grid.spacing}}},
          {"grid_points", r.grid_points},
          {"covered", r.covered},
          {"covered_fraction", r.covered_fraction},
          {"uncovered", points(r.uncovered)},
          {"escapes", escapes},
          {"hypotheses", to_json(r.hypotheses)},
          {"verdict", r.verdict}};
}

Json to_json(const OscillationProfile& p) {
  Json flags = Json::array();
  for (bool f : p.flags) flags.push_back(f);
  return {{"center", to_json(p.center)},
          {"outer_radius", p.outer_radius},
          {"radii", p.radii},
          {"oscillation", p.oscillation},
          {"sample_counts", p.sample_counts},
          {"energy", p.energy},
          {"ratios", p.ratios},
          {"fitted_c", p.fitted_c},
          {"least_squares_c", p.least_squares_c},
          {"flags", flags},
          {"verdict", p.verdict}};
}

Json to_json(const WeakMonotoneReport& r) {
  return {{"coord", r.coord},
          {"center", to_json(r.center)},
          {"radius", r.radius},
          {"interior_samples", r.interior_samples},
          {"boundary_samples", r.boundary_samples},
          {"interior_min", r.interior_min},
          {"interior_max", r.interior_max},
          {"boundary_min", r.boundary_min},
          {"boundary_max", r.boundary_max},
          {"verdict", r.verdict}};
}

Json to_json(const MinimizeReport& r) {
  Json steps = Json::array();
  for (const StepRecord& s : r.steps) {
    steps.push_back({{"trial", s.trial_step},
                     {"feasible", s.feasible_step},
                     {"accepted", s.accepted_step},
                     {"backtracks", s.backtracks},
                     {"decrease", s.decrease},
                     {"armijo_bound", s.armijo_bound}});
  }
  return {{"iterations", r.iterations},
          {"termination", to_string(r.termination)},
          {"final_energy", r.final_energy},
          {"final_grad_inf", r.final_grad_inf},
          {"min_j_overall", r.min_j_overall},
          {"min_j_final", r.min_j_final},
          {"energy_trace", r.energy_trace},
          {"steps", steps},
          {"verdict", r.termination == Termination::converged}};
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace monotone_lab::io
