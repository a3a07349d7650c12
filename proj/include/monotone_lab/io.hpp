#pragma once

#include <filesystem>

#include "json.hpp"
#include "monotone_lab/degree.hpp"
#include "monotone_lab/deformation.hpp"
#include "monotone_lab/domain.hpp"
#include "monotone_lab/mesh.hpp"
#include "monotone_lab/minimize.hpp"
#include "monotone_lab/verify.hpp"

namespace monotone_lab::io {

using Json = nlohmann::ordered_json;

Json to_json(Vec2 p);
Vec2 vec2_from_json(const Json& j);

/// {"vertices": [[x, y], ...], "triangles": [[a, b, c], ...], "boundary": [i, ...]}
Json to_json(const TriMesh& mesh);
TriMesh mesh_from_json(const Json& j);

/// {"vertices": [[x, y], ...]}; a bare point array is also accepted on input.
Json to_json(const PlanarDomain& domain);
PlanarDomain polygon_from_json(const Json& j);

/// {"mesh": {...}, "image": [[x, y], ...]}
Json to_json(const Deformation& def);
Deformation deformation_from_json(const Json& j);

Json to_json(const HomeomorphismCheck& c);
Json to_json(const HypothesisStatus& h);
Json to_json(const PreimageComponents& c);
Json to_json(const JacobianIdentityReport& r);
Json to_json(const MonotonicityReport& r);
Json to_json(const InvertibilityReport& r);
Json to_json(const SurjectivityReport& r);
Json to_json(const OscillationProfile& p);
Json to_json(const WeakMonotoneReport& r);
Json to_json(const MinimizeReport& r);

/// Throws ConfigError on unreadable or malformed files.
Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; creates parent directories.
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace monotone_lab::io
