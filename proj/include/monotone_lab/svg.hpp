#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "monotone_lab/deformation.hpp"
#include "monotone_lab/verify.hpp"

namespace monotone_lab::svg {

struct OverlayLayers {
  /// Reference-side triangle sets drawn filled in both panels.
  std::vector<std::vector<int>> components;
  std::vector<EscapeWitness> escapes;
  /// Target-side points (e.g. sampled y values) marked in the image panel.
  std::vector<Vec2> markers;
};

/// Two panels: reference mesh on the left, image mesh on the right.
std::string overlay(const Deformation& def, const OverlayLayers& layers = {});
void write_overlay(const std::filesystem::path& path, const Deformation& def, const OverlayLayers& layers = {});

}  // namespace monotone_lab::svg
