#pragma once

#include <stdexcept>
#include <string>

#include "monotone_lab/vec2.hpp"

namespace monotone_lab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid polygon or mesh data.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Point outside the domain of a map or mesh.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Query point lies on (or within tolerance of) the image of the region boundary.
class DegreeUndefined : public Error {
 public:
  using Error::Error;
};

/// Query point lies on the image of a triangle edge. The caller is expected to
/// perturb explicitly; `suggested_offset` moves the point off the offending edge.
class NonGenericPoint : public Error {
 public:
  NonGenericPoint(const std::string& what, Vec2 suggested_offset)
      : Error(what), suggested_offset_(suggested_offset) {}
  Vec2 suggested_offset() const { return suggested_offset_; }

 private:
  Vec2 suggested_offset_;
};

/// Deformation violates a feasibility requirement (J_T <= 0, wrong trace).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Verifier called on a deformation that does not satisfy the hypotheses.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace monotone_lab
