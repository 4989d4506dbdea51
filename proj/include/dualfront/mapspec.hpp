#pragma once

// MapSpec documents: a parametrized map F(x^1..x^n) given by expression
// components, with a domain box and optional user-supplied normal.
//
//   name: <identifier-ish text>
//   field: real | complex
//   vars: <v1> <v2> ...
//   domain: <var> <lo> <hi> [periodic]      (one line per variable, optional)
//   kind: affine | projective | curve | planemap
//   component: <expression>                 (m lines)
//   normal: <expression>                    (optional, m lines)
//
// Blank lines and lines starting with '#' are ignored. format_mapspec()
// writes the canonical form, which parses back byte-identically.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualfront/expr.hpp"

namespace dualfront {

enum class ScalarField { kReal, kComplex };

/// affine: m = n+1, projective (homogeneous lift): m = n+2,
/// curve: n = 1, m = 2, planemap: m = n.
enum class MapKind { kAffine, kProjective, kCurve, kPlaneMap };

const char* to_string(ScalarField f);
const char* to_string(MapKind k);

struct DomainRange {
  std::string lo_src;
  std::string hi_src;
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = false;

  double period() const { return hi - lo; }
};

struct MapSpec {
  std::string name;
  ScalarField field = ScalarField::kReal;
  std::vector<std::string> vars;
  std::vector<DomainRange> domain;  // empty, or one entry per variable
  MapKind kind = MapKind::kAffine;
  std::vector<std::string> component_src;
  std::vector<ExprPtr> components;
  std::vector<std::string> normal_src;
  std::vector<ExprPtr> normal;

  int n() const { return static_cast<int>(vars.size()); }
  int m() const { return static_cast<int>(components.size()); }
  bool has_normal() const { return !normal.empty(); }
  bool has_domain() const { return !domain.empty(); }
  bool fully_periodic() const;

  /// True when `p` lies in the closed domain box (periodic variables always pass).
  bool contains(std::span<const double> p) const;
};

/// Builds and validates a spec from expression sources.
MapSpec make_mapspec(std::string name, ScalarField field, std::vector<std::string> vars, MapKind kind,
                     std::vector<std::string> components, std::vector<DomainRange> domain = {},
                     std::vector<std::string> normal = {});

/// Domain entry from bound expressions (constants only, e.g. "2*pi").
DomainRange make_range(std::string lo_src, std::string hi_src, bool periodic);

MapSpec parse_mapspec(std::string_view text);
MapSpec load_mapspec(const std::filesystem::path& path);
std::string format_mapspec(const MapSpec& spec);

/// Wraps periodic coordinates into [lo, hi).
std::vector<double> wrap_point(const MapSpec& spec, std::span<const double> p);

}  // namespace dualfront
