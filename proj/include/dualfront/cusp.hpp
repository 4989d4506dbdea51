#pragma once

// Planar 3/2-cusps: detection, cuspidal curvature, the best-approximating
// cycloid, and the osculating cycloid at regular points.

#include <array>
#include <iosfwd>
#include <string>

#include "dualfront/mapspec.hpp"

namespace dualfront {

using Vec2 = std::array<double, 2>;

/// Derivatives of gamma at t0 and the cusp test.
struct CuspDetection {
  double t0 = 0.0;
  bool is_cusp = false;
  Vec2 point{0.0, 0.0};
  Vec2 d1{0.0, 0.0}, d2{0.0, 0.0}, d3{0.0, 0.0};
  double det = 0.0;    // det(d2, d3)
  double scale = 0.0;  // max |d_k|, k = 1..3
  std::string reason;  // why it is not a cusp
};

/// gamma'(t0) = 0 within 1e-9 scale and |det(gamma'', gamma''')| > 1e-9 scale^3.
CuspDetection detect_cusp(const MapSpec& gamma, double t0);

struct CuspidalCurvature {
  double mu = 0.0;         // det(d2, d3) / |d2|^(5/2)
  double mu_normal = 0.0;  // 2 det(nu, nu') / sqrt|det(d2, nu)| with nu smooth through t0
  double agreement = 0.0;  // |mu - mu_normal|
};

/// Throws kNondiagnosable when t0 is not a 3/2-cusp.
CuspidalCurvature cuspidal_curvature(const MapSpec& gamma, double t0);

/// Rigid placement of a(tau - sin tau, 1 - cos tau): the cusp sits at
/// `origin`, the arch opens along `axis`, and `side` is the image of the
/// first model axis (axis rotated by -90 degrees, negated when reflected).
struct CycloidPlacement {
  double radius = 0.0;
  Vec2 origin{0.0, 0.0};
  Vec2 axis{0.0, 1.0};
  Vec2 side{1.0, 0.0};
  double angle = 0.0;  // rotation taking (0, 1) to axis
  bool reflected = false;
  double alpha = 0.0;  // gamma = (alpha s^3, s^2) + o(s^3) in the cusp frame, alpha > 0 after reflection

  Vec2 point(double tau) const;
};

struct CuspReport {
  CuspDetection detection;
  CuspidalCurvature curvature;
  int sign = 0;         // sign of mu
  double radius = 0.0;  // 1 / mu^2
  CycloidPlacement cycloid;
  double window = 0.0;         // s-window actually used
  double residual = 0.0;       // sup |gamma - c| / |s|^3 over window/2 <= |s| <= window
  double residual_half = 0.0;  // same on the halved window
  bool residual_decreases = false;
};

/// Throws kNondiagnosable when t0 is not a 3/2-cusp.
CuspReport best_cycloid(const MapSpec& gamma, double t0, double window = 0.1);

struct OsculatingCycloid {
  double t0 = 0.0;
  double kappa = 0.0;
  double kappa_dot = 0.0;  // d kappa / d arclength
  double theta = 0.0;      // angle between the cycloid axis and the curve normal
  double radius = 0.0;
};

/// Throws kNondiagnosable at singular points and kDomain where kappa = 0.
OsculatingCycloid osculating_cycloid_regular(const MapSpec& gamma, double t0);

/// Curve near t0 with the fitted cycloid overlaid.
void write_cusp_svg(std::ostream& out, const MapSpec& gamma, const CuspReport& report, double half_width = 0.5);

}  // namespace dualfront
