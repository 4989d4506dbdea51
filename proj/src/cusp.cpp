#include "dualfront/cusp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "dualfront/error.hpp"
#include "dualfront/geometry.hpp"

namespace dualfront {

namespace {

constexpr double kDetectTol = 1e-9;
constexpr int kOrder = 5;

double det2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }
double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

void require_curve(const MapSpec& gamma) {
  if (gamma.kind != MapKind::kCurve || gamma.n() != 1 || gamma.m() != 2) {
    throw Error(ErrorCode::kSpec, "expected a planar curve (kind: curve, one variable, two components)");
  }
  if (gamma.field != ScalarField::kReal) throw Error(ErrorCode::kSpec, "planar curves must be real");
}

// Taylor coefficients c_k of gamma(t0 + s), k = 0..order.
std::vector<Vec2> taylor(const MapSpec& gamma, double t0, int order) {
  const std::vector<double> p{t0};
  const auto f = eval_map<double>(gamma, p, order);
  std::vector<Vec2> c(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) {
    const int alpha[1] = {k};
    c[static_cast<std::size_t>(k)] = {f[0].coeff(alpha), f[1].coeff(alpha)};
  }
  return c;
}

Vec2 position(const MapSpec& gamma, double t) {
  const std::vector<double> p{t};
  const auto f = eval_map<double>(gamma, p, 0);
  return {f[0].value(), f[1].value()};
}

Jet<double> jet_from(const std::vector<double>& coeffs) {
  const int order = static_cast<int>(coeffs.size()) - 1;
  return Jet<double>(JetLayout::get(1, order), coeffs);
}

Jet<double> jet_pow(const Jet<double>& g, double p) {
  const double x0 = g.value();
  return compose<double>(series::power(x0, p, std::pow(x0, p), g.order() + 1), g);
}

double first_derivative(const Jet<double>& j) {
  const int one[1] = {1};
  return j.coeff(one);
}

// The cusp frame: axis along gamma'', side = axis rotated by -90 degrees.
struct Frame {
  Vec2 origin, axis, side;
  double b0 = 0.0;     // |c_2|
  double alpha = 0.0;  // signed, before reflection
};

Frame cusp_frame(const std::vector<Vec2>& c) {
  Frame f;
  f.origin = c[0];
  f.b0 = norm(c[2]);
  f.axis = {c[2][0] / f.b0, c[2][1] / f.b0};
  f.side = {f.axis[1], -f.axis[0]};
  f.alpha = dot(f.side, c[3]) / std::pow(f.b0, 1.5);
  return f;
}

// Parameter t near t0 with height (gamma(t) - origin) . axis = s^2 on the side sign(s).
std::optional<double> height_preimage(const MapSpec& gamma, double t0, const Frame& fr, double s) {
  const double target = s * s;
  double t = s / std::sqrt(fr.b0);
  for (int it = 0; it < 60; ++it) {
    const std::vector<double> p{t0 + t};
    const auto f = eval_map<double>(gamma, p, 1);
    const int one[1] = {1};
    const Vec2 x{f[0].value() - fr.origin[0], f[1].value() - fr.origin[1]};
    const Vec2 dx{f[0].coeff(one), f[1].coeff(one)};
    const double r = dot(x, fr.axis) - target;
    if (std::abs(r) <= 1e-15 * std::max(target, 1e-300) * 4) return t;
    const double d = dot(dx, fr.axis);
    if (d == 0.0 || (d > 0) != (s > 0)) return std::nullopt;
    double next = t - r / d;
    if ((next > 0) != (s > 0)) next = 0.5 * t;
    if (std::abs(next - t) <= 1e-16 * std::abs(t)) return next;
    t = next;
  }
  return t;
}

// sup over window/2 <= |s| <= window of |gamma - c| / |s|^3, points matched by height.
double fit_residual(const MapSpec& gamma, double t0, const Frame& fr, const CycloidPlacement& cyc, double window) {
  const int samples = 16;
  double worst = 0.0;
  for (int sgn : {-1, 1}) {
    for (int k = 0; k <= samples; ++k) {
      const double s = sgn * window * (0.5 + 0.5 * k / samples);
      const auto t = height_preimage(gamma, t0, fr, s);
      if (!t) return std::numeric_limits<double>::infinity();
      const Vec2 g = position(gamma, t0 + *t);
      const double tau = sgn * 2.0 * std::asin(std::abs(s) / std::sqrt(2.0 * cyc.radius));
      const Vec2 c = cyc.point(tau);
      worst = std::max(worst, std::hypot(g[0] - c[0], g[1] - c[1]) / std::pow(std::abs(s), 3));
    }
  }
  return worst;
}

}  // namespace

Vec2 CycloidPlacement::point(double tau) const {
  const double x = radius * (tau - std::sin(tau)), y = radius * (1.0 - std::cos(tau));
  return {origin[0] + x * side[0] + y * axis[0], origin[1] + x * side[1] + y * axis[1]};
}

CuspDetection detect_cusp(const MapSpec& gamma, double t0) {
  require_curve(gamma);
  const auto c = taylor(gamma, t0, 3);
  CuspDetection d;
  d.t0 = t0;
  d.point = c[0];
  d.d1 = c[1];
  d.d2 = {2 * c[2][0], 2 * c[2][1]};
  d.d3 = {6 * c[3][0], 6 * c[3][1]};
  d.det = det2(d.d2, d.d3);
  d.scale = std::max({norm(d.d1), norm(d.d2), norm(d.d3)});
  if (d.scale == 0.0) {
    d.reason = "derivatives up to order 3 vanish";
  } else if (norm(d.d1) >= kDetectTol * d.scale) {
    d.reason = "regular point: the velocity does not vanish";
  } else if (std::abs(d.det) <= kDetectTol * d.scale * d.scale * d.scale) {
    d.reason = "degenerate singular point: second and third derivatives are parallel";
  } else {
    d.is_cusp = true;
  }
  return d;
}

CuspidalCurvature cuspidal_curvature(const MapSpec& gamma, double t0) {
  const auto d = detect_cusp(gamma, t0);
  if (!d.is_cusp) throw Error(ErrorCode::kNondiagnosable, "not a 3/2-cusp at t0: " + d.reason);
  CuspidalCurvature out;
  out.mu = d.det / std::pow(norm(d.d2), 2.5);

  // nu = J w / |w| with w = gamma' / (t - t0), smooth through the cusp
  const auto c = taylor(gamma, t0, kOrder);
  std::vector<double> wx(kOrder - 1), wy(kOrder - 1);
  for (int j = 0; j + 2 <= kOrder; ++j) {
    wx[static_cast<std::size_t>(j)] = (j + 2) * c[static_cast<std::size_t>(j + 2)][0];
    wy[static_cast<std::size_t>(j)] = (j + 2) * c[static_cast<std::size_t>(j + 2)][1];
  }
  const Jet<double> w0 = jet_from(wx), w1 = jet_from(wy);
  const Jet<double> inv = jet_pow(w0 * w0 + w1 * w1, -0.5);
  const Jet<double> nx = -w1 * inv, ny = w0 * inv;
  const Vec2 nu{nx.value(), ny.value()};
  const Vec2 nu_dot{first_derivative(nx), first_derivative(ny)};
  out.mu_normal = 2.0 * det2(nu, nu_dot) / std::sqrt(std::abs(det2(d.d2, nu)));
  out.agreement = std::abs(out.mu - out.mu_normal);
  return out;
}

CuspReport best_cycloid(const MapSpec& gamma, double t0, double window) {
  CuspReport r;
  r.detection = detect_cusp(gamma, t0);
  if (!r.detection.is_cusp) throw Error(ErrorCode::kNondiagnosable, "not a 3/2-cusp at t0: " + r.detection.reason);
  r.curvature = cuspidal_curvature(gamma, t0);
  r.sign = r.curvature.mu > 0 ? 1 : -1;
  r.radius = 1.0 / (r.curvature.mu * r.curvature.mu);

  const Frame fr = cusp_frame(taylor(gamma, t0, 3));
  auto& cyc = r.cycloid;
  cyc.reflected = fr.alpha < 0.0;
  cyc.alpha = std::abs(fr.alpha);
  cyc.radius = 2.0 / (9.0 * cyc.alpha * cyc.alpha);
  cyc.origin = fr.origin;
  cyc.axis = fr.axis;
  cyc.side = cyc.reflected ? Vec2{-fr.side[0], -fr.side[1]} : fr.side;
  cyc.angle = std::atan2(-fr.axis[0], fr.axis[1]);
  if (std::abs(cyc.radius * r.curvature.mu * r.curvature.mu - 1.0) > 1e-8) {
    throw Error(ErrorCode::kUnresolved, "cycloid radius disagrees with the cuspidal curvature radius");
  }

  // heights beyond twice the radius are off the arch
  r.window = std::min(window, 0.9 * std::sqrt(2.0 * cyc.radius));
  r.residual = fit_residual(gamma, t0, fr, cyc, r.window);
  r.residual_half = fit_residual(gamma, t0, fr, cyc, 0.5 * r.window);
  r.residual_decreases = r.residual_half < r.residual || r.residual < 1e-9;
  return r;
}

OsculatingCycloid osculating_cycloid_regular(const MapSpec& gamma, double t0) {
  require_curve(gamma);
  const std::vector<double> p{t0};
  const auto f = eval_map<double>(gamma, p, 4);
  const Jet<double> x1 = f[0].partial(0), y1 = f[1].partial(0);
  const Jet<double> x2 = x1.partial(0), y2 = y1.partial(0);
  const Jet<double> speed2 = x1 * x1 + y1 * y1;
  const double scale = std::max(f[0].max_abs_coeff(), f[1].max_abs_coeff());
  if (std::sqrt(speed2.value()) < kDetectTol * scale) {
    throw Error(ErrorCode::kNondiagnosable, "singular point: the osculating cycloid needs a regular point");
  }
  const Jet<double> kappa = (x1 * y2 - y1 * x2) * jet_pow(speed2, -1.5);
  OsculatingCycloid o;
  o.t0 = t0;
  o.kappa = kappa.value();
  o.kappa_dot = first_derivative(kappa) / std::sqrt(speed2.value());
  if (std::abs(o.kappa) < kDetectTol * std::sqrt(speed2.value())) {
    throw Error(ErrorCode::kDomain, "curvature vanishes at t0: no osculating cycloid");
  }
  const double k2 = o.kappa * o.kappa;
  const double root = std::sqrt(k2 * k2 + o.kappa_dot * o.kappa_dot);
  o.theta = std::asin(std::min(1.0, k2 / root));
  o.radius = root / std::pow(std::abs(o.kappa), 3);
  return o;
}

void write_cusp_svg(std::ostream& out, const MapSpec& gamma, const CuspReport& report, double half_width) {
  const int n = 200;
  std::vector<Vec2> curve, cyc;
  for (int i = 0; i <= n; ++i) {
    curve.push_back(position(gamma, report.detection.t0 + half_width * (2.0 * i / n - 1.0)));
    cyc.push_back(report.cycloid.point(1.5 * (2.0 * i / n - 1.0)));
  }
  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (const auto* pts : {&curve, &cyc}) {
    for (const auto& q : *pts) {
      for (int a = 0; a < 2; ++a) {
        lo[a] = std::min(lo[a], q[static_cast<std::size_t>(a)]);
        hi[a] = std::max(hi[a], q[static_cast<std::size_t>(a)]);
      }
    }
  }
  const double size = 600.0, pad = 20.0;
  const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
  const auto X = [&](const Vec2& q) { return pad + size * (q[0] - lo[0]) / span; };
  const auto Y = [&](const Vec2& q) { return pad + size * (1.0 - (q[1] - lo[1]) / span); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad << "\" height=\"" << size + 2 * pad
      << "\">\n";
  const auto polyline = [&](const std::vector<Vec2>& pts, const char* stroke) {
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& q : pts) out << X(q) << ',' << Y(q) << ' ';
    out << "\"/>\n";
  };
  polyline(curve, "black");
  polyline(cyc, "darkorange");
  out << "<circle cx=\"" << X(report.detection.point) << "\" cy=\"" << Y(report.detection.point)
      << "\" r=\"4\" fill=\"" << (report.sign > 0 ? "black" : "white") << "\" stroke=\"black\"/>\n";
  out << "</svg>\n";
}

}  // namespace dualfront
