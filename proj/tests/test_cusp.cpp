#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dualfront/cusp.hpp"
#include "support.hpp"

using namespace dualfront;

namespace {

MapSpec curve(const std::string& x, const std::string& y) {
  return make_mapspec("curve", ScalarField::kReal, {"t"}, MapKind::kCurve, {x, y});
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.17g)", v);
  return buf;
}

MapSpec cycloid(double a) {
  return curve(num(a) + "*(t - sin(t))", num(a) + "*(1 - cos(t))");
}

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("cusp detection") {
  const auto d = detect_cusp(cycloid(2.0), 0.0);
  CHECK(d.is_cusp);
  CHECK(d.d2[0] == doctest::Approx(0.0));
  CHECK(d.d2[1] == doctest::Approx(2.0));
  CHECK(d.d3[0] == doctest::Approx(2.0));
  CHECK(d.d3[1] == doctest::Approx(0.0));
  CHECK(d.det == doctest::Approx(-4.0));

  const auto circle = detect_cusp(curve("cos(t)", "sin(t)"), 0.4);
  CHECK_FALSE(circle.is_cusp);
  CHECK(circle.reason.find("regular") != std::string::npos);

  const auto quartic = detect_cusp(curve("t^2", "t^4"), 0.0);
  CHECK_FALSE(quartic.is_cusp);
  CHECK(quartic.reason.find("degenerate") != std::string::npos);
  CHECK_THROWS_AS(cuspidal_curvature(curve("t^2", "t^4"), 0.0), Error);

  CHECK_THROWS_AS(detect_cusp(make_mapspec("s", ScalarField::kReal, {"u", "v"}, MapKind::kAffine, {"u", "v", "u*v"}), 0.0),
                  Error);
}

TEST_CASE("cuspidal curvature of cycloids") {
  for (double a : {0.25, 1.0, 4.0}) {
    CAPTURE(a);
    const auto c = cuspidal_curvature(cycloid(a), 0.0);
    CHECK(std::abs(c.mu + 1.0 / std::sqrt(a)) < 1e-8);
    CHECK(c.agreement < 1e-8);
    // every cusp of the cycloid, t in 2 pi Z
    CHECK(std::abs(cuspidal_curvature(cycloid(a), 2 * kPi).mu + 1.0 / std::sqrt(a)) < 1e-8);
  }
  // reflection x -> -x flips the sign
  const auto r = cuspidal_curvature(curve("-(t - sin(t))", "1 - cos(t)"), 0.0);
  CHECK(r.mu == doctest::Approx(1.0));
  CHECK(r.agreement < 1e-8);
}

TEST_CASE("(alpha s^3, s^2): curvature and the best cycloid") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    CAPTURE(alpha);
    const auto g = curve(num(alpha) + "*t^3", "t^2");
    const auto r = best_cycloid(g, 0.0);
    CHECK(std::abs(r.curvature.mu + 3 * alpha / std::sqrt(2.0)) < 1e-8);
    CHECK(std::abs(r.radius - 2.0 / (9.0 * alpha * alpha)) < 1e-8);
    CHECK(std::abs(r.cycloid.radius - 2.0 / (9.0 * alpha * alpha)) < 1e-8);
    CHECK(r.radius * r.curvature.mu * r.curvature.mu == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.residual_decreases);
    CHECK(r.residual_half < r.residual);
    CHECK(r.sign == -1);
    CHECK_FALSE(r.cycloid.reflected);
  }
}

TEST_CASE("best cycloid of a cycloid is itself") {
  for (double a : {0.25, 1.0, 4.0}) {
    CAPTURE(a);
    const auto r = best_cycloid(cycloid(a), 0.0);
    CHECK(std::abs(r.cycloid.radius - a) < 1e-9);
    CHECK(r.residual < 1e-9);
    CHECK(r.residual_half < 1e-9);
    CHECK(std::abs(r.cycloid.origin[0]) < 1e-12);
    CHECK(std::abs(r.cycloid.origin[1]) < 1e-12);
    CHECK(std::abs(r.cycloid.angle) < 1e-12);
  }
  const auto mirrored = best_cycloid(curve("-(t - sin(t))", "1 - cos(t)"), 0.0);
  CHECK(mirrored.cycloid.reflected);
  CHECK(mirrored.sign == 1);
  CHECK(mirrored.residual < 1e-9);
}

TEST_CASE("placement follows a rigid motion") {
  const double alpha = 1.3, phi = 0.7, tx = 1.5, ty = -2.0;
  const double c = std::cos(phi), s = std::sin(phi);
  const std::string x = num(alpha) + "*t^3", y = "t^2";
  const auto moved = curve(num(c) + "*" + x + " - " + num(s) + "*" + y + " + " + num(tx),
                           num(s) + "*" + x + " + " + num(c) + "*" + y + " + " + num(ty));
  const auto base = best_cycloid(curve(x, y), 0.0);
  const auto r = best_cycloid(moved, 0.0);
  CHECK(std::abs(r.radius - base.radius) < 1e-8);
  CHECK(std::abs(r.curvature.mu - base.curvature.mu) < 1e-8);
  CHECK(std::abs(r.cycloid.origin[0] - tx) < 1e-8);
  CHECK(std::abs(r.cycloid.origin[1] - ty) < 1e-8);
  CHECK(std::abs(r.cycloid.angle - phi) < 1e-8);
  CHECK(std::abs(r.cycloid.axis[0] + s) < 1e-8);
  CHECK(std::abs(r.cycloid.axis[1] - c) < 1e-8);
  CHECK(std::abs(r.residual - base.residual) < 1e-6);
}

TEST_CASE("cuspidal curvature is invariant under orientation-preserving reparametrization") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-0.4, 0.4);
  std::uniform_real_distribution<double> slope(0.5, 2.0);
  const double a = 1.7;
  const double mu = -1.0 / std::sqrt(a);
  for (int trial = 0; trial < 10; ++trial) {
    const std::string t = "(" + num(slope(rng)) + "*t + " + num(coef(rng)) + "*t^2 + " + num(coef(rng)) + "*t^3)";
    const auto g = curve(num(a) + "*(" + t + " - sin(" + t + "))", num(a) + "*(1 - cos(" + t + "))");
    const auto c = cuspidal_curvature(g, 0.0);
    CHECK(std::abs(c.mu - mu) < 1e-7);
    CHECK(std::abs(c.mu_normal - mu) < 1e-7);
  }
}

TEST_CASE("osculating cycloid of circles") {
  for (double R : {0.5, 2.0}) {
    CAPTURE(R);
    const auto o = osculating_cycloid_regular(curve(num(R) + "*cos(t)", num(R) + "*sin(t)"), 0.3);
    CHECK(std::abs(o.theta - kPi / 2) < 1e-10);
    CHECK(std::abs(o.radius - R) < 1e-10);
    CHECK(std::abs(o.kappa - 1.0 / R) < 1e-10);
    CHECK(std::abs(o.kappa_dot) < 1e-10);
  }
}

TEST_CASE("osculating cycloid with kappa = 1 and kappa' = 1") {
  const auto o = osculating_cycloid_regular(curve("t", "t^2/2 + t^3/6"), 0.0);
  CHECK(std::abs(std::sin(o.theta) - 1.0 / std::sqrt(2.0)) < 1e-10);
  CHECK(std::abs(o.radius - std::sqrt(2.0)) < 1e-10);

  // finite-difference oracle on a generic point
  const double t0 = 0.37;
  const auto kappa = [](std::span<const double> p) {
    const double t = p[0];
    const double y1 = t + t * t / 2, y2 = 1 + t;
    return y2 / std::pow(1 + y1 * y1, 1.5);
  };
  const auto speed = [](double t) { return std::sqrt(1 + std::pow(t + t * t / 2, 2)); };
  const double p[1] = {t0};
  const int d0[1] = {0}, d1[1] = {1};
  const double k = testing_support::fd_derivative(kappa, p, d0);
  const double kd = testing_support::fd_derivative(kappa, p, d1) / speed(t0);
  const auto g = osculating_cycloid_regular(curve("t", "t^2/2 + t^3/6"), t0);
  CHECK(g.kappa == doctest::Approx(k).epsilon(1e-8));
  CHECK(g.kappa_dot == doctest::Approx(kd).epsilon(1e-7));
}

TEST_CASE("osculating radius along a cycloid's regular part") {
  // the displayed formula returns the vertex curvature radius 4a of the
  // cycloid, so the limit at the cusp is 4 / mu^2
  for (double a : {0.25, 1.0, 4.0}) {
    const double mu = cuspidal_curvature(cycloid(a), 0.0).mu;
    for (double t : {1.0, 1e-1, 1e-2, 1e-3}) {
      CAPTURE(t);
      const auto o = osculating_cycloid_regular(cycloid(a), t);
      CHECK(o.radius == doctest::Approx(4.0 / (mu * mu)).epsilon(1e-9));
      CHECK(std::sin(o.theta) == doctest::Approx(std::sin(t / 2)).epsilon(1e-9));
    }
  }
}

TEST_CASE("osculating cycloid errors") {
  CHECK_THROWS_AS(osculating_cycloid_regular(curve("t", "t^3"), 0.0), Error);
  CHECK_THROWS_AS(osculating_cycloid_regular(cycloid(1.0), 0.0), Error);
}

TEST_CASE("cusp SVG") {
  const auto g = cycloid(1.0);
  std::ostringstream out;
  write_cusp_svg(out, g, best_cycloid(g, 0.0));
  const std::string s = out.str();
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
}
