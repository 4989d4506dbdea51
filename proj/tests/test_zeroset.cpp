#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dualfront/zeroset.hpp"
#include "support.hpp"

using namespace dualfront;
using testing_support::data_path;

namespace {

MapSpec load(const char* name) { return load_mapspec(data_path(std::string(name) + ".mapspec")); }

constexpr double kPi = std::numbers::pi;

double periodic_gap(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

bool same_points(const std::vector<TracedCurve>& a, const std::vector<TracedCurve>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (a[c].points != b[c].points || a[c].values != b[c].values) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("torus parabolic set is the two circles v = pi/2 and v = 3pi/2") {
  const auto spec = load("torus");
  const auto curves = trace_zero_curve(spec, ZeroFunction::kHessian);
  REQUIRE(curves.size() == 2);
  for (const auto& c : curves) {
    CHECK(c.closed);
    CHECK(c.degenerate.empty());
    const double v0 = c.points.front()[1];
    CHECK(std::min(std::abs(v0 - kPi / 2), std::abs(v0 - 3 * kPi / 2)) < 1e-9);
    double umin = 10, umax = -10;
    for (const auto& p : c.points) {
      CHECK(std::abs(p[1] - v0) < 1e-9);
      umin = std::min(umin, p[0]);
      umax = std::max(umax, p[0]);
    }
    CHECK(umax - umin > 2 * kPi - 0.1);  // wraps all the way round
  }
}

TEST_CASE("cubic graph: one open curve on v = 0") {
  const auto spec = load("cubic_graph");
  const auto curves = trace_zero_curve(spec, ZeroFunction::kHessian);
  REQUIRE(curves.size() == 1);
  const auto& c = curves[0];
  CHECK_FALSE(c.closed);
  for (const auto& p : c.points) CHECK(std::abs(p[1]) < 1e-9);
  CHECK(std::abs(c.points.front()[0]) == doctest::Approx(1.0));
  CHECK(std::abs(c.points.back()[0]) == doctest::Approx(1.0));
  // negative side on the left of the direction of travel
  const auto s = zero_sample(load("cubic_graph"), ZeroFunction::kHessian, c.points[0]);
  const double du = c.points.back()[0] - c.points.front()[0];
  CHECK(std::abs(s.grad[1]) == doctest::Approx(12.0));
  CHECK(du * s.grad[1] < 0.0);  // left normal (0, du) points down the gradient
}

TEST_CASE("traced vertices satisfy the zero tolerance and the step bound") {
  for (const std::string name : {"bumpy_torus", "cc3_torus", "cubic_graph"}) {
    CAPTURE(name);
    const auto spec = load(name.c_str());
    const auto curves = trace_zero_curve(spec, ZeroFunction::kHessian);
    for (const auto& c : curves) {
      REQUIRE(c.data.size() == c.points.size());
      for (std::size_t k = 0; k < c.points.size(); ++k) {
        const auto s = zero_sample(spec, ZeroFunction::kHessian, c.points[k]);
        CHECK(std::abs(s.value) < c.tolerance * s.scale);
        if (k + 1 < c.points.size()) {
          const auto& p = c.points[k];
          const auto& q = c.points[k + 1];
          const double du = periodic_gap(p[0], q[0], 2 * kPi), dv = periodic_gap(p[1], q[1], 2 * kPi);
          CHECK(std::hypot(du, dv) <= c.step);
        }
      }
    }
  }
}

TEST_CASE("definite Hessian and flat-in-sphere surfaces have no parabolic curve") {
  CHECK(trace_zero_curve(load("paraboloid"), ZeroFunction::kHessian).empty());
  CHECK(trace_zero_curve(load("sphere_patch"), ZeroFunction::kHessian).empty());
  const auto clifford = verify_theorem_c(load("clifford_torus"));
  CHECK(clifford.total() == 0);
  CHECK(clifford.chi_minus == 0);
  CHECK(clifford.chi_plus == 0);
  CHECK(clifford.residual == 0);
  CHECK(clifford.hypotheses_ok());
}

TEST_CASE("lambda zero set of the cuspidal edge") {
  const auto curves = trace_zero_curve(load("cuspidal_edge"), ZeroFunction::kLambda);
  REQUIRE(curves.size() == 1);
  for (const auto& p : curves[0].points) CHECK(std::abs(p[1]) < 1e-9);
}

TEST_CASE("serial and parallel kernels agree exactly") {
  const auto spec = load("bumpy_torus");
  TraceOptions serial, parallel;
  serial.exec = Execution::kSerial;
  parallel.exec = Execution::kParallel;
  CHECK(same_points(trace_zero_curve(spec, ZeroFunction::kHessian, serial),
                    trace_zero_curve(spec, ZeroFunction::kHessian, parallel)));
  EulerOptions es, ep;
  es.exec = Execution::kSerial;
  ep.exec = Execution::kParallel;
  const auto a = euler_characteristics(spec, es);
  const auto b = euler_characteristics(spec, ep);
  CHECK(a.minus.vertices == b.minus.vertices);
  CHECK(a.minus.edges == b.minus.edges);
  CHECK(a.minus.faces == b.minus.faces);
  CHECK(a.triangles == b.triangles);
}

TEST_CASE("full-subcomplex counts on a hand-built 3x3 torus mesh") {
  // vertices (i, j) -> 3 i + j, two triangles per square
  std::vector<std::array<std::int32_t, 3>> tris;
  const auto id = [](int i, int j) { return static_cast<std::int32_t>(3 * ((i + 3) % 3) + (j + 3) % 3); };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  std::vector<std::int8_t> labels(9, 1);
  const auto all = count_full_subcomplex(labels, tris, 1, Execution::kSerial, true);
  CHECK(all.vertices == 9);
  CHECK(all.edges == 27);
  CHECK(all.faces == 18);
  CHECK(all.euler() == 0);
  // a row of three: a cycle, annulus core
  for (int j = 0; j < 3; ++j) labels[static_cast<std::size_t>(id(0, j))] = -1;
  const auto row = count_full_subcomplex(labels, tris, -1, Execution::kParallel);
  CHECK(row.vertices == 3);
  CHECK(row.edges == 3);
  CHECK(row.faces == 0);
  CHECK(row.euler() == 0);
  const auto rest = count_full_subcomplex(labels, tris, 1, Execution::kSerial);
  CHECK(rest.euler() == 0);
  std::vector<std::int8_t> one(9, 1);
  one[4] = -1;
  CHECK(count_full_subcomplex(one, tris, -1, Execution::kSerial).euler() == 1);
  CHECK(count_full_subcomplex(one, tris, 1, Execution::kSerial).euler() == -1);
  tris.pop_back();
  CHECK_THROWS_AS(count_full_subcomplex(one, tris, 1, Execution::kSerial, true), Error);
}

TEST_CASE("Euler characteristics of the regression tori") {
  const auto torus = euler_characteristics(load("torus"));
  CHECK(torus.chi_minus == 0);
  CHECK(torus.chi_plus == 0);
  CHECK(torus.chi_domain == 0);
  const auto cc3 = euler_characteristics(load("cc3_torus"));
  CHECK(cc3.chi_minus == 3);
  CHECK(cc3.chi_plus + cc3.chi_minus == cc3.chi_domain);
  CHECK(cc3.chi_domain == 0);
  CHECK(euler_characteristic_Mminus(load("bumpy_torus")) == 0);
  CHECK_THROWS_AS(euler_characteristics(load("cubic_graph")), Error);
}

TEST_CASE("standard torus census: no godrons, non-generic curves reported") {
  const auto c = verify_theorem_c(load("torus"));
  CHECK(c.total() == 0);
  CHECK(c.chi_minus == 0);
  CHECK(c.chi_plus + c.chi_minus == 0);
  CHECK(c.residual == 0);
  CHECK(c.hypotheses_ok());
  CHECK(c.warnings.size() == 2);
}

TEST_CASE("bumpy torus census") {
  const auto spec = load("bumpy_torus");
  const auto c = verify_theorem_c(spec);
  CHECK(c.hypotheses_ok());
  CHECK(c.signed_);
  CHECK(c.total() == 8);
  CHECK(c.i2_plus == 4);
  CHECK(c.i2_minus == 4);
  CHECK(c.even());
  CHECK(c.chi_minus == 0);
  CHECK(c.residual == 0);
  for (const auto& g : c.godrons) {
    CHECK(g.certificate.label() == "A_3-inflection");
    CHECK(g.resolved);
    CHECK(g.tail_samples.size() == 2);
  }

  SUBCASE("stable under grid doubling") {
    CensusOptions fine;
    fine.trace.grid = 256;
    const auto d = verify_theorem_c(spec, fine);
    REQUIRE(d.total() == c.total());
    for (const auto& g : c.godrons) {
      bool matched = false;
      for (const auto& h : d.godrons) {
        if (periodic_gap(g.point[0], h.point[0], 2 * kPi) < 1e-6 && periodic_gap(g.point[1], h.point[1], 2 * kPi) < 1e-6) {
          matched = true;
          CHECK(h.sign == g.sign);
        }
      }
      CHECK(matched);
    }
    CHECK(d.chi_minus == c.chi_minus);
  }

  SUBCASE("midpoint oracle and Gauss-map cross-check") {
    for (const auto& g : c.godrons) {
      const auto s = godron_sign(spec, g.point);
      REQUIRE(s.resolved);
      const Point2 mid{0.5 * (s.q1[0] + s.q2[0]), 0.5 * (s.q1[1] + s.q2[1])};
      const double h = zero_sample(spec, ZeroFunction::kHessian, mid, false).value;
      CHECK(s.sign == (h < 0 ? 1 : -1));
      const std::vector<double> p{g.point[0], g.point[1]};
      for (const auto& r : duality_check<double>(spec, p)) {
        CAPTURE(to_string(r.route));
        CHECK(r.consistent());
      }
    }
  }
}

TEST_CASE("mirrored bumpy torus keeps godron signs") {
  const auto spec = load("bumpy_torus");
  std::ifstream in(data_path("bumpy_torus.mapspec"));
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  // v -> -v written as v -> 2 pi - v on the same period
  std::string mirrored;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 2, "(v") == 0) {
      mirrored += "(2*pi-v";
      ++i;
    } else {
      mirrored += text[i];
    }
  }
  const auto mspec = parse_mapspec(mirrored);
  const auto a = verify_theorem_c(spec);
  const auto b = verify_theorem_c(mspec);
  REQUIRE(a.total() == b.total());
  for (const auto& g : a.godrons) {
    bool matched = false;
    for (const auto& h : b.godrons) {
      if (periodic_gap(g.point[0], h.point[0], 2 * kPi) < 1e-6 &&
          periodic_gap(g.point[1], 2 * kPi - h.point[1], 2 * kPi) < 1e-6) {
        matched = true;
        CHECK(h.sign == g.sign);
      }
    }
    CHECK(matched);
  }
}

TEST_CASE("three-lobed torus closes the signed count") {
  const auto c = verify_theorem_c(load("cc3_torus"));
  CHECK(c.hypotheses_ok());
  CHECK(c.total() == 18);
  CHECK(c.i2_plus == 12);
  CHECK(c.i2_minus == 6);
  CHECK(c.chi_minus == 3);
  CHECK(c.residual == 0);
}

TEST_CASE("degenerate inflection on the parabolic curve is a hypothesis violation") {
  const auto c = verify_theorem_c(load("a4_torus"));
  CHECK_FALSE(c.hypotheses_ok());
  bool origin = false;
  for (const auto& v : c.violations) {
    if (periodic_gap(v.point[0], 0.0, 2 * kPi) < 1e-6 && periodic_gap(v.point[1], 0.0, 2 * kPi) < 1e-6) {
      origin = true;
      CHECK(v.label == "DegenerateNondiagnosable");
    }
  }
  CHECK(origin);
}

TEST_CASE("find_godrons rejects lambda curves") {
  const auto spec = load("cuspidal_edge");
  const auto curves = trace_zero_curve(spec, ZeroFunction::kLambda);
  CHECK_THROWS_AS(find_godrons(spec, curves), Error);
}

TEST_CASE("CSV and SVG writers") {
  const auto spec = load("bumpy_torus");
  const auto curves = trace_zero_curve(spec, ZeroFunction::kHessian);
  std::ostringstream csv;
  write_curves_csv(csv, curves);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "curve,u,v,value");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == curves[0].points.size() + curves[1].points.size());

  const auto census = verify_theorem_c(spec);
  std::ostringstream svg;
  write_svg(svg, spec, curves, &census);
  const std::string s = svg.str();
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("<polyline") != std::string::npos);
  std::size_t markers = 0;
  for (std::size_t at = s.find("<circle"); at != std::string::npos; at = s.find("<circle", at + 1)) ++markers;
  CHECK(markers == 8);
}
