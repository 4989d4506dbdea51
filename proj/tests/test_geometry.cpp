#include <doctest.h>

#include <random>

#include "dualfront/geometry.hpp"
#include "dualfront/linalg.hpp"
#include "support.hpp"

using namespace dualfront;
using testing_support::data_path;

namespace {

std::vector<double> vals(const JetVec<double>& v) {
  std::vector<double> out;
  for (const auto& j : v) out.push_back(j.value());
  return out;
}

double coeff(const Jet<double>& j, std::vector<int> alpha) { return j.coeff(alpha); }

MapSpec affine2(const std::string& x, const std::string& y, const std::string& z) {
  return make_mapspec("t", ScalarField::kReal, {"u", "v"}, MapKind::kAffine, {x, y, z});
}

}  // namespace

TEST_CASE("normal map examples") {
  MapSpec par = load_mapspec(data_path("paraboloid.mapspec"));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    auto p = testing_support::random_point(rng, 2);
    auto nu = vals(normal_map<double>(par, p, 2));
    CHECK(nu[0] == doctest::Approx(-2 * p[0]));
    CHECK(nu[1] == doctest::Approx(-2 * p[1]));
    CHECK(nu[2] == doctest::Approx(1));
    // finite-difference cross product oracle
    auto comp = [&](int k) {
      return [&, k](std::span<const double> x) { return eval_scalar<double>(*par.components[k], x); };
    };
    std::vector<double> fu(3), fv(3);
    const std::vector<int> du{1, 0}, dv{0, 1};
    for (int k = 0; k < 3; ++k) {
      fu[k] = testing_support::fd_derivative(comp(k), p, du);
      fv[k] = testing_support::fd_derivative(comp(k), p, dv);
    }
    CHECK(nu[0] == doctest::Approx(fu[1] * fv[2] - fu[2] * fv[1]).epsilon(1e-8));
    CHECK(nu[1] == doctest::Approx(fu[2] * fv[0] - fu[0] * fv[2]).epsilon(1e-8));
  }
  // the normal annihilates the tangent space to truncation order
  auto f = eval_map<double>(par, std::vector<double>{0.3, -0.2}, 5);
  auto nu = cofactor_normal(f);
  for (int j = 0; j < 2; ++j) {
    Jet<double> acc = nu[0] * f[0].partial(j) + nu[1] * f[1].partial(j) + nu[2] * f[2].partial(j);
    CHECK(acc.max_abs_coeff() < 1e-13);
  }

  auto plane = affine2("u", "v", "0");
  auto pn = vals(normal_map<double>(plane, std::vector<double>{0.4, 0.1}, 1));
  CHECK(pn == std::vector<double>{0, 0, 1});

  MapSpec circ = load_mapspec(data_path("circle.mapspec"));
  const double t = 0.7;
  auto cn = vals(normal_map<double>(circ, std::vector<double>{t}, 1));
  CHECK(cn[0] == doctest::Approx(-2 * std::cos(t)));  // -y'
  CHECK(cn[1] == doctest::Approx(-2 * std::sin(t)));  // x'

  MapSpec edge = make_mapspec("e", ScalarField::kReal, {"u", "v"}, MapKind::kAffine, {"u", "v^2", "v^3"});
  CHECK_THROWS_AS(normal_map<double>(edge, std::vector<double>{0.2, 0.0}, 2), Error);
}

TEST_CASE("curve normals through a singular point drop the common zero") {
  MapSpec cubic = load_mapspec(data_path("singular_cubic.mapspec"));
  auto nu = vals(normal_map<double>(cubic, std::vector<double>{0.0}, 2));
  CHECK(nu[0] == doctest::Approx(-3 * std::sqrt(3.0) * 0.0));
  CHECK(nu[1] == doctest::Approx(2 * std::cbrt(2.0)));
}

TEST_CASE("Hessian data") {
  MapSpec par = load_mapspec(data_path("paraboloid.mapspec"));
  auto d = hessian_data<double>(par, std::vector<double>{0.3, 0.8});
  CHECK(d.hess[0] == doctest::Approx(2));
  CHECK(std::abs(d.hess[1]) < 1e-12);
  CHECK(d.hess[3] == doctest::Approx(2));
  CHECK(d.h == doctest::Approx(4));
  CHECK_FALSE(d.asymptotic.has_value());

  MapSpec cg = load_mapspec(data_path("cubic_graph.mapspec"));
  auto c = hessian_data<double>(cg, std::vector<double>{0.4, 0.0});
  CHECK(std::abs(c.h) < 1e-14);
  CHECK(std::abs(c.grad_h[0]) < 1e-12);
  CHECK(c.grad_h[1] == doctest::Approx(-12));
  CHECK(c.nondegenerate);
  REQUIRE(c.asymptotic.has_value());
  CHECK(std::abs((*c.asymptotic)[0]) < 1e-12);
  CHECK(std::abs((*c.asymptotic)[1]) == doctest::Approx(1));
}

TEST_CASE("A_4 example Hessian and asymptotic field") {
  MapSpec a4 = load_mapspec(data_path("a4_inflection.mapspec"));
  const std::vector<double> o{0, 0, 0};
  auto hj = hessian_jets<double>(a4, o, 6);
  CHECK(hj.hessian.order() == 4);
  // 6(2u + 6vw - w^2 + 4w^3 - 2w^4)
  CHECK(coeff(hj.hessian, {1, 0, 0}) == doctest::Approx(12));
  CHECK(coeff(hj.hessian, {0, 1, 1}) == doctest::Approx(36));
  CHECK(coeff(hj.hessian, {0, 0, 2}) == doctest::Approx(-6));
  CHECK(coeff(hj.hessian, {0, 0, 3}) == doctest::Approx(24));
  CHECK(coeff(hj.hessian, {0, 0, 4}) == doctest::Approx(-12));
  double rest = 0;
  for (std::size_t k = 0; k < hj.hessian.coeffs().size(); ++k) rest += std::abs(hj.hessian.coeffs()[k]);
  CHECK(rest == doctest::Approx(12 + 36 + 6 + 24 + 12));
  // xi = (w, w^2, 1)
  REQUIRE(hj.asymptotic.size() == 3);
  CHECK(coeff(hj.asymptotic[0], {0, 0, 1}) == doctest::Approx(1));
  CHECK(coeff(hj.asymptotic[1], {0, 0, 2}) == doctest::Approx(1));
  CHECK(hj.asymptotic[2].value() == doctest::Approx(1));
  CHECK(hj.asymptotic[2].max_abs_coeff() == doctest::Approx(1));
  auto d = hessian_data<double>(a4, o);
  REQUIRE(d.asymptotic.has_value());
  CHECK((*d.asymptotic)[2] == doctest::Approx(1));

  // affine Gauss map against the closed form
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    auto p = testing_support::random_point(rng, 3, 0.5);
    const double u = p[0], v = p[1], w = p[2];
    std::vector<double> g{-2 * u * w - 3 * v * w * w + w * w * w - std::pow(w, 4) + std::pow(w, 5), 2 * u - w * w,
                          3 * v - w * w * w, 1};
    auto ag = affine_gauss<double>(a4, p);
    CHECK(projective_distance<double>(ag.coords, g) < 1e-12);
  }
  // over C the same polynomial comes out
  const std::vector<Complex> oc{0, 0, 0};
  auto hc = hessian_jets<Complex>(a4, oc, 6);
  CHECK(std::abs(hc.hessian.coeff(std::vector<int>{1, 0, 0}) - Complex(12)) < 1e-12);
}

TEST_CASE("affine Gauss map of a sphere is antipodal") {
  auto sph = affine2("cos(u)*cos(v)", "sin(u)*cos(v)", "sin(v)");
  auto g = affine_gauss<double>(sph, std::vector<double>{0.4, 0.3});
  std::vector<double> pos{std::cos(0.4) * std::cos(0.3), std::sin(0.4) * std::cos(0.3), std::sin(0.3)};
  CHECK(projective_distance<double>(g.coords, pos) < 1e-12);
  auto flat = load_mapspec(data_path("paraboloid.mapspec"));
  CHECK(affine_gauss<double>(flat, std::vector<double>{0, 0}).coords == std::vector<double>{0, 0, 1});
}

TEST_CASE("projective helpers") {
  std::vector<double> a{-2, 1, 2};
  auto n = normalize_projective<double>(a);
  CHECK(n.coords == std::vector<double>{1, -0.5, -1});  // tie broken by lowest index
  std::vector<double> b{4, -2, -4};
  CHECK(projective_distance<double>(a, b) < 1e-16);
  std::vector<double> e0{1, 0}, e1{0, 1};
  CHECK(projective_distance<double>(e0, e1) == doctest::Approx(1));
  CHECK_THROWS_AS(normalize_projective<double>(std::vector<double>{0, 0}), Error);

  std::vector<double> north{1, 0, 0, 0}, south{-1, 0, 0, 0};
  CHECK(chart_projection(ChartProjection::kSphereToProjective, north) == north);
  CHECK(chart_projection(ChartProjection::kSphereToProjective, south) == north);
  CHECK(chart_projection(ChartProjection::kHyperbolicToHemisphere, north) == north);
  const double s = std::sinh(0.7);
  auto hp = chart_projection(ChartProjection::kHyperbolicToHemisphere, std::vector<double>{std::cosh(0.7), s, 0, 0});
  CHECK(hp[0] > 0);
  CHECK(hp[0] * hp[0] + hp[1] * hp[1] == doctest::Approx(1));
  CHECK_THROWS_AS(chart_projection(ChartProjection::kSphereToProjective, std::vector<double>{2, 0, 0, 0}), Error);
  CHECK_THROWS_AS(chart_projection(ChartProjection::kHyperbolicToHemisphere, std::vector<double>{-1, 0, 0, 0}),
                  Error);
}

TEST_CASE("dual fronts and incidence") {
  std::mt19937_64 rng(4);
  for (const char* name : {"torus.mapspec", "bumpy_torus.mapspec", "clifford_torus.mapspec"}) {
    MapSpec s = load_mapspec(data_path(name));
    for (int i = 0; i < 20; ++i) {
      auto p = testing_support::random_point(rng, 2, 3.0);
      auto F = homogeneous_lift<double>(s, p, 3);
      auto G = dual_front_of(F);
      CHECK(incidence_check(F, G) < 1e-10);
    }
  }
  auto plane = make_mapspec("pl", ScalarField::kReal, {"u", "v"}, MapKind::kProjective, {"u", "v", "0", "1"});
  auto G = dual_front<double>(plane, std::vector<double>{0.3, 0.2}, 2);
  auto gv = vals(G);
  CHECK(normalize_projective<double>(gv).coords == std::vector<double>{0, 0, 1, 0});
  for (const auto& g : G) CHECK(g.max_abs_coeff() == std::abs(g.value()));
  auto Fp = homogeneous_lift<double>(plane, std::vector<double>{0.3, 0.2}, 2);
  CHECK(incidence_check(Fp, G) == 0.0);

  // linear response to a perturbed dual
  MapSpec t = load_mapspec(data_path("torus.mapspec"));
  auto F = homogeneous_lift<double>(t, std::vector<double>{0.5, 1.0}, 3);
  auto Gt = dual_front_of(F);
  const double gn = norm(std::span<const double>(vals(Gt)));
  JetVec<double> pert = Gt;
  pert[2] = pert[2] + 1e-3 * gn;
  const double r = incidence_check(F, pert);
  const double direct = std::abs(1e-3 * gn * F[2].value());
  CHECK(r >= direct * (1 - 1e-9));
  CHECK(r < 1e-2 * gn * 10);
}

TEST_CASE("dual of the singular cubic") {
  const auto spec = load_mapspec(data_path("singular_cubic_projective.mapspec"));
  // the cusp goes to the inflection point at infinity and back
  const auto at_cusp = normalize_projective<double>(vals(dual_front<double>(spec, std::vector<double>{0.0}, 3)));
  CHECK(at_cusp.coords == std::vector<double>{0, 1, 0});
  const auto far = vals(dual_front<double>(spec, std::vector<double>{1e6}, 3));
  CHECK(projective_distance<double>(far, std::vector<double>{0, 0, 1}) < 1e-5);

  // oracle for gamma x gamma' / t with gamma = (a t^2, b t^3, 1):
  // (-3 b t, 2 a, a b t^3) up to sign, on the cubic 8 x^3 + 81 y^2 z = 0
  const double a = std::cbrt(2.0), b = std::sqrt(3.0);
  for (double t : {-2.0, -0.3, 0.05, 0.7, 3.0}) {
    const auto g = vals(dual_front<double>(spec, std::vector<double>{t}, 3));
    const std::vector<double> expected{-3 * b * t, 2 * a, a * b * t * t * t};
    CHECK(projective_distance<double>(g, expected) < 1e-12);
    const double s = 1.0 / norm(std::span<const double>(g));
    CHECK(std::abs(8 * std::pow(g[0] * s, 3) + 81 * std::pow(g[1] * s, 2) * g[2] * s) < 1e-12);
    // that cubic is not 2 y^2 z = 3 x^3 itself
    CHECK(std::abs(2 * std::pow(g[1] * s, 2) * g[2] * s - 3 * std::pow(g[0] * s, 3)) > 1e-3);
  }
}

TEST_CASE("biduality") {
  std::mt19937_64 rng(6);
  for (const char* name : {"torus.mapspec", "bumpy_torus.mapspec", "cc3_torus.mapspec"}) {
    MapSpec s = load_mapspec(data_path(name));
    int checked = 0;
    for (int i = 0; i < 30; ++i) {
      auto p = testing_support::random_point(rng, 2, 3.0);
      auto hd = hessian_data<double>(s, p);
      if (std::abs(hd.h) < 1e-3) continue;  // the dual is singular on the parabolic curve
      auto F = homogeneous_lift<double>(s, p, 4);
      auto GG = dual_front_of(dual_front_of(F));
      CHECK(projective_distance<double>(vals(GG), vals(F)) < 1e-8);
      ++checked;
    }
    CHECK(checked > 10);
  }
}

TEST_CASE("invariance of the Hessian") {
  MapSpec s = load_mapspec(data_path("bumpy_torus.mapspec"));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int i = 0; i < 20; ++i) {
    auto p = testing_support::random_point(rng, 2, 3.0);
    const double a = d(rng), b = d(rng), c = d(rng), e = d(rng);
    const double det_a = a * e - b * c;
    if (std::abs(det_a) < 0.1) continue;
    auto f = eval_map<double>(s, p, 6);
    // y -> p + A y
    JetVec<double> inner{Jet<double>::variable(0, 0, 2, 6) * a + Jet<double>::variable(1, 0, 2, 6) * b + p[0],
                         Jet<double>::variable(0, 0, 2, 6) * c + Jet<double>::variable(1, 0, 2, 6) * e + p[1]};
    JetVec<double> g;
    for (const auto& fk : f) g.push_back(compose_map<double>(fk, inner));
    auto h1 = hessian_jets_of(f, 2, false, nullptr);
    auto h2 = hessian_jets_of(g, 2, false, nullptr);
    // nu scales by det A and the form by det A * A^T H A
    CHECK(h2.hessian.value() == doctest::Approx(std::pow(det_a, 4) * h1.hessian.value()).epsilon(1e-9));

    // scaling nu by c multiplies h by c^n; -nu keeps the sign
    JetVec<double> nu = h1.normal;
    for (auto& x : nu) x = x * -2.5;
    auto h3 = hessian_jets_of(f, 2, false, &nu);
    CHECK(h3.hessian.value() == doctest::Approx(6.25 * h1.hessian.value()).epsilon(1e-12));
  }
}

TEST_CASE("lambda functions and null fields") {
  MapSpec edge = load_mapspec(data_path("cuspidal_edge.mapspec"));
  auto fr = lambda_front<double>(edge, std::vector<double>{0.3, 0.0});
  CHECK(fr.singular);
  CHECK(coeff(fr.lambda, {0, 1}) == doctest::Approx(4.0));  // lambda = 4v + 9v^3
  REQUIRE(fr.null_field.size() == 2);
  CHECK(std::abs(fr.null_field[0].value()) < 1e-14);
  CHECK(fr.null_field[1].value() == doctest::Approx(1));
  auto reg = lambda_front<double>(edge, std::vector<double>{0.3, 0.4});
  CHECK_FALSE(reg.singular);
  CHECK(reg.null_field.empty());

  MapSpec st = load_mapspec(data_path("swallowtail.mapspec"));
  for (double v : {0.0, 0.2, -0.3}) {
    const double u = -6 * v * v;
    auto f = lambda_front<double>(st, std::vector<double>{u, v});
    CHECK(f.singular);
    REQUIRE(f.null_field.size() == 2);
    CHECK(std::abs(f.null_field[0].value()) < 1e-12);
    // d Phi (eta) = 0 at the singular point
    auto phi = eval_map<double>(st, std::vector<double>{u, v}, 2);
    for (const auto& c : phi) {
      auto g = c.gradient();
      CHECK(std::abs(g[0] * f.null_field[0].value() + g[1] * f.null_field[1].value()) < 1e-8);
    }
  }
  auto off = lambda_front<double>(st, std::vector<double>{0.1, 0.1});
  CHECK_FALSE(off.singular);
  // lambda = 2 (6v^2 + u)(1 + v^2 + v^4)
  CHECK(off.lambda.value() == doctest::Approx(2 * (0.06 + 0.1) * (1 + 0.01 + 0.0001)));

  MapSpec fold = load_mapspec(data_path("fold.mapspec"));
  auto ff = lambda_front<double>(fold, std::vector<double>{0.1, 0.0});
  CHECK(ff.kind == LambdaKind::kMap);
  CHECK(ff.singular);
  CHECK(ff.null_field[1].value() == doctest::Approx(1));
}
