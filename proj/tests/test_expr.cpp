#include <doctest.h>

#include <random>

#include "dualfront/expr.hpp"
#include "support.hpp"

using namespace dualfront;

namespace {

const std::vector<std::string> kUV{"u", "v"};

ErrorCode parse_error(const std::string& src, const std::vector<std::string>& vars = kUV) {
  try {
    parse(src, vars);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error for " << src);
  return ErrorCode::kShape;
}

}  // namespace

TEST_CASE("tokenizer") {
  auto toks = tokenize("sin(u)*2.5e-1 + v^2");
  REQUIRE(toks.size() == 10);
  CHECK(toks[0].kind == TokenKind::kIdentifier);
  CHECK(toks[0].lexeme == "sin");
  CHECK(toks[1].kind == TokenKind::kParen);
  CHECK(toks[4].kind == TokenKind::kOperator);
  CHECK(toks[5].kind == TokenKind::kNumber);
  CHECK(toks[5].lexeme == "2.5e-1");
  CHECK(toks[5].offset == 7);
  std::string joined;
  for (const auto& t : toks) joined += t.lexeme;
  CHECK(joined == "sin(u)*2.5e-1+v^2");
  CHECK_THROWS_AS(tokenize("u $ v"), Error);
}

TEST_CASE("precedence and shape of the tree") {
  auto e = parse("u^2 + v^2", kUV);
  REQUIRE(e->kind == Expr::Kind::kAdd);
  CHECK(e->args[0]->kind == Expr::Kind::kPow);
  CHECK(e->args[0]->args[0]->var == 0);
  CHECK(e->args[1]->args[0]->var == 1);

  auto n = parse("-u^2", kUV);
  REQUIRE(n->kind == Expr::Kind::kNeg);
  CHECK(n->args[0]->kind == Expr::Kind::kPow);

  auto c = parse("w - sin(w)", std::vector<std::string>{"w"});
  REQUIRE(c->kind == Expr::Kind::kSub);
  CHECK(c->args[1]->kind == Expr::Kind::kCall);
  CHECK(c->args[1]->func == Func::kSin);

  // right associativity of ^ and left associativity of - and /
  const std::vector<double> p{2.0, 3.0};
  CHECK(eval_scalar<double>(*parse("2^3^2", kUV), p) == 512);
  CHECK(eval_scalar<double>(*parse("u - v - 1", kUV), p) == -2);
  CHECK(eval_scalar<double>(*parse("12 / u / v", kUV), p) == 2);
  CHECK(eval_scalar<double>(*parse("u * (v + 1)", kUV), p) == 8);
  CHECK(eval_scalar<double>(*parse("2 * pi", kUV), p) == doctest::Approx(2 * M_PI));
  CHECK(eval_scalar<double>(*parse("u^-1", kUV), p) == 0.5);
  CHECK(eval_scalar<double>(*parse("-u - -v", kUV), p) == 1);
}

TEST_CASE("every production accepts and rejects") {
  // primary
  CHECK_NOTHROW(parse("1.5e3", kUV));
  CHECK(parse_error("1.5e") == ErrorCode::kSyntax);
  CHECK_NOTHROW(parse("(u)", kUV));
  CHECK(parse_error("(u") == ErrorCode::kSyntax);
  CHECK(parse_error("x + 1") == ErrorCode::kUndeclared);
  CHECK(parse_error("I*u") == ErrorCode::kUndeclared);
  CHECK_NOTHROW(parse("I*u", kUV, ParseOptions{true}));
  // call
  CHECK_NOTHROW(parse("cbrt(u)", kUV));
  CHECK(parse_error("cbrt(u, v)") == ErrorCode::kArity);
  CHECK(parse_error("sin()") == ErrorCode::kArity);
  CHECK(parse_error("sin u") == ErrorCode::kSyntax);
  // power
  CHECK_NOTHROW(parse("u^(1/2)", kUV));
  CHECK(parse_error("u^v") == ErrorCode::kSyntax);
  CHECK(parse_error("u^") == ErrorCode::kSyntax);
  // unary
  CHECK_NOTHROW(parse("--u", kUV));
  CHECK(parse_error("-") == ErrorCode::kSyntax);
  // term / expr
  CHECK_NOTHROW(parse("u*v/2", kUV));
  CHECK(parse_error("u*/v") == ErrorCode::kSyntax);
  CHECK_NOTHROW(parse("u+v-1", kUV));
  CHECK(parse_error("u+") == ErrorCode::kSyntax);
  CHECK(parse_error("u v") == ErrorCode::kSyntax);
  CHECK(parse_error("") == ErrorCode::kSyntax);

  try {
    parse("u + * v", kUV);
  } catch (const Error& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("jet evaluation examples") {
  auto uv = parse("u*v", kUV);
  auto j = eval_jet<double>(*uv, std::vector<double>{2, 3}, 1);
  CHECK(j.value() == 6);
  CHECK(j.gradient() == std::vector<double>{3, 2});

  const std::vector<std::string> t{"t"};
  auto cj = eval_jet<double>(*parse("1 - cos(t)", t), std::vector<double>{0}, 3);
  CHECK(cj.coeffs()[0] == 0);
  CHECK(cj.coeffs()[1] == 0);
  CHECK(cj.coeffs()[2] == doctest::Approx(0.5));
  CHECK(std::abs(cj.coeffs()[3]) < 1e-15);

  CHECK_THROWS_AS(eval_jet<double>(*parse("log(u)", kUV), std::vector<double>{-1, 0}, 2), Error);
  CHECK_THROWS_AS(eval_jet<double>(*parse("1/u", kUV), std::vector<double>{0, 0}, 2), Error);
  CHECK_THROWS_AS(eval_jet<double>(*parse("sqrt(u)", kUV), std::vector<double>{0, 0}, 2), Error);
  CHECK_THROWS_AS(eval_scalar<double>(*parse("u^0.5", kUV), std::vector<double>{-1, 0}), Error);

  // odd real cube root and the complex principal branch
  CHECK(eval_scalar<double>(*parse("cbrt(u)", kUV), std::vector<double>{-8, 0}) == doctest::Approx(-2));
  auto cb = eval_jet<double>(*parse("cbrt(u)", kUV), std::vector<double>{-8, 0}, 2);
  CHECK(cb.gradient()[0] == doctest::Approx(1.0 / 12));
  const std::vector<Complex> zc{Complex(-8, 0), Complex(0, 0)};
  const Complex principal = eval_scalar<Complex>(*parse("cbrt(u)", kUV, ParseOptions{true}), zc);
  CHECK(principal.real() == doctest::Approx(1));
  CHECK(principal.imag() == doctest::Approx(std::sqrt(3.0)));
  const Complex iu = eval_scalar<Complex>(*parse("I*u", kUV, ParseOptions{true}), zc);
  CHECK(iu == Complex(0, -8));
}

TEST_CASE("print then parse is the identity on trees") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> vars{"u", "v", "w"};
  for (int i = 0; i < 300; ++i) {
    auto e = parse(testing_support::random_expression(rng, vars, 4), vars);
    const std::string s = to_string(*e, vars);
    auto back = parse(s, vars);
    CHECK_MESSAGE(equal(*e, *back), s);
    CHECK(to_string(*back, vars) == s);
  }
  for (const char* s : {"-u^2", "(-u)^2", "u-(v-w)", "u/(v*w)", "2^3^2", "(2^3)^2", "-(u+v)", "u^-1", "sin(-u)"}) {
    auto e = parse(s, vars);
    CHECK_MESSAGE(equal(*e, *parse(to_string(*e, vars), vars)), s);
  }
}

TEST_CASE("order-0 jets equal scalar evaluation") {
  std::mt19937_64 rng(9);
  const std::vector<std::string> vars{"u", "v", "w"};
  for (int i = 0; i < 1000; ++i) {
    auto e = parse(testing_support::random_expression(rng, vars, 4), vars);
    auto p = testing_support::random_point(rng, 3);
    const double s = eval_scalar<double>(*e, p);
    const double j = eval_jet<double>(*e, p, 0).value();
    CHECK(j == doctest::Approx(s).epsilon(1e-12));
    const double j3 = eval_jet<double>(*e, p, 3).value();
    CHECK(j3 == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("first and second jet coefficients match finite differences") {
  std::mt19937_64 rng(13);
  const std::vector<std::string> vars{"u", "v"};
  for (int i = 0; i < 100; ++i) {
    const std::string src = testing_support::random_expression(rng, vars, 3);
    auto e = parse(src, vars);
    auto p = testing_support::random_point(rng, 2);
    auto jet = eval_jet<double>(*e, p, 2);
    INFO(src << " at " << p[0] << "," << p[1]);
    auto f = [&](std::span<const double> x) { return eval_scalar<double>(*e, x); };
    double scale = 1.0;
    for (double cf : jet.coeffs()) scale = std::max(scale, std::abs(cf));
    for (std::size_t k = 1; k < jet.coeffs().size(); ++k) {
      const auto& alpha = jet.layout()->exponents(k);
      const double fd = testing_support::fd_derivative(f, p, alpha);
      CHECK(std::abs(jet.derivative(alpha) - fd) <= 1e-6 * scale);
    }
  }
}
