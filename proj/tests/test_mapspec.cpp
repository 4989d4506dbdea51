#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualfront/mapspec.hpp"
#include "support.hpp"

using namespace dualfront;

TEST_CASE("bundled specs load and round-trip through the formatter") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(DUALFRONT_DATA_DIR)) {
    if (entry.path().extension() != ".mapspec") continue;
    ++count;
    MapSpec s = load_mapspec(entry.path());
    const std::string canon = format_mapspec(s);
    MapSpec back = parse_mapspec(canon);
    CHECK_MESSAGE(format_mapspec(back) == canon, entry.path().string());
    CHECK(back.m() == s.m());
    CHECK(back.kind == s.kind);
  }
  CHECK(count >= 10);
}

TEST_CASE("parse details") {
  MapSpec t = load_mapspec(testing_support::data_path("torus.mapspec"));
  CHECK(t.name == "torus");
  CHECK(t.n() == 2);
  CHECK(t.m() == 3);
  CHECK(t.fully_periodic());
  CHECK(t.domain[0].period() == doctest::Approx(2 * M_PI));
  const std::vector<double> far{7.0, -1.0};
  auto w = wrap_point(t, far);
  CHECK(w[0] == doctest::Approx(7.0 - 2 * M_PI));
  CHECK(w[1] == doctest::Approx(2 * M_PI - 1.0));

  MapSpec st = load_mapspec(testing_support::data_path("swallowtail.mapspec"));
  CHECK(st.has_normal());
  CHECK(st.contains(std::vector<double>{0.5, -0.5}));
  CHECK_FALSE(st.contains(std::vector<double>{1.5, 0}));
}

TEST_CASE("spec errors") {
  auto code = [](const std::string& text) {
    try {
      parse_mapspec(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kShape;
  };
  const std::string head = "name: x\nfield: real\nvars: u v\n";
  CHECK(code(head + "kind: affine\ncomponent: u\ncomponent: v\n") == ErrorCode::kSpec);
  CHECK(code(head + "kind: affine\ncomponent: u\ncomponent: v\ncomponent: q\n") == ErrorCode::kUndeclared);
  CHECK(code(head + "kind: torus\n") == ErrorCode::kSpec);
  CHECK(code(head + "kind: affine\ndomain: u 0 1\ncomponent: u\ncomponent: v\ncomponent: 1\n") == ErrorCode::kSpec);
  CHECK(code(head + "kind: affine\ndomain: u 1 0\ndomain: v 0 1\ncomponent: u\ncomponent: v\ncomponent: 1\n") ==
        ErrorCode::kSpec);
  CHECK(code(head + "kind: planemap\ncomponent: u\ncomponent: v\nnormal: 1\nnormal: 0\n") == ErrorCode::kSpec);
  CHECK(code("field: real\nkind: affine\n") == ErrorCode::kSpec);
  CHECK(code(head + "bogus: 1\n") == ErrorCode::kSpec);
  CHECK(code("name: c\nfield: real\nvars: u\nkind: affine\ncomponent: I*u\ncomponent: u\n") == ErrorCode::kUndeclared);
  CHECK_NOTHROW(parse_mapspec("name: c\nfield: complex\nvars: u\nkind: curve\ncomponent: I*u\ncomponent: u^2\n"));
  CHECK_THROWS_AS(load_mapspec("/nonexistent/file.mapspec"), Error);
}
