#include <doctest.h>

#include <cmath>
#include <limits>

#include "dualfront/report.hpp"
#include "support.hpp"

using namespace dualfront;

TEST_CASE("number formatting") {
  Json j = Json::object();
  j["third"] = 1.0 / 3.0;
  j["nan"] = std::numeric_limits<double>::quiet_NaN();
  j["inf"] = -std::numeric_limits<double>::infinity();
  j["int"] = 42;
  j["short"] = Json::array({1.5, 2, 3});
  const std::string s = dump_json(j);
  CHECK(s ==
        "{\n"
        "  \"third\": 0.33333333333333331,\n"
        "  \"nan\": null,\n"
        "  \"inf\": null,\n"
        "  \"int\": 42,\n"
        "  \"short\": [1.5, 2, 3]\n"
        "}\n");
  // 17 significant digits round-trip every double
  const double back = Json::parse(s)["third"].get<double>();
  CHECK(back == 1.0 / 3.0);
}

TEST_CASE("field order follows insertion") {
  Json j = Json::object();
  j["zeta"] = 1;
  j["alpha"] = 2;
  const std::string s = dump_json(j);
  CHECK(s.find("zeta") < s.find("alpha"));
  CHECK(dump_json(Json::array()) == "[]\n");
  CHECK(dump_json(Json::object()) == "{}\n");
}

TEST_CASE("classification report") {
  const auto spec = load_mapspec(DUALFRONT_DATA_DIR "/a4_inflection.mapspec");
  const std::vector<double> p{0.0, 0.0, 0.0};
  Json doc = report_document("classify", "a4", spec);
  doc["inflection"] = to_json(classify_inflection<double>(spec, p));
  const auto parsed = Json::parse(dump_json(doc));
  CHECK(parsed["command"] == "classify");
  CHECK(parsed["map"]["vars"].size() == 3);
  CHECK(parsed["inflection"]["label"] == "A_4-inflection");
  CHECK(parsed["inflection"]["certificate"]["rank"] == 3);
  CHECK(dump_json(doc) == dump_json(doc));
}

TEST_CASE("complex values serialize as pairs") {
  const auto spec = make_mapspec("c", ScalarField::kComplex, {"u"}, MapKind::kCurve, {"u", "u^3"});
  const std::vector<Complex> p{Complex(0.5, 0.25)};
  const auto s = classify_inflection<Complex>(spec, p);
  const auto j = to_json(s);
  const auto& values = j["certificate"]["values"];
  REQUIRE(values.size() > 0);
  CHECK(values[0].is_array());
  CHECK(values[0].size() == 2);
}
