#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "qdim/error.hpp"
#include "qdim/system_io.hpp"

using namespace qdim;
using doctest::Approx;

TEST_CASE("bundled systems load") {
  const auto e1 = load_system_file(fixtures::data_file("e1.json"));
  CHECK(e1.system.is_finite());
  CHECK(*e1.system.alphabet_size() == 2);
  CHECK(e1.family.is_constant());
  CHECK(e1.digest.size() == 16);

  const auto e3 = load_system_file(fixtures::data_file("e3.json"));
  CHECK_FALSE(e3.system.is_finite());
  CHECK(*e3.system.geometric_ratio() == Approx(1.0 / 3.0));
  CHECK(e3.family.log_weight(2) == Approx(std::log(0.25)));

  const auto g = load_system_file(fixtures::data_file("gauss.json"));
  CHECK_FALSE(g.system.is_finite());
  CHECK_FALSE(g.family.is_constant());

  const auto g2 = load_system_file(fixtures::data_file("gauss2.json"));
  CHECK(g2.system.assumptions.size() == 1);
  CHECK(g2.system.distortion() == 4.0);

  const auto mob = load_system_file(fixtures::data_file("mobius.json"));
  CHECK(mob.system.distortion() == Approx(1.8));
  CHECK(mob.system.map(1)(1.0) == Approx(0.25));
}

TEST_CASE("digest depends on content, not formatting") {
  const auto a = parse_system_json(R"({"domain":[0,1],"kind":"gauss","alphabet_size":3,"potential":{"kind":"derivative","s":1}})");
  const auto b = parse_system_json(R"({ "potential": {"s": 1, "kind": "derivative"},
      "alphabet_size": 3, "kind": "gauss", "domain": [0, 1] })");
  const auto c = parse_system_json(R"({"domain":[0,1],"kind":"gauss","alphabet_size":4,"potential":{"kind":"derivative","s":1}})");
  CHECK(a.digest == b.digest);
  CHECK(a.digest != c.digest);
  CHECK(a.canonical == b.canonical);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("malformed documents are rejected") {
  const char* bad[] = {
      "not json",
      R"([1, 2])",
      R"({"kind":"fractal"})",
      R"({"kind":"similarity","maps":[]})",
      R"({"kind":"similarity","maps":[{"ratio":1.2,"offset":0}],"potential":{"kind":"logweights","weights":[1]}})",
      R"({"kind":"similarity","maps":[{"ratio":0.5,"offset":0}],"potential":{"kind":"logweights","weights":[0.5,0.5]}})",
      R"({"kind":"gauss","alphabet_size":2})",
      R"({"kind":"gauss","alphabet_size":2,"potential":{"kind":"derivative","s":1,"g":"sin"}})",
      R"({"kind":"custom","maps":[{"mobius":[1,0,1,3]}],"potential":{"kind":"derivative","s":1}})",
      R"({"kind":"similarity","domain":[0,2],"infinite":{"family":"geometric","ratio":0.3},"potential":{"kind":"logweights","weights":{"family":"geometric","ratio":0.5}}})",
  };
  for (const char* text : bad) CHECK_THROWS_AS((void)parse_system_json(text), SpecError);
  CHECK_THROWS_AS((void)load_system_file("/nonexistent/system.json"), SpecError);
}
