#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "tbk/errors.hpp"
#include "tbk/report.hpp"

using namespace tbk;

TEST_CASE("doubles print with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("profile csv") {
  std::ostringstream out;
  write_profile_csv(out, {{0, 0.5, 1.0}, {1, 0.25, 0.5}});
  CHECK(out.str() == "step,tv,l2\n0,0.5,1\n1,0.25,0.5\n");
}

TEST_CASE("congestion csv quotes the comma-separated element") {
  FlowReport report;
  report.loads.push_back({Permutation::parse("2,1,3"), {"s2", "s2inv"}, Rational(1, 4), Rational(1, 2), Rational(2)});
  std::ostringstream out;
  write_congestion_csv(out, report);
  CHECK(out.str() == "element,letters,q,load,ratio,ratio_value\n\"2,1,3\",s2 s2inv,1/4,1/2,2/1,2\n");
}

TEST_CASE("mixing report json keeps key order and renders saturation as null") {
  MixingReport r;
  r.measure = "x";
  r.m_max = 3;
  const Json j = to_json(r);
  CHECK(j.begin().key() == "measure");
  CHECK(j.at("mixing_time").is_null());
  CHECK(j.at("saturated").get<bool>());
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.subcommand = "exact";
  m.argv = {"exact", "--n", "3"};
  m.parameters = {{"n", 3}};
  m.seed = 5;
  m.version = "1.0";
  m.outputs.push_back({"a.json", sha256_hex("x")});
  const RunManifest back = manifest_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(back.argv == m.argv);
  CHECK(back.seed == 5);
  CHECK(back.outputs.at(0).sha256 == m.outputs.at(0).sha256);
  CHECK(back.parameters == m.parameters);
}

TEST_CASE("fixture store refuses silent overwrites") {
  const auto path = std::filesystem::temp_directory_path() / "tbk_fixture_store_test.json";
  std::filesystem::remove(path);
  {
    FixtureStore store(path);
    store.put("a", 1, "first");
    CHECK_THROWS_AS(store.put("a", 2, "second"), DomainError);
    store.save();
  }
  FixtureStore reopened(path);
  CHECK(reopened.value("a") == 1);
  FixtureStore regen(path, true);
  regen.put("a", 2, "regenerated");
  CHECK(regen.value("a") == 2);
  CHECK_THROWS_AS(reopened.value("missing"), DomainError);
  std::filesystem::remove(path);
}
