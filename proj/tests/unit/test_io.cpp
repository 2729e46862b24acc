#include "afpp/error.hpp"
#include "afpp/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace afpp;
using afpp::io::json;

TEST_CASE("params round-trip") {
  const ModelParams p{15.0, 0.1, 0.45, 0.04, 0.28, 0.45};
  CHECK(io::params_from_json(io::to_json(p)) == p);
}

TEST_CASE("unknown parameter key is named") {
  try {
    io::params_from_json(json{{"gamma", 1.0}, {"bogus", 2.0}});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(io::params_from_json(json{{"gamma", "one"}}), DomainError);
  CHECK_THROWS_AS(io::params_from_json(json::array()), DomainError);
}

TEST_CASE("control problem parsing") {
  const json j = {{"params", {{"gamma", 7}, {"xi", 0.1}, {"epsilon", 0.3}, {"m", 1}, {"delta", 3}}},
                  {"control", "quality"},
                  {"initial", {5, 2}},
                  {"target", {1, 4}}};
  const auto prob = io::control_problem_from_json(j);
  CHECK(prob.u_min == 0.5);
  CHECK(prob.u_max == 2.0);
  CHECK(prob.mesh_size == 40);
  CHECK(prob.target.y == 4.0);
  const auto back = io::control_problem_from_json(io::to_json(prob));
  CHECK(back.params == prob.params);
  CHECK(back.initial == prob.initial);

  json q = j;
  q["control"] = "quantity";
  CHECK(io::control_problem_from_json(q).u_max == 1.0);
  q["extra"] = 1;
  CHECK_THROWS_AS(io::control_problem_from_json(q), DomainError);
  json r = j;
  r["bounds"] = {2.0, 1.0};
  CHECK_THROWS_AS(io::control_problem_from_json(r), DomainError);
}

TEST_CASE("shortest round-trip formatting") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(io::fmt(v)) == v);
  CHECK(io::fmt(0.5) == "0.5");
}

TEST_CASE("csv and json carry the metadata block") {
  const auto dir = std::filesystem::temp_directory_path() / "afpp_io_test";
  std::filesystem::create_directories(dir);
  const json meta = io::metadata("unit", io::to_json(ModelParams{}), json::object(), 0.25, true);
  io::write_csv(dir / "a.csv", meta, {"a", "b"}, {{"1", "2"}, {"3", "4"}});
  std::ifstream in(dir / "a.csv");
  std::string line;
  std::getline(in, line);
  REQUIRE(line.rfind("# ", 0) == 0);
  const json m = json::parse(line.substr(2));
  CHECK(m["truncated"] == true);
  CHECK(m["command"] == "unit");
  CHECK(m.contains("git_describe"));
  CHECK(m["params"]["delta"] == 2.0);
  std::getline(in, line);
  CHECK(line == "a,b");

  io::write_json(dir / "b.json", meta, {{"x", 1}});
  const json b = io::read_json_file(dir / "b.json");
  CHECK(b["x"] == 1);
  CHECK(b["meta"]["wall_time_s"] == 0.25);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed files") {
  const auto path = std::filesystem::temp_directory_path() / "afpp_bad.json";
  std::ofstream(path) << "{\"gamma\": ";
  CHECK_THROWS_AS(io::read_json_file(path), DomainError);
  CHECK_THROWS_AS(io::read_json_file("/nonexistent/afpp.json"), DomainError);
  std::filesystem::remove(path);
}
