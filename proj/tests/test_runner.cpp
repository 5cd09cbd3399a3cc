#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "mirrorstate/runner.hpp"
#include "test_util.hpp"

using namespace mirrorstate;

TEST_CASE("range parsing") {
  auto r = parse_range("0.1:0.5:5");
  REQUIRE(r.size() == 5);
  CHECK(r.front() == doctest::Approx(0.1));
  CHECK(r.back() == doctest::Approx(0.5));
  CHECK(parse_range("0.25").size() == 1);
  CHECK_THROWS_AS(parse_range("1:2:0"), std::invalid_argument);
}

TEST_CASE("runs are deterministic byte for byte") {
  RunManifest man;
  man.config_path = TABLE1_CFG;
  man.subcommand = "sweep";
  man.options["delta-range"] = "0.1:0.3:3";
  RunOutput a = run(table1(), man);
  RunOutput b = run(table1(), man);
  REQUIRE(a.artifacts.size() == 1);
  CHECK(a.artifacts[0].content == b.artifacts[0].content);
  CHECK(a.manifest_json == b.manifest_json);
  CHECK(a.manifest_json.find("\"subcommand\": \"sweep\"") != std::string::npos);
  CHECK(a.manifest_json.find("delta-range") != std::string::npos);
}

TEST_CASE("steady emits profile plus summary") {
  RunManifest man;
  man.subcommand = "steady";
  man.options["delta"] = "0.2";
  man.options["sigma-samples"] = "11";
  RunOutput out = run(table1(), man);
  std::istringstream is(out.artifacts[0].content);
  std::string line;
  std::getline(is, line);
  CHECK(line == "sigma_cm,Xbar_exact_cm,Xbar_approx_cm");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 11 + 2);  // profile rows + summary header + summary row
}

TEST_CASE("figure preset emits the three purity columns") {
  RunManifest man;
  man.subcommand = "preset";
  man.options["preset"] = "fig8";
  man.options["delta-range"] = "0.15:0.25:2";
  RunOutput out = run(table1(), man);
  std::istringstream is(out.artifacts[0].content);
  std::string header;
  std::getline(is, header);
  CHECK(header == "delta,purity_two_mode,purity_one_mode,purity_one_mode_418G");
  int rows = 0;
  std::string line;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("wigner preset produces an SVG with the vacuum reference") {
  RunManifest man;
  man.subcommand = "wigner";
  man.options["delta"] = "0.2";
  man.options["mode"] = "rotational";
  RunOutput out = run(table1(), man);
  CHECK(out.artifacts[0].name == "wigner.svg");
  CHECK(out.artifacts[0].content.find("<svg") != std::string::npos);
  CHECK(out.artifacts[0].content.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("unknown requests are rejected") {
  RunManifest man;
  man.subcommand = "launch";
  CHECK_THROWS_AS(run(table1(), man), std::invalid_argument);
  man.subcommand = "covariance";
  man.options["discard"] = "everything";
  CHECK_THROWS_AS(run(table1(), man), std::invalid_argument);
}

TEST_CASE("command-line front end exit codes") {
  std::string cli = MIRRORSTATE_CLI;
  std::string cfg = TABLE1_CFG;
  int bogus = std::system((cli + " bogus > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bogus) == 2);
  int ok = std::system(
      (cli + " --config " + cfg + " steady --delta 0.2 --sigma-samples 5 > /dev/null 2>&1")
          .c_str());
  CHECK(WEXITSTATUS(ok) == 0);
}
