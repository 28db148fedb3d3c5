#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "levy_replenish/cli.hpp"
#include "test_support.hpp"

using namespace levy_replenish;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "levy-replenish");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string spec(const std::string& name) { return levy_test::spec_path(name); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("solve") {
    const Run r = run({"solve", "--spec", spec("model_a.json"), "--compare-classical"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("b_star").get<double>() == doctest::Approx(-3.0868825436766932).epsilon(1e-10));
    CHECK(j.contains("classical_b_star"));
  }

  TEST_CASE("value csv") {
    const Run r = run({"value", "--spec", spec("model_a.json"), "--b", "0", "--x", "2,-1.5"});
    REQUIRE(r.code == kExitOk);
    std::istringstream lines(r.out);
    std::string header;
    std::string row;
    std::getline(lines, header);
    CHECK(header == "b,x,v,v_prime,err_est,control_cost,inventory_cost,F,M");
    std::getline(lines, row);
    CHECK(row.rfind("0,2,722.937552843", 0) == 0);
  }

  TEST_CASE("simulate is deterministic") {
    const std::vector<std::string> args = {"simulate", "--spec", spec("model_a.json"), "--b", "-3", "--x", "-3",
                                           "--paths", "200", "--horizon", "50", "--seed", "9"};
    const Run a = run(args);
    const Run b = run(args);
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(nlohmann::json::parse(a.out).contains("total"));
  }

  TEST_CASE("sweep") {
    const Run r = run({"sweep", "--spec", spec("model_a.json"), "--param", "r", "--values", "0.5,5,50,500", "--x", "0",
                       "--format", "json"});
    REQUIRE(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out).at("b_star_decreasing").get<bool>());
  }

  TEST_CASE("verify exit codes") {
    Run r = run({"verify", "--spec", spec("model_a.json"), "--seed", "1", "--checks", "slope_convexity,m_derivative"});
    CHECK(r.code == kExitOk);
    r = run({"verify", "--spec", spec("model_a.json"), "--seed", "1", "--checks", "slope_convexity", "--b", "0"});
    CHECK(r.code == kExitCheckFailed);
  }

  TEST_CASE("error mapping") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"solve"}).code == kExitUsage);
    CHECK(run({"solve", "--spec", spec("invalid_piecewise.json")}).code == kExitInvalidSpec);
    const Run bad = run({"solve", "--spec", spec("invalid_piecewise.json")});
    CHECK(bad.err.find("f'(-inf) < -C*q < f'(+inf)") != std::string::npos);
    CHECK(run({"simulate", "--spec", spec("model_a.json"), "--paths", "0", "--seed", "1"}).code == kExitUsage);
    CHECK(run({"verify", "--spec", spec("model_a.json"), "--seed", "1", "--checks", "bogus"}).code == kExitUsage);
    CHECK(run({"solve", "--help"}).code == kExitOk);
  }

  TEST_CASE("output file and manifest") {
    const auto dir = std::filesystem::temp_directory_path() / "levy_replenish_cli_test";
    std::filesystem::create_directories(dir);
    const auto out = dir / "value.csv";
    const Run r = run({"value", "--spec", spec("model_a.json"), "--b", "-3", "--x", "-3", "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(std::filesystem::exists(out));
    std::ifstream mf(out.string() + ".manifest.json");
    REQUIRE(mf.good());
    const auto m = nlohmann::json::parse(mf);
    CHECK(m.at("subcommand") == "value");
    CHECK(m.contains("version"));
    std::filesystem::remove_all(dir);
  }
}
