#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cli_commands.hpp"
#include "femto/config_json.hpp"

using namespace femto;
using namespace femto::cli;

namespace {

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

RunManifest manifest(const std::string& sub) {
  RunManifest m;
  m.subcommand = sub;
  m.seed = 4;
  m.trials = 4000;
  return m;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("sweep parsing") {
    const Sweep s = parse_sweep("mu_per_km2=0, 4,8");
    CHECK(s.name == "mu_per_km2");
    REQUIRE(s.values.size() == 3);
    CHECK(s.values[1] == 4.0);
    CHECK(parse_sweep("rho_db=").values.empty());
    CHECK_THROWS_AS(parse_sweep("mu_per_km2"), UsageError);
    CHECK_THROWS_AS(parse_sweep("bogus=1,2"), UsageError);
    CHECK_THROWS_AS(parse_sweep("R=1,x"), UsageError);
  }

  TEST_CASE("option parsing") {
    CHECK(parse_point("12.5,-3") == Point(12.5, -3.0));
    CHECK_THROWS_AS(parse_point("12.5"), UsageError);
    CHECK(parse_mode("closed") == ModeSel::closed);
    CHECK_THROWS_AS(parse_mode("half"), UsageError);
    CHECK(parse_level("femto-avg") == SimLevel::femto_avg);
    CHECK_THROWS_AS(parse_level("pico"), UsageError);
    CHECK(parse_power_model("random4") == PowerModel::random4);
    CHECK_THROWS_AS(parse_power_model("random3"), UsageError);
  }

  TEST_CASE("doubles keep 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
    CHECK(format_double(2.0) == "2");
  }

  TEST_CASE("empty sweep is a usage error") {
    RunManifest m = manifest("analyze");
    m.sweep = Sweep{"mu_per_km2", {}};
    std::ostringstream err;
    CHECK(run(m, err) == kExitUsage);
    CHECK_FALSE(err.str().empty());
  }

  TEST_CASE("analyze sweeps mu") {
    RunManifest m = manifest("analyze");
    m.sweep = parse_sweep("mu_per_km2=0,4,8");
    std::ostringstream out;
    REQUIRE(cmd_analyze(m, out) == kExitOk);
    const auto rows = csv(out.str());
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"param", "value", "outage_open", "outage_closed", "quad_error"});
    CHECK(rows[1][0] == "mu_per_km2");
    CHECK(rows[1][2] == rows[1][3]);
    CHECK(std::stod(rows[3][3]) > std::stod(rows[2][3]));
    m.mode = ModeSel::open;
    std::ostringstream only;
    cmd_analyze(m, only);
    CHECK(csv(only.str())[1][3].empty());
  }

  TEST_CASE("simulate is reproducible and agrees with analyze") {
    RunManifest m = manifest("simulate");
    m.trials = 20000;
    std::ostringstream a, b, c;
    REQUIRE(cmd_simulate(m, a, 9) == kExitOk);
    cmd_simulate(m, b, 9);
    CHECK(a.str() == b.str());
    const auto sim = csv(a.str());
    REQUIRE(sim.size() == 3);
    CHECK(sim[0] == std::vector<std::string>{"param", "value", "mode", "p_hat", "ci95", "trials", "seed"});
    CHECK(sim[1][2] == "open");
    CHECK(sim[2][2] == "closed");
    CHECK(sim[1][6] == "9");
    const double p = std::stod(sim[1][3]);
    CHECK(std::stod(sim[1][4]) == doctest::Approx(1.96 * std::sqrt(p * (1.0 - p) / 20000.0)));

    RunManifest an = manifest("analyze");
    cmd_analyze(an, c);
    const auto ana = csv(c.str());
    for (int k = 0; k < 2; ++k) {
      const double ps = std::stod(sim[1 + k][3]), pa = std::stod(ana[1][2 + k]);
      CHECK(std::abs(ps - pa) < 3.0 * std::sqrt(pa * (1.0 - pa) / 20000.0) + 1e-4);
    }
  }

  TEST_CASE("bounds report brackets the exact crossing") {
    RunManifest m = manifest("bounds");
    m.sweep = parse_sweep("R=25,50,75");
    std::ostringstream out;
    REQUIRE(cmd_bounds(m, out) == kExitOk);
    const auto doc = nlohmann::json::parse(out.str());
    REQUIRE(doc.size() == 3);
    for (const auto& e : doc) {
      const auto& r = e.at("report").at("rho_star");
      CHECK(r.at("min").get<double>() <= r.at("max").get<double>());
      if (r.at("exact").at("status") == "found") {
        CHECK(r.at("exact").at("rho").get<double>() >= r.at("min").get<double>() * (1 - 1e-3));
        CHECK(r.at("exact").at("rho").get<double>() <= r.at("max").get<double>() * (1 + 1e-3));
      }
    }
    m.level = SimLevel::femto_avg;
    std::ostringstream err;
    CHECK(run(m, err) == kExitUsage);
  }

  TEST_CASE("a numerically invalid configuration exits 1") {
    RunManifest m = manifest("analyze");
    m.sweep = parse_sweep("gamma=1.5");
    std::ostringstream err;
    CHECK(run(m, err) == kExitNumeric);
  }

  TEST_CASE("config json round trip") {
    NetworkConfig cfg = reference_config();
    cfg.pathloss_exponent = 3.5;
    cfg.rho = 7.0;
    const NetworkConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.pathloss_exponent == doctest::Approx(3.5));
    CHECK(back.rho == doctest::Approx(7.0));
    CHECK(back.femto_bs_density == doctest::Approx(cfg.femto_bs_density));
    CHECK(back.macro_power == doctest::Approx(cfg.macro_power));
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"gama", 4}}), ConfigError);
  }
}
