#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli_commands.hpp"

namespace cli = femto::cli;

namespace {

struct Raw {
  std::string sweep, mode = "both", level = "macro", x_b, power_model = "fixed";
  bool has_sweep = false;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, cli::RunManifest& m, Raw& raw) {
  sub->add_option("--config", m.config_path, "JSON configuration (default: reference parameters)");
  sub->add_option_function<std::string>(
      "--sweep",
      [&raw](const std::string& v) {
        raw.sweep = v;
        raw.has_sweep = true;
      },
      "NAME=v1,v2,... over one parameter");
  sub->add_option("--out", m.out_path, "output file (default: stdout)");
  sub->add_option("--mode", raw.mode, "open|closed|both");
  sub->add_option("--level", raw.level, "macro|femto|femto-avg");
  sub->add_option("--x-b", raw.x_b, "\"x,y\" femtocell BS in meters (default 0,100)");
}

void add_random(CLI::App* sub, cli::RunManifest& m, Raw& raw) {
  sub->add_option_function<std::uint64_t>(
      "--seed", [&raw](std::uint64_t v) { raw.seed = v; }, "random seed (default: drawn and echoed)");
  sub->add_option("--trials", m.trials, "Monte Carlo trials");
  sub->add_option("--threads", m.threads, "worker threads, 0 = all");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open vs closed access uplink outage in two-tier femtocell networks"};
  app.require_subcommand(1);
  cli::RunManifest m;
  Raw raw;

  auto* analyze = app.add_subcommand("analyze", "analytic outage per sweep value (CSV)");
  add_common(analyze, m, raw);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo outage per sweep value (CSV)");
  add_common(simulate, m, raw);
  add_random(simulate, m, raw);
  simulate->add_option("--power-model", raw.power_model, "fixed|random4");

  auto* bounds = app.add_subcommand("bounds", "threshold bounds and certificates per sweep value (JSON)");
  add_common(bounds, m, raw);
  bool skip_exact = false;
  bounds->add_flag("--skip-exact", skip_exact, "do not solve for the exact threshold");

  auto* validate = app.add_subcommand("validate", "acceptance checks at reduced scale");
  validate->add_option("--config", m.config_path, "configuration checked against simulation");
  validate->add_option("--out", m.out_path, "output file (default: stdout)");
  add_random(validate, m, raw);
  validate->add_option("--scale", m.scale, "fraction of the full Monte Carlo effort (default 0.1)");
  validate->add_option("--criteria", m.criteria, "run only these criteria (1-11)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  try {
    m.subcommand = app.get_subcommands().front()->get_name();
    if (raw.has_sweep) m.sweep = cli::parse_sweep(raw.sweep);
    m.mode = cli::parse_mode(raw.mode);
    m.level = cli::parse_level(raw.level);
    if (!raw.x_b.empty()) m.x_b = cli::parse_point(raw.x_b);
    m.power_model = cli::parse_power_model(raw.power_model);
    m.seed = raw.seed;
    m.exact = !skip_exact;
  } catch (const cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return cli::kExitUsage;
  }
  return cli::run(m, std::cerr);
}
