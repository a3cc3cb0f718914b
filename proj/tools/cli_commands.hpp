#pragma once

// Subcommands of femtoaccess-cli. Each writes its table or report to `out`
// and returns the process exit code.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "femto/analytic.hpp"
#include "femto/model.hpp"
#include "femto/simulator.hpp"

namespace femto::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ModeSel { open, closed, both };

struct Sweep {
  std::string name;
  std::vector<double> values;
};

struct RunManifest {
  std::string subcommand;
  std::string config_path;  ///< empty: reference configuration
  std::optional<Sweep> sweep;
  std::string out_path;  ///< empty: stdout
  std::optional<std::uint64_t> seed;
  std::size_t trials = 20000;
  ModeSel mode = ModeSel::both;
  SimLevel level = SimLevel::macro;
  Point x_b = Point(0.0, 100.0);
  PowerModel power_model = PowerModel::fixed;
  unsigned threads = 0;
  bool exact = true;
  double scale = 0.1;
  std::vector<int> criteria;

  /// Throws UsageError on an empty or non-finite sweep.
  void validate() const;
};

/// "mu_per_km2=2,4,8" into a sweep over a known parameter.
Sweep parse_sweep(const std::string& text);
Point parse_point(const std::string& text);
ModeSel parse_mode(const std::string& text);
SimLevel parse_level(const std::string& text);
PowerModel parse_power_model(const std::string& text);

/// Decimal with 17 significant digits, the form used in every CSV cell.
std::string format_double(double v);

/// Seed from the manifest, or a fresh one from the system entropy source.
std::uint64_t resolve_seed(const RunManifest& m);

/// One configuration per sweep value (the base alone when there is no sweep).
struct SweepPoint {
  std::string param;
  double value = 0.0;
  NetworkConfig config;
};
std::vector<SweepPoint> expand(const RunManifest& m);

int cmd_analyze(const RunManifest& m, std::ostream& out);
int cmd_simulate(const RunManifest& m, std::ostream& out, std::uint64_t seed);
int cmd_bounds(const RunManifest& m, std::ostream& out);
int cmd_validate(const RunManifest& m, std::ostream& out, std::uint64_t seed);

/// Opens the output, dispatches on m.subcommand and maps exceptions to exit
/// codes. Diagnostics go to `err`.
int run(const RunManifest& m, std::ostream& err);

}  // namespace femto::cli
