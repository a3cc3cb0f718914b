#pragma once

// Seeded Monte Carlo estimation of uplink outage at the macrocell BS and at a
// femtocell BS, for both access modes.
//
// Every trial draws its randomness from CounterRng(seed, trial index), and
// the draws do not depend on the access mode or on rho. One sampled
// realization therefore yields the interference under both modes and for
// every rho, which gives common random numbers across all comparisons.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "femto/geometry.hpp"
#include "femto/model.hpp"
#include "femto/rng.hpp"

namespace femto {

enum class SimLevel { macro, femto, femto_avg };
enum class PowerModel { fixed, random4 };

const char* to_string(SimLevel l);
const char* to_string(PowerModel p);

struct SimSpec {
  std::size_t trials = 20000;
  std::uint64_t seed = 1;
  double window_radius = 6.0;  ///< simulation disk around the victim, in units of R_c
  Access access = Access::open;
  SimLevel level = SimLevel::macro;
  Point x_b = Point::Zero();  ///< femtocell BS, same length unit as the config
  PowerModel power_model = PowerModel::fixed;
  /// Re-draw the typical macro UE while it lies inside a femtocell (open access).
  bool redraw_typical = true;
  /// Add the mean interference from beyond the window.
  bool far_field = true;
  unsigned threads = 0;  ///< 0: hardware concurrency

  void validate() const;
};

/// One realization reduced to what the outage test needs, in units of the
/// targeted macro power P. Interference under closed access is `closed`,
/// under open access `open_base + rho * open_rho`.
struct TrialSample {
  double signal = 0.0;
  double closed = 0.0;
  double open_base = 0.0;
  double open_rho = 0.0;

  double interference(Access access, double rho) const {
    return access == Access::closed ? closed : open_base + rho * open_rho;
  }
  bool outage(Access access, double rho, double threshold) const {
    return signal < threshold * interference(access, rho);
  }
};

struct OutageEstimate {
  double p_hat = 0.0;
  double ci95_halfwidth = 0.0;  ///< 1.96 sqrt(p (1 - p) / n)
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// One macro-level realization; spec.level is ignored.
TrialSample sample_macro_trial(CounterRng& rng, const NetworkConfig& cfg, const SimSpec& spec);
/// One femto-level realization with the victim femtocell BS at x_b.
TrialSample sample_femto_trial(CounterRng& rng, const NetworkConfig& cfg, const Point& x_b, const SimSpec& spec);

/// Outage indicator of one macro-level trial under spec.access and cfg.rho.
bool run_macro_trial(CounterRng& rng, const NetworkConfig& cfg, const SimSpec& spec);
bool run_femto_trial(CounterRng& rng, const NetworkConfig& cfg, const Point& x_b, const SimSpec& spec);

/// All trials of spec, in trial order. Deterministic for any thread count.
std::vector<TrialSample> sample_trials(const NetworkConfig& cfg, const SimSpec& spec);

OutageEstimate outage_from_samples(const std::vector<TrialSample>& samples, Access access, double rho,
                                   double threshold, std::uint64_t seed = 0);

OutageEstimate estimate_outage(const NetworkConfig& cfg, const SimSpec& spec);

struct CrossingEstimate {
  bool found = false;
  double rho = 0.0;  ///< outage(open) = outage(closed)
  double lo = 0.0;   ///< 95% interval from the paired difference
  double hi = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string note;
};

/// rho at which the simulated open and closed outage break even, at the
/// level of spec. Bisection on log rho over the paired outage difference.
CrossingEstimate estimate_rho_star_sim(const NetworkConfig& cfg, const SimSpec& spec);
CrossingEstimate rho_crossing_from_samples(const std::vector<TrialSample>& samples, double threshold);

struct LaplaceEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Mean of exp(-s I) over full realizations, I under spec.access and cfg.rho
/// in the power unit of the config.
LaplaceEstimate estimate_laplace_direct(const NetworkConfig& cfg, double s, const SimSpec& spec);

}  // namespace femto
