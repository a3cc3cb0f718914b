#include "femto/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "femto/analytic.hpp"

namespace femto {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kMacroStream = 1, kFemtoStream = 2, kTypicalStream = 3, kPositionStream = 4,
                        kVictimStream = 5;

// Femtocell BSs sorted by x for the "nearest BS within R" query.
class FemtoIndex {
 public:
  FemtoIndex(std::vector<Point> bs, double radius) : bs_(std::move(bs)), radius_(radius) {
    std::sort(bs_.begin(), bs_.end(), [](const Point& a, const Point& b) { return a.x() < b.x(); });
  }

  // Index of the nearest BS within the femtocell radius, or -1.
  long nearest_within(const Point& p) const {
    auto first = std::lower_bound(bs_.begin(), bs_.end(), p.x() - radius_,
                                  [](const Point& a, double x) { return a.x() < x; });
    long best = -1;
    double best_d2 = radius_ * radius_;
    for (auto it = first; it != bs_.end() && it->x() <= p.x() + radius_; ++it) {
      const double d2 = (*it - p).squaredNorm();
      if (d2 <= best_d2) {
        best_d2 = d2;
        best = static_cast<long>(it - bs_.begin());
      }
    }
    return best;
  }

  const Point& operator[](long i) const { return bs_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<Point> bs_;
  double radius_;
};

// Normalized parameters of a run (R_c = 1, P = 1).
struct Scene {
  NetworkConfig c;
  HexGrid<double> grid{1.0};
  double window = 6.0;
  PowerModel power = PowerModel::fixed;
  // Mean interference from beyond the window, split like TrialSample.
  double far_common = 0.0;
  double far_removed = 0.0;
  double far_enh = 0.0;
};

double mean_level(PowerModel p) { return p == PowerModel::random4 ? 1.25 : 1.0; }

template <typename Rng>
double draw_level(Rng& rng, PowerModel p) {
  if (p == PowerModel::fixed) return 1.0;
  return 0.5 * double(1 + (rng() >> 62));
}

Scene make_scene(const NetworkConfig& cfg, const SimSpec& spec) {
  cfg.validate();
  spec.validate();
  Scene sc;
  sc.c = normalize(cfg).config;
  sc.window = spec.window_radius;
  sc.power = spec.power_model;
  if (spec.far_field) {
    const double g = sc.c.pathloss_exponent, R = sc.c.femto_radius;
    const double shell = 2.0 * kPi * std::pow(sc.window, 2.0 - g) / (g - 2.0);
    const double e = mean_level(spec.power_model);
    const double hex_mean = hex_power_moment(g) / (1.5 * std::sqrt(3.0));
    const double lam = sc.c.macro_ue_density, mu = sc.c.femto_bs_density;
    sc.far_common = shell * (lam * e * hex_mean + mu * sc.c.femto_power * sc.c.femto_ue_profile.radial_moment(g));
    sc.far_removed = shell * mu * lam * e * kPi * R * R * hex_mean;
    sc.far_enh = shell * mu * lam * e * 2.0 * kPi * std::pow(R, g + 2.0) / (g + 2.0);
  }
  return sc;
}

// Interference at `victim` from a UE at `tx` power-controlled towards `served_at`.
inline double term(const Point& victim, const Point& tx, const Point& served_at, double power, double h,
                   double gamma) {
  return power * h * std::pow((tx - served_at).norm() / (tx - victim).norm(), gamma);
}

// Everything except the typical link. `typical_bs` is the victim femtocell
// BS at the femto level; it joins the femtocell index.
TrialSample interference(CounterRng& rng, const Scene& sc, const Point& victim, const Point* typical_bs) {
  const double g = sc.c.pathloss_exponent, R = sc.c.femto_radius, Q = sc.c.femto_power;
  TrialSample out;

  CounterRng femto_rng = rng.split(kFemtoStream);
  const DiskRegion<double> bs_window(victim, sc.window + R);
  std::vector<Point> bs = sample_ppp_window(femto_rng, sc.c.femto_bs_density, bs_window);
  const double w2 = sc.window * sc.window;
  for (const Point& f : bs) {
    for (const Point& y : sample_ppp_profile(femto_rng, sc.c.femto_ue_profile, f)) {
      const double h = draw_fading(femto_rng);
      if ((y - victim).squaredNorm() <= w2) out.closed += term(victim, y, f, Q, h, g);
    }
  }
  if (typical_bs) {
    // Local UEs of the victim femtocell other than the typical one.
    for (const Point& y : sample_ppp_profile(femto_rng, sc.c.femto_ue_profile, *typical_bs)) {
      (void)y;
      out.closed += Q * draw_fading(femto_rng);
    }
    bs.push_back(*typical_bs);
  }
  out.open_base = out.closed;
  const FemtoIndex index(std::move(bs), R);

  CounterRng macro_rng = rng.split(kMacroStream);
  const DiskRegion<double> window(victim, sc.window);
  for (const Point& x : sample_ppp_window(macro_rng, sc.c.macro_ue_density, window)) {
    const double lvl = draw_level(macro_rng, sc.power);
    const double h = draw_fading(macro_rng);
    const double macro = term(victim, x, nearest_bs(x, sc.grid), lvl, h, g);
    out.closed += macro;
    const long f = index.nearest_within(x);
    if (f < 0)
      out.open_base += macro;
    else
      out.open_rho += term(victim, x, index[f], lvl, h, g);
  }

  out.closed += sc.far_common;
  out.open_base += sc.far_common - sc.far_removed;
  out.open_rho += sc.far_enh;
  return out;
}

TrialSample macro_trial(CounterRng& rng, const Scene& sc, const SimSpec& spec) {
  TrialSample out = interference(rng, sc, Point::Zero(), nullptr);
  CounterRng typ = rng.split(kTypicalStream);
  const double lvl = draw_level(typ, sc.power);
  out.signal = lvl * draw_fading(typ);
  if (spec.redraw_typical && spec.access == Access::open && sc.c.femto_bs_density > 0.0) {
    // The position only decides which UE is typical; its received power is fixed by power control.
    CounterRng pos_rng = rng.split(kPositionStream);
    CounterRng femto_rng = rng.split(kFemtoStream);
    const FemtoIndex index(
        sample_ppp_window(femto_rng, sc.c.femto_bs_density,
                          DiskRegion<double>(Point::Zero(), sc.window + sc.c.femto_radius)),
        sc.c.femto_radius);
    for (int attempt = 0; attempt < 1000; ++attempt)
      if (index.nearest_within(sample_uniform_hexagon(pos_rng, sc.grid)) < 0) break;
  }
  return out;
}

TrialSample femto_trial(CounterRng& rng, const Scene& sc, const Point& x_b) {
  TrialSample out = interference(rng, sc, x_b, &x_b);
  CounterRng typ = rng.split(kTypicalStream);
  out.signal = sc.c.femto_power * draw_fading(typ);
  return out;
}

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(chunks, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks || failed) return;
      try {
        for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) f(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct PairedDifference {
  double mean = 0.0;
  double std_error = 0.0;
};

// Mean and standard error of 1{open outage} - 1{closed outage}.
PairedDifference paired_difference(const std::vector<TrialSample>& s, double rho, double threshold) {
  double sum = 0.0, sum2 = 0.0;
  for (const auto& t : s) {
    const double d = double(t.outage(Access::open, rho, threshold)) - double(t.outage(Access::closed, rho, threshold));
    sum += d;
    sum2 += d * d;
  }
  const double n = double(s.size());
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

// Largest rho in [lo, hi] (to relative 1e-4) where pred holds, assuming pred
// holds at lo and fails at hi.
template <typename Pred>
double bisect_log(double lo, double hi, Pred pred) {
  while (hi / lo - 1.0 > 1e-4) {
    const double mid = std::sqrt(lo * hi);
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

const char* to_string(SimLevel l) {
  switch (l) {
    case SimLevel::macro: return "macro";
    case SimLevel::femto: return "femto";
    case SimLevel::femto_avg: return "femto-avg";
  }
  return "?";
}

const char* to_string(PowerModel p) { return p == PowerModel::fixed ? "fixed" : "random4"; }

void SimSpec::validate() const {
  if (trials < 1) throw DomainError("SimSpec: trials must be >= 1");
  if (!(window_radius >= 3.0) || !std::isfinite(window_radius))
    throw DomainError("SimSpec: window radius must be >= 3 cell radii");
  if (!x_b.allFinite()) throw DomainError("SimSpec: x_B must be finite");
}

TrialSample sample_macro_trial(CounterRng& rng, const NetworkConfig& cfg, const SimSpec& spec) {
  return macro_trial(rng, make_scene(cfg, spec), spec);
}

TrialSample sample_femto_trial(CounterRng& rng, const NetworkConfig& cfg, const Point& x_b, const SimSpec& spec) {
  return femto_trial(rng, make_scene(cfg, spec), x_b / cfg.cell_radius);
}

bool run_macro_trial(CounterRng& rng, const NetworkConfig& cfg, const SimSpec& spec) {
  return sample_macro_trial(rng, cfg, spec).outage(spec.access, cfg.rho, cfg.sir_threshold);
}

bool run_femto_trial(CounterRng& rng, const NetworkConfig& cfg, const Point& x_b, const SimSpec& spec) {
  return sample_femto_trial(rng, cfg, x_b, spec).outage(spec.access, cfg.rho, cfg.sir_threshold);
}

std::vector<TrialSample> sample_trials(const NetworkConfig& cfg, const SimSpec& spec) {
  const Scene sc = make_scene(cfg, spec);
  const Point x_b = spec.x_b / cfg.cell_radius;
  if (spec.level == SimLevel::femto && !in_hexagon<double>(x_b, Point::Zero(), sc.grid))
    throw DomainError("simulation: x_B must lie in the hexagon H(0)");
  std::vector<TrialSample> out(spec.trials);
  parallel_for(spec.trials, spec.threads, [&](std::size_t i) {
    CounterRng rng(spec.seed, i);
    switch (spec.level) {
      case SimLevel::macro:
        out[i] = macro_trial(rng, sc, spec);
        break;
      case SimLevel::femto:
        out[i] = femto_trial(rng, sc, x_b);
        break;
      case SimLevel::femto_avg: {
        CounterRng victim_rng = rng.split(kVictimStream);
        out[i] = femto_trial(rng, sc, sample_uniform_hexagon(victim_rng, sc.grid));
        break;
      }
    }
  });
  return out;
}

OutageEstimate outage_from_samples(const std::vector<TrialSample>& samples, Access access, double rho,
                                   double threshold, std::uint64_t seed) {
  std::size_t hits = 0;
  for (const auto& t : samples) hits += t.outage(access, rho, threshold) ? 1 : 0;
  OutageEstimate e;
  e.trials = samples.size();
  e.seed = seed;
  if (e.trials == 0) return e;
  e.p_hat = double(hits) / double(e.trials);
  e.ci95_halfwidth = 1.96 * std::sqrt(e.p_hat * (1.0 - e.p_hat) / double(e.trials));
  return e;
}

OutageEstimate estimate_outage(const NetworkConfig& cfg, const SimSpec& spec) {
  return outage_from_samples(sample_trials(cfg, spec), spec.access, cfg.rho, cfg.sir_threshold, spec.seed);
}

CrossingEstimate rho_crossing_from_samples(const std::vector<TrialSample>& samples, double threshold) {
  CrossingEstimate out;
  out.trials = samples.size();
  if (samples.empty()) {
    out.note = "no trials";
    return out;
  }
  auto diff = [&](double rho) { return paired_difference(samples, rho, threshold); };
  double lo = 1e-2, hi = 1e6;
  while (diff(lo).mean >= 0.0 && lo > 1e-8) lo /= 10.0;
  while (diff(hi).mean <= 0.0 && hi < 1e12) hi *= 10.0;
  const PairedDifference dlo = diff(lo), dhi = diff(hi);
  if (!(dlo.mean < 0.0) || !(dhi.mean > 0.0)) {
    out.lo = lo;
    out.hi = hi;
    out.note = "simulated outage difference does not change sign on the bracket";
    return out;
  }
  out.found = true;
  out.rho = bisect_log(lo, hi, [&](double r) { return diff(r).mean < 0.0; });
  auto upper_below_zero = [&](double r) {
    const auto d = diff(r);
    return d.mean + 1.96 * d.std_error < 0.0;
  };
  auto lower_below_zero = [&](double r) {
    const auto d = diff(r);
    return d.mean - 1.96 * d.std_error <= 0.0;
  };
  out.lo = upper_below_zero(lo) ? bisect_log(lo, out.rho, upper_below_zero) : lo;
  out.hi = lower_below_zero(hi) ? hi : bisect_log(out.rho, hi, lower_below_zero);
  if (!upper_below_zero(lo) || lower_below_zero(hi)) out.note = "interval reaches the bracket edge";
  return out;
}

CrossingEstimate estimate_rho_star_sim(const NetworkConfig& cfg, const SimSpec& spec) {
  CrossingEstimate out = rho_crossing_from_samples(sample_trials(cfg, spec), cfg.sir_threshold);
  out.seed = spec.seed;
  return out;
}

LaplaceEstimate estimate_laplace_direct(const NetworkConfig& cfg, double s, const SimSpec& spec) {
  if (!(s >= 0.0)) throw DomainError("estimate_laplace_direct: s must be >= 0");
  const auto samples = sample_trials(cfg, spec);
  const double scale = s * cfg.macro_power;
  double sum = 0.0, sum2 = 0.0;
  for (const auto& t : samples) {
    const double v = std::exp(-scale * t.interference(spec.access, cfg.rho));
    sum += v;
    sum2 += v * v;
  }
  const double n = double(samples.size());
  LaplaceEstimate e;
  e.trials = samples.size();
  e.mean = sum / n;
  e.std_error = n > 1 ? std::sqrt(std::max(0.0, sum2 / n - e.mean * e.mean) / (n - 1.0)) : 0.0;
  return e;
}

}  // namespace femto
