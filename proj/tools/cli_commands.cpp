#include "cli_commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "femto/bounds.hpp"
#include "femto/config_json.hpp"
#include "femto/errors.hpp"
#include "femto/validation.hpp"

namespace femto::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
  if (used != t.size()) throw UsageError("not a number: '" + text + "'");
  return v;
}

// Runs f(i) for i < n on up to hardware_concurrency threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mtx;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(mtx);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool wants(ModeSel m, Access a) {
  return m == ModeSel::both || (m == ModeSel::open) == (a == Access::open);
}

Level analytic_level(SimLevel l) { return l == SimLevel::macro ? Level::macro : Level::femto; }

json point_json(const Point& p) { return json::array({p.x(), p.y()}); }

json root_json(const RootResult& r) {
  return {{"status", to_string(r.status)}, {"rho", r.rho},           {"lo", r.lo},
          {"hi", r.hi},                    {"evaluations", r.evaluations}, {"note", r.note}};
}

json report_json(const MacroBoundsReport& r) {
  json j = {{"level", "macro"},
            {"V", {{"min", r.v.v_min}, {"max", r.v.v_max}}},
            {"C_u", r.c_u},
            {"conditions",
             {{"open_better", r.conditions.open_better},
              {"closed_better", r.conditions.closed_better},
              {"verdict", to_string(r.conditions.verdict)}}},
            {"rho_star", {{"min", r.rho_star.rho_min}, {"max", r.rho_star.rho_max}}}};
  j["rho_star"]["exact"] = r.exact ? root_json(*r.exact) : json(nullptr);
  return j;
}

json report_json(const FemtoBoundsReport& r) {
  json j = {{"level", "femto"},
            {"x_b", point_json(r.x_b)},
            {"V", {{"min", r.v.v_min}, {"max", r.v.v_max}}},
            {"C_u_prime", r.c_u_prime},
            {"R", {{"min", r.r.r_min}, {"max", r.r.r_max}, {"min_valid", r.r_min_valid}}},
            {"conditions",
             {{"k1", r.conditions.k1}, {"k2", r.conditions.k2}, {"verdict", to_string(r.conditions.verdict)}}},
            {"rho_star2",
             {{"min", r.rho_star2.rho_min.rho},
              {"min_found", r.rho_star2.rho_min.found},
              {"max", r.rho_star2.rho_max.rho},
              {"max_found", r.rho_star2.rho_max.found}}}};
  j["rho_star2"]["exact"] = r.exact ? root_json(*r.exact) : json(nullptr);
  return j;
}

NetworkConfig base_config(const RunManifest& m) {
  return m.config_path.empty() ? reference_config() : load_config(m.config_path);
}

}  // namespace

void RunManifest::validate() const {
  if (sweep) {
    if (sweep->values.empty()) throw UsageError("sweep '" + sweep->name + "' has no values");
    for (double v : sweep->values)
      if (!std::isfinite(v)) throw UsageError("sweep '" + sweep->name + "' has a non-finite value");
  }
  if (trials == 0) throw UsageError("--trials must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw UsageError("--scale must be positive");
}

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--sweep expects NAME=v1,v2,...");
  Sweep s;
  s.name = trim(text.substr(0, eq));
  const auto& known = sweep_parameters();
  if (std::find(known.begin(), known.end(), s.name) == known.end())
    throw UsageError("unknown sweep parameter '" + s.name + "'");
  std::stringstream ss(text.substr(eq + 1));
  for (std::string item; std::getline(ss, item, ',');) {
    if (trim(item).empty()) continue;
    s.values.push_back(parse_number(item));
  }
  return s;
}

Point parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--x-b expects \"x,y\"");
  return {parse_number(text.substr(0, comma)), parse_number(text.substr(comma + 1))};
}

ModeSel parse_mode(const std::string& text) {
  if (text == "open") return ModeSel::open;
  if (text == "closed") return ModeSel::closed;
  if (text == "both") return ModeSel::both;
  throw UsageError("--mode must be open, closed or both");
}

SimLevel parse_level(const std::string& text) {
  if (text == "macro") return SimLevel::macro;
  if (text == "femto") return SimLevel::femto;
  if (text == "femto-avg") return SimLevel::femto_avg;
  throw UsageError("--level must be macro, femto or femto-avg");
}

PowerModel parse_power_model(const std::string& text) {
  if (text == "fixed") return PowerModel::fixed;
  if (text == "random4") return PowerModel::random4;
  throw UsageError("--power-model must be fixed or random4");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t resolve_seed(const RunManifest& m) {
  if (m.seed) return *m.seed;
  std::random_device rd;
  return (std::uint64_t(rd()) << 32) ^ rd();
}

std::vector<SweepPoint> expand(const RunManifest& m) {
  const NetworkConfig base = base_config(m);
  std::vector<SweepPoint> out;
  if (!m.sweep) {
    out.push_back({"none", 0.0, base});
  } else {
    for (double v : m.sweep->values) {
      SweepPoint p{m.sweep->name, v, base};
      set_parameter(p.config, p.param, v);
      out.push_back(std::move(p));
    }
  }
  for (const auto& p : out) p.config.validate();
  return out;
}

int cmd_analyze(const RunManifest& m, std::ostream& out) {
  const auto points = expand(m);
  struct Row {
    std::optional<OutageValue> open, closed;
  };
  std::vector<Row> rows(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const NetworkConfig& cfg = points[i].config;
    auto eval = [&](Access a) {
      switch (m.level) {
        case SimLevel::macro: return macro_outage(cfg, a);
        case SimLevel::femto: return femto_outage(m.x_b, cfg, a);
        case SimLevel::femto_avg: return femto_outage_avg(cfg, a);
      }
      return OutageValue{};
    };
    if (wants(m.mode, Access::open)) rows[i].open = eval(Access::open);
    if (wants(m.mode, Access::closed)) rows[i].closed = eval(Access::closed);
  });
  out << "param,value,outage_open,outage_closed,quad_error\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Row& r = rows[i];
    double err = 0.0;
    out << points[i].param << ',' << format_double(points[i].value) << ',';
    if (r.open) {
      out << format_double(r.open->probability);
      err = std::max(err, r.open->quad_error);
    }
    out << ',';
    if (r.closed) {
      out << format_double(r.closed->probability);
      err = std::max(err, r.closed->quad_error);
    }
    out << ',' << format_double(err) << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const RunManifest& m, std::ostream& out, std::uint64_t seed) {
  const auto points = expand(m);
  out << "param,value,mode,p_hat,ci95,trials,seed\n";
  for (const auto& p : points) {
    SimSpec spec;
    spec.trials = m.trials;
    spec.seed = seed;
    spec.level = m.level;
    spec.x_b = m.x_b;
    spec.power_model = m.power_model;
    spec.threads = m.threads;
    const auto samples = sample_trials(p.config, spec);
    for (Access a : {Access::open, Access::closed}) {
      if (!wants(m.mode, a)) continue;
      const OutageEstimate e = outage_from_samples(samples, a, p.config.rho, p.config.sir_threshold, seed);
      out << p.param << ',' << format_double(p.value) << ',' << to_string(a) << ',' << format_double(e.p_hat) << ','
          << format_double(e.ci95_halfwidth) << ',' << e.trials << ',' << seed << '\n';
    }
  }
  return kExitOk;
}

int cmd_bounds(const RunManifest& m, std::ostream& out) {
  if (m.level == SimLevel::femto_avg) throw UsageError("bounds supports --level macro or femto");
  const auto points = expand(m);
  std::vector<json> reports(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const NetworkConfig& cfg = points[i].config;
    reports[i] = m.level == SimLevel::macro ? report_json(macro_bounds_report(cfg, m.exact))
                                            : report_json(femto_bounds_report(m.x_b, cfg, m.exact));
  });
  json doc = json::array();
  for (std::size_t i = 0; i < points.size(); ++i)
    doc.push_back({{"param", points[i].param},
                   {"value", points[i].value},
                   {"config", config_to_json(points[i].config)},
                   {"report", reports[i]}});
  out << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_validate(const RunManifest& m, std::ostream& out, std::uint64_t seed) {
  const NetworkConfig cfg = base_config(m);
  cfg.validate();
  out << "seed " << seed << ", scale " << m.scale << '\n';
  bool all = true;
  const CriterionResult c = check_config(cfg, m.trials, seed, m.threads);
  out << format_result(c) << std::endl;
  all = all && c.passed;
  ValidationOptions opt;
  opt.scale = m.scale;
  opt.seed = seed;
  opt.threads = m.threads;
  opt.only = m.criteria;
  opt.familywise = m.scale < 1.0;
  for (int id : opt.only)
    if (id < 1 || id > kCriterionCount) throw UsageError("no criterion " + std::to_string(id));
  run_acceptance(opt, [&](const CriterionResult& r) {
    out << format_result(r) << std::endl;
    all = all && r.passed;
  });
  out << (all ? "all criteria passed" : "some criteria failed") << '\n';
  return all ? kExitOk : kExitNumeric;
}

int run(const RunManifest& m, std::ostream& err) {
  try {
    m.validate();
    std::ofstream file;
    if (!m.out_path.empty()) {
      file.open(m.out_path, std::ios::out | std::ios::trunc);
      if (!file) throw UsageError("cannot write " + m.out_path);
    }
    std::ostream& out = m.out_path.empty() ? std::cout : file;
    if (m.subcommand == "analyze") return cmd_analyze(m, out);
    if (m.subcommand == "bounds") return cmd_bounds(m, out);
    const std::uint64_t seed = resolve_seed(m);
    if (!m.seed) err << "seed: " << seed << '\n';
    if (m.subcommand == "simulate") return cmd_simulate(m, out, seed);
    if (m.subcommand == "validate") return cmd_validate(m, out, seed);
    throw UsageError("unknown subcommand '" + m.subcommand + "'");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace femto::cli
