// Copyright 2026 The eeopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: solve | region | convergence | oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eeopt/io.hpp"
#include "eeopt/oracle.hpp"
#include "eeopt/region.hpp"
#include "eeopt/sca.hpp"

namespace eeopt::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kNotConverged = 2,
  kUsage = 64,
  kCannotCreate = 73,
};

/// Bad flags or configuration values.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  ScenarioConfig scenario;
  bool nt_given = false;
  std::vector<double> thetas;      ///< region sweep angles
  std::vector<double> p_dyn_dbms;  ///< region / convergence P_dyn values
  std::vector<double> exponents;   ///< region weight exponents
  Scheme scheme = Scheme::Rsma;
  std::vector<Scheme> schemes{Scheme::Rsma, Scheme::Sdma, Scheme::Noma};
  double u1 = 1.0;
  double u2 = 1.0;
  ScaOptions sca;
  unsigned threads = 1;
  std::string out;
  bool span = false;
  double bound = 0.02;       ///< oracle: relative-gap bound
  double tolerance = 1e-6;   ///< oracle --span: lower-bound slack
  std::optional<int> power_steps;
  std::optional<int> split_steps;
};

inline Scheme parse_scheme(const std::string& name) {
  if (name == "rsma") return Scheme::Rsma;
  if (name == "sdma") return Scheme::Sdma;
  if (name == "noma") return Scheme::Noma;
  throw UsageError("unknown scheme '" + name + "' (expected rsma, sdma or noma)");
}

inline std::vector<double> default_thetas() {
  return {kPi / 9.0, 2.0 * kPi / 9.0, kPi / 3.0, 4.0 * kPi / 9.0};
}

namespace cli_detail {

inline double json_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw UsageError("'" + key + "' must be a number");
  return v.get<double>();
}

inline std::vector<double> json_numbers(const json& v, const std::string& key,
                                        bool angles = false) {
  if (!v.is_array()) throw UsageError("'" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (angles && e.is_string()) out.push_back(parse_angle(e.get<std::string>()));
    else out.push_back(json_number(e, key));
  }
  return out;
}

inline int json_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw UsageError("'" + key + "' must be an integer");
  return v.get<int>();
}

/// Applies a flat JSON configuration on top of the flag values.
inline void apply_config(RunConfig& c, const json& j) {
  if (!j.is_object()) throw UsageError("configuration must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "theta") {
      apply_scenario_key(c.scenario, key, v);
      c.thetas = {c.scenario.theta};
    } else if (key == "p_dyn_dbm") {
      apply_scenario_key(c.scenario, key, v);
      c.p_dyn_dbms = {c.scenario.p_dyn_dbm};
    } else if (key == "nt") {
      apply_scenario_key(c.scenario, key, v);
      c.nt_given = true;
    } else if (apply_scenario_key(c.scenario, key, v)) {
    } else if (key == "thetas") {
      c.thetas = json_numbers(v, key, true);
    } else if (key == "p_dyn_dbms") {
      c.p_dyn_dbms = json_numbers(v, key);
    } else if (key == "exponents") {
      c.exponents = json_numbers(v, key);
    } else if (key == "scheme") {
      if (!v.is_string()) throw UsageError("'scheme' must be a string");
      c.scheme = parse_scheme(v.get<std::string>());
    } else if (key == "schemes") {
      if (!v.is_array()) throw UsageError("'schemes' must be an array");
      c.schemes.clear();
      for (const auto& e : v) {
        if (!e.is_string()) throw UsageError("'schemes' entries must be strings");
        c.schemes.push_back(parse_scheme(e.get<std::string>()));
      }
    } else if (key == "u1") {
      c.u1 = json_number(v, key);
    } else if (key == "u2") {
      c.u2 = json_number(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw UsageError("'seed' must be a nonnegative integer");
      c.sca.seed = v.get<std::uint64_t>();
    } else if (key == "epsilon") {
      c.sca.epsilon = json_number(v, key);
    } else if (key == "max_iter") {
      c.sca.max_iter = json_int(v, key);
    } else if (key == "starts") {
      c.sca.extra_starts = json_int(v, key);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(std::max(0, json_int(v, key)));
    } else if (key == "out") {
      if (!v.is_string()) throw UsageError("'out' must be a string");
      c.out = v.get<std::string>();
    } else if (key == "span") {
      if (!v.is_boolean()) throw UsageError("'span' must be a boolean");
      c.span = v.get<bool>();
    } else if (key == "bound") {
      c.bound = json_number(v, key);
    } else if (key == "tolerance") {
      c.tolerance = json_number(v, key);
    } else if (key == "power_steps") {
      c.power_steps = json_int(v, key);
    } else if (key == "split_steps") {
      c.split_steps = json_int(v, key);
    } else {
      throw UsageError("unknown configuration key '" + key + "'");
    }
  }
}

inline void validate(const RunConfig& c) {
  const auto& s = c.scenario;
  if (!(s.eta > 0.0 && s.eta <= 1.0)) throw UsageError("eta must be in (0,1]");
  if (!s.channels && s.nt < 1) throw UsageError("nt must be >= 1");
  if (!(s.gamma >= 0.0) || !std::isfinite(s.gamma)) throw UsageError("gamma must be >= 0");
  if (!(s.bandwidth_hz > 0.0)) throw UsageError("bandwidth must be > 0");
  for (double n : s.noise_power)
    if (!(n > 0.0)) throw UsageError("noise power must be > 0");
  if (!(c.u1 >= 0.0 && c.u2 >= 0.0) || c.u1 + c.u2 <= 0.0 || !std::isfinite(c.u1) ||
      !std::isfinite(c.u2))
    throw UsageError("weights must be nonnegative, finite and not both zero");
  if (!(c.sca.epsilon > 0.0)) throw UsageError("epsilon must be > 0");
  if (c.sca.max_iter < 1) throw UsageError("max-iter must be >= 1");
  if (c.sca.extra_starts < 0) throw UsageError("starts must be >= 0");
  if (c.schemes.empty()) throw UsageError("no schemes selected");
  if (!(c.bound >= 0.0)) throw UsageError("bound must be >= 0");
  if (!(c.tolerance >= 0.0)) throw UsageError("tolerance must be >= 0");
  for (double e : c.exponents)
    if (!std::isfinite(e)) throw UsageError("weight exponents must be finite");
}

/// Scenario for the given overrides; bad values are usage errors.
inline Scenario build(const RunConfig& c, std::optional<double> theta = {},
                      std::optional<double> p_dyn_dbm = {}) {
  ScenarioConfig sc = c.scenario;
  if (theta) sc.theta = *theta;
  if (p_dyn_dbm) sc.p_dyn_dbm = *p_dyn_dbm;
  try {
    return sc.build();
  } catch (const InvalidScenario& e) {
    throw UsageError(e.what());
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

/// Opens `path` for writing; throws CannotCreate on failure.
class CannotCreate : public Error {
 public:
  using Error::Error;
};

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CannotCreate("cannot create output file '" + path + "'");
  return f;
}

inline void finish_output(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw CannotCreate("failed writing '" + path + "'");
}

inline void ensure_unique(std::vector<Scheme>& v) {
  std::vector<Scheme> out;
  for (Scheme s : v)
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  v = std::move(out);
}

}  // namespace cli_detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline int cmd_solve(const RunConfig& c, std::ostream& out) {
  const Scenario s = cli_detail::build(c);
  const SolveResult r = solve_scheme(c.scheme, s, {c.u1, c.u2}, c.sca);
  const std::string text = to_json(r).dump(2);
  out << text << '\n';
  if (!c.out.empty()) {
    auto f = cli_detail::open_output(c.out);
    f << text << '\n';
    cli_detail::finish_output(f, c.out);
  }
  return r.converged ? kOk : kNotConverged;
}

inline int cmd_region(const RunConfig& c, std::ostream& out) {
  const std::string path = c.out.empty() ? "region.csv" : c.out;
  auto f = cli_detail::open_output(path);
  const auto thetas = c.thetas.empty() ? default_thetas() : c.thetas;
  const auto pdyns =
      c.p_dyn_dbms.empty() ? std::vector<double>{c.scenario.p_dyn_dbm} : c.p_dyn_dbms;
  const WeightSweep ws =
      c.exponents.empty() ? WeightSweep::standard() : WeightSweep{c.exponents};
  SweepOptions opt;
  opt.sca = c.sca;
  opt.threads = c.threads;

  CsvWriter w(f);
  f << kRegionHeader << '\n';
  std::size_t total = 0, converged = 0;
  const bool has_rsma =
      std::find(c.schemes.begin(), c.schemes.end(), Scheme::Rsma) != c.schemes.end();
  for (double pd : pdyns) {
    for (double th : thetas) {
      const Scenario s = cli_detail::build(c, th, pd);
      const auto bs = sweep_schemes(c.schemes, s, ws, opt);
      for (const auto& b : bs) {
        write_region_rows(w, b, c.scenario.gamma, th, pd);
        for (const auto& p : b.points) {
          ++total;
          converged += p.valid && p.converged;
        }
      }
      if (!has_rsma) continue;
      const RegionBoundary& rs = bs[std::find(c.schemes.begin(), c.schemes.end(),
                                              Scheme::Rsma) - c.schemes.begin()];
      for (std::size_t k = 0; k < bs.size(); ++k) {
        if (bs[k].scheme == Scheme::Rsma) continue;
        std::size_t below = 0;
        for (std::size_t i = 0; i < ws.size(); ++i) {
          const auto& a = rs.points[i];
          const auto& b = bs[k].points[i];
          if (a.valid && b.valid && a.ee < b.ee - 1e-6) ++below;
        }
        const auto rep = region_dominates(rs, bs[k], 1e-6);
        out << "p_dyn_dbm=" << format_double(pd) << " theta=" << format_double(th)
            << " rsma vs " << to_string(bs[k].scheme) << ": weighted-ee "
            << (below == 0 ? "ok" : "below at " + std::to_string(below) + " weights")
            << ", region " << (rep ? "dominates" : "violations=" +
                                                       std::to_string(rep.violations.size()))
            << '\n';
      }
    }
  }
  cli_detail::finish_output(f, path);
  const double frac = total ? static_cast<double>(converged) / total : 1.0;
  out << "rows=" << total << " converged=" << converged << " wrote " << path << '\n';
  return frac >= 0.9 ? kOk : kNotConverged;
}

inline int cmd_convergence(const RunConfig& c, std::ostream& out) {
  const std::string path = c.out.empty() ? "convergence.csv" : c.out;
  auto f = cli_detail::open_output(path);
  const auto pdyns = c.p_dyn_dbms.empty() ? std::vector<double>{20.0, 30.0, 40.0}
                                          : c.p_dyn_dbms;
  CsvWriter w(f);
  f << kConvergenceHeader << '\n';
  bool all = true;
  for (Scheme scheme : c.schemes) {
    for (double pd : pdyns) {
      const Scenario s = cli_detail::build(c, std::nullopt, pd);
      const SolveResult r = solve_scheme(scheme, s, {c.u1, c.u2}, c.sca);
      write_convergence_rows(w, r, pd);
      all = all && r.converged;
      out << to_string(scheme) << " p_dyn_dbm=" << format_double(pd)
          << " iterations=" << r.iterations << " ee=" << format_double(r.ee)
          << (r.converged ? "" : " (not converged)") << '\n';
    }
  }
  cli_detail::finish_output(f, path);
  return all ? kOk : kNotConverged;
}

inline int cmd_oracle(const RunConfig& c, std::ostream& out) {
  RunConfig cc = c;
  if (!cc.nt_given && !cc.scenario.channels) cc.scenario.nt = cc.span ? 4 : 1;
  const Scenario s = cli_detail::build(cc);
  if (!cc.span && s.nt() != 1)
    throw UsageError("oracle needs nt = 1 (use --span for nt >= 2)");
  GridSpec g = cc.span ? GridSpec::coarse() : GridSpec{};
  if (cc.power_steps) g.power_steps = *cc.power_steps;
  if (cc.split_steps) g.split_steps = *cc.split_steps;
  try {
    g.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const WeightVector u{cc.u1, cc.u2};
  const OracleResult o = cc.span ? grid_ee_span(cc.scheme, s, u, g)
                                 : grid_ee_nt1(cc.scheme, s, u, g);
  const SolveResult r = solve_scheme(cc.scheme, s, u, cc.sca);
  const double gap =
      o.best_ee > 0.0 ? std::abs(r.ee - o.best_ee) / o.best_ee : std::abs(r.ee);
  const bool pass =
      cc.span ? r.ee >= o.best_ee - cc.tolerance : gap <= cc.bound;
  json j{{"scheme", std::string(to_string(cc.scheme))},
         {"oracle_ee", o.best_ee},
         {"sca_ee", r.ee},
         {"rel_gap", gap},
         {"criterion", cc.span ? "lower_bound" : "rel_gap"},
         {"pass", pass},
         {"census", o.census}};
  out << j.dump(2) << '\n';
  if (!cc.out.empty()) {
    auto f = cli_detail::open_output(cc.out);
    json full{{"comparison", j}, {"oracle", to_json(o)}, {"sca", to_json(r)}};
    f << full.dump(2) << '\n';
    cli_detail::finish_output(f, cc.out);
  }
  return pass ? kOk : kRuntimeError;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parses argv and runs one command. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Energy-efficiency beamforming for RSMA, SDMA and NOMA"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  RunConfig c;
  std::string config_path, scheme = "rsma";
  std::vector<std::string> theta_text, scheme_list;
  std::vector<double> pdyn_list, noise;
  double pt_dbm = c.scenario.p_t_dbm, psta_dbm = c.scenario.p_sta_dbm;
  std::optional<int> nt;

  auto common = [&](CLI::App* sub, bool multi) {
    sub->add_option("--config", config_path, "JSON file; its keys override flags");
    sub->add_option("--seed", c.sca.seed, "Seed for the random starts");
    sub->add_option("--out", c.out, "Output file");
    sub->add_option("--epsilon", c.sca.epsilon, "SCA stopping tolerance [bit/J]");
    sub->add_option("--max-iter", c.sca.max_iter, "SCA iteration cap");
    sub->add_option("--starts", c.sca.extra_starts, "Random starts per solve");
    sub->add_option("--nt", nt, "Transmit antennas");
    sub->add_option("--gamma", c.scenario.gamma, "User-2 channel gain");
    auto* th = sub->add_option("--theta", theta_text,
                               "Channel angle: radians or e.g. 2pi/9");
    if (!multi) th->expected(1);
    sub->add_option("--pt-dbm", pt_dbm, "Transmit power budget [dBm]");
    auto* pd = sub->add_option("--pdyn-dbm", pdyn_list, "Dynamic power per chain [dBm]");
    if (!multi) pd->expected(1);
    sub->add_option("--psta-dbm", psta_dbm, "Static power [dBm]");
    sub->add_option("--eta", c.scenario.eta, "Power amplifier efficiency");
    sub->add_option("--bandwidth", c.scenario.bandwidth_hz, "Bandwidth [Hz]");
    sub->add_option("--noise", noise, "Noise power of user 1 and user 2 [W]")
        ->expected(2);
    sub->add_option("--u1", c.u1, "Weight of user 1");
    sub->add_option("--u2", c.u2, "Weight of user 2");
  };

  auto* solve = app.add_subcommand("solve", "Solve one scheme; prints JSON");
  common(solve, false);
  solve->add_option("--scheme", scheme, "rsma, sdma or noma");

  auto* region = app.add_subcommand("region", "EE-region sweep; writes CSV");
  common(region, true);
  region->add_option("--schemes", scheme_list, "Comma-separated schemes")
      ->delimiter(',');
  region->add_option("--exponents", c.exponents, "Exponents e of u2 = 10^e");
  region->add_option("--threads", c.threads, "Worker threads (0: all cores)");

  auto* conv = app.add_subcommand("convergence", "SCA traces; writes CSV");
  common(conv, true);
  conv->add_option("--schemes", scheme_list, "Comma-separated schemes")
      ->delimiter(',');

  auto* oracle = app.add_subcommand("oracle", "Compare SCA against a grid search");
  common(oracle, false);
  oracle->add_option("--scheme", scheme, "rsma, sdma or noma");
  oracle->add_flag("--span", c.span, "Span-restricted grid for nt >= 2");
  oracle->add_option("--bound", c.bound, "Relative-gap bound");
  oracle->add_option("--tolerance", c.tolerance, "Lower-bound slack with --span");
  oracle->add_option("--power-steps", c.power_steps, "Grid levels per stream power");
  oracle->add_option("--split-steps", c.split_steps, "Grid levels of the common split");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    for (auto* sub : {solve, region, conv, oracle})
      if (sub->parsed()) c.command = sub->get_name();
    c.scheme = parse_scheme(scheme);
    if (!scheme_list.empty()) {
      c.schemes.clear();
      for (const auto& n : scheme_list) c.schemes.push_back(parse_scheme(n));
    }
    if (nt) {
      c.scenario.nt = *nt;
      c.nt_given = true;
    }
    for (const auto& t : theta_text) c.thetas.push_back(parse_angle(t));
    if (!c.thetas.empty()) c.scenario.theta = c.thetas.front();
    c.p_dyn_dbms = pdyn_list;
    if (!pdyn_list.empty()) c.scenario.p_dyn_dbm = pdyn_list.front();
    c.scenario.p_t_dbm = pt_dbm;
    c.scenario.p_sta_dbm = psta_dbm;
    if (!noise.empty()) c.scenario.noise_power = {noise[0], noise[1]};
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw UsageError("cannot read configuration '" + config_path + "'");
      json j;
      try {
        j = json::parse(f);
      } catch (const json::exception& e) {
        throw UsageError(std::string("bad configuration: ") + e.what());
      }
      cli_detail::apply_config(c, j);
    }
    cli_detail::ensure_unique(c.schemes);
    cli_detail::validate(c);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (c.command == "solve") return cmd_solve(c, out);
    if (c.command == "region") return cmd_region(c, out);
    if (c.command == "convergence") return cmd_convergence(c, out);
    return cmd_oracle(c, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const cli_detail::CannotCreate& e) {
    err << "error: " << e.what() << '\n';
    return kCannotCreate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace eeopt::cli
