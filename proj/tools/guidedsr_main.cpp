// Copyright 2026 The guidedsr Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: closed-form analytics, master-equation evolution,
// channeling-fraction sweeps, cooperativity length, and figure-data presets.
//
// Exit codes: 0 success, 2 usage/config error, 3 solver/numerical error,
// 4 file I/O error. All result output (CSV files, JSON on stdout) is
// deterministic; wall-clock timing and advisories go to stderr only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "guidedsr/guidedsr.hpp"

namespace {

using nlohmann::ordered_json;
using namespace guidedsr;

constexpr double kPi = std::numbers::pi;

#ifndef GUIDEDSR_DEFAULT_RATE_TABLE
#define GUIDEDSR_DEFAULT_RATE_TABLE ""
#endif

// ---------------------------------------------------------------------------
// Shared flag groups

struct RateFlags {
  double gamma_guided = std::numeric_limits<double>::quiet_NaN();
  double gamma_rad = std::numeric_limits<double>::quiet_NaN();
  std::string rate_table;
  double distance_nm = std::numeric_limits<double>::quiet_NaN();
};

void add_rate_flags(CLI::App* cmd, RateFlags& f) {
  cmd->add_option("--gamma-guided", f.gamma_guided,
                  "single-atom guided decay rate, gamma0 units");
  cmd->add_option("--gamma-rad", f.gamma_rad,
                  "single-atom radiative decay rate, gamma0 units");
  cmd->add_option("--rate-table", f.rate_table,
                  "CSV rate table (distance_nm,gamma_guided,gamma_rad)");
  cmd->add_option("--distance-nm", f.distance_nm,
                  "atom-surface distance for the rate-table lookup, nm");
}

// Direct rates win over the table, with a warning when both are given.
DecayRates resolve_rates(const RateFlags& f) {
  const bool has_direct =
      !std::isnan(f.gamma_guided) || !std::isnan(f.gamma_rad);
  const bool has_table = !f.rate_table.empty();
  if (has_direct) {
    if (std::isnan(f.gamma_guided) || std::isnan(f.gamma_rad)) {
      fail(Errc::invalid_config,
           "--gamma-guided and --gamma-rad must be given together");
    }
    if (has_table) {
      std::cerr << "warning: both direct rates and a rate table were given; "
                   "using the direct values\n";
    }
    return f.gamma_rad > 0.0 ? make_rates(f.gamma_guided, f.gamma_rad)
                             : make_rates_without_eta(f.gamma_guided, f.gamma_rad);
  }
  if (has_table) {
    if (std::isnan(f.distance_nm)) {
      fail(Errc::invalid_config,
           "--rate-table needs --distance-nm to pick a row");
    }
    return RateTable::from_csv(f.rate_table).lookup(f.distance_nm);
  }
  fail(Errc::invalid_config,
       "no rates given; use --gamma-guided/--gamma-rad or "
       "--rate-table with --distance-nm");
}

struct GeometryFlags {
  double fiber_radius_nm = std::numeric_limits<double>::quiet_NaN();
  double core_index = std::numeric_limits<double>::quiet_NaN();
  double clad_index = std::numeric_limits<double>::quiet_NaN();
  double wavelength_nm = std::numeric_limits<double>::quiet_NaN();
  double atom_surface_nm = std::numeric_limits<double>::quiet_NaN();
  std::string spacing_multiples;

  bool any() const {
    return !std::isnan(fiber_radius_nm) || !std::isnan(core_index) ||
           !std::isnan(clad_index) || !std::isnan(wavelength_nm) ||
           !std::isnan(atom_surface_nm) || !spacing_multiples.empty();
  }
};

void add_geometry_flags(CLI::App* cmd, GeometryFlags& g) {
  cmd->add_option("--fiber-radius-nm", g.fiber_radius_nm,
                  "fiber core radius, nm (metadata, echoed)");
  cmd->add_option("--core-index", g.core_index, "core refractive index");
  cmd->add_option("--clad-index", g.clad_index, "clad refractive index");
  cmd->add_option("--wavelength-nm", g.wavelength_nm,
                  "transition wavelength, nm");
  cmd->add_option("--atom-surface-nm", g.atom_surface_nm,
                  "atom-surface distance, nm (metadata)");
  cmd->add_option("--spacing-multiples", g.spacing_multiples,
                  "comma-separated integer spacing multiples, e.g. 1,1,2");
}

std::vector<int> parse_multiples(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      fail(Errc::invalid_config,
           "--spacing-multiples expects comma-separated integers, got '" +
               text + "'");
    }
  }
  return out;
}

GeometryMetadata build_geometry(const GeometryFlags& g) {
  if (std::isnan(g.fiber_radius_nm) || std::isnan(g.core_index) ||
      std::isnan(g.clad_index) || std::isnan(g.wavelength_nm) ||
      std::isnan(g.atom_surface_nm)) {
    fail(Errc::invalid_config,
         "geometry metadata needs --fiber-radius-nm, --core-index, "
         "--clad-index, --wavelength-nm, and --atom-surface-nm together");
  }
  GeometryMetadata geo;
  geo.fiber_radius_nm = g.fiber_radius_nm;
  geo.core_index = g.core_index;
  geo.clad_index = g.clad_index;
  geo.wavelength_nm = g.wavelength_nm;
  geo.atom_surface_distance_nm = g.atom_surface_nm;
  geo.spacing_multiples = parse_multiples(g.spacing_multiples);
  geo.validate();
  return geo;
}

ordered_json geometry_json(const GeometryMetadata& geo) {
  ordered_json j;
  j["fiber_radius_nm"] = geo.fiber_radius_nm;
  j["core_index"] = geo.core_index;
  j["clad_index"] = geo.clad_index;
  j["wavelength_nm"] = geo.wavelength_nm;
  j["atom_surface_distance_nm"] = geo.atom_surface_distance_nm;
  j["spacing_multiples"] = geo.spacing_multiples;
  return j;
}

void echo_geometry_config(ordered_json& cfg, const GeometryFlags& g) {
  if (!g.any()) return;
  cfg["fiber-radius-nm"] = g.fiber_radius_nm;
  cfg["core-index"] = g.core_index;
  cfg["clad-index"] = g.clad_index;
  cfg["wavelength-nm"] = g.wavelength_nm;
  cfg["atom-surface-nm"] = g.atom_surface_nm;
  if (!g.spacing_multiples.empty())
    cfg["spacing-multiples"] = g.spacing_multiples;
}

std::string trim_ws(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Flat key=value run-config support. CLI11 applies set_config files only at
// the root app, never inside subcommands, so each subcommand's --config is
// expanded into ordinary flags here. Config flags are inserted before the
// explicit command-line flags; with take-last option policy the explicit
// flags win.
std::vector<std::string> expand_config_args(const CLI::App& app,
                                            const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::string config_path;
  std::vector<std::string> rest;
  rest.push_back(args[0]);
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        fail(Errc::invalid_config, "--config needs a file path");
      }
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;

  const CLI::App* sub = app.get_subcommand_no_throw(args[0]);
  if (sub == nullptr) {
    return rest;  // bogus subcommand: let the regular parser report it
  }

  std::ifstream in(config_path);
  if (!in) {
    fail(Errc::io_failure, "cannot open config file: " + config_path);
  }
  std::vector<std::string> expanded;
  expanded.push_back(args[0]);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim_ws(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      fail(Errc::invalid_config, "config line " + std::to_string(lineno) +
                                     " must be key=value, got '" + t + "'");
    }
    const std::string key = trim_ws(t.substr(0, eq));
    const std::string value = trim_ws(t.substr(eq + 1));
    if (key == "config") {
      fail(Errc::invalid_config, "config files cannot nest (--config inside a config)");
    }
    if (sub->get_option_no_throw("--" + key) == nullptr) {
      fail(Errc::invalid_config, "unknown config key '" + key +
                                     "' for subcommand '" + args[0] + "'");
    }
    expanded.push_back("--" + key);
    expanded.push_back(value);
  }
  expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
  return expanded;
}

ordered_json rates_json(const DecayRates& rates) {
  ordered_json j;
  j["gamma_guided_gamma0"] = rates.gamma_guided();
  j["gamma_rad_gamma0"] = rates.gamma_rad();
  j["gamma_total_gamma0"] = rates.gamma_total();
  if (rates.has_eta()) {
    j["eta"] = rates.eta();
  } else {
    j["eta"] = nullptr;
  }
  return j;
}

// Prints the summary JSON to stdout and optionally writes it to a file.
void emit_summary(const ordered_json& summary, const std::string& path) {
  const std::string text = summary.dump(2) + "\n";
  std::fwrite(text.data(), 1, text.size(), stdout);
  if (!path.empty()) {
    std::ofstream out(path);
    if (!out || !(out << text)) {
      fail(Errc::io_failure, "cannot write summary: " + path);
    }
  }
}

// The mean-field derivation assumes n >> n - p0 >> 1; the formulas are still
// evaluated when it fails, but the caller earns a note on stderr.
void meanfield_validity_note(int n, double p0) {
  const double left_out = static_cast<double>(n) - p0;
  if (!(left_out >= 1.0) || !(static_cast<double>(n) >= 10.0 * left_out)) {
    std::cerr << "note: mean-field validity condition n >> n - p0 >> 1 is "
                 "not met (n = "
              << n << ", p0 = " << format_full(p0)
              << "); treat the closed-form results as qualitative\n";
  }
}

double theta_to_p0(int n, double theta) {
  const double c = std::cos(theta / 2.0);
  return static_cast<double>(n) * c * c;
}

// Closed-form trajectory for `analytic --timeseries`.
Trajectory analytic_timeseries_symmetric(int n, const DecayRates& rates,
                                         const IntegratorConfig& config) {
  Trajectory traj;
  traj.n_atoms = n;
  for (double t : config.sample_grid()) {
    const SymmetricSample s = symmetric_solution(n, rates, t);
    traj.times.push_back(t);
    traj.population.push_back(s.population);
    traj.jpjm.push_back(static_cast<double>(n) * s.population);
    traj.i_guided.push_back(s.i_guided);
    traj.i_rad.push_back(s.i_rad);
    traj.i_total.push_back(s.i_guided + s.i_rad);
  }
  finalize_energies(traj);
  return traj;
}

Trajectory analytic_timeseries_meanfield(const MeanFieldParams& params,
                                         const IntegratorConfig& config) {
  Trajectory traj;
  traj.n_atoms = params.n;
  for (double t : config.sample_grid()) {
    const double pop = meanfield_population(params, t);
    const double ig = meanfield_intensity(params, t);
    const double ir = params.rates.gamma_rad() * pop;
    traj.times.push_back(t);
    traj.population.push_back(pop);
    traj.jpjm.push_back(meanfield_jpjm(params, t));
    traj.i_guided.push_back(ig);
    traj.i_rad.push_back(ir);
    traj.i_total.push_back(ig + ir);
  }
  finalize_energies(traj);
  return traj;
}

// Drops rows to every k-th sample (plus the final row) for figure-ready
// output; k = 1 keeps everything.
Trajectory downsample(const Trajectory& traj, int every) {
  if (every <= 1) return traj;
  Trajectory out;
  out.n_atoms = traj.n_atoms;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (k % static_cast<std::size_t>(every) != 0 && k != traj.size() - 1)
      continue;
    out.times.push_back(traj.times[k]);
    out.population.push_back(traj.population[k]);
    out.jpjm.push_back(traj.jpjm[k]);
    out.i_guided.push_back(traj.i_guided[k]);
    out.i_rad.push_back(traj.i_rad[k]);
    out.i_total.push_back(traj.i_total[k]);
  }
  out.u_guided = traj.u_guided;
  out.u_rad = traj.u_rad;
  out.truncation_bound = traj.truncation_bound;
  return out;
}

// ---------------------------------------------------------------------------
// analytic

struct AnalyticOptions {
  std::string mode;
  int n = 0;
  RateFlags rates;
  double theta = std::numeric_limits<double>::quiet_NaN();
  double phi = 0.0;
  double p0 = std::numeric_limits<double>::quiet_NaN();
  double t_final = std::numeric_limits<double>::quiet_NaN();
  int samples = 801;
  std::string timeseries;
  std::string summary;
  GeometryFlags geometry;
};

int run_analytic(const AnalyticOptions& opt) {
  const DecayRates rates = resolve_rates(opt.rates);
  const double big_gamma = collective_rate(opt.n, rates);

  ordered_json out;
  out["command"] = "analytic";
  ordered_json cfg;
  cfg["mode"] = opt.mode;
  cfg["n"] = opt.n;
  cfg["gamma-guided"] = rates.gamma_guided();
  cfg["gamma-rad"] = rates.gamma_rad();

  double p0 = 0.0;
  std::optional<MeanFieldParams> params;
  if (opt.mode == "meanfield") {
    const bool has_theta = !std::isnan(opt.theta);
    const bool has_p0 = !std::isnan(opt.p0);
    if (has_theta == has_p0) {
      fail(Errc::invalid_config,
           "meanfield mode needs exactly one of --theta or --p0");
    }
    p0 = has_p0 ? opt.p0 : theta_to_p0(opt.n, opt.theta);
    params = meanfield_params(opt.n, rates, p0);
    cfg["p0"] = p0;
    meanfield_validity_note(opt.n, p0);
  } else if (!std::isnan(opt.theta) || !std::isnan(opt.p0)) {
    fail(Errc::invalid_config,
         "--theta and --p0 apply to --mode meanfield only");
  }

  IntegratorConfig grid;
  grid.t_final = std::isnan(opt.t_final) ? 8.0 / big_gamma : opt.t_final;
  grid.sample_count = opt.samples;
  if (!opt.timeseries.empty()) {
    cfg["t-final"] = grid.t_final;
    cfg["samples"] = grid.sample_count;
    cfg["timeseries"] = opt.timeseries;
  }
  if (!opt.summary.empty()) cfg["summary"] = opt.summary;
  echo_geometry_config(cfg, opt.geometry);
  out["config"] = cfg;

  out["rates"] = rates_json(rates);
  out["Gamma_gamma0"] = big_gamma;

  if (opt.mode == "symmetric") {
    out["f_guided_analytic"] = symmetric_fraction(opt.n, rates);
  } else {
    out["p0"] = p0;
    out["kappa"] = params->kappa;
    out["t_a_tau0"] = params->t_a;
    if (opt.n >= 2) {
      out["t_p_tau0"] = peak_time_tp(opt.n, rates);
    } else {
      out["t_p_tau0"] = nullptr;
    }
    const std::optional<GuidedPeak> peak = meanfield_peak(opt.n, rates, p0);
    if (peak.has_value()) {
      ordered_json pj;
      pj["t_max_tau0"] = peak->t_max;
      pj["i_max_I0"] = peak->i_max;
      out["peak"] = pj;
    } else {
      out["peak"] = "monotonic_decrease";
    }
    out["f_guided_analytic"] = meanfield_fraction(opt.n, rates, p0);
  }

  if (opt.geometry.any()) out["geometry"] = geometry_json(build_geometry(opt.geometry));

  if (!opt.timeseries.empty()) {
    grid.validate();
    const Trajectory traj =
        opt.mode == "symmetric"
            ? analytic_timeseries_symmetric(opt.n, rates, grid)
            : analytic_timeseries_meanfield(*params, grid);
    write_trajectory_csv(opt.timeseries, traj);
    ordered_json files;
    files["timeseries_csv"] = opt.timeseries;
    out["outputs"] = files;
  }

  emit_summary(out, opt.summary);
  return 0;
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveOptions {
  std::string solver;
  int n = 0;
  std::string init;
  double theta = std::numeric_limits<double>::quiet_NaN();
  double phi = 0.0;
  RateFlags rates;
  double t_final = std::numeric_limits<double>::quiet_NaN();
  int samples = 801;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  int cap = kDefaultExactAtomCap;
  int every = 1;
  std::string out = "trajectory.csv";
  std::string summary;
  GeometryFlags geometry;
};

InitialStateSpec build_init(const std::string& init, double theta, double phi) {
  if (init == "symmetric") {
    if (!std::isnan(theta)) {
      fail(Errc::invalid_config, "--theta applies to --init product only");
    }
    return InitialStateSpec::symmetric();
  }
  if (init == "product") {
    if (std::isnan(theta)) {
      fail(Errc::invalid_config, "--init product needs --theta");
    }
    return InitialStateSpec::product(theta, phi);
  }
  fail(Errc::invalid_config, "--init must be symmetric or product, got " + init);
}

int run_evolve(const EvolveOptions& opt) {
  const DecayRates rates = resolve_rates(opt.rates);
  const InitialStateSpec spec = build_init(opt.init, opt.theta, opt.phi);
  const double big_gamma = collective_rate(opt.n, rates);

  IntegratorConfig config;
  config.rel_tol = opt.rel_tol;
  config.abs_tol = opt.abs_tol;
  config.t_final = std::isnan(opt.t_final) ? default_t_final(opt.n, rates) : opt.t_final;
  config.sample_count = opt.samples;
  config.validate();

  if (opt.solver == "exact" && opt.cap != kDefaultExactAtomCap) {
    std::cerr << "note: exact-solver cap raised to " << opt.cap
              << "; n = " << opt.n << " needs " << exact_memory_estimate(opt.n)
              << "\n";
  }

  const auto t0 = std::chrono::steady_clock::now();
  Trajectory traj;
  if (opt.solver == "exact") {
    const CouplingMatrix cm = ideal_string_matrix(opt.n, rates);
    traj = evolve_exact(cm, spec, config, opt.cap);
  } else if (opt.solver == "dicke") {
    traj = evolve_dicke(rates, spec, opt.n, config);
  } else {
    fail(Errc::invalid_config,
         "--solver must be exact or dicke, got " + opt.solver);
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - t0;
  std::cerr << "evolve: " << opt.solver << " solver finished in "
            << elapsed.count() << " s\n";

  write_trajectory_csv(opt.out, downsample(traj, opt.every));

  ordered_json out;
  out["command"] = "evolve";
  ordered_json cfg;
  cfg["solver"] = opt.solver;
  cfg["n"] = opt.n;
  cfg["init"] = opt.init;
  if (opt.init == "product") {
    cfg["theta"] = opt.theta;
    cfg["phi"] = opt.phi;
  }
  cfg["gamma-guided"] = rates.gamma_guided();
  cfg["gamma-rad"] = rates.gamma_rad();
  cfg["t-final"] = config.t_final;
  cfg["samples"] = config.sample_count;
  cfg["rel-tol"] = config.rel_tol;
  cfg["abs-tol"] = config.abs_tol;
  if (opt.solver == "exact") cfg["cap"] = opt.cap;
  if (opt.every != 1) cfg["every"] = opt.every;
  cfg["out"] = opt.out;
  if (!opt.summary.empty()) cfg["summary"] = opt.summary;
  echo_geometry_config(cfg, opt.geometry);
  out["config"] = cfg;

  out["rates"] = rates_json(rates);
  out["Gamma_gamma0"] = big_gamma;
  out["solver"] = opt.solver;
  out["rel_tol"] = config.rel_tol;
  out["abs_tol"] = config.abs_tol;
  out["t_final_tau0"] = config.t_final;
  out["sample_count"] = config.sample_count;
  if (opt.init == "symmetric") {
    out["f_guided_analytic"] = symmetric_fraction(opt.n, rates);
  }
  out["f_guided_numeric"] = trajectory_energies(traj).f_guided;
  out["u_guided_hbar_omega0"] = traj.u_guided;
  out["u_rad_hbar_omega0"] = traj.u_rad;
  out["truncation_bound_hbar_omega0"] = traj.truncation_bound;
  if (opt.geometry.any()) out["geometry"] = geometry_json(build_geometry(opt.geometry));
  ordered_json files;
  files["trajectory_csv"] = opt.out;
  out["outputs"] = files;

  emit_summary(out, opt.summary);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::string mode;
  int n_min = 1;
  int n_max = 0;
  double theta = 0.0;
  RateFlags rates;
  std::string out = "sweep.csv";
};

int run_sweep(const SweepOptions& opt) {
  const DecayRates rates = resolve_rates(opt.rates);
  if (opt.n_min < 1 || opt.n_max < opt.n_min) {
    fail(Errc::invalid_range,
         "sweep needs 1 <= n-min <= n-max, got " + std::to_string(opt.n_min) +
             ".." + std::to_string(opt.n_max));
  }
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(opt.n_max - opt.n_min + 1));
  for (int n = opt.n_min; n <= opt.n_max; ++n) {
    SweepRow row;
    row.n = n;
    if (opt.mode == "symmetric") {
      row.f_guided = symmetric_fraction(n, rates);
    } else if (opt.mode == "meanfield") {
      row.f_guided = meanfield_fraction(n, rates, theta_to_p0(n, opt.theta));
    } else {
      fail(Errc::invalid_config,
           "--mode must be symmetric or meanfield, got " + opt.mode);
    }
    rows.push_back(row);
  }
  write_sweep_csv(opt.out, rows);
  std::cerr << "sweep: wrote " << rows.size() << " rows to " << opt.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// length

struct LengthOptions {
  int n = 0;
  RateFlags rates;
  double linewidth_mhz = std::numeric_limits<double>::quiet_NaN();
  std::string summary;
};

int run_length(const LengthOptions& opt) {
  const DecayRates rates = resolve_rates(opt.rates);
  const double length_m = cooperativity_length_m(opt.n, rates, opt.linewidth_mhz);

  ordered_json out;
  out["command"] = "length";
  ordered_json cfg;
  cfg["n"] = opt.n;
  cfg["gamma-guided"] = rates.gamma_guided();
  cfg["gamma-rad"] = rates.gamma_rad();
  cfg["linewidth-mhz"] = opt.linewidth_mhz;
  if (!opt.summary.empty()) cfg["summary"] = opt.summary;
  out["config"] = cfg;
  out["rates"] = rates_json(rates);
  out["Gamma_gamma0"] = collective_rate(opt.n, rates);
  out["L0_m"] = length_m;
  out["validity"] =
      "collective decay theory assumes sample length L much smaller than L0_m";
  emit_summary(out, opt.summary);
  return 0;
}

// ---------------------------------------------------------------------------
// figure

struct FigureOptions {
  std::string preset;
  double distance_nm = 100.0;
  std::string rate_table = GUIDEDSR_DEFAULT_RATE_TABLE;
  std::string out;
  double t_final = std::numeric_limits<double>::quiet_NaN();
  int samples = 801;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  int every = 1;
  std::string summary;
};

GeometryMetadata preset_geometry(double distance_nm) {
  GeometryMetadata geo;
  geo.fiber_radius_nm = 200.0;
  geo.core_index = 1.45;
  geo.clad_index = 1.0;
  geo.wavelength_nm = 852.0;
  geo.atom_surface_distance_nm = distance_nm;
  geo.validate();
  return geo;
}

int run_figure(const FigureOptions& opt) {
  if (opt.rate_table.empty()) {
    fail(Errc::invalid_config, "no rate table available; pass --rate-table");
  }
  DecayRates rates = make_rates_without_eta(0.0, 1.0);
  try {
    rates = RateTable::from_csv(opt.rate_table).lookup(opt.distance_nm);
  } catch (const Error& e) {
    if (e.code() == Errc::rate_table_range) {
      fail(Errc::rate_table_range,
           std::string("the rate table has no entry at distance ") +
               format_full(opt.distance_nm) +
               " nm, and the rate-vs-distance curves cannot be reconstructed "
               "from first principles here; presets run only where tabulated "
               "rates exist (" + std::string(e.what()) + ")");
    }
    throw;
  }

  const std::string out_path =
      opt.out.empty() ? opt.preset + ".csv" : opt.out;

  ordered_json summary;
  summary["command"] = "figure";
  ordered_json cfg;
  cfg["preset"] = opt.preset;
  cfg["distance-nm"] = opt.distance_nm;
  cfg["rate-table"] = opt.rate_table;
  cfg["out"] = out_path;

  summary["rates"] = rates_json(rates);
  summary["geometry"] = geometry_json(preset_geometry(opt.distance_nm));

  if (opt.preset == "fig3" || opt.preset == "fig5a" || opt.preset == "fig5b") {
    std::vector<SweepRow> rows;
    for (int n = 1; n <= 100; ++n) {
      SweepRow row;
      row.n = n;
      if (opt.preset == "fig3") {
        row.f_guided = symmetric_fraction(n, rates);
      } else {
        const double theta = opt.preset == "fig5a" ? 0.0 : kPi / 2;
        row.f_guided = meanfield_fraction(n, rates, theta_to_p0(n, theta));
      }
      rows.push_back(row);
    }
    write_sweep_csv(out_path, rows);
  } else if (opt.preset == "fig4a" || opt.preset == "fig4b") {
    const int n = 10;
    const double theta = opt.preset == "fig4a" ? 0.0 : kPi / 2;
    IntegratorConfig config;
    config.rel_tol = opt.rel_tol;
    config.abs_tol = opt.abs_tol;
    config.t_final =
        std::isnan(opt.t_final) ? default_t_final(n, rates) : opt.t_final;
    config.sample_count = opt.samples;
    config.validate();
    cfg["t-final"] = config.t_final;
    cfg["samples"] = config.sample_count;
    cfg["rel-tol"] = config.rel_tol;
    cfg["abs-tol"] = config.abs_tol;
    if (opt.every != 1) cfg["every"] = opt.every;
    const CouplingMatrix cm = ideal_string_matrix(n, rates);
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj =
        evolve_exact(cm, InitialStateSpec::product(theta), config);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - t0;
    std::cerr << "figure: exact n = 10 run finished in " << elapsed.count()
              << " s\n";
    write_trajectory_csv(out_path, downsample(traj, opt.every));
    summary["n"] = n;
    summary["theta"] = theta;
    summary["f_guided_numeric"] = trajectory_energies(traj).f_guided;
    summary["u_guided_hbar_omega0"] = traj.u_guided;
    summary["u_rad_hbar_omega0"] = traj.u_rad;
    summary["truncation_bound_hbar_omega0"] = traj.truncation_bound;
  } else {
    fail(Errc::invalid_config,
         "--preset must be one of fig3, fig4a, fig4b, fig5a, fig5b; got " +
             opt.preset);
  }

  if (!opt.summary.empty()) cfg["summary"] = opt.summary;
  summary["config"] = cfg;
  ordered_json files;
  files["data_csv"] = out_path;
  summary["outputs"] = files;
  emit_summary(summary, opt.summary);
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{
      "guidedsr: cooperative emission of a two-level atom string coupled to "
      "a nanofiber (rates in gamma0, times in tau0 = 1/gamma0, intensities "
      "in I0 = hbar omega0 gamma0)"};
  app.require_subcommand(1);

  AnalyticOptions analytic;
  CLI::App* cmd_analytic = app.add_subcommand(
      "analytic", "closed-form observables and optional timeseries");
  cmd_analytic->add_option("--mode", analytic.mode, "symmetric or meanfield")
      ->required();
  cmd_analytic->add_option("--n", analytic.n, "atom count")->required();
  add_rate_flags(cmd_analytic, analytic.rates);
  cmd_analytic->add_option("--theta", analytic.theta,
                           "product-state polar angle, radians (meanfield)");
  cmd_analytic->add_option("--phi", analytic.phi,
                           "product-state azimuth, radians");
  cmd_analytic->add_option("--p0", analytic.p0,
                           "initial population, atoms (meanfield)");
  cmd_analytic->add_option("--t-final", analytic.t_final,
                           "timeseries horizon, tau0 (default 8/Gamma)");
  cmd_analytic->add_option("--samples", analytic.samples,
                           "timeseries sample count");
  cmd_analytic->add_option("--timeseries", analytic.timeseries,
                           "write the closed-form trajectory CSV here");
  cmd_analytic->add_option("--summary", analytic.summary,
                           "also write the JSON summary to this file");
  add_geometry_flags(cmd_analytic, analytic.geometry);

  EvolveOptions evolve;
  CLI::App* cmd_evolve =
      app.add_subcommand("evolve", "integrate the master equation");
  cmd_evolve->add_option("--solver", evolve.solver, "exact or dicke")
      ->required();
  cmd_evolve->add_option("--n", evolve.n, "atom count")->required();
  cmd_evolve->add_option("--init", evolve.init, "symmetric or product")
      ->required();
  cmd_evolve->add_option("--theta", evolve.theta,
                         "product-state polar angle, radians");
  cmd_evolve->add_option("--phi", evolve.phi,
                         "product-state azimuth, radians");
  add_rate_flags(cmd_evolve, evolve.rates);
  cmd_evolve->add_option("--t-final", evolve.t_final,
                         "integration horizon, tau0 (default 8/Gamma)");
  cmd_evolve->add_option("--samples", evolve.samples, "output sample count");
  cmd_evolve->add_option("--rel-tol", evolve.rel_tol,
                         "integrator relative tolerance");
  cmd_evolve->add_option("--abs-tol", evolve.abs_tol,
                         "integrator absolute tolerance");
  cmd_evolve->add_option("--cap", evolve.cap,
                         "exact-solver atom cap (memory guard)");
  cmd_evolve->add_option("--every", evolve.every,
                         "keep every k-th CSV row (figure-ready downsampling)");
  cmd_evolve->add_option("--out", evolve.out, "trajectory CSV path");
  cmd_evolve->add_option("--summary", evolve.summary,
                         "also write the JSON summary to this file");
  add_geometry_flags(cmd_evolve, evolve.geometry);

  SweepOptions sweep;
  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "channeling fraction vs atom number (CSV n,f_guided)");
  cmd_sweep->add_option("--mode", sweep.mode, "symmetric or meanfield")
      ->required();
  cmd_sweep->add_option("--n-min", sweep.n_min, "first atom count");
  cmd_sweep->add_option("--n-max", sweep.n_max, "last atom count")->required();
  cmd_sweep->add_option("--theta", sweep.theta,
                        "product-state polar angle for meanfield, radians");
  add_rate_flags(cmd_sweep, sweep.rates);
  cmd_sweep->add_option("--out", sweep.out, "output CSV path");

  LengthOptions length;
  CLI::App* cmd_length = app.add_subcommand(
      "length", "cooperativity length L0 = c/Gamma in meters");
  cmd_length->add_option("--n", length.n, "atom count")->required();
  add_rate_flags(cmd_length, length.rates);
  cmd_length
      ->add_option("--linewidth-mhz", length.linewidth_mhz,
                   "natural linewidth gamma0/2pi, MHz")
      ->required();
  cmd_length->add_option("--summary", length.summary,
                         "also write the JSON summary to this file");

  FigureOptions figure;
  CLI::App* cmd_figure = app.add_subcommand(
      "figure", "figure-data presets (fig3, fig4a, fig4b, fig5a, fig5b)");
  cmd_figure->add_option("--preset", figure.preset, "which figure dataset")
      ->required();
  cmd_figure->add_option("--distance-nm", figure.distance_nm,
                         "atom-surface distance, nm (default 100)");
  cmd_figure->add_option("--rate-table", figure.rate_table,
                         "rate table CSV (default: the shipped table)");
  cmd_figure->add_option("--out", figure.out,
                         "output CSV path (default <preset>.csv)");
  cmd_figure->add_option("--t-final", figure.t_final,
                         "integration horizon for fig4 presets, tau0");
  cmd_figure->add_option("--samples", figure.samples,
                         "sample count for fig4 presets");
  cmd_figure->add_option("--rel-tol", figure.rel_tol,
                         "integrator relative tolerance (fig4)");
  cmd_figure->add_option("--abs-tol", figure.abs_tol,
                         "integrator absolute tolerance (fig4)");
  cmd_figure->add_option("--every", figure.every,
                         "keep every k-th CSV row (fig4)");
  cmd_figure->add_option("--summary", figure.summary,
                         "also write the JSON summary to this file");

  std::string config_path_doc;
  for (CLI::App* sub : {cmd_analytic, cmd_evolve, cmd_sweep, cmd_length, cmd_figure}) {
    sub->add_option("--config", config_path_doc,
                    "flat key=value config file; unknown keys are errors, "
                    "explicit flags override");
    for (CLI::Option* opt : sub->get_options()) {
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config_args(app, args);
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return is_io_error(e.code()) ? 4 : 2;
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_analytic->parsed()) return run_analytic(analytic);
    if (cmd_evolve->parsed()) return run_evolve(evolve);
    if (cmd_sweep->parsed()) return run_sweep(sweep);
    if (cmd_length->parsed()) return run_length(length);
    if (cmd_figure->parsed()) return run_figure(figure);
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    if (is_numerical_error(e.code())) return 3;
    if (is_io_error(e.code())) return 4;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
