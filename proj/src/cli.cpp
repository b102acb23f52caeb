#include "swmode/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "swmode/config.hpp"
#include "swmode/coupling.hpp"
#include "swmode/errors.hpp"
#include "swmode/inversion.hpp"
#include "swmode/mc.hpp"
#include "swmode/moments.hpp"
#include "swmode/parallel.hpp"
#include "swmode/pipeline.hpp"

namespace swmode {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot open output file " + (dir / name).string());
  out.precision(12);
  return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_modes(const RunConfig& cfg, const fs::path& out_dir) {
  auto out = open_out(out_dir, "modes.csv");
  out << "freq_hz,mode,sigma,beta_per_m,zeta,A,k_wj_per_m\n";
  for (double f : cfg.frequencies_hz) {
    ModeSet modes = solve_modes(cfg.environment, 2.0 * std::numbers::pi * f);
    print_warnings(modes.warnings);
    for (int j = 0; j < modes.size(); ++j) {
      out << f << ',' << j + 1 << ',' << modes.sigma[j] << ',' << modes.beta[j] << ','
          << modes.zeta[j] << ',' << modes.A[j] << ',' << modes.k_wj[j] << "\n";
    }
  }
  return 0;
}

int cmd_forward(const RunConfig& cfg, const fs::path& out_dir) {
  ForwardRadiiResult fwd = forward_radii(cfg.environment, cfg.source, cfg.geometry,
                                         cfg.frequencies_hz, cfg.forward);
  print_warnings(fwd.warnings);
  auto radii = open_out(out_dir, "radii.csv");
  radii << "freq_hz,radius_m,reached\n";
  for (const auto& fr : fwd.radii) {
    if (!fr.ok) continue;
    radii << fr.freq_hz << ',' << fr.radius.radius << ',' << (fr.radius.reached ? 1 : 0)
          << "\n";
  }
  // Full curves alongside the radii.
  for (double f : cfg.frequencies_hz) {
    ModeSet modes = solve_modes(cfg.environment, 2.0 * std::numbers::pi * f);
    if (modes.empty()) continue;
    Eigen::VectorXd q0 = source_amplitudes(modes, cfg.source);
    if (cfg.forward.n_max > 0 && cfg.forward.n_max < modes.size()) {
      const auto keep = dominant_modes(q0, cfg.forward.n_max);
      Eigen::VectorXd q0_sub(keep.size());
      for (std::size_t t = 0; t < keep.size(); ++t) q0_sub[t] = q0[keep[t]];
      modes = select_modes(modes, keep);
      q0 = q0_sub;
    }
    CouplingModel coupling = build_coupling(modes, cfg.environment, cfg.forward.coupling);
    Eigen::VectorXd qx = propagate_Q(coupling, q0, cfg.geometry.x_a);
    CorrelationCurve curve = correlation_curve(
        modes, qx, cfg.geometry, default_lag_grid(cfg.geometry, cfg.forward.lag_points));
    std::ostringstream name;
    name << "correlation_" << static_cast<long>(f) << "hz.csv";
    auto out = open_out(out_dir, name.str());
    out << "y_m,corr\n";
    for (std::size_t i = 0; i < curve.y_grid.size(); ++i)
      out << curve.y_grid[i] << ',' << curve.values[i] << "\n";
  }
  return 0;
}

int cmd_coefficients(const RunConfig& cfg, const fs::path& out_dir) {
  CouplingOptions copts = cfg.forward.coupling;
  copts.with_appendix = true;
  for (double f : cfg.frequencies_hz) {
    ModeSet modes = solve_modes(cfg.environment, 2.0 * std::numbers::pi * f);
    if (modes.empty()) {
      std::cerr << "warning: " << f << " Hz has no guided modes; skipped\n";
      continue;
    }
    CouplingModel cm = build_coupling(modes, cfg.environment, copts);
    print_warnings(cm.warnings);
    const long tag = static_cast<long>(f);
    {
      auto out = open_out(out_dir, "gamma_" + std::to_string(tag) + "hz.csv");
      out << "j,l,gamma_per_m,gamma_s_per_m,gamma_1_per_m\n";
      for (int j = 0; j < cm.size(); ++j)
        for (int l = 0; l < cm.size(); ++l)
          out << j + 1 << ',' << l + 1 << ',' << cm.Gamma(j, l) << ',' << cm.Gamma_s(j, l)
              << ',' << cm.Gamma_1(j, l) << "\n";
    }
    {
      auto out = open_out(out_dir, "lambda_" + std::to_string(tag) + "hz.csv");
      out << "mode,lambda_rad_per_m,lambda_sed_per_m,lambda_per_m,lambda_s_per_m,kappa_per_m\n";
      for (int j = 0; j < cm.size(); ++j)
        out << j + 1 << ',' << cm.Lambda_rad[j] << ',' << cm.Lambda_sed[j] << ','
            << cm.Lambda[j] << ',' << cm.Lambda_s[j] << ',' << cm.kappa[j] << "\n";
    }
  }
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir) {
  for (double f : cfg.frequencies_hz) {
    ModeSet modes = solve_modes(cfg.environment, 2.0 * std::numbers::pi * f);
    if (modes.empty()) {
      std::cerr << "warning: " << f << " Hz has no guided modes; skipped\n";
      continue;
    }
    Eigen::VectorXd q0 = source_amplitudes(modes, cfg.source);
    if (cfg.forward.n_max > 0 && cfg.forward.n_max < modes.size()) {
      const auto keep = dominant_modes(q0, cfg.forward.n_max);
      Eigen::VectorXd q0_sub(keep.size());
      for (std::size_t t = 0; t < keep.size(); ++t) q0_sub[t] = q0[keep[t]];
      modes = select_modes(modes, keep);
      q0 = q0_sub;
    }
    CouplingModel coupling = build_coupling(modes, cfg.environment, cfg.forward.coupling);
    SimulateOptions sopts;
    sopts.record_points = cfg.sim_record_points;
    PowerEnsemble ens = simulate_powers(coupling, q0, cfg.geometry.x_a, cfg.sim_dx,
                                        cfg.sim_n_paths, cfg.seed, sopts);
    if (ens.clamp_count > 0)
      std::cerr << "note: " << ens.clamp_count << " negative excursions clamped at " << f
                << " Hz\n";

    const long tag = static_cast<long>(f);
    QPropagator prop(coupling);
    auto out = open_out(out_dir, "moments_" + std::to_string(tag) + "hz.csv");
    out << "x_m,mode,mc_mean,mc_se,theory_mean\n";
    const int n = modes.size();
    for (std::size_t r = 0; r < ens.x_grid.size(); ++r) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd sq = Eigen::VectorXd::Zero(n);
      for (const auto& path : ens.paths) {
        mean += path.P[r];
        sq += path.P[r].cwiseProduct(path.P[r]);
      }
      mean /= static_cast<double>(ens.paths.size());
      sq /= static_cast<double>(ens.paths.size());
      Eigen::VectorXd theory = prop.at(q0, ens.x_grid[r]);
      for (int jm = 0; jm < n; ++jm) {
        const double var = std::max(0.0, sq[jm] - mean[jm] * mean[jm]);
        out << ens.x_grid[r] << ',' << jm + 1 << ',' << mean[jm] << ','
            << std::sqrt(var / static_cast<double>(ens.paths.size())) << ',' << theory[jm]
            << "\n";
      }
    }

    if (cfg.sim_n_snapshots > 0) {
      std::vector<Eigen::VectorXd> draws;
      draws.reserve(ens.paths.size());
      for (const auto& path : ens.paths) draws.push_back(path.P.back());
      SnapshotSet snaps = synthesize_snapshots(modes, draws, cfg.geometry,
                                               cfg.sim_n_snapshots, cfg.seed, f);
      fs::create_directories(out_dir);
      write_snapshot_csv(snaps,
                         (out_dir / ("snapshots_" + std::to_string(tag) + "hz.csv")).string());
    }
  }
  return 0;
}

int cmd_scintillation(const RunConfig& cfg, const fs::path& out_dir) {
  // Optional empirical column from snapshot CSVs.
  std::vector<SnapshotSet> sets;
  if (cfg.snapshot_dir) {
    if (fs::exists(*cfg.snapshot_dir)) {
      for (const auto& entry : fs::directory_iterator(*cfg.snapshot_dir)) {
        if (entry.path().extension() == ".csv")
          sets.push_back(read_snapshot_csv(entry.path().string()));
      }
    }
    if (sets.empty())
      std::cerr << "note: no snapshot files found; theoretical column only\n";
  }

  auto out = open_out(out_dir, "scintillation.csv");
  out << "freq_hz,s_theory" << (sets.empty() ? "" : ",s_empirical") << "\n";
  for (double f : cfg.frequencies_hz) {
    ModeSet modes = solve_modes(cfg.environment, 2.0 * std::numbers::pi * f);
    if (modes.empty()) {
      std::cerr << "warning: " << f << " Hz has no guided modes; skipped\n";
      continue;
    }
    Eigen::VectorXd q0 = source_amplitudes(modes, cfg.source);
    if (cfg.forward.n_max > 0 && cfg.forward.n_max < modes.size()) {
      const auto keep = dominant_modes(q0, cfg.forward.n_max);
      Eigen::VectorXd q0_sub(keep.size());
      for (std::size_t t = 0; t < keep.size(); ++t) q0_sub[t] = q0[keep[t]];
      modes = select_modes(modes, keep);
      q0 = q0_sub;
    }
    CouplingModel coupling = build_coupling(modes, cfg.environment, cfg.forward.coupling);
    MomentState state =
        propagate_moments(coupling, q0, cfg.geometry.x_a, cfg.forward.s_propagate);
    const double s_t = scintillation_index(modes, state, cfg.geometry.hydrophone_depths);
    out << f << ',' << s_t;
    if (!sets.empty()) {
      double s_e = std::numeric_limits<double>::quiet_NaN();
      for (const auto& set : sets) {
        if (!set.at_frequency(f).empty()) {
          s_e = empirical_scintillation(set, f);
          break;
        }
      }
      out << ',' << s_e;
    }
    out << "\n";
  }
  return 0;
}

int cmd_invert(const RunConfig& cfg, const fs::path& out_dir) {
  InverseProblem problem;
  problem.c_w = cfg.environment.c_w;
  problem.rho_w = cfg.environment.rho_w;
  problem.z_b = cfg.environment.z_b;
  problem.src = cfg.source;
  problem.geom = cfg.geometry;
  problem.bounds = cfg.bounds;
  problem.forward = cfg.forward;
  problem.options = cfg.optimizer;

  std::vector<double> freqs = cfg.observed_freqs_hz;
  std::vector<double> radii = cfg.observed_radii_m;
  if (cfg.observed_radii_csv) read_radii_csv(*cfg.observed_radii_csv, freqs, radii);
  if (freqs.empty()) throw ConfigError("invert: no observed radii given");
  problem.freqs_hz = freqs;
  problem.observed_radii = radii;

  InversionResult result = minimize(problem);
  print_warnings(result.warnings);

  nlohmann::json out;
  const auto& names = geo_param_names();
  const auto a = result.phi_hat.to_array();
  for (int i = 0; i < 6; ++i) out["phi_hat"][names[i]] = a[i];
  out["phi_hat"]["nu_s"] = alpha_to_nu(result.phi_hat.alpha);
  out["misfit"] = result.misfit;
  out["budget_exhausted"] = result.budget_exhausted;
  out["n_evaluations"] = result.trace.size();
  for (std::size_t s = 0; s < result.start_best.size(); ++s) {
    nlohmann::json row;
    const auto b = result.start_best[s].to_array();
    for (int i = 0; i < 6; ++i) row[names[i]] = b[i];
    row["misfit"] = result.start_misfit[s];
    out["starts"].push_back(row);
  }
  {
    auto f = open_out(out_dir, "inversion.json");
    f << out.dump(2) << "\n";
  }
  {
    auto f = open_out(out_dir, "trace.csv");
    f << "eval,start,c_s,rho_s,alpha,sigma,ell_v,ell_h,misfit\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
      const auto t = result.trace[i].phi.to_array();
      f << i << ',' << result.trace[i].start_index;
      for (int kk = 0; kk < 6; ++kk) f << ',' << t[kk];
      f << ',' << result.trace[i].misfit << "\n";
    }
  }
  return 0;
}

int cmd_sensitivity(const RunConfig& cfg, const fs::path& out_dir) {
  if (cfg.sensitivity_params.empty())
    throw ConfigError("sensitivity: config block \"sensitivity.params\" is required");
  InverseProblem problem;
  problem.c_w = cfg.environment.c_w;
  problem.rho_w = cfg.environment.rho_w;
  problem.z_b = cfg.environment.z_b;
  problem.src = cfg.source;
  problem.geom = cfg.geometry;
  problem.forward = cfg.forward;
  problem.freqs_hz = cfg.frequencies_hz;
  problem.observed_radii.assign(cfg.frequencies_hz.size(), 1.0);  // unused by sensitivity

  GeoParams phi0;
  phi0.c_s = cfg.environment.c_s;
  phi0.rho_s = cfg.environment.rho_s;
  phi0.alpha = nu_to_alpha(cfg.environment.nu_s);
  phi0.sigma = cfg.environment.sigma;
  phi0.ell_v = cfg.environment.ell_v;
  phi0.ell_h = cfg.environment.ell_h;

  auto out = open_out(out_dir, "sensitivity.csv");
  out << "param,value,freq_hz,radius_m,ok\n";
  for (const auto& [param, values] : cfg.sensitivity_params) {
    SensitivityTable table = sensitivity(problem, phi0, param, values);
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      for (const auto& fr : table.radii[i]) {
        out << param << ',' << table.values[i] << ',' << fr.freq_hz << ','
            << (fr.ok ? fr.radius.radius : std::numeric_limits<double>::quiet_NaN()) << ','
            << (fr.ok ? 1 : 0) << "\n";
      }
    }
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Guided-mode statistics and geoacoustic inversion for randomly perturbed "
               "shallow-water waveguides"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::int64_t seed_override = -1;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_override, "output directory (overrides config)");
    sub->add_option("--seed", seed_override, "RNG seed (overrides config)");
    sub->add_option("--threads", threads, "worker thread cap (0 = hardware)");
  };

  CLI::App* modes = app.add_subcommand("modes", "guided-mode tables per frequency");
  CLI::App* forward = app.add_subcommand("forward", "correlation curves and radii");
  CLI::App* coeffs = app.add_subcommand("coefficients", "coupling/dissipation coefficients");
  CLI::App* simulate = app.add_subcommand("simulate", "mode-power diffusion ensembles");
  CLI::App* scint = app.add_subcommand("scintillation", "scintillation indices");
  CLI::App* invert = app.add_subcommand("invert", "estimate parameters from observed radii");
  CLI::App* sens = app.add_subcommand("sensitivity", "one-at-a-time sensitivity tables");
  for (CLI::App* sub : {modes, forward, coeffs, simulate, scint, invert, sens})
    add_common(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    set_max_threads(threads);
    const fs::path out_dir = out_override.empty() ? fs::path(cfg.output_dir)
                                                  : fs::path(out_override);
    if (modes->parsed()) return cmd_modes(cfg, out_dir);
    if (forward->parsed()) return cmd_forward(cfg, out_dir);
    if (coeffs->parsed()) return cmd_coefficients(cfg, out_dir);
    if (simulate->parsed()) return cmd_simulate(cfg, out_dir);
    if (scint->parsed()) return cmd_scintillation(cfg, out_dir);
    if (invert->parsed()) return cmd_invert(cfg, out_dir);
    if (sens->parsed()) return cmd_sensitivity(cfg, out_dir);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace swmode
