#include "swmode/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swmode/coupling.hpp"
#include "swmode/errors.hpp"

namespace swmode {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError(context + ": unknown key \"" + item.key() + "\"");
  }
}

double get_number(const json& j, const std::string& key, const std::string& context) {
  if (!j.contains(key)) throw ConfigError(context + ": missing \"" + key + "\"");
  if (!j.at(key).is_number()) throw ConfigError(context + ": \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

double get_number_or(const json& j, const std::string& key, double fallback,
                     const std::string& context) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(context + ": \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

std::vector<double> get_number_list(const json& j, const std::string& key,
                                    const std::string& context) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw ConfigError(context + ": \"" + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ConfigError(context + ": \"" + key + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

EnvironmentParams parse_environment(const json& j) {
  require_keys(j,
               {"c_w", "c_s", "rho_w", "rho_s", "z_b", "alpha_db_per_wavelength", "nu_s",
                "sigma", "ell_v", "ell_h"},
               "environment");
  EnvironmentParams env;
  env.c_w = get_number(j, "c_w", "environment");
  env.c_s = get_number(j, "c_s", "environment");
  env.rho_w = get_number(j, "rho_w", "environment");
  env.rho_s = get_number(j, "rho_s", "environment");
  env.z_b = get_number(j, "z_b", "environment");
  env.sigma = get_number(j, "sigma", "environment");
  env.ell_v = get_number(j, "ell_v", "environment");
  env.ell_h = get_number(j, "ell_h", "environment");
  const bool has_alpha = j.contains("alpha_db_per_wavelength");
  const bool has_nu = j.contains("nu_s");
  if (has_alpha == has_nu)
    throw ConfigError("environment: set exactly one of alpha_db_per_wavelength / nu_s");
  env.nu_s = has_nu ? get_number(j, "nu_s", "environment")
                    : alpha_to_nu(get_number(j, "alpha_db_per_wavelength", "environment"));
  try {
    env.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("environment: ") + e.what());
  }
  return env;
}

}  // namespace

void read_radii_csv(const std::string& path, std::vector<double>& freqs,
                    std::vector<double>& radii) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open observed radii CSV: " + path);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("freq_hz", 0) != 0)
        throw ConfigError("observed radii CSV must start with header freq_hz,radius_m");
      header_seen = true;
      continue;
    }
    double f, r;
    if (std::sscanf(line.c_str(), "%lg,%lg", &f, &r) != 2)
      throw ConfigError("malformed radii CSV row: " + line);
    freqs.push_back(f);
    radii.push_back(r);
  }
  if (freqs.empty()) throw ConfigError("observed radii CSV has no rows: " + path);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(j,
               {"environment", "source", "geometry", "frequencies_hz", "options", "simulate",
                "invert", "sensitivity", "scintillation", "seed", "output_dir"},
               "config");
  if (!j.contains("environment")) throw ConfigError("config: missing \"environment\"");
  if (!j.contains("source")) throw ConfigError("config: missing \"source\"");
  if (!j.contains("geometry")) throw ConfigError("config: missing \"geometry\"");

  RunConfig cfg;
  cfg.environment = parse_environment(j.at("environment"));

  {
    const json& s = j.at("source");
    require_keys(s, {"z0", "x_a"}, "source");
    cfg.source.z0 = get_number(s, "z0", "source");
    cfg.source.x_a = get_number(s, "x_a", "source");
    try {
      cfg.source.validate(cfg.environment.z_b);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("source: ") + e.what());
    }
  }

  {
    const json& g = j.at("geometry");
    require_keys(g, {"z_m", "z_M", "n_hydrophones", "hydrophone_depths"}, "geometry");
    const double z_m = get_number(g, "z_m", "geometry");
    const double z_M = get_number(g, "z_M", "geometry");
    const bool has_n = g.contains("n_hydrophones");
    const bool has_list = g.contains("hydrophone_depths");
    if (has_n == has_list)
      throw ConfigError("geometry: set exactly one of n_hydrophones / hydrophone_depths");
    if (has_n) {
      cfg.geometry = uniform_array(cfg.source.x_a, z_m, z_M,
                                   static_cast<int>(get_number(g, "n_hydrophones", "geometry")));
    } else {
      cfg.geometry.x_a = cfg.source.x_a;
      cfg.geometry.z_m = z_m;
      cfg.geometry.z_M = z_M;
      cfg.geometry.hydrophone_depths = get_number_list(g, "hydrophone_depths", "geometry");
    }
    try {
      cfg.geometry.validate(cfg.environment.z_b);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("geometry: ") + e.what());
    }
  }

  if (j.contains("frequencies_hz")) cfg.frequencies_hz = get_number_list(j, "frequencies_hz", "config");
  for (double f : cfg.frequencies_hz)
    if (!(f > 0.0)) throw ConfigError("frequencies_hz must be positive");

  if (j.contains("options")) {
    const json& o = j.at("options");
    require_keys(o, {"n_max", "lag_points", "quad_rel_tol", "with_appendix", "s_rel_tol"},
                 "options");
    cfg.forward.n_max = static_cast<int>(get_number_or(o, "n_max", 0, "options"));
    cfg.forward.lag_points = static_cast<int>(get_number_or(o, "lag_points", 512, "options"));
    cfg.forward.coupling.quad_rel_tol =
        get_number_or(o, "quad_rel_tol", 1e-6, "options");
    if (o.contains("with_appendix")) {
      if (!o.at("with_appendix").is_boolean())
        throw ConfigError("options: \"with_appendix\" must be a boolean");
      cfg.forward.coupling.with_appendix = o.at("with_appendix").get<bool>();
    }
    cfg.forward.s_propagate.rel_tol = get_number_or(o, "s_rel_tol", 1e-9, "options");
  }

  if (j.contains("simulate")) {
    const json& s = j.at("simulate");
    require_keys(s, {"dx", "n_paths", "record_points", "n_snapshots"}, "simulate");
    cfg.sim_dx = get_number_or(s, "dx", 1.0, "simulate");
    cfg.sim_n_paths = static_cast<int>(get_number_or(s, "n_paths", 1000, "simulate"));
    cfg.sim_record_points =
        static_cast<int>(get_number_or(s, "record_points", 11, "simulate"));
    cfg.sim_n_snapshots = static_cast<int>(get_number_or(s, "n_snapshots", 0, "simulate"));
  }

  if (j.contains("invert")) {
    const json& v = j.at("invert");
    require_keys(v,
                 {"observed_radii_csv", "observed", "bounds", "n_starts",
                  "max_evals_per_start", "seed"},
                 "invert");
    if (v.contains("observed_radii_csv"))
      cfg.observed_radii_csv = v.at("observed_radii_csv").get<std::string>();
    if (v.contains("observed")) {
      for (const auto& row : v.at("observed")) {
        require_keys(row, {"freq_hz", "radius_m"}, "invert.observed");
        cfg.observed_freqs_hz.push_back(get_number(row, "freq_hz", "invert.observed"));
        cfg.observed_radii_m.push_back(get_number(row, "radius_m", "invert.observed"));
      }
    }
    if (v.contains("bounds")) {
      const json& b = v.at("bounds");
      require_keys(b, {"c_s", "rho_s", "alpha", "sigma", "ell_v", "ell_h"}, "invert.bounds");
      const auto& names = geo_param_names();
      for (int i = 0; i < 6; ++i) {
        if (!b.contains(names[i])) continue;
        const auto lohi = get_number_list(b, names[i], "invert.bounds");
        if (lohi.size() != 2)
          throw ConfigError("invert.bounds." + names[i] + " must be [lo, hi]");
        cfg.bounds.lo[i] = lohi[0];
        cfg.bounds.hi[i] = lohi[1];
      }
      try {
        cfg.bounds.validate();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("invert.bounds: ") + e.what());
      }
    }
    cfg.optimizer.n_starts =
        static_cast<int>(get_number_or(v, "n_starts", 16, "invert"));
    cfg.optimizer.max_evals_per_start =
        static_cast<int>(get_number_or(v, "max_evals_per_start", 300, "invert"));
    cfg.optimizer.seed =
        static_cast<std::uint64_t>(get_number_or(v, "seed", 1, "invert"));
  }

  if (j.contains("sensitivity")) {
    const json& s = j.at("sensitivity");
    require_keys(s, {"params"}, "sensitivity");
    if (!s.contains("params") || !s.at("params").is_object())
      throw ConfigError("sensitivity: \"params\" must map parameter names to value arrays");
    const auto& names = geo_param_names();
    for (const auto& item : s.at("params").items()) {
      if (std::find(names.begin(), names.end(), item.key()) == names.end())
        throw ConfigError("sensitivity: unknown parameter \"" + item.key() + "\"");
      std::vector<double> values;
      for (const auto& v : item.value()) values.push_back(v.get<double>());
      cfg.sensitivity_params.emplace_back(item.key(), std::move(values));
    }
  }

  if (j.contains("scintillation")) {
    const json& s = j.at("scintillation");
    require_keys(s, {"snapshot_dir"}, "scintillation");
    if (s.contains("snapshot_dir"))
      cfg.snapshot_dir = s.at("snapshot_dir").get<std::string>();
  }

  if (j.contains("seed"))
    cfg.seed = static_cast<std::uint64_t>(get_number(j, "seed", "config"));
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  return cfg;
}

}  // namespace swmode
