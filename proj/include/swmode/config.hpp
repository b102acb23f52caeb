#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swmode/environment.hpp"
#include "swmode/field_stats.hpp"
#include "swmode/inversion.hpp"

namespace swmode {

/// Parsed, schema-validated run configuration (unknown keys rejected).
struct RunConfig {
  EnvironmentParams environment;
  SourceSpec source;
  ArrayGeometry geometry;
  std::vector<double> frequencies_hz;
  ForwardOptions forward;

  // simulate block
  double sim_dx = 1.0;
  int sim_n_paths = 1000;
  int sim_record_points = 11;
  int sim_n_snapshots = 0;

  // invert block
  std::optional<std::string> observed_radii_csv;
  std::vector<double> observed_freqs_hz;   ///< inline observations
  std::vector<double> observed_radii_m;
  ParamBox bounds;
  OptimizerOptions optimizer;

  // sensitivity block: parameter name -> values
  std::vector<std::pair<std::string, std::vector<double>>> sensitivity_params;

  // scintillation block
  std::optional<std::string> snapshot_dir;

  std::uint64_t seed = 1;
  std::string output_dir = ".";
};

/// Parse and validate a JSON config file. Throws ConfigError on any schema or
/// invariant violation (including unknown keys).
RunConfig load_config(const std::string& path);

/// Observed radii CSV: header freq_hz,radius_m.
void read_radii_csv(const std::string& path, std::vector<double>& freqs,
                    std::vector<double>& radii);

}  // namespace swmode
