#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "swmode/field_stats.hpp"

namespace swmode {

/// The geoacoustic unknowns. Dissipation is carried as alpha (dB/wavelength)
/// and converted internally, which keeps the search box well scaled.
struct GeoParams {
  double c_s = 0.0;
  double rho_s = 0.0;
  double alpha = 0.0;
  double sigma = 0.0;
  double ell_v = 0.0;
  double ell_h = 0.0;

  std::array<double, 6> to_array() const { return {c_s, rho_s, alpha, sigma, ell_v, ell_h}; }
  static GeoParams from_array(const std::array<double, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

inline const std::array<std::string, 6>& geo_param_names() {
  static const std::array<std::string, 6> names = {"c_s", "rho_s", "alpha",
                                                   "sigma", "ell_v", "ell_h"};
  return names;
}

struct ParamBox {
  std::array<double, 6> lo = {1550.0, 1300.0, 0.05, 1e-4, 5.0, 20.0};
  std::array<double, 6> hi = {1800.0, 2200.0, 3.0, 2e-2, 100.0, 500.0};

  bool contains(const GeoParams& phi, double slack = 1e-9) const;
  void validate() const;
};

struct OptimizerOptions {
  int n_starts = 16;            ///< Latin-hypercube multistart count
  int max_evals_per_start = 300;
  double f_tol = 1e-12;         ///< absolute misfit spread for simplex termination
  double x_tol = 1e-7;          ///< simplex size in the unbounded coordinates
  std::uint64_t seed = 1;
};

/// Fixed quantities (water column, geometry, frequencies), the observed
/// correlation radii aligned with the frequencies, and the search box.
struct InverseProblem {
  double c_w = 0.0;
  double rho_w = 0.0;
  double z_b = 0.0;
  SourceSpec src;
  ArrayGeometry geom;
  std::vector<double> freqs_hz;
  std::vector<double> observed_radii;  ///< one per frequency (m)
  ParamBox bounds;
  ForwardOptions forward;
  OptimizerOptions options;

  void validate() const;
  EnvironmentParams environment(const GeoParams& phi) const;
};

struct MisfitValue {
  double value = 0.0;
  int used_frequencies = 0;
  std::vector<double> excluded_freqs;  ///< frequencies dropped from both sums
};

/// E(phi) = sum_k (r_t(f_k, phi) - r_e(f_k))^2 over the frequencies where the
/// forward model succeeds. Throws ForwardModelFailure when none do.
MisfitValue misfit(const InverseProblem& problem, const GeoParams& phi);

struct TracePoint {
  GeoParams phi;
  double misfit = 0.0;
  int start_index = 0;
};

struct InversionResult {
  GeoParams phi_hat;
  double misfit = 0.0;
  bool budget_exhausted = false;
  std::vector<TracePoint> trace;       ///< every evaluation, in order
  std::vector<GeoParams> start_best;   ///< best point of each restart (spread proxy)
  std::vector<double> start_misfit;
  std::vector<std::string> warnings;
};

/// Bounded derivative-free minimization: Nelder-Mead simplex on a logistic
/// reparameterization of the box, from Latin-hypercube multistarts.
/// Deterministic given the seed.
InversionResult minimize(const InverseProblem& problem);

struct SensitivityTable {
  std::string param;
  std::vector<double> values;
  /// radii[i][k]: radius at values[i], frequency k (ok=false rows propagate
  /// forward-model failures).
  std::vector<std::vector<FrequencyRadius>> radii;
};

/// One-at-a-time sensitivity: recompute the per-frequency radii with the named
/// parameter substituted by each value, other parameters held at phi0.
SensitivityTable sensitivity(const InverseProblem& problem, const GeoParams& phi0,
                             const std::string& param, const std::vector<double>& values);

/// || d r / d log(theta) ||_2 across frequencies by centered differences;
/// the paper-style identifiability measure. Returns one value per parameter.
std::array<double, 6> identifiability(const InverseProblem& problem, const GeoParams& phi0,
                                      double log_step = 0.05);

}  // namespace swmode
