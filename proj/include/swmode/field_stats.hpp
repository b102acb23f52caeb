#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "swmode/coupling.hpp"
#include "swmode/modes.hpp"
#include "swmode/moments.hpp"

namespace swmode {

/// Vertical receiving segment: aperture [z_m, z_M] inside the water column and
/// the discrete hydrophone depths within it.
struct ArrayGeometry {
  double x_a = 0.0;  ///< source-array range (m)
  double z_m = 0.0;  ///< top of the aperture (m)
  double z_M = 0.0;  ///< bottom of the aperture (m)
  std::vector<double> hydrophone_depths;  ///< sorted, within [z_m, z_M]

  double aperture() const { return z_M - z_m; }
  double spacing() const {
    return hydrophone_depths.size() > 1
               ? (hydrophone_depths.back() - hydrophone_depths.front()) /
                     (static_cast<double>(hydrophone_depths.size()) - 1.0)
               : 0.0;
  }
  void validate(double z_b) const;
};

/// Evenly spaced hydrophones filling [z_m, z_M].
ArrayGeometry uniform_array(double x_a, double z_m, double z_M, int n_hydrophones);

/// Normalized vertical correlation vs lag, with its half-maximum radius.
struct CorrelationCurve {
  std::vector<double> y_grid;   ///< lags, starting at 0
  std::vector<double> values;   ///< normalized correlation, values[0] = 1
  double zero_lag = 0.0;        ///< un-normalized value at y = 0
  std::function<double(double)> evaluator;  ///< normalized curve as a function of lag
};

struct CorrelationRadius {
  double radius = 0.0;
  bool reached = false;  ///< false when the curve never drops to 1/2
};

/// Aperture-averaged correlation at the given lags from the mean mode powers
/// at the array range (cross-mode coherence neglected). Throws EmptyAperture
/// when a lag leaves no overlap.
CorrelationCurve correlation_curve(const ModeSet& modes, const Eigen::VectorXd& Qx,
                                   const ArrayGeometry& geom,
                                   const std::vector<double>& y_grid);

/// Default lag grid: n points uniform on [0, aperture).
std::vector<double> default_lag_grid(const ArrayGeometry& geom, int n = 512);

/// Half-width at half-maximum: smallest lag with C(y) = 1/2, found by a grid
/// scan for the first downward crossing and bisection to 1e-4 m. When the
/// curve stays above 1/2 the radius reports the aperture with reached=false.
CorrelationRadius correlation_radius(const CorrelationCurve& curve);

struct ForwardOptions {
  int n_max = 0;           ///< keep only the n_max most energetic modes (0 = all)
  int lag_points = 512;
  CouplingOptions coupling;
  SPropagateOptions s_propagate;  ///< used only where second moments are needed
};

struct FrequencyRadius {
  double freq_hz = 0.0;
  CorrelationRadius radius;
  bool ok = false;
  std::string message;  ///< failure reason when !ok
};

struct ForwardRadiiResult {
  std::vector<FrequencyRadius> radii;
  std::vector<std::string> warnings;
};

/// Theoretical correlation radii per frequency: modes -> source powers ->
/// coupling -> Q(x_a) -> correlation curve -> radius. Frequencies without
/// guided modes are dropped with a warning.
ForwardRadiiResult forward_radii(const EnvironmentParams& env, const SourceSpec& src,
                                 const ArrayGeometry& geom, const std::vector<double>& freqs_hz,
                                 const ForwardOptions& opts = {});

/// Restriction of a mode set to a subset of mode indices (sorted).
ModeSet select_modes(const ModeSet& modes, const std::vector<int>& keep);

/// Indices of the n_max largest-Q0 modes (all modes when n_max <= 0 or >= N).
std::vector<int> dominant_modes(const Eigen::VectorXd& Q0, int n_max);

}  // namespace swmode
