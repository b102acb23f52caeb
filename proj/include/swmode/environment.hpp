#pragma once

#include <stdexcept>
#include <string>

namespace swmode {

/// Two-layer shallow-water waveguide: homogeneous water column of depth z_b over
/// a faster homogeneous fluid sediment half-space, plus the statistics of the
/// random sound-speed fluctuations in the water.
struct EnvironmentParams {
  double c_w = 0.0;    ///< sound speed in water (m/s)
  double c_s = 0.0;    ///< sound speed in sediment (m/s), c_s > c_w
  double rho_w = 0.0;  ///< water density (kg/m^3)
  double rho_s = 0.0;  ///< sediment density (kg/m^3)
  double z_b = 0.0;    ///< water depth (m)
  double nu_s = 0.0;   ///< dimensionless sediment dissipation (>= 0)
  double sigma = 0.0;  ///< relative index-fluctuation scale (variance sigma^2/2)
  double ell_v = 0.0;  ///< vertical correlation length (m)
  double ell_h = 0.0;  ///< horizontal correlation length (m)

  void validate() const {
    if (!(c_w > 0.0) || !(c_s > c_w))
      throw std::invalid_argument("EnvironmentParams: need c_s > c_w > 0");
    if (!(rho_w > 0.0) || !(rho_s > 0.0))
      throw std::invalid_argument("EnvironmentParams: densities must be positive");
    if (!(z_b > 0.0)) throw std::invalid_argument("EnvironmentParams: z_b must be positive");
    if (nu_s < 0.0) throw std::invalid_argument("EnvironmentParams: nu_s must be >= 0");
    if (sigma < 0.0) throw std::invalid_argument("EnvironmentParams: sigma must be >= 0");
    if (!(ell_v > 0.0) || !(ell_h > 0.0))
      throw std::invalid_argument("EnvironmentParams: correlation lengths must be positive");
  }
};

/// Time-harmonic point source and its horizontal distance to the receiving array.
struct SourceSpec {
  double z0 = 0.0;   ///< source depth (m), 0 < z0 < z_b
  double x_a = 0.0;  ///< source-array range (m), > 0

  void validate(double z_b) const {
    if (!(z0 > 0.0) || !(z0 < z_b))
      throw std::invalid_argument("SourceSpec: need 0 < z0 < z_b");
    if (!(x_a > 0.0)) throw std::invalid_argument("SourceSpec: x_a must be positive");
  }
};

}  // namespace swmode
