#pragma once

namespace swmode {

/// Vertical overlap spectrum of the exponential depth correlation
/// R(z,z') = exp(-|z-z'|/ell_v)/2 over the water column [0, z_b]:
///
///   S(k, k') = (1/2) int_0^zb int_0^zb exp(-|z-z'|/ell_v) cos(k z) cos(k' z') dz dz'
///
/// evaluated in closed form (derived by splitting |z-z'| into the two
/// triangles; removable singularities handled by explicit limit branches).
struct OverlapKernel {
  double ell_v = 0.0;
  double z_b = 0.0;
};

/// Closed-form S(k, k'). Valid for all real k, k'; symmetric in (k, k') and
/// even in each argument.
double overlap_S(const OverlapKernel& kernel, double k, double kp);

/// Four-term sine-product combination that appears in every coupling
/// coefficient:
///   S(ka-kb, ka-kb) + S(ka+kb, ka+kb) - S(ka-kb, ka+kb) - S(ka+kb, ka-kb).
/// Equals 4 int int R(z,z') sin(ka z) sin(kb z) sin(ka z') sin(kb z') dz dz'
/// and is therefore nonnegative.
double overlap_sine_combo(const OverlapKernel& kernel, double ka, double kb);

/// Combination for squared-eigenfunction overlaps (zero-frequency cross
/// spectra): S(0,0) - S(0, 2kb) - S(2ka, 0) + S(2ka, 2kb).
double overlap_square_combo(const OverlapKernel& kernel, double ka, double kb);

}  // namespace swmode
