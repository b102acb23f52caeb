#include "swmode/overlap.hpp"

#include <cmath>
#include <stdexcept>

namespace swmode {

namespace {

// int_0^L cos(x z) dz = sin(x L)/x, with the x -> 0 limit branch.
double cos_integral(double x, double L) {
  const double t = x * L;
  if (std::abs(t) < 1e-6) return L * (1.0 - t * t / 6.0 * (1.0 - t * t / 20.0));
  return std::sin(t) / x;
}

// int_0^L sin(x z) dz = (1 - cos(x L))/x = 2 sin^2(x L / 2)/x; the half-angle
// form avoids the cancellation in 1 - cos for small arguments.
double sin_integral(double x, double L) {
  if (x == 0.0) return 0.0;
  const double s = std::sin(0.5 * x * L);
  return 2.0 * s * s / x;
}

// One-triangle contribution:
//   I1(k,k') = int_0^L cos(k z) int_0^z exp(-a(z-z')) cos(k' z') dz' dz.
// The inner integral is [a cos(k'z) + k' sin(k'z) - a e^{-a z}] / (a^2 + k'^2).
double triangle(double k, double kp, double a, double L) {
  const double denom_p = a * a + kp * kp;
  // int cos(kz)cos(k'z) over [0, L]
  const double c1 = 0.5 * (cos_integral(k - kp, L) + cos_integral(k + kp, L));
  // int cos(kz)sin(k'z) over [0, L]
  const double c2 = 0.5 * (sin_integral(k + kp, L) + sin_integral(kp - k, L));
  // int cos(kz)exp(-a z) over [0, L]
  const double denom_k = a * a + k * k;
  const double c3 =
      (a - std::exp(-a * L) * (a * std::cos(k * L) - k * std::sin(k * L))) / denom_k;
  return (a * c1 + kp * c2 - a * c3) / denom_p;
}

}  // namespace

double overlap_S(const OverlapKernel& kernel, double k, double kp) {
  if (!(kernel.ell_v > 0.0) || !(kernel.z_b > 0.0))
    throw std::invalid_argument("overlap_S: ell_v and z_b must be positive");
  const double a = 1.0 / kernel.ell_v;
  const double L = kernel.z_b;
  return 0.5 * (triangle(k, kp, a, L) + triangle(kp, k, a, L));
}

double overlap_sine_combo(const OverlapKernel& kernel, double ka, double kb) {
  const double d = ka - kb;
  const double s = ka + kb;
  // S is symmetric, so the two cross terms coincide.
  return overlap_S(kernel, d, d) + overlap_S(kernel, s, s) - 2.0 * overlap_S(kernel, d, s);
}

double overlap_square_combo(const OverlapKernel& kernel, double ka, double kb) {
  return overlap_S(kernel, 0.0, 0.0) - overlap_S(kernel, 0.0, 2.0 * kb) -
         overlap_S(kernel, 2.0 * ka, 0.0) + overlap_S(kernel, 2.0 * ka, 2.0 * kb);
}

}  // namespace swmode
