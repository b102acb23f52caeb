#include <cmath>
#include <doctest.h>
#include <random>

#include "oracles.hpp"
#include "swmode/overlap.hpp"

using namespace swmode;

TEST_CASE("S(0,0) equals the directly derived value and the quadrature oracle") {
  const OverlapKernel kernel{30.0, 110.0};
  // (1/2) int int exp(-|z-z'|/ell) dz dz' = ell L - ell^2 (1 - exp(-L/ell))
  const double derived = 30.0 * 110.0 - 900.0 * (1.0 - std::exp(-110.0 / 30.0));
  CHECK(overlap_S(kernel, 0.0, 0.0) == doctest::Approx(derived).epsilon(1e-12));
  auto one = [](double) { return 1.0; };
  const double quad = oracle::exp_kernel_adaptive(one, one, 30.0, 110.0, 0.0, 1e-12);
  CHECK(overlap_S(kernel, 0.0, 0.0) == doctest::Approx(quad).epsilon(1e-10));
}

TEST_CASE("S symmetry and evenness") {
  const OverlapKernel kernel{22.0, 87.0};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double k = u(rng), kp = u(rng);
    const double s = overlap_S(kernel, k, kp);
    CHECK(s == doctest::Approx(overlap_S(kernel, kp, k)).epsilon(1e-14));
    CHECK(s == doctest::Approx(overlap_S(kernel, -k, kp)).epsilon(1e-12));
    CHECK(s == doctest::Approx(overlap_S(kernel, k, -kp)).epsilon(1e-12));
  }
}

TEST_CASE("closed form matches 2D quadrature on random wavenumbers") {
  const OverlapKernel kernel{30.0, 110.0};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int i = 0; i < 40; ++i) {
    const double k = u(rng), kp = u(rng);
    auto fk = [k](double z) { return std::cos(k * z); };
    auto fkp = [kp](double z) { return std::cos(kp * z); };
    const double quad =
        oracle::exp_kernel_adaptive(fk, fkp, kernel.ell_v, kernel.z_b, k + kp, 1e-11);
    const double closed = overlap_S(kernel, k, kp);
    const double envelope = std::sqrt(overlap_S(kernel, k, k) * overlap_S(kernel, kp, kp));
    const double denom = std::max({std::abs(closed), std::abs(quad), 1e-6 * envelope});
    CHECK(std::abs(closed - quad) / denom < 1e-8);
  }
}

TEST_CASE("limit branches agree with quadrature across the switch") {
  const OverlapKernel kernel{15.0, 60.0};
  const double k = 3.0;
  const double delta = 1e-6 / kernel.z_b;  // |k - k'| z_b = 1e-6 branch switch
  for (double factor : {0.0, 0.5, 0.99, 1.01, 2.0}) {
    const double kp = k + factor * delta;
    auto fk = [k](double z) { return std::cos(k * z); };
    auto fkp = [kp](double z) { return std::cos(kp * z); };
    const double quad =
        oracle::exp_kernel_adaptive(fk, fkp, kernel.ell_v, kernel.z_b, k + kp, 1e-12);
    CHECK(overlap_S(kernel, k, kp) == doctest::Approx(quad).epsilon(1e-9));
  }
}

TEST_CASE("sine combo is nonnegative and matches its four-term definition") {
  const OverlapKernel kernel{25.0, 95.0};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    const double ka = u(rng), kb = u(rng);
    const double combo = overlap_sine_combo(kernel, ka, kb);
    CHECK(combo >= -1e-12);
    const double four = overlap_S(kernel, ka - kb, ka - kb) +
                        overlap_S(kernel, ka + kb, ka + kb) -
                        overlap_S(kernel, ka - kb, ka + kb) -
                        overlap_S(kernel, ka + kb, ka - kb);
    CHECK(combo == doctest::Approx(four).epsilon(1e-12));
  }
}

TEST_CASE("sine combo equals the sin-product quadrature") {
  const OverlapKernel kernel{30.0, 110.0};
  const double ka = 0.31, kb = 0.82;
  auto f = [ka, kb](double z) { return std::sin(ka * z) * std::sin(kb * z); };
  const double quad =
      oracle::exp_kernel_adaptive(f, f, kernel.ell_v, kernel.z_b, ka + kb, 1e-11);
  // combo = 4 int int R sin sin sin sin
  CHECK(overlap_sine_combo(kernel, ka, kb) == doctest::Approx(4.0 * quad).epsilon(1e-9));
}
