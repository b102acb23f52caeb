#include <cmath>
#include <doctest.h>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "swmode/errors.hpp"
#include "swmode/gauss.hpp"
#include "swmode/modes.hpp"

using namespace swmode;

namespace {

EnvironmentParams alma_env() {
  EnvironmentParams env;
  env.c_w = 1523.0;
  env.c_s = 1630.0;
  env.rho_w = 1000.0;
  env.rho_s = 1700.0;
  env.z_b = 110.0;
  env.nu_s = alpha_to_nu(1.09);
  env.sigma = 0.002;
  env.ell_v = 30.0;
  env.ell_h = 100.0;
  return env;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TEST_CASE("mode count at 2 kHz matches the dense sign-scan oracle") {
  const EnvironmentParams env = alma_env();
  const double omega = kTwoPi * 2000.0;
  ModeSet modes = solve_modes(env, omega);
  CHECK(modes.size() > 0);
  CHECK(modes.dropped_near_cutoff == 0);
  CHECK(modes.size() == oracle::dense_root_count(env, omega));
}

TEST_CASE("root completeness on random environments") {
  std::mt19937_64 rng(2024);
  for (int c = 0; c < 20; ++c) {
    const oracle::RandomCase rc = oracle::random_environment(rng);
    const double omega = kTwoPi * rc.freq_hz;
    ModeSet modes = solve_modes(rc.env, omega);
    if (modes.dropped_near_cutoff > 0) continue;  // count intentionally differs
    CHECK(modes.size() == oracle::dense_root_count(rc.env, omega, 200000));
  }
}

TEST_CASE("no guided modes at very low frequency") {
  const EnvironmentParams env = alma_env();
  // sigma interval shorter than the first branch point pi/2
  const double omega_candidate = 0.49 * std::numbers::pi * env.c_w /
                                 (env.z_b * std::sqrt(1.0 - (env.c_w * env.c_w) /
                                                                (env.c_s * env.c_s)));
  REQUIRE(sigma_interval_end(env, omega_candidate) < 0.5 * std::numbers::pi);
  ModeSet modes = solve_modes(env, omega_candidate);
  CHECK(modes.empty());
  SourceSpec src{55.0, 9000.0};
  CHECK_THROWS_AS(source_amplitudes(modes, src), NoGuidedModes);
}

TEST_CASE("spectrum ordering and residuals") {
  const EnvironmentParams env = alma_env();
  const double omega = kTwoPi * 5000.0;
  ModeSet modes = solve_modes(env, omega);
  const double sigma_max = sigma_interval_end(env, omega);
  for (int j = 0; j < modes.size(); ++j) {
    CHECK(std::abs(dispersion_residual(env, sigma_max, modes.sigma[j])) < 1e-10);
    CHECK(modes.beta[j] > modes.k_s);
    CHECK(modes.beta[j] < modes.k_w);
    if (j > 0) CHECK(modes.beta[j] < modes.beta[j - 1]);
  }
}

TEST_CASE("mode count is non-decreasing in frequency") {
  const EnvironmentParams env = alma_env();
  int prev = 0;
  for (double f = 100.0; f <= 3000.0; f += 100.0) {
    ModeSet modes = solve_modes(env, kTwoPi * f);
    CHECK(modes.size() >= prev);
    prev = modes.size();
  }
}

TEST_CASE("orthonormality under the weighted inner product") {
  const EnvironmentParams env = alma_env();
  ModeSet modes = solve_modes(env, kTwoPi * 700.0);
  REQUIRE(modes.size() >= 5);
  for (int j = 0; j < modes.size(); ++j)
    for (int l = j; l < modes.size(); ++l) {
      const double ip = oracle::mode_inner_product(modes, j, l);
      CHECK(std::abs(ip - (j == l ? 1.0 : 0.0)) < 1e-8);
    }
}

TEST_CASE("eigenfunction boundary behaviour") {
  const EnvironmentParams env = alma_env();
  ModeSet modes = solve_modes(env, kTwoPi * 2000.0);
  const int j = modes.size() / 2;

  CHECK(eval_phi_j(modes, j, 0.0) == 0.0);

  // continuity at z_b from both branch formulas
  const double inside = modes.A[j] * std::sin(modes.sigma[j]);
  CHECK(eval_phi_j(modes, j, env.z_b) == doctest::Approx(inside).epsilon(1e-14));
  CHECK(eval_phi_j(modes, j, env.z_b * (1.0 + 1e-12)) ==
        doctest::Approx(inside).epsilon(1e-9));

  // jump condition phi'(z_b-)/rho_w = phi'(z_b+)/rho_s
  const double h = 1e-6;
  const double d_minus =
      (eval_phi_j(modes, j, env.z_b) - eval_phi_j(modes, j, env.z_b - h)) / h;
  const double d_plus =
      (eval_phi_j(modes, j, env.z_b + h) - eval_phi_j(modes, j, env.z_b)) / h;
  CHECK(d_minus / env.rho_w == doctest::Approx(d_plus / env.rho_s).epsilon(1e-5));

  CHECK_THROWS_AS(eval_phi_j(modes, modes.size(), 10.0), std::out_of_range);
  CHECK_THROWS_AS(eval_phi_j(modes, -1, 10.0), std::out_of_range);
}

TEST_CASE("eigen-residual of the piecewise Helmholtz operator") {
  const EnvironmentParams env = alma_env();
  ModeSet modes = solve_modes(env, kTwoPi * 1000.0);
  const int j = 1;
  const double h = 1e-4;
  for (double z : {0.3 * env.z_b, 0.7 * env.z_b, 1.3 * env.z_b}) {
    const double phi = eval_phi_j(modes, j, z);
    const double d2 = (eval_phi_j(modes, j, z + h) - 2.0 * phi + eval_phi_j(modes, j, z - h)) /
                      (h * h);
    const double k = z < env.z_b ? modes.k_w : modes.k_s;
    const double apply = d2 + k * k * phi;
    CHECK(apply == doctest::Approx(modes.beta[j] * modes.beta[j] * phi).epsilon(1e-6));
  }
}

TEST_CASE("guided mode normalization via quadrature") {
  const EnvironmentParams env = alma_env();
  ModeSet modes = solve_modes(env, kTwoPi * 2000.0);
  for (int j : {0, modes.size() / 2, modes.size() - 1}) {
    CHECK(oracle::mode_inner_product(modes, j, j) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("continuous-spectrum eigenfunction") {
  const EnvironmentParams env = alma_env();
  ModeSet modes = solve_modes(env, kTwoPi * 2000.0);
  const double gamma = 0.5 * modes.k_s * modes.k_s;

  CHECK(eval_phi_gamma(modes, gamma, 0.0) == 0.0);

  const ContinuousModeEval cm = continuous_mode(modes, gamma);
  const double inside = std::sqrt(cm.A2) * std::sin(cm.eta);
  CHECK(eval_phi_gamma(modes, gamma, env.z_b) == doctest::Approx(inside).epsilon(1e-12));
  CHECK(eval_phi_gamma(modes, gamma, env.z_b * (1 + 1e-12)) ==
        doctest::Approx(inside).epsilon(1e-7));

  CHECK_THROWS_AS(continuous_mode(modes, modes.k_s * modes.k_s), std::domain_error);
  CHECK_THROWS_AS(continuous_mode(modes, 2.0 * modes.k_s * modes.k_s), std::domain_error);

  // A_gamma^2 vanishes like xi_gamma toward the branch point (cos(eta) != 0 there)
  const double g1 = modes.k_s * modes.k_s * (1.0 - 1e-6);
  const double g2 = modes.k_s * modes.k_s * (1.0 - 4e-6);
  const ContinuousModeEval c1 = continuous_mode(modes, g1);
  const ContinuousModeEval c2 = continuous_mode(modes, g2);
  if (std::abs(std::cos(c1.eta)) > 0.1) {
    CHECK(c1.A2 / c2.A2 == doctest::Approx(c1.xi / c2.xi).epsilon(1e-3));
  }

  // gamma < 0 (evanescent branch) evaluates with the same formulas
  const ContinuousModeEval ce = continuous_mode(modes, -1.0);
  CHECK(ce.A2 > 0.0);
  CHECK(std::isfinite(eval_phi_gamma(modes, ce, 0.4 * env.z_b)));
}

TEST_CASE("source amplitudes") {
  const EnvironmentParams env = alma_env();
  ModeSet modes = solve_modes(env, kTwoPi * 1000.0);
  SourceSpec src{50.0, 9000.0};
  Eigen::VectorXd q0 = source_amplitudes(modes, src);
  REQUIRE(q0.size() == modes.size());
  CHECK((q0.array() >= 0.0).all());

  // direct re-evaluation oracle
  for (int j = 0; j < modes.size(); ++j) {
    const double expected = modes.beta[j] / 4.0 *
                            std::pow(modes.A[j] * std::sin(modes.sigma[j] * src.z0 / env.z_b), 2);
    CHECK(q0[j] == doctest::Approx(expected).epsilon(1e-13));
  }

  // a source at a node of mode j zeroes that mode's initial power
  const int j = 2;
  const double node = std::numbers::pi * env.z_b / modes.sigma[j];
  SourceSpec at_node{node, 9000.0};
  Eigen::VectorXd q_node = source_amplitudes(modes, at_node);
  CHECK(q_node[j] == doctest::Approx(0.0).epsilon(1e-18));
}
