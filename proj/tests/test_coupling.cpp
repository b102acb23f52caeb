#include <cmath>
#include <doctest.h>
#include <numbers>

#include "oracles.hpp"
#include "swmode/coupling.hpp"
#include "swmode/errors.hpp"
#include "swmode/gauss.hpp"

using namespace swmode;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

EnvironmentParams shallow_env() {
  EnvironmentParams env;
  env.c_w = 1500.0;
  env.c_s = 1650.0;
  env.rho_w = 1000.0;
  env.rho_s = 1600.0;
  env.z_b = 40.0;
  env.nu_s = alpha_to_nu(0.8);
  env.sigma = 0.003;
  env.ell_v = 12.0;
  env.ell_h = 80.0;
  return env;
}

// Frequency chosen so the waveguide holds a handful of modes.
ModeSet few_modes(const EnvironmentParams& env, double freq_hz) {
  ModeSet modes = solve_modes(env, kTwoPi * freq_hz);
  REQUIRE(!modes.empty());
  return modes;
}

}  // namespace

TEST_CASE("gamma matrix structure") {
  const EnvironmentParams env = shallow_env();
  ModeSet modes = few_modes(env, 320.0);
  REQUIRE(modes.size() >= 3);
  Eigen::MatrixXd gamma = gamma_coupling(modes, env);

  for (int j = 0; j < modes.size(); ++j) {
    CHECK(std::abs(gamma.row(j).sum()) <=
          1e-12 * std::max(1.0, gamma.row(j).cwiseAbs().maxCoeff()));
    for (int l = 0; l < modes.size(); ++l) {
      if (j == l) continue;
      CHECK(gamma(j, l) >= 0.0);
      CHECK(gamma(j, l) == doctest::Approx(gamma(l, j)).epsilon(1e-14));
    }
  }
}

TEST_CASE("no fluctuations, no coupling") {
  EnvironmentParams env = shallow_env();
  env.sigma = 0.0;
  ModeSet modes = few_modes(env, 320.0);
  Eigen::MatrixXd gamma = gamma_coupling(modes, env);
  CHECK(gamma.cwiseAbs().maxCoeff() == 0.0);
  DissipationRates rates = lambda_dissipation(modes, env);
  CHECK(rates.rad.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rates.sed.minCoeff() > 0.0);
}

TEST_CASE("single-mode waveguide has an empty exchange matrix") {
  EnvironmentParams env = shallow_env();
  env.z_b = 12.0;
  double freq = 120.0;
  ModeSet modes = solve_modes(env, kTwoPi * freq);
  while (modes.size() != 1) {
    freq += 10.0;
    modes = solve_modes(env, kTwoPi * freq);
    REQUIRE(freq < 1000.0);
  }
  Eigen::MatrixXd gamma = gamma_coupling(modes, env);
  CHECK(gamma.rows() == 1);
  CHECK(gamma(0, 0) == 0.0);
}

TEST_CASE("gamma matches quadrature of the defining double integral") {
  const EnvironmentParams env = shallow_env();
  ModeSet modes = few_modes(env, 320.0);
  REQUIRE(modes.size() >= 3);
  Eigen::MatrixXd gamma = gamma_coupling(modes, env);
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) {
      if (j == l) continue;
      const double quad = oracle::gamma_coupling_quadrature(modes, env, j, l);
      CHECK(gamma(j, l) == doctest::Approx(quad).epsilon(1e-6));
    }
}

TEST_CASE("sediment dissipation closed form") {
  const EnvironmentParams env = shallow_env();
  ModeSet modes = few_modes(env, 320.0);
  DissipationRates rates = lambda_dissipation(modes, env);
  REQUIRE(rates.sed.size() == modes.size());
  CHECK((rates.sed.array() > 0.0).all());
  CHECK((rates.rad.array() >= 0.0).all());

  // sediment tail integral against direct quadrature of phi_j^2
  for (int j = 0; j < modes.size(); ++j) {
    auto f = [&](double z) {
      const double p = eval_phi_j(modes, j, z);
      return p * p;
    };
    double tail = 0.0;
    const double zeta_rate = modes.zeta[j] / env.z_b;
    double a = env.z_b;
    const double span = 40.0 / zeta_rate;
    tail = gauss_composite(f, a, a + span, 400, 16);
    const double expected = env.nu_s * modes.omega * modes.omega /
                            (modes.beta[j] * env.c_s * env.c_s * env.rho_s) * tail;
    CHECK(rates.sed[j] == doctest::Approx(expected).epsilon(1e-8));
  }

  EnvironmentParams lossless = env;
  lossless.nu_s = 0.0;
  DissipationRates r2 = lambda_dissipation(few_modes(lossless, 320.0), lossless);
  CHECK(r2.sed.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("radiative dissipation matches nested quadrature") {
  EnvironmentParams env = shallow_env();
  env.z_b = 25.0;
  ModeSet modes = few_modes(env, 260.0);
  REQUIRE(modes.size() >= 2);
  REQUIRE(modes.size() <= 4);
  DissipationRates rates = lambda_dissipation(modes, env);
  for (int j = 0; j < modes.size(); ++j) {
    const double quad = oracle::lambda_rad_quadrature(modes, env, j);
    CHECK(rates.rad[j] == doctest::Approx(quad).epsilon(1e-6));
  }
}

TEST_CASE("coefficient scalings") {
  const EnvironmentParams env = shallow_env();
  ModeSet modes = few_modes(env, 320.0);
  Eigen::MatrixXd gamma = gamma_coupling(modes, env);

  EnvironmentParams env2 = env;
  env2.sigma = 2.0 * env.sigma;
  Eigen::MatrixXd gamma2 = gamma_coupling(modes, env2);
  CHECK(gamma2(0, 1) == doctest::Approx(4.0 * gamma(0, 1)).epsilon(1e-12));

  EnvironmentParams envh = env;
  envh.ell_h = 2.0 * env.ell_h;
  Eigen::MatrixXd gammah = gamma_coupling(modes, envh);
  for (int j = 0; j < modes.size(); ++j)
    for (int l = j + 1; l < modes.size(); ++l) {
      const double d = modes.beta[l] - modes.beta[j];
      const double ratio = (envh.ell_h / (1.0 + d * d * envh.ell_h * envh.ell_h)) /
                           (env.ell_h / (1.0 + d * d * env.ell_h * env.ell_h));
      CHECK(gammah(j, l) == doctest::Approx(ratio * gamma(j, l)).epsilon(1e-12));
    }

  DissipationRates r1 = lambda_dissipation(modes, env);
  EnvironmentParams envn = env;
  envn.nu_s = 2.0 * env.nu_s;
  DissipationRates r2 = lambda_dissipation(modes, envn);
  CHECK(r2.sed[0] == doctest::Approx(2.0 * r1.sed[0]).epsilon(1e-13));
}

TEST_CASE("appendix coefficients") {
  EnvironmentParams env = shallow_env();
  env.z_b = 25.0;
  ModeSet modes = few_modes(env, 260.0);
  REQUIRE(modes.size() >= 2);
  AppendixCoefficients ac = appendix_coefficients(modes, env);

  SUBCASE("diagonal of Gamma_s is the negative row sum") {
    for (int j = 0; j < modes.size(); ++j)
      CHECK(std::abs(ac.Gamma_s.row(j).sum()) <=
            1e-12 * std::max(1.0, ac.Gamma_s.row(j).cwiseAbs().maxCoeff()));
  }

  SUBCASE("Gamma_s is antisymmetric off the diagonal") {
    for (int j = 0; j < modes.size(); ++j)
      for (int l = j + 1; l < modes.size(); ++l)
        CHECK(ac.Gamma_s(j, l) == doctest::Approx(-ac.Gamma_s(l, j)).epsilon(1e-13));
  }

  SUBCASE("all appendix coefficients vanish without fluctuations") {
    EnvironmentParams quiet = env;
    quiet.sigma = 0.0;
    AppendixCoefficients none = appendix_coefficients(modes, quiet);
    CHECK(none.Gamma_s.cwiseAbs().maxCoeff() == 0.0);
    CHECK(none.Gamma_1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(none.Lambda_s.cwiseAbs().maxCoeff() == 0.0);
    CHECK(none.kappa.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("Gamma_1 matches quadrature of its defining integral") {
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) {
        const double quad = oracle::gamma_1_quadrature(modes, env, j, l);
        CHECK(ac.Gamma_1(j, l) == doctest::Approx(quad).epsilon(1e-6));
      }
  }

  SUBCASE("Gamma_s matches quadrature of its defining integral") {
    const double quad = oracle::gamma_s_quadrature(modes, env, 0, 1);
    CHECK(ac.Gamma_s(0, 1) == doctest::Approx(quad).epsilon(1e-6));
  }
}

TEST_CASE("horizontal x-integral closed forms") {
  const double ell_h = 80.0;
  for (double d : {0.0, 0.002, 0.05, 0.4}) {
    CHECK(ell_h / (1.0 + d * d * ell_h * ell_h) ==
          doctest::Approx(oracle::x_integral_quadrature(0, ell_h, d)).epsilon(1e-10));
    CHECK(ell_h * ell_h * d / (1.0 + d * d * ell_h * ell_h) ==
          doctest::Approx(oracle::x_integral_quadrature(1, ell_h, d)).epsilon(1e-10));
  }
  for (double v : {0.01, 0.3}) {
    const double beta = 0.9;
    const double b = 1.0 / ell_h + v;
    CHECK(b / (b * b + beta * beta) ==
          doctest::Approx(oracle::x_integral_quadrature(2, ell_h, beta, v)).epsilon(1e-10));
  }
}

TEST_CASE("attenuation conversion") {
  CHECK(alpha_to_nu(0.0) == 0.0);
  // 1.09 dB/wavelength: alpha ln(10) / (20 pi)
  CHECK(alpha_to_nu(1.09) == doctest::Approx(0.0399449).epsilon(1e-5));
  for (double a : {0.05, 0.7, 1.09, 2.9})
    CHECK(nu_to_alpha(alpha_to_nu(a)) == doctest::Approx(a).epsilon(1e-15));
  CHECK_THROWS_AS(alpha_to_nu(-1.0), std::invalid_argument);
}

TEST_CASE("quadrature failure is reported") {
  const EnvironmentParams env = shallow_env();
  ModeSet modes = few_modes(env, 320.0);
  CouplingOptions opts;
  opts.quad_rel_tol = 1e-15;  // unreachable with no refinement allowed
  opts.quad_max_doublings = 0;
  CHECK_THROWS_AS(lambda_dissipation(modes, env, opts), QuadratureFailure);
}

TEST_CASE("build_coupling assembles the propagation matrix") {
  const EnvironmentParams env = shallow_env();
  ModeSet modes = few_modes(env, 320.0);
  CouplingOptions opts;
  opts.with_appendix = true;
  CouplingModel cm = build_coupling(modes, env, opts);
  CHECK(cm.has_appendix);
  CHECK(cm.Lambda.isApprox(cm.Lambda_rad + cm.Lambda_sed));
  Eigen::MatrixXd expected = cm.Gamma;
  expected.diagonal() -= cm.Lambda;
  CHECK(cm.A.isApprox(expected));
}
