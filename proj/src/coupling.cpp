#include "swmode/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "swmode/errors.hpp"
#include "swmode/gauss.hpp"
#include "swmode/parallel.hpp"

namespace swmode {

namespace {

// Breakpoint mesh on [0, k_s] for the radiating-spectrum integrals in the
// substituted variable u = sqrt(gamma). Two features must be resolved:
// the Lorentzian tail scale 1/ell_h against the u = k_s endpoint, and the
// leaky-mode resonances of A_gamma^2. Those sit at eta = (m + 1/2) pi with
// half-width xi/(r eta) in eta, which shrinks to zero toward the branch
// point, so each resonance gets a geometrically graded cluster of panels.
std::vector<double> radiative_breakpoints(const ModeSet& modes, double ell_h,
                                          int base_intervals) {
  const double k_s = modes.k_s, k_w = modes.k_w, z_b = modes.z_b;
  const double r = modes.rho_s / modes.rho_w;
  std::vector<double> pts;
  for (int i = 0; i <= base_intervals; ++i) pts.push_back(k_s * i / base_intervals);
  for (double c : {16.0, 8.0, 4.0, 2.0, 1.0, 0.5}) {
    const double p = k_s - c / ell_h;
    if (p > 0.0) pts.push_back(p);
  }
  const double sigma_max = z_b * std::sqrt((k_w - k_s) * (k_w + k_s));
  const double pi = std::numbers::pi;
  const int m0 = static_cast<int>(std::ceil(sigma_max / pi - 0.5));
  double prev_u = k_s;
  for (int m = std::max(m0, 0);; ++m) {
    const double eta = (m + 0.5) * pi;
    if (eta >= z_b * k_w) break;
    const double u2 = (k_w * z_b - eta) * (k_w * z_b + eta) / (z_b * z_b);
    if (u2 <= 0.0) break;
    const double u = std::sqrt(u2);
    const double xi = z_b * std::sqrt((k_s - u) * (k_s + u));
    const double w_u = xi / (r * eta) * eta / (z_b * z_b * u);  // width in u
    const double half_gap = 0.5 * std::abs(prev_u - u);
    prev_u = u;
    pts.push_back(u);
    for (double f = 1.0; f * w_u < std::max(half_gap, 4.0 * w_u); f *= 3.0) {
      if (u - f * w_u > 0.0) pts.push_back(u - f * w_u);
      if (u + f * w_u < k_s) pts.push_back(u + f * w_u);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](double a, double b) { return std::abs(a - b) < 1e-13 * k_s; }),
            pts.end());
  return pts;
}

}  // namespace

Eigen::MatrixXd gamma_coupling(const ModeSet& modes, const EnvironmentParams& env) {
  if (modes.empty()) throw NoGuidedModes("gamma_coupling: empty mode set");
  const int n = modes.size();
  const OverlapKernel kernel{env.ell_v, env.z_b};
  const double w4 = std::pow(modes.omega, 4);
  const double cw4 = std::pow(env.c_w, 4);
  const double base = w4 * env.sigma * env.sigma / (2.0 * env.rho_w * env.rho_w * cw4);

  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) {
      const double dbeta = modes.beta[l] - modes.beta[j];
      const double lorentz = env.ell_h / (1.0 + dbeta * dbeta * env.ell_h * env.ell_h);
      const double aa = modes.A[j] * modes.A[j] * modes.A[l] * modes.A[l] / 4.0;
      const double combo = overlap_sine_combo(kernel, modes.k_wj[j], modes.k_wj[l]);
      double v = base / (modes.beta[j] * modes.beta[l]) * lorentz * aa * combo;
      if (v < 0.0) v = 0.0;  // combo is a nonnegative quadratic form; clip roundoff
      gamma(j, l) = v;
      gamma(l, j) = v;
    }
  }
  for (int j = 0; j < n; ++j) {
    gamma(j, j) = 0.0;
    gamma(j, j) = -gamma.row(j).sum();
  }
  return gamma;
}

DissipationRates lambda_dissipation(const ModeSet& modes, const EnvironmentParams& env,
                                    const CouplingOptions& opts) {
  if (modes.empty()) throw NoGuidedModes("lambda_dissipation: empty mode set");
  const int n = modes.size();
  DissipationRates rates;
  rates.rad = Eigen::VectorXd::Zero(n);
  rates.sed = Eigen::VectorXd::Zero(n);

  const double w2 = modes.omega * modes.omega;
  for (int j = 0; j < n; ++j) {
    // int_{z_b}^inf phi_j^2 dz = A_j^2 sin^2(sigma_j) z_b / (2 zeta_j)
    const double tail = modes.A[j] * modes.A[j] * std::pow(std::sin(modes.sigma[j]), 2) *
                        modes.z_b / (2.0 * modes.zeta[j]);
    rates.sed[j] = env.nu_s * w2 / (modes.beta[j] * env.c_s * env.c_s * env.rho_s) * tail;
  }

  if (env.sigma == 0.0) return rates;

  const OverlapKernel kernel{env.ell_v, env.z_b};
  const double w4 = std::pow(modes.omega, 4);
  const double cw4 = std::pow(env.c_w, 4);
  const double base = w4 * env.sigma * env.sigma / (env.rho_w * env.rho_w * cw4);
  const double k_s = modes.k_s, k_w = modes.k_w;
  const auto breakpoints = radiative_breakpoints(modes, env.ell_h, opts.quad_base_intervals);

  std::vector<std::string> errors(n);
  parallel_for(n, [&](std::size_t sj) {
    const int j = static_cast<int>(sj);
    const double beta_j = modes.beta[j];
    const double aj2 = modes.A[j] * modes.A[j];
    // gamma = u^2 substitution removes the 1/sqrt(gamma) endpoint singularity.
    auto integrand = [&](double u) {
      const double gamma = u * u;
      const ContinuousModeEval cm = continuous_mode(modes, gamma);
      const double k_wg = std::sqrt((k_w - u) * (k_w + u));
      const double lorentz =
          env.ell_h / (1.0 + (u - beta_j) * (u - beta_j) * env.ell_h * env.ell_h);
      const double combo = overlap_sine_combo(kernel, modes.k_wj[j], k_wg);
      return base / beta_j * lorentz * aj2 * cm.A2 / 4.0 * combo;
    };
    AdaptiveResult r = gauss_adaptive_breakpoints(integrand, breakpoints, opts.quad_rel_tol,
                                                  opts.quad_max_doublings);
    if (!r.converged) {
      std::ostringstream msg;
      msg << "lambda_dissipation: radiative integral for mode " << j
          << " not converged to " << opts.quad_rel_tol << " (" << r.panels_used << " panels)";
      errors[sj] = msg.str();
      return;
    }
    rates.rad[j] = std::max(0.0, r.value);
  });
  for (const auto& e : errors)
    if (!e.empty()) throw QuadratureFailure(e);
  return rates;
}

AppendixCoefficients appendix_coefficients(const ModeSet& modes, const EnvironmentParams& env,
                                           const CouplingOptions& opts) {
  if (modes.empty()) throw NoGuidedModes("appendix_coefficients: empty mode set");
  const int n = modes.size();
  AppendixCoefficients out;
  out.Gamma_s = Eigen::MatrixXd::Zero(n, n);
  out.Gamma_1 = Eigen::MatrixXd::Zero(n, n);
  out.Lambda_s = Eigen::VectorXd::Zero(n);
  out.kappa = Eigen::VectorXd::Zero(n);
  if (env.sigma == 0.0) return out;

  const OverlapKernel kernel{env.ell_v, env.z_b};
  const double w4 = std::pow(modes.omega, 4);
  const double cw4 = std::pow(env.c_w, 4);
  const double base_pair = w4 * env.sigma * env.sigma / (2.0 * env.rho_w * env.rho_w * cw4);
  const double base_spec = 2.0 * base_pair;
  const double ell_h = env.ell_h;

  // Pairwise blocks; the horizontal x-integrals are elementary:
  //   int_0^inf e^{-x/lh} sin(D x) dx = lh^2 D / (1 + D^2 lh^2)
  //   int_0^inf e^{-x/lh} dx         = lh
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      const double pref = base_pair / (modes.beta[j] * modes.beta[l]);
      const double aa = modes.A[j] * modes.A[j] * modes.A[l] * modes.A[l] / 4.0;
      if (l != j) {
        const double d = modes.beta[l] - modes.beta[j];
        const double sine_x = ell_h * ell_h * d / (1.0 + d * d * ell_h * ell_h);
        out.Gamma_s(j, l) =
            pref * sine_x * aa * overlap_sine_combo(kernel, modes.k_wj[j], modes.k_wj[l]);
      }
      out.Gamma_1(j, l) =
          pref * ell_h * aa * overlap_square_combo(kernel, modes.k_wj[j], modes.k_wj[l]);
    }
  }
  for (int j = 0; j < n; ++j) {
    out.Gamma_s(j, j) = 0.0;
    out.Gamma_s(j, j) = -out.Gamma_s.row(j).sum();
  }

  // Spectral integrals over the radiating band (Lambda_s) and the evanescent
  // band (kappa), in the substituted variables u = sqrt(gamma), v = sqrt(-gamma).
  const double k_s = modes.k_s, k_w = modes.k_w;
  const auto rad_breaks = radiative_breakpoints(modes, ell_h, opts.quad_base_intervals);
  const double v_max = 20.0 / ell_h + 20.0 * modes.beta[0];
  std::vector<double> ev_breaks;
  for (int i = 0; i <= opts.quad_base_intervals; ++i)
    ev_breaks.push_back(v_max * std::pow(static_cast<double>(i) / opts.quad_base_intervals, 2));

  std::vector<std::string> errors(n);
  std::vector<std::string> tail_notes(n);
  parallel_for(n, [&](std::size_t sj) {
    const int j = static_cast<int>(sj);
    const double beta_j = modes.beta[j];
    const double aj2 = modes.A[j] * modes.A[j];

    auto lambda_s_integrand = [&](double u) {
      const ContinuousModeEval cm = continuous_mode(modes, u * u);
      const double k_wg = std::sqrt((k_w - u) * (k_w + u));
      const double d = u - beta_j;
      const double sine_x = ell_h * ell_h * d / (1.0 + d * d * ell_h * ell_h);
      return base_spec / beta_j * sine_x * aj2 * cm.A2 / 4.0 *
             overlap_sine_combo(kernel, modes.k_wj[j], k_wg);
    };
    AdaptiveResult rs = gauss_adaptive_breakpoints(lambda_s_integrand, rad_breaks,
                                                   opts.quad_rel_tol, opts.quad_max_doublings);
    if (!rs.converged) {
      errors[sj] = "appendix_coefficients: Lambda_s integral not converged for mode " +
                   std::to_string(j);
      return;
    }
    out.Lambda_s[j] = rs.value;

    //   int_0^inf e^{-x/lh} cos(beta x) e^{-v x} dx = (1/lh + v)/((1/lh + v)^2 + beta^2)
    auto kappa_integrand = [&](double v) {
      const ContinuousModeEval cm = continuous_mode(modes, -v * v);
      const double k_wg = std::sqrt(k_w * k_w + v * v);
      const double b = 1.0 / ell_h + v;
      const double cos_exp_x = b / (b * b + beta_j * beta_j);
      return base_spec / beta_j * cos_exp_x * aj2 * cm.A2 / 4.0 *
             overlap_sine_combo(kernel, modes.k_wj[j], k_wg);
    };
    AdaptiveResult rk = gauss_adaptive_breakpoints(kappa_integrand, ev_breaks,
                                                   opts.quad_rel_tol, opts.quad_max_doublings);
    if (!rk.converged) {
      errors[sj] = "appendix_coefficients: kappa integral not converged for mode " +
                   std::to_string(j);
      return;
    }
    out.kappa[j] = rk.value;
    // Integrand decays like v^-4; the truncated tail is bounded by f(v_max) v_max / 3.
    const double tail_bound = std::abs(kappa_integrand(v_max)) * v_max / 3.0;
    if (tail_bound > opts.quad_rel_tol * std::abs(rk.value)) {
      std::ostringstream msg;
      msg << "kappa_" << j << ": truncation tail bound " << tail_bound << " vs value "
          << rk.value;
      tail_notes[sj] = msg.str();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw QuadratureFailure(e);
  for (auto& note : tail_notes)
    if (!note.empty()) out.warnings.push_back(std::move(note));
  return out;
}

CouplingModel build_coupling(const ModeSet& modes, const EnvironmentParams& env,
                             const CouplingOptions& opts) {
  CouplingModel cm;
  cm.Gamma = gamma_coupling(modes, env);
  DissipationRates rates = lambda_dissipation(modes, env, opts);
  cm.Lambda_rad = std::move(rates.rad);
  cm.Lambda_sed = std::move(rates.sed);
  cm.Lambda = cm.Lambda_rad + cm.Lambda_sed;
  cm.A = cm.Gamma;
  cm.A.diagonal() -= cm.Lambda;
  if (opts.with_appendix) {
    AppendixCoefficients ac = appendix_coefficients(modes, env, opts);
    cm.Gamma_s = std::move(ac.Gamma_s);
    cm.Gamma_1 = std::move(ac.Gamma_1);
    cm.Lambda_s = std::move(ac.Lambda_s);
    cm.kappa = std::move(ac.kappa);
    cm.has_appendix = true;
    for (auto& w : ac.warnings) cm.warnings.push_back(std::move(w));
  }
  return cm;
}

double alpha_to_nu(double alpha_db_per_wavelength) {
  if (alpha_db_per_wavelength < 0.0)
    throw std::invalid_argument("alpha_to_nu: alpha must be >= 0");
  return alpha_db_per_wavelength * std::numbers::ln10 / (20.0 * std::numbers::pi);
}

double nu_to_alpha(double nu_s) {
  if (nu_s < 0.0) throw std::invalid_argument("nu_to_alpha: nu_s must be >= 0");
  return nu_s * 20.0 * std::numbers::pi / std::numbers::ln10;
}

}  // namespace swmode
