#include "swmode/modes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "swmode/errors.hpp"

namespace swmode {

namespace {

constexpr double kPi = std::numbers::pi;

// Unscaled dispersion function. Zero exactly where the guided-mode matching
// condition sigma*cos(sigma)/rho_w = -zeta*sin(sigma)/rho_s holds, multiplied
// through by rho_w*rho_s so it stays bounded on the whole interval.
double dispersion_f(double sigma, double sigma_max, double rho_w, double rho_s) {
  const double zeta = std::sqrt(std::max(0.0, (sigma_max - sigma) * (sigma_max + sigma)));
  return rho_s * sigma * std::cos(sigma) + rho_w * zeta * std::sin(sigma);
}

double dispersion_df(double sigma, double sigma_max, double rho_w, double rho_s) {
  const double zeta2 = std::max(0.0, (sigma_max - sigma) * (sigma_max + sigma));
  const double zeta = std::sqrt(zeta2);
  const double dzeta = zeta > 0.0 ? -sigma / zeta : 0.0;
  return rho_s * (std::cos(sigma) - sigma * std::sin(sigma)) +
         rho_w * (dzeta * std::sin(sigma) + zeta * std::cos(sigma));
}

}  // namespace

double sigma_interval_end(const EnvironmentParams& env, double omega) {
  const double k_w = omega / env.c_w;
  const double k_s = omega / env.c_s;
  return env.z_b * std::sqrt((k_w - k_s) * (k_w + k_s));
}

double dispersion_residual(const EnvironmentParams& env, double sigma_max, double sigma) {
  return dispersion_f(sigma, sigma_max, env.rho_w, env.rho_s) /
         (sigma_max * (env.rho_w + env.rho_s));
}

ModeSet solve_modes(const EnvironmentParams& env, double omega, const ModeSolveOptions& opts) {
  env.validate();
  if (!(omega > 0.0)) throw std::invalid_argument("solve_modes: omega must be positive");

  ModeSet ms;
  ms.omega = omega;
  ms.k_w = omega / env.c_w;
  ms.k_s = omega / env.c_s;
  ms.z_b = env.z_b;
  ms.rho_w = env.rho_w;
  ms.rho_s = env.rho_s;

  const double sigma_max = sigma_interval_end(env, omega);
  const double rho_w = env.rho_w, rho_s = env.rho_s;
  auto f = [&](double s) { return dispersion_f(s, sigma_max, rho_w, rho_s); };

  std::vector<double> roots;
  // One root per tan branch ((m-1/2)pi, (m+1/2)pi): the right-hand side of the
  // dispersion relation is negative and decreasing while tan sweeps the branch,
  // so the difference is strictly increasing and crosses zero once.
  const double nudge = 1e-13 * std::max(1.0, sigma_max);
  for (int m = 1;; ++m) {
    const double left = (m - 0.5) * kPi;
    if (left >= sigma_max) break;
    double a = left + nudge;
    double b = std::min((m + 0.5) * kPi, sigma_max) - nudge;
    if (a >= b) break;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if (fa * fb > 0.0) {
      // Root squeezed against the cutoff endpoint: zeta ~ 0, mode is dropped anyway.
      std::ostringstream msg;
      msg << "branch " << m << " root within " << nudge << " of cutoff; skipped";
      ms.warnings.push_back(msg.str());
      ms.dropped_near_cutoff += 1;
      continue;
    }
    // Bisection to a tight bracket, then Newton polish restricted to it.
    for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
      double mid = 0.5 * (a + b);
      double fm = f(mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if (fa * fm < 0.0) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < opts.max_polish_iters; ++it) {
      double fx = f(x);
      double dfx = dispersion_df(x, sigma_max, rho_w, rho_s);
      if (dfx == 0.0) break;
      double step = fx / dfx;
      double xn = x - step;
      if (!(xn > a) || !(xn < b)) break;  // keep the bracket guarantee
      x = xn;
      if (std::abs(step) < 1e-16 * x) break;
    }
    const double res = dispersion_f(x, sigma_max, rho_w, rho_s) / (sigma_max * (rho_w + rho_s));
    if (std::abs(res) > opts.residual_tol) {
      std::ostringstream msg;
      msg << "solve_modes: root polish failed on bracket [" << a << ", " << b
          << "], scaled residual " << res;
      throw NonConvergence(msg.str());
    }
    roots.push_back(x);
  }

  // Assemble mode data, dropping numerically meaningless near-cutoff modes
  // (A_j^2 diverges as zeta_j -> 0).
  std::vector<double> sig, bet, zet, amp;
  for (double s : roots) {
    const double zeta = std::sqrt(std::max(0.0, (sigma_max - s) * (sigma_max + s)));
    if (zeta <= opts.zeta_cutoff) {
      std::ostringstream msg;
      msg << "mode at sigma=" << s << " dropped: zeta=" << zeta << " below cutoff";
      ms.warnings.push_back(msg.str());
      ms.dropped_near_cutoff += 1;
      continue;
    }
    const double beta2 = ms.k_w * ms.k_w - (s / env.z_b) * (s / env.z_b);
    const double beta = std::sqrt(beta2);
    const double s2 = std::sin(2.0 * s);
    const double ss = std::sin(s);
    const double denom = (1.0 - s2 / (2.0 * s)) / rho_w + ss * ss / (zeta * rho_s);
    const double A2 = (2.0 / env.z_b) / denom;
    sig.push_back(s);
    bet.push_back(beta);
    zet.push_back(zeta);
    amp.push_back(std::sqrt(A2));
  }

  const int n = static_cast<int>(sig.size());
  ms.sigma = Eigen::Map<Eigen::VectorXd>(sig.data(), n);
  ms.beta = Eigen::Map<Eigen::VectorXd>(bet.data(), n);
  ms.zeta = Eigen::Map<Eigen::VectorXd>(zet.data(), n);
  ms.A = Eigen::Map<Eigen::VectorXd>(amp.data(), n);
  ms.k_wj = ms.sigma / env.z_b;
  return ms;
}

double eval_phi_j(const ModeSet& modes, int j, double z) {
  if (j < 0 || j >= modes.size()) throw std::out_of_range("eval_phi_j: mode index out of range");
  if (z < 0.0) throw std::invalid_argument("eval_phi_j: z must be >= 0");
  const double s = modes.sigma[j];
  if (z <= modes.z_b) return modes.A[j] * std::sin(s * z / modes.z_b);
  return modes.A[j] * std::sin(s) * std::exp(-modes.zeta[j] * (z - modes.z_b) / modes.z_b);
}

ContinuousModeEval continuous_mode(const ModeSet& modes, double gamma) {
  if (!(gamma < modes.k_s * modes.k_s))
    throw std::domain_error("continuous_mode: gamma must be < k_s^2");
  ContinuousModeEval cm;
  cm.gamma = gamma;
  cm.eta = modes.z_b * std::sqrt(modes.k_w * modes.k_w - gamma);
  cm.xi = modes.z_b * std::sqrt(modes.k_s * modes.k_s - gamma);
  const double r = modes.rho_s / modes.rho_w;
  const double se = std::sin(cm.eta), ce = std::cos(cm.eta);
  const double denom = cm.xi * cm.xi * se * se + r * r * cm.eta * cm.eta * ce * ce;
  cm.A2 = cm.xi * modes.rho_s * modes.z_b / (std::numbers::pi * denom);
  return cm;
}

double eval_phi_gamma(const ModeSet& modes, const ContinuousModeEval& cm, double z) {
  if (z < 0.0) throw std::invalid_argument("eval_phi_gamma: z must be >= 0");
  const double A = std::sqrt(cm.A2);
  if (z <= modes.z_b) return A * std::sin(cm.eta * z / modes.z_b);
  const double u = (z - modes.z_b) / modes.z_b;
  const double r = modes.rho_s / modes.rho_w;
  return A * (std::sin(cm.eta) * std::cos(cm.xi * u) +
              r * (cm.eta / cm.xi) * std::cos(cm.eta) * std::sin(cm.xi * u));
}

double eval_phi_gamma(const ModeSet& modes, double gamma, double z) {
  return eval_phi_gamma(modes, continuous_mode(modes, gamma), z);
}

Eigen::VectorXd source_amplitudes(const ModeSet& modes, const SourceSpec& src) {
  src.validate(modes.z_b);
  if (modes.empty())
    throw NoGuidedModes("source_amplitudes: no guided modes at this frequency");
  Eigen::VectorXd q0(modes.size());
  for (int j = 0; j < modes.size(); ++j) {
    const double phi = eval_phi_j(modes, j, src.z0);
    q0[j] = 0.25 * modes.beta[j] * phi * phi;
  }
  return q0;
}

}  // namespace swmode
