#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include "swmode/gauss.hpp"
#include "swmode/pipeline.hpp"

namespace swmode::oracle {

namespace {
constexpr double kPi = std::numbers::pi;
}

double exp_kernel_double_integral(const Fn1& f, const Fn1& g, double ell, double L,
                                  int n_panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = L / n_panels;
  const double decay = std::exp(-h / ell);

  // One triangle: T(f,g) = int_0^L f(z) int_0^z exp(-(z-z')/ell) g(z') dz' dz.
  auto triangle = [&](const Fn1& fa, const Fn1& fb) {
    double total = 0.0;
    double wsum = 0.0;  // sum_{q<p} v_q exp(-(a_p - a_{q+1})/ell)
    for (int p = 0; p < n_panels; ++p) {
      const double a = p * h, b = a + h;
      // u_p = int_p fa(z) exp(-(z-a)/ell) dz, v_p = int_p fb(z) exp(-(b-z)/ell) dz
      double u = 0.0, v = 0.0, diag = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double z = 0.5 * (a + b) + 0.5 * h * rule.nodes[i];
        const double w = 0.5 * h * rule.weights[i];
        u += w * fa(z) * std::exp(-(z - a) / ell);
        v += w * fb(z) * std::exp(-(b - z) / ell);
        // Diagonal panel: z' = a + (z - a) t maps the triangle to a square.
        double inner = 0.0;
        for (std::size_t t = 0; t < rule.nodes.size(); ++t) {
          const double tt = 0.5 + 0.5 * rule.nodes[t];
          const double zp = a + (z - a) * tt;
          inner += 0.5 * rule.weights[t] * fb(zp) * std::exp(-(z - zp) / ell);
        }
        diag += w * fa(z) * (z - a) * inner;
      }
      total += u * wsum + diag;
      wsum = decay * wsum + v;
    }
    return total;
  };
  return 0.5 * (triangle(f, g) + triangle(g, f));
}

double exp_kernel_adaptive(const Fn1& f, const Fn1& g, double ell, double L, double max_freq,
                           double rel_tol, bool* converged) {
  int panels = std::max({8, static_cast<int>(std::ceil(max_freq * L / kPi)),
                         static_cast<int>(std::ceil(2.0 * L / ell))});
  double prev = exp_kernel_double_integral(f, g, ell, L, panels);
  for (int it = 0; it < 8; ++it) {
    panels *= 2;
    const double cur = exp_kernel_double_integral(f, g, ell, L, panels);
    const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
    if (std::abs(cur - prev) <= rel_tol * scale) {
      if (converged) *converged = true;
      return cur;
    }
    prev = cur;
  }
  if (converged) *converged = false;
  return prev;
}

int dense_root_count(const EnvironmentParams& env, double omega, int n_grid) {
  const double sigma_max = sigma_interval_end(env, omega);
  int count = 0;
  double prev = dispersion_residual(env, sigma_max, sigma_max / (n_grid + 1));
  for (int i = 2; i <= n_grid; ++i) {
    const double s = sigma_max * i / (n_grid + 1);
    const double cur = dispersion_residual(env, sigma_max, s);
    if (prev * cur < 0.0) ++count;
    if (cur != 0.0) prev = cur;
  }
  return count;
}

double mode_inner_product(const ModeSet& modes, int j, int l) {
  const double k_max = std::max(modes.k_wj[j], modes.k_wj[l]);
  const int panels = std::max(16, static_cast<int>(std::ceil(2.0 * k_max * modes.z_b)));
  auto f = [&](double z) {
    return eval_phi_j(modes, j, z) * eval_phi_j(modes, l, z) / modes.rho_w;
  };
  const double water = gauss_composite(f, 0.0, modes.z_b, panels, 16);
  const double tail = modes.A[j] * modes.A[l] * std::sin(modes.sigma[j]) *
                      std::sin(modes.sigma[l]) * modes.z_b /
                      (modes.rho_s * (modes.zeta[j] + modes.zeta[l]));
  return water + tail;
}

double gamma_coupling_quadrature(const ModeSet& modes, const EnvironmentParams& env, int j,
                                 int l, double rel_tol) {
  const double w4 = std::pow(modes.omega, 4);
  const double pref = w4 * env.sigma * env.sigma /
                      (2.0 * modes.beta[j] * modes.beta[l] * env.rho_w * env.rho_w *
                       std::pow(env.c_w, 4));
  const double d = modes.beta[l] - modes.beta[j];
  const double lorentz = env.ell_h / (1.0 + d * d * env.ell_h * env.ell_h);
  auto f = [&](double z) { return eval_phi_j(modes, j, z) * eval_phi_j(modes, l, z); };
  const double vert = exp_kernel_adaptive(f, f, env.ell_v, env.z_b,
                                          modes.k_wj[j] + modes.k_wj[l], rel_tol);
  return pref * lorentz * vert;
}

double lambda_rad_quadrature(const ModeSet& modes, const EnvironmentParams& env, int j,
                             double rel_tol) {
  const double w4 = std::pow(modes.omega, 4);
  const double base =
      w4 * env.sigma * env.sigma / (env.rho_w * env.rho_w * std::pow(env.c_w, 4));
  auto integrand = [&](double u) {
    const double gamma = u * u;
    const ContinuousModeEval cm = continuous_mode(modes, gamma);
    auto f = [&](double z) { return eval_phi_j(modes, j, z) * eval_phi_gamma(modes, cm, z); };
    const double vert = exp_kernel_adaptive(f, f, env.ell_v, env.z_b,
                                            modes.k_wj[j] + cm.eta / modes.z_b, rel_tol * 0.1);
    const double dd = u - modes.beta[j];
    const double lorentz = env.ell_h / (1.0 + dd * dd * env.ell_h * env.ell_h);
    return base / modes.beta[j] * lorentz * vert;
  };
  std::vector<double> breaks;
  for (int i = 0; i <= 12; ++i) breaks.push_back(modes.k_s * i / 12.0);
  AdaptiveResult r = gauss_adaptive_breakpoints(integrand, breaks, rel_tol, 6, 16);
  return r.value;
}

double gamma_s_quadrature(const ModeSet& modes, const EnvironmentParams& env, int j, int l,
                          double rel_tol) {
  const double w4 = std::pow(modes.omega, 4);
  const double pref = w4 * env.sigma * env.sigma /
                      (2.0 * modes.beta[j] * modes.beta[l] * env.rho_w * env.rho_w *
                       std::pow(env.c_w, 4));
  const double d = modes.beta[l] - modes.beta[j];
  const double sine_x = x_integral_quadrature(1, env.ell_h, d);
  auto f = [&](double z) { return eval_phi_j(modes, j, z) * eval_phi_j(modes, l, z); };
  const double vert = exp_kernel_adaptive(f, f, env.ell_v, env.z_b,
                                          modes.k_wj[j] + modes.k_wj[l], rel_tol);
  return pref * sine_x * vert;
}

double gamma_1_quadrature(const ModeSet& modes, const EnvironmentParams& env, int j, int l,
                          double rel_tol) {
  const double w4 = std::pow(modes.omega, 4);
  const double pref = w4 * env.sigma * env.sigma /
                      (2.0 * modes.beta[j] * modes.beta[l] * env.rho_w * env.rho_w *
                       std::pow(env.c_w, 4));
  auto fj = [&](double z) {
    const double p = eval_phi_j(modes, j, z);
    return p * p;
  };
  auto fl = [&](double z) {
    const double p = eval_phi_j(modes, l, z);
    return p * p;
  };
  const double vert = exp_kernel_adaptive(fj, fl, env.ell_v, env.z_b,
                                          2.0 * std::max(modes.k_wj[j], modes.k_wj[l]),
                                          rel_tol);
  return pref * env.ell_h * vert;
}

double x_integral_quadrature(int kind, double ell_h, double d, double v) {
  const double rate = 1.0 / ell_h + v;
  const double x_max = 40.0 / rate;
  auto f = [&](double x) {
    const double env_factor = std::exp(-x / ell_h);
    switch (kind) {
      case 0: return env_factor * std::cos(d * x);
      case 1: return env_factor * std::sin(d * x);
      default: return env_factor * std::cos(d * x) * std::exp(-v * x);
    }
  };
  const int panels =
      std::max(64, static_cast<int>(std::ceil(std::abs(d) * x_max / kPi)) * 2);
  return gauss_composite(f, 0.0, x_max, panels, 16);
}

double correlation_quadrature(const ModeSet& modes, const Eigen::VectorXd& Qx, double z_m,
                              double z_M, double y) {
  auto f = [&](double z) {
    double acc = 0.0;
    for (int j = 0; j < modes.size(); ++j)
      acc += Qx[j] / modes.beta[j] * eval_phi_j(modes, j, z) * eval_phi_j(modes, j, z + y);
    return acc;
  };
  const double k_max = modes.k_wj[modes.size() - 1];
  const int panels = std::max(16, static_cast<int>(std::ceil(2.0 * k_max * (z_M - z_m))));
  return gauss_composite(f, z_m, z_M - y, panels, 16) / (z_M - z_m - y);
}

double hann_transfer(int n_window, double df_over_fs) {
  const std::vector<double> w = hann_window(n_window);
  std::complex<double> acc(0.0, 0.0);
  for (int i = 0; i < n_window; ++i) {
    const double phase = -2.0 * kPi * df_over_fs * i;
    acc += w[i] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return std::abs(acc);
}

std::pair<double, double> phase_average_intensity(const Eigen::VectorXd& powers,
                                                  const Eigen::VectorXd& c) {
  const int n = static_cast<int>(powers.size());
  if (n > 3) throw std::invalid_argument("phase_average_intensity: N <= 3 only");
  const int q = 32;  // trapezoid points per phase; exact for these trig polynomials
  double m1 = 0.0, m2 = 0.0;
  long count = 0;
  std::vector<int> idx(n, 0);
  // One phase can be fixed to zero by rotation invariance.
  const int dims = n - 1;
  std::vector<int> grid(std::max(dims, 0), 0);
  for (;;) {
    std::complex<double> amp(0.0, 0.0);
    amp += std::sqrt(powers[0]) * c[0];
    for (int j = 1; j < n; ++j) {
      const double theta = 2.0 * kPi * grid[j - 1] / q;
      amp += std::sqrt(powers[j]) * c[j] *
             std::complex<double>(std::cos(theta), std::sin(theta));
    }
    const double intensity = std::norm(amp);
    m1 += intensity;
    m2 += intensity * intensity;
    ++count;
    int d = 0;
    while (d < dims && ++grid[d] == q) grid[d++] = 0;
    if (d == dims) break;
  }
  return {m1 / count, m2 / count};
}

RandomCase random_environment(std::mt19937_64& rng) {
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  };
  RandomCase rc;
  rc.env.c_w = uniform(1440.0, 1560.0);
  rc.env.c_s = rc.env.c_w + uniform(40.0, 250.0);
  rc.env.rho_w = uniform(1000.0, 1035.0);
  rc.env.rho_s = uniform(1300.0, 2100.0);
  rc.env.z_b = uniform(30.0, 180.0);
  rc.env.nu_s = alpha_to_nu(uniform(0.1, 2.0));
  rc.env.sigma = uniform(5e-4, 5e-3);
  rc.env.ell_v = uniform(8.0, 60.0);
  rc.env.ell_h = uniform(40.0, 300.0);
  rc.freq_hz = uniform(150.0, 4000.0);
  return rc;
}

}  // namespace swmode::oracle
