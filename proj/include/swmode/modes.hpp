#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "swmode/environment.hpp"

namespace swmode {

/// Evaluator data for one continuous-spectrum eigenfunction phi_gamma,
/// gamma < k_s^2.
struct ContinuousModeEval {
  double gamma = 0.0;  ///< spectral parameter (1/m^2)
  double eta = 0.0;    ///< z_b * sqrt(k_w^2 - gamma)
  double xi = 0.0;     ///< z_b * sqrt(k_s^2 - gamma)
  double A2 = 0.0;     ///< squared normalization
};

/// Discrete guided-mode spectrum of the waveguide at one angular frequency.
/// Immutable after construction; all evaluators are pure functions of it.
/// Mode arrays are indexed 0..N-1 with sigma increasing and beta decreasing.
struct ModeSet {
  double omega = 0.0;
  double k_w = 0.0;
  double k_s = 0.0;
  double z_b = 0.0;
  double rho_w = 0.0;
  double rho_s = 0.0;
  Eigen::VectorXd sigma;  ///< transverse phase parameters, increasing
  Eigen::VectorXd beta;   ///< modal wavenumbers (1/m), decreasing
  Eigen::VectorXd zeta;   ///< sediment decay parameters
  Eigen::VectorXd A;      ///< normalization amplitudes
  Eigen::VectorXd k_wj;   ///< sqrt(k_w^2 - beta_j^2) = sigma_j / z_b
  int dropped_near_cutoff = 0;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(sigma.size()); }
  bool empty() const { return sigma.size() == 0; }
};

struct ModeSolveOptions {
  double residual_tol = 1e-12;   ///< scaled dispersion residual after polish
  double zeta_cutoff = 1e-8;     ///< drop modes with zeta below this
  int max_polish_iters = 200;
};

/// Upper end of the sigma interval that can hold guided modes:
/// z_b * sqrt(k_w^2 - k_s^2).
double sigma_interval_end(const EnvironmentParams& env, double omega);

/// Scaled dispersion function: zero exactly at the guided-mode sigma values.
/// F(sigma) = [rho_s*sigma*cos(sigma) + rho_w*zeta(sigma)*sin(sigma)] / scale
/// with zeta(sigma) = sqrt(sigma_max^2 - sigma^2); bounded on (0, sigma_max),
/// unlike the tan form whose residual diverges toward cutoff.
double dispersion_residual(const EnvironmentParams& env, double sigma_max, double sigma);

/// Solve the guided-mode eigenproblem at angular frequency omega.
/// Returns an empty ModeSet (N = 0) when no root exists; throws NonConvergence
/// if a bracketed root fails to polish.
ModeSet solve_modes(const EnvironmentParams& env, double omega,
                    const ModeSolveOptions& opts = {});

/// Guided eigenfunction phi_j at depth z >= 0 (j is 0-based; throws
/// std::out_of_range).
double eval_phi_j(const ModeSet& modes, int j, double z);

/// Transverse parameters and normalization of phi_gamma; throws
/// std::domain_error when gamma >= k_s^2.
ContinuousModeEval continuous_mode(const ModeSet& modes, double gamma);

/// Continuous-spectrum eigenfunction phi_gamma at depth z >= 0.
double eval_phi_gamma(const ModeSet& modes, double gamma, double z);
double eval_phi_gamma(const ModeSet& modes, const ContinuousModeEval& cm, double z);

/// Initial mean mode powers Q_j(0) = |a_{j,0}|^2 = (beta_j/4) phi_j(z0)^2.
Eigen::VectorXd source_amplitudes(const ModeSet& modes, const SourceSpec& src);

}  // namespace swmode
