#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "swmode/environment.hpp"
#include "swmode/modes.hpp"
#include "swmode/overlap.hpp"

namespace swmode {

/// Effective coefficients of the Markovian mode-power dynamics.
/// Gamma drives power exchange between guided modes; Lambda is the effective
/// dissipation (radiative leakage + sediment absorption). The "appendix"
/// block holds the phase-dynamics coefficients of the full complex-amplitude
/// generator (sine spectra, zero-frequency cross spectra, dispersion rates,
/// evanescent phase rates); powers never depend on them.
struct CouplingModel {
  Eigen::MatrixXd Gamma;       ///< N x N symmetric, off-diagonal >= 0, zero row sums (1/m)
  Eigen::VectorXd Lambda_rad;  ///< leakage into radiating modes (1/m)
  Eigen::VectorXd Lambda_sed;  ///< sediment absorption (1/m)
  Eigen::VectorXd Lambda;      ///< Lambda_rad + Lambda_sed
  Eigen::MatrixXd A;           ///< propagation matrix Gamma - diag(Lambda)

  bool has_appendix = false;
  Eigen::MatrixXd Gamma_s;     ///< sine-transform spectra, Gamma_s[j][j] = -row sum
  Eigen::MatrixXd Gamma_1;     ///< zero-frequency cross spectra (all j, l)
  Eigen::VectorXd Lambda_s;    ///< dispersion rates
  Eigen::VectorXd kappa;       ///< evanescent-induced phase rates

  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(Gamma.rows()); }
};

struct CouplingOptions {
  double quad_rel_tol = 1e-6;  ///< relative tolerance of the spectral integrals
  int quad_base_intervals = 16;
  int quad_max_doublings = 9;
  bool with_appendix = false;
};

/// Guided-guided power-exchange matrix Gamma (diagonal = negative row sum).
Eigen::MatrixXd gamma_coupling(const ModeSet& modes, const EnvironmentParams& env);

struct DissipationRates {
  Eigen::VectorXd rad;
  Eigen::VectorXd sed;
};

/// Effective dissipation rates: radiative part from the coupling to the
/// continuous spectrum (adaptive quadrature; throws QuadratureFailure when it
/// cannot reach tolerance) and sediment part in closed form.
DissipationRates lambda_dissipation(const ModeSet& modes, const EnvironmentParams& env,
                                    const CouplingOptions& opts = {});

struct AppendixCoefficients {
  Eigen::MatrixXd Gamma_s;
  Eigen::MatrixXd Gamma_1;
  Eigen::VectorXd Lambda_s;
  Eigen::VectorXd kappa;
  std::vector<std::string> warnings;
};

/// Phase-dynamics coefficients of the complex-amplitude generator.
AppendixCoefficients appendix_coefficients(const ModeSet& modes, const EnvironmentParams& env,
                                           const CouplingOptions& opts = {});

/// Assemble the full coupling model for one frequency.
CouplingModel build_coupling(const ModeSet& modes, const EnvironmentParams& env,
                             const CouplingOptions& opts = {});

/// Sediment attenuation conversion: alpha in dB per wavelength to the
/// dimensionless nu_s, via the first-order complex-wavenumber expansion
/// k_s sqrt(1 + i nu_s) ~ k_s (1 + i nu_s / 2).
double alpha_to_nu(double alpha_db_per_wavelength);
double nu_to_alpha(double nu_s);

}  // namespace swmode
