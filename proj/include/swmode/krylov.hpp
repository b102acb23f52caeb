#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace swmode {

/// y = B x for a symmetric linear operator B given implicitly.
using MatVecFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct SpectralInterval {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double width() const { return theta_max - theta_min; }
};

/// Rough outer bounds on the spectrum of a symmetric operator from a short
/// Lanczos run (extreme Ritz values widened by the final residual).
SpectralInterval estimate_spectrum(const MatVecFn& apply, int dim, int iters = 40,
                                   std::uint64_t seed = 0x5eed5eedULL);

/// exp(x B) v for symmetric B by substepped Lanczos with full
/// reorthogonalization; suited to moderate x * spectral-width.
/// Throws IntegratorFailure on step-size underflow or matvec exhaustion.
Eigen::VectorXd expm_multiply_substep(const MatVecFn& apply, const Eigen::VectorXd& v,
                                      double x, double rel_tol, int m = 60,
                                      int max_matvecs = 400000);

struct SpectralOptions {
  int m_max = 160;        ///< Lanczos basis size per restart cycle
  int k_keep = 60;        ///< Ritz pairs carried across restarts
  int max_matvecs = 4000;
  double rel_tol = 1e-9;
};

/// exp(x B) v for symmetric B when the propagator is strongly smoothing
/// (x * spectral-width large): thick-restart Lanczos resolves every Ritz pair
/// within ~margin/x of the top of the spectrum and the answer is the spectral
/// projection; everything below the cut is exponentially negligible and its
/// contribution is bounded explicitly. Throws IntegratorFailure when the top
/// sliver cannot be certified within the matvec budget.
Eigen::VectorXd expm_multiply_spectral(const MatVecFn& apply, const Eigen::VectorXd& v,
                                       double x, const SpectralOptions& opts);

struct TopEigenPair {
  double theta = 0.0;
  Eigen::VectorXd w;
  double resid = 0.0;
  double gap = 0.0;  ///< distance to the next Ritz value
};

/// Largest eigenpair of a symmetric operator (thick-restart Lanczos).
TopEigenPair top_eigenpair(const MatVecFn& apply, int dim, const Eigen::VectorXd& start,
                           double resid_tol, int max_matvecs = 4000);

}  // namespace swmode
