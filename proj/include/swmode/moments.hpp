#pragma once

#include <Eigen/Dense>
#include <vector>

#include "swmode/coupling.hpp"
#include "swmode/modes.hpp"

namespace swmode {

/// Row-major index of (j, l), j <= l, into the packed upper triangle.
inline int s_index(int n, int j, int l) { return j * n - j * (j - 1) / 2 + (l - j); }
inline int s_dim(int n) { return n * (n + 1) / 2; }

Eigen::VectorXd pack_upper(const Eigen::MatrixXd& S);
Eigen::MatrixXd unpack_upper(const Eigen::VectorXd& s, int n);

/// S_jl(0) = (1 + 1_{j != l}) Q0_j Q0_l, packed.
Eigen::VectorXd initial_second_moments(const Eigen::VectorXd& Q0);

/// First- and symmetrized second-moment snapshot at range x.
struct MomentState {
  double x = 0.0;
  Eigen::VectorXd Q;        ///< mean mode powers, >= 0
  Eigen::VectorXd S_upper;  ///< packed S_jl, j <= l
  int n_modes() const { return static_cast<int>(Q.size()); }
};

/// Cached eigendecomposition of the propagation matrix A = Gamma - diag(Lambda)
/// (symmetric); Q(x) = exp(A x) Q0 for any x, negatives clipped at the
/// -1e-12 numerical floor.
class QPropagator {
 public:
  explicit QPropagator(const CouplingModel& coupling);
  Eigen::VectorXd at(const Eigen::VectorXd& Q0, double x) const;
  const Eigen::MatrixXd& eigenvectors() const { return eig_.eigenvectors(); }
  const Eigen::VectorXd& eigenvalues() const { return eig_.eigenvalues(); }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
};

Eigen::VectorXd propagate_Q(const CouplingModel& coupling, const Eigen::VectorXd& Q0,
                            double x);

struct SPropagateOptions {
  enum class Method { Auto, Dense, Krylov };
  Method method = Method::Auto;
  double rel_tol = 1e-9;
  int max_matvecs = 40000;
  int m_max = 140;  ///< Krylov basis per restart (memory: dim * m_max doubles)
  int k_keep = 50;
};

/// Packed S(x) solving dS/dx = (Theta - Psi) S from S(0) built from Q0.
/// Dense eigendecomposition path for small N; matrix-free symmetric-Lanczos
/// path otherwise (the two agree to 1e-8 where both apply).
Eigen::VectorXd propagate_S(const CouplingModel& coupling, const Eigen::VectorXd& Q0,
                            double x, const SPropagateOptions& opts = {});

MomentState propagate_moments(const CouplingModel& coupling, const Eigen::VectorXd& Q0,
                              double x, const SPropagateOptions& opts = {});

/// Dense matrix of the second-moment generator Theta - Psi on the packed
/// upper triangle (symmetric; feasible for small N).
Eigen::MatrixXd dense_s_operator(const Eigen::MatrixXd& Gamma, const Eigen::VectorXd& Lambda);
Eigen::MatrixXd dense_s_operator(const CouplingModel& coupling);

/// Matrix-free application of Theta - Psi to a packed vector, via
///   Theta S = Gamma S + S Gamma + Gamma o (S_jj + S_ll - 2 S_jl).
void apply_s_operator(const Eigen::MatrixXd& Gamma, const Eigen::VectorXd& Lambda,
                      const Eigen::VectorXd& s, Eigen::VectorXd& out);

/// Leading eigen-structure of both moment systems.
struct SpectralSummary {
  double lambda = 0.0;      ///< decay rate of the first moment (>= 0)
  Eigen::VectorXd V;        ///< first eigenvector, nonnegative entries, unit norm
  double c_V = 0.0;         ///< projection of Q0 on V
  double gap_V = 0.0;       ///< distance to the second eigenvalue
  bool degenerate_V = false;
  double mu = 0.0;          ///< decay rate of the second moment
  Eigen::VectorXd W_upper;  ///< first eigenvector of Theta - Psi, packed
  double c_W = 0.0;
  double gap_W = 0.0;
  bool degenerate_W = false;
};

SpectralSummary spectral_summary(const CouplingModel& coupling, const Eigen::VectorXd& Q0);

/// Weak-dissipation expansion coefficients: Lambda = delta * Lambda1,
/// lambda = delta l1 + delta^2 l2 + O(delta^3), mu = delta m1 + delta^2 m2 + ...
/// Throws SingularSystem when the coupling graph of Gamma is not connected.
struct WeakDissipationExpansion {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
};

WeakDissipationExpansion weak_dissipation_expansion(const Eigen::MatrixXd& Gamma,
                                                    const Eigen::VectorXd& Lambda1);

/// Pointwise intensity moments at depth z:
///   m2 = sum_j phi_j(z)^2 / beta_j Q_j(x)
///   m4 = sum_{j,l} phi_j(z)^2 phi_l(z)^2 / (beta_j beta_l) S~_jl(x)
/// with S~ the symmetric extension of the packed moments.
struct IntensityMoments {
  double m2 = 0.0;
  double m4 = 0.0;
};

IntensityMoments intensity_moments(const ModeSet& modes, const MomentState& state, double z);

/// Depth-averaged scintillation index (m4 - m2^2) / m2^2 over the given depths.
double scintillation_index(const ModeSet& modes, const MomentState& state,
                           const std::vector<double>& depths);

}  // namespace swmode
