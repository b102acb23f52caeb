#include "swmode/moments.hpp"

#include <cmath>
#include <queue>

#include "swmode/errors.hpp"
#include "swmode/krylov.hpp"

namespace swmode {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd pack_upper(const MatrixXd& S) {
  const int n = static_cast<int>(S.rows());
  VectorXd s(s_dim(n));
  for (int j = 0; j < n; ++j)
    for (int l = j; l < n; ++l) s[s_index(n, j, l)] = S(j, l);
  return s;
}

MatrixXd unpack_upper(const VectorXd& s, int n) {
  MatrixXd S(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = j; l < n; ++l) {
      const double v = s[s_index(n, j, l)];
      S(j, l) = v;
      S(l, j) = v;
    }
  return S;
}

VectorXd initial_second_moments(const VectorXd& Q0) {
  const int n = static_cast<int>(Q0.size());
  VectorXd s(s_dim(n));
  for (int j = 0; j < n; ++j)
    for (int l = j; l < n; ++l)
      s[s_index(n, j, l)] = (j == l ? 1.0 : 2.0) * Q0[j] * Q0[l];
  return s;
}

QPropagator::QPropagator(const CouplingModel& coupling) : eig_(coupling.A) {}

VectorXd QPropagator::at(const VectorXd& Q0, double x) const {
  if (Q0.size() != eig_.eigenvalues().size())
    throw DimensionMismatch("propagate_Q: Q0 size does not match the coupling model");
  if (x < 0.0) throw std::invalid_argument("propagate_Q: x must be >= 0");
  VectorXd coeffs = eig_.eigenvectors().transpose() * Q0;
  coeffs.array() *= (eig_.eigenvalues().array() * x).exp();
  VectorXd q = eig_.eigenvectors() * coeffs;
  return q.cwiseMax(0.0);  // exp(Ax) is entrywise nonnegative; clip roundoff
}

VectorXd propagate_Q(const CouplingModel& coupling, const VectorXd& Q0, double x) {
  return QPropagator(coupling).at(Q0, x);
}

MatrixXd dense_s_operator(const MatrixXd& Gamma, const VectorXd& Lambda) {
  const int n = static_cast<int>(Gamma.rows());
  const int m = s_dim(n);
  MatrixXd B = MatrixXd::Zero(m, m);
  auto idx = [&](int a, int b) { return a <= b ? s_index(n, a, b) : s_index(n, b, a); };
  for (int j = 0; j < n; ++j) {
    for (int l = j; l < n; ++l) {
      const int p = s_index(n, j, l);
      B(p, p) -= Lambda[j] + Lambda[l];
      for (int nn = 0; nn < n; ++nn) {
        if (nn == j || nn == l) continue;
        B(p, idx(j, nn)) += Gamma(l, nn);
        B(p, p) -= Gamma(l, nn);
        B(p, idx(nn, l)) += Gamma(j, nn);
        B(p, p) -= Gamma(j, nn);
      }
      if (j != l) {
        B(p, idx(j, j)) += 2.0 * Gamma(j, l);
        B(p, idx(l, l)) += 2.0 * Gamma(j, l);
        B(p, p) -= 4.0 * Gamma(j, l);
      }
    }
  }
  return B;
}

MatrixXd dense_s_operator(const CouplingModel& coupling) {
  return dense_s_operator(coupling.Gamma, coupling.Lambda);
}

void apply_s_operator(const MatrixXd& Gamma, const VectorXd& Lambda, const VectorXd& s,
                      VectorXd& out) {
  const int n = static_cast<int>(Gamma.rows());
  MatrixXd S = unpack_upper(s, n);
  MatrixXd Y(n, n);
  Y.noalias() = Gamma * S;
  out.resize(s.size());
  for (int j = 0; j < n; ++j) {
    for (int l = j; l < n; ++l) {
      double v = Y(j, l) + Y(l, j);
      v += Gamma(j, l) * (S(j, j) + S(l, l) - 2.0 * S(j, l));
      v -= (Lambda[j] + Lambda[l]) * S(j, l);
      out[s_index(n, j, l)] = v;
    }
  }
}

namespace {

VectorXd propagate_S_dense(const CouplingModel& coupling, const VectorXd& s0, double x) {
  MatrixXd B = dense_s_operator(coupling);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(B);
  VectorXd coeffs = es.eigenvectors().transpose() * s0;
  coeffs.array() *= (es.eigenvalues().array() * x).exp();
  return es.eigenvectors() * coeffs;
}

}  // namespace

VectorXd propagate_S(const CouplingModel& coupling, const VectorXd& Q0, double x,
                     const SPropagateOptions& opts) {
  const int n = coupling.size();
  if (Q0.size() != n)
    throw DimensionMismatch("propagate_S: Q0 size does not match the coupling model");
  if (x < 0.0) throw std::invalid_argument("propagate_S: x must be >= 0");
  VectorXd s0 = initial_second_moments(Q0);
  if (x == 0.0) return s0;

  using Method = SPropagateOptions::Method;
  Method method = opts.method;
  if (method == Method::Auto) method = (n <= 60) ? Method::Dense : Method::Krylov;
  if (method == Method::Dense) return propagate_S_dense(coupling, s0, x);

  MatVecFn apply = [&coupling](const VectorXd& v, VectorXd& out) {
    apply_s_operator(coupling.Gamma, coupling.Lambda, v, out);
  };
  const int dim = static_cast<int>(s0.size());
  SpectralInterval si = estimate_spectrum(apply, dim);
  const double wx = si.width() * x;
  if (wx > 3000.0) {
    SpectralOptions sopts;
    sopts.m_max = opts.m_max;
    sopts.k_keep = opts.k_keep;
    sopts.max_matvecs = opts.max_matvecs;
    sopts.rel_tol = opts.rel_tol;
    if (dim > 20000) {
      // The top of the pair spectrum clusters combinatorially at large N;
      // size the restart window by the memory budget instead.
      const double budget_doubles = 1.5e8;
      sopts.m_max = std::min(600, static_cast<int>(budget_doubles / dim));
      sopts.k_keep = sopts.m_max * 3 / 4;
    }
    try {
      return expm_multiply_spectral(apply, s0, x, sopts);
    } catch (const IntegratorFailure&) {
      // Top sliver not separable; fall through to substepping.
    }
  }
  return expm_multiply_substep(apply, s0, x, opts.rel_tol, 60, opts.max_matvecs);
}

MomentState propagate_moments(const CouplingModel& coupling, const VectorXd& Q0, double x,
                              const SPropagateOptions& opts) {
  MomentState st;
  st.x = x;
  st.Q = propagate_Q(coupling, Q0, x);
  st.S_upper = propagate_S(coupling, Q0, x, opts);
  return st;
}

namespace {

// Sign-normalize an eigenvector expected to live in the nonnegative cone.
void make_nonnegative(VectorXd& v) {
  if (v.sum() < 0.0) v = -v;
}

}  // namespace

SpectralSummary spectral_summary(const CouplingModel& coupling, const VectorXd& Q0) {
  const int n = coupling.size();
  if (Q0.size() != n)
    throw DimensionMismatch("spectral_summary: Q0 size does not match the coupling model");
  SpectralSummary out;

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(coupling.A);
  const VectorXd& ev = es.eigenvalues();  // ascending
  const double norm_a = std::max(std::abs(ev[0]), std::abs(ev[n - 1]));
  out.lambda = -ev[n - 1];
  out.V = es.eigenvectors().col(n - 1);
  make_nonnegative(out.V);
  out.gap_V = n > 1 ? ev[n - 1] - ev[n - 2] : 0.0;
  out.degenerate_V = n > 1 && out.gap_V < 1e-10 * std::max(norm_a, 1e-300);
  out.c_V = out.V.dot(Q0);

  const int m = s_dim(n);
  if (m <= 2500) {
    MatrixXd B = dense_s_operator(coupling);
    Eigen::SelfAdjointEigenSolver<MatrixXd> esb(B);
    const VectorXd& evb = esb.eigenvalues();
    out.mu = -evb[m - 1];
    out.W_upper = esb.eigenvectors().col(m - 1);
    make_nonnegative(out.W_upper);
    out.gap_W = m > 1 ? evb[m - 1] - evb[m - 2] : 0.0;
    const double norm_b = std::max(std::abs(evb[0]), std::abs(evb[m - 1]));
    out.degenerate_W = m > 1 && out.gap_W < 1e-10 * std::max(norm_b, 1e-300);
  } else {
    MatVecFn apply = [&coupling](const VectorXd& v, VectorXd& o) {
      apply_s_operator(coupling.Gamma, coupling.Lambda, v, o);
    };
    SpectralInterval si = estimate_spectrum(apply, m);
    VectorXd start = initial_second_moments(Q0.cwiseMax(1e-30));
    TopEigenPair tp =
        top_eigenpair(apply, m, start, 1e-11 * std::max(si.width(), 1e-300));
    out.mu = -tp.theta;
    out.W_upper = tp.w;
    make_nonnegative(out.W_upper);
    out.gap_W = tp.gap;
    out.degenerate_W = tp.gap < 1e-10 * std::max(si.width(), 1e-300);
  }
  MatrixXd W = unpack_upper(out.W_upper, n);
  out.c_W = Q0.dot(W * Q0);
  return out;
}

namespace {

bool coupling_connected(const MatrixXd& Gamma) {
  const int n = static_cast<int>(Gamma.rows());
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = true;
  int count = 1;
  while (!queue.empty()) {
    int j = queue.front();
    queue.pop();
    for (int l = 0; l < n; ++l) {
      if (l != j && !seen[l] && Gamma(j, l) > 0.0) {
        seen[l] = true;
        ++count;
        queue.push(l);
      }
    }
  }
  return count == n;
}

// Minimum-norm solution of M y = rhs for symmetric singular M, dropping the
// (near-)null space. Throws SingularSystem if rhs has a component there.
VectorXd pseudo_solve(const MatrixXd& M, const VectorXd& rhs) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  const VectorXd& ev = es.eigenvalues();
  const int n = static_cast<int>(ev.size());
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(ev[i]));
  const double tol = 1e-12 * std::max(scale, 1e-300);
  VectorXd coeffs = es.eigenvectors().transpose() * rhs;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev[i]) <= tol) {
      if (std::abs(coeffs[i]) > 1e-10 * std::max(rhs.norm(), 1e-300))
        throw SingularSystem("pseudo_solve: right-hand side not orthogonal to the kernel");
      coeffs[i] = 0.0;
    } else {
      coeffs[i] /= ev[i];
    }
  }
  return es.eigenvectors() * coeffs;
}

}  // namespace

WeakDissipationExpansion weak_dissipation_expansion(const MatrixXd& Gamma,
                                                    const VectorXd& Lambda1) {
  const int n = static_cast<int>(Gamma.rows());
  if (Lambda1.size() != n)
    throw DimensionMismatch("weak_dissipation_expansion: Lambda1 size mismatch");
  if (!coupling_connected(Gamma))
    throw SingularSystem("weak_dissipation_expansion: coupling graph is not connected");

  WeakDissipationExpansion out;
  out.lambda1 = Lambda1.mean();
  out.mu1 = 2.0 * out.lambda1;

  // Gamma V1 = (Phi1 - lambda1) V0 with V0 = 1/sqrt(N); V1 orthogonal to V0.
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  VectorXd rhs = (Lambda1.array() - out.lambda1) * inv_sqrt_n;
  VectorXd v1 = pseudo_solve(Gamma, rhs);
  out.lambda2 = (Lambda1.array() * inv_sqrt_n * v1.array()).sum();

  // Theta W1 = (Psi1 - mu1) W0 with W0 = c_N on every packed entry.
  const int m = s_dim(n);
  const double c_n = std::sqrt(2.0 / (static_cast<double>(n) * (n + 1)));
  MatrixXd Theta = dense_s_operator(Gamma, VectorXd::Zero(n));
  VectorXd psi(m);
  for (int j = 0; j < n; ++j)
    for (int l = j; l < n; ++l) psi[s_index(n, j, l)] = Lambda1[j] + Lambda1[l];
  VectorXd rhs_w = (psi.array() - out.mu1) * c_n;
  VectorXd w1 = pseudo_solve(Theta, rhs_w);
  out.mu2 = (psi.array() * c_n * w1.array()).sum();
  return out;
}

IntensityMoments intensity_moments(const ModeSet& modes, const MomentState& state, double z) {
  const int n = state.n_modes();
  if (modes.size() != n)
    throw DimensionMismatch("intensity_moments: mode count does not match the state");
  VectorXd u(n);
  for (int j = 0; j < n; ++j) {
    const double phi = eval_phi_j(modes, j, z);
    u[j] = phi * phi / modes.beta[j];
  }
  IntensityMoments im;
  im.m2 = u.dot(state.Q);
  MatrixXd S = unpack_upper(state.S_upper, n);
  im.m4 = u.dot(S * u);
  return im;
}

double scintillation_index(const ModeSet& modes, const MomentState& state,
                           const std::vector<double>& depths) {
  if (depths.empty())
    throw std::invalid_argument("scintillation_index: depths must be nonempty");
  const int n = state.n_modes();
  MatrixXd S = unpack_upper(state.S_upper, n);
  double acc = 0.0;
  for (double z : depths) {
    VectorXd u(n);
    for (int j = 0; j < n; ++j) {
      const double phi = eval_phi_j(modes, j, z);
      u[j] = phi * phi / modes.beta[j];
    }
    const double m2 = u.dot(state.Q);
    const double m4 = u.dot(S * u);
    acc += (m4 - m2 * m2) / (m2 * m2);
  }
  return acc / static_cast<double>(depths.size());
}

}  // namespace swmode
