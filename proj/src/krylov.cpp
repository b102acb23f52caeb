#include "swmode/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "swmode/errors.hpp"

namespace {
bool krylov_verbose() {
  static const bool on = std::getenv("SWMODE_KRYLOV_VERBOSE") != nullptr;
  return on;
}
}  // namespace

namespace swmode {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Two-pass classical Gram-Schmidt of w against the first n columns of V.
void reorthogonalize(const MatrixXd& V, int n, VectorXd& w) {
  if (n <= 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    VectorXd coeffs = V.leftCols(n).transpose() * w;
    w.noalias() -= V.leftCols(n) * coeffs;
  }
}

struct RitzDecomposition {
  VectorXd theta;  // descending
  MatrixXd y;      // columns matched to theta
  VectorXd resid;  // |beta * y(m-1, i)|, the Lanczos residual norms
};

RitzDecomposition ritz_of(const MatrixXd& T, int m, double beta) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T.topLeftCorner(m, m));
  RitzDecomposition rd;
  rd.theta.resize(m);
  rd.y.resize(m, m);
  rd.resid.resize(m);
  for (int i = 0; i < m; ++i) {  // flip ascending -> descending
    rd.theta[i] = es.eigenvalues()[m - 1 - i];
    rd.y.col(i) = es.eigenvectors().col(m - 1 - i);
    rd.resid[i] = std::abs(beta * rd.y(m - 1, i));
  }
  return rd;
}

// Thick-restart Lanczos. Invariant after each extension step:
//   B V_m = V_m T_m + beta * V.col(m) * e_m^T
// with T_m symmetric: arrowhead head of size k from the previous restart,
// tridiagonal beyond.
struct ThickRestartLanczos {
  const MatVecFn& apply;
  int dim;
  int m_max;
  MatrixXd V;  // dim x (m_max + 1)
  MatrixXd T;  // m_max x m_max
  int k = 0;   // arrowhead size (kept Ritz pairs)
  int m = 0;   // current basis size
  double beta = 0.0;
  int matvecs = 0;
  bool invariant = false;  // happy breakdown: the Krylov space is B-invariant

  ThickRestartLanczos(const MatVecFn& fn, int d, int mm)
      : apply(fn),
        dim(d),
        m_max(std::min(mm, d)),
        V(d, std::min(mm, d) + 1),
        T(MatrixXd::Zero(std::min(mm, d), std::min(mm, d))) {}

  void start(const VectorXd& v0) {
    V.col(0) = v0 / v0.norm();
    k = 0;
    m = 0;
    beta = 0.0;
    invariant = false;
  }

  // One Lanczos step. Returns false when the basis is full or an invariant
  // subspace was hit.
  bool step() {
    VectorXd w(dim);
    apply(V.col(m), w);
    ++matvecs;
    if (m == k && k > 0) {
      w.noalias() -= V.leftCols(k) * T.block(0, k, k, 1);
    } else if (m > 0) {
      w.noalias() -= T(m, m - 1) * V.col(m - 1);
    }
    const double alpha = V.col(m).dot(w);
    w.noalias() -= alpha * V.col(m);
    reorthogonalize(V, m + 1, w);
    T(m, m) = alpha;
    beta = w.norm();
    ++m;
    const double scale = std::max(std::abs(alpha), 1.0e-300);
    if (beta <= 1e-14 * scale || m >= dim) {
      invariant = true;
      beta = 0.0;
      return false;
    }
    if (m < m_max) {
      T(m, m - 1) = beta;
      T(m - 1, m) = beta;
    }
    V.col(m) = w / beta;
    return m < m_max;
  }

  void run_to_full() {
    while (m < m_max && step()) {
    }
  }

  // Restart keeping the Ritz columns listed in keep (indices into rd).
  void restart(const RitzDecomposition& rd, const std::vector<int>& keep) {
    const int kk = static_cast<int>(keep.size());
    MatrixXd Y(m, kk);
    VectorXd th(kk), s(kk);
    for (int i = 0; i < kk; ++i) {
      Y.col(i) = rd.y.col(keep[i]);
      th[i] = rd.theta[keep[i]];
      s[i] = beta * rd.y(m - 1, keep[i]);
    }
    MatrixXd W(dim, kk);
    W.noalias() = V.leftCols(m) * Y;
    V.leftCols(kk) = W;
    V.col(kk) = V.col(m);
    T.setZero();
    for (int i = 0; i < kk; ++i) {
      T(i, i) = th[i];
      T(i, kk) = s[i];
      T(kk, i) = s[i];
    }
    k = kk;
    m = kk;
  }
};

}  // namespace

SpectralInterval estimate_spectrum(const MatVecFn& apply, int dim, int iters,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  ThickRestartLanczos lan(apply, dim, std::min(iters, dim));
  lan.start(v);
  lan.run_to_full();
  RitzDecomposition rd = ritz_of(lan.T, lan.m, lan.invariant ? 0.0 : lan.beta);
  SpectralInterval si;
  si.theta_max = rd.theta[0] + rd.resid[0];
  si.theta_min = rd.theta[lan.m - 1] - rd.resid[lan.m - 1];
  return si;
}

Eigen::VectorXd expm_multiply_substep(const MatVecFn& apply, const VectorXd& v, double x,
                                      double rel_tol, int m, int max_matvecs) {
  if (x == 0.0 || v.norm() == 0.0) return v;
  const int dim = static_cast<int>(v.size());
  m = std::min(m, dim);
  VectorXd y = v;
  double x_left = x;
  SpectralInterval si = estimate_spectrum(apply, dim, std::min(30, dim));
  double tau = std::min(x_left, 0.5 * m / std::max(si.width(), 1e-300));
  int matvecs = 0;
  while (x_left > 0.0) {
    tau = std::min(tau, x_left);
    const double ynorm = y.norm();
    if (ynorm == 0.0) return y;
    ThickRestartLanczos lan(apply, dim, m);
    lan.start(y);
    lan.run_to_full();
    matvecs += lan.matvecs;
    if (matvecs > max_matvecs)
      throw IntegratorFailure("expm_multiply_substep: matvec budget exhausted");
    const int mm = lan.m;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(lan.T.topLeftCorner(mm, mm));
    for (;;) {
      VectorXd expu = es.eigenvectors() *
                      ((es.eigenvalues().array() * tau).exp() *
                       es.eigenvectors().row(0).transpose().array())
                          .matrix();
      // First-omitted-term estimate of the Krylov truncation error.
      const double err =
          lan.invariant ? 0.0 : ynorm * lan.beta * std::abs(expu[mm - 1]) * tau;
      const double step_tol =
          rel_tol * std::max(ynorm * expu.norm(), 1e-300) * std::max(tau / x, 1e-3);
      if (err <= step_tol || lan.invariant) {
        y.noalias() = lan.V.leftCols(mm) * (ynorm * expu);
        x_left -= tau;
        if (err < 0.01 * step_tol) tau *= 1.8;
        break;
      }
      tau *= 0.5;
      if (tau < 1e-12 * x)
        throw IntegratorFailure("expm_multiply_substep: step-size underflow");
    }
  }
  return y;
}

Eigen::VectorXd expm_multiply_spectral(const MatVecFn& apply, const VectorXd& v, double x,
                                       const SpectralOptions& opts) {
  const int dim = static_cast<int>(v.size());
  const double vnorm = v.norm();
  if (x == 0.0 || vnorm == 0.0) return v;
  const int m_max = std::min(opts.m_max, dim);
  int k_keep = std::min(opts.k_keep, std::max(1, m_max - 8));
  double margin = -std::log(0.01 * opts.rel_tol) + 10.0;

  ThickRestartLanczos lan(apply, dim, m_max);
  lan.start(v);
  for (;;) {
    lan.run_to_full();
    RitzDecomposition rd = ritz_of(lan.T, lan.m, lan.invariant ? 0.0 : lan.beta);
    const int mm = lan.m;
    const double width =
        rd.theta[0] - rd.theta[mm - 1] + rd.resid[0] + rd.resid[mm - 1];
    const double lock_tol =
        std::max(100.0 * std::numeric_limits<double>::epsilon() * std::max(width, 1e-300),
                 0.1 * opts.rel_tol / x);

    const double theta1 = rd.theta[0];
    const double theta_cut = theta1 - margin / x;
    bool certified = !lan.invariant;
    int n_keep = 0;
    if (lan.invariant) {
      n_keep = mm;  // exact: the Krylov space is invariant
      certified = true;
    } else {
      while (n_keep < mm && rd.theta[n_keep] > theta_cut) ++n_keep;
      for (int i = 0; i < n_keep && certified; ++i)
        if (rd.resid[i] > lock_tol) certified = false;
      // Everything below the cut must stay below it within its residual bound.
      for (int i = n_keep; i < mm && certified; ++i)
        if (rd.theta[i] + rd.resid[i] > theta_cut) certified = false;
      if (n_keep >= k_keep) {
        // Sliver wider than the kept window: widen it while the basis allows.
        certified = false;
        if (n_keep > m_max - 24)
          throw IntegratorFailure(
              "expm_multiply_spectral: top cluster exceeds the basis size");
        k_keep = std::min(n_keep + 16, m_max - 8);
      }
    }

    if (certified && n_keep > 0) {
      MatrixXd W(dim, n_keep);
      W.noalias() = lan.V.leftCols(mm) * rd.y.leftCols(n_keep);
      VectorXd c = W.transpose() * v;
      // Scale by exp(theta1 x) at the end to avoid overflow/underflow.
      VectorXd yhat = VectorXd::Zero(dim);
      for (int i = 0; i < n_keep; ++i)
        yhat.noalias() += c[i] * std::exp((rd.theta[i] - theta1) * x) * W.col(i);
      VectorXd rem = v - W * c;
      const double discarded = rem.norm() * std::exp(-margin);
      if (discarded <= opts.rel_tol * yhat.norm() || lan.invariant) {
        const double log_scale = theta1 * x;
        if (log_scale < -700.0) return VectorXd::Zero(dim);
        return std::exp(log_scale) * yhat;
      }
      // Projection kept too little of v relative to the answer: widen the cut.
      margin *= 1.5;
    }

    if (lan.matvecs > opts.max_matvecs) {
      std::ostringstream msg;
      msg << "expm_multiply_spectral: top sliver not certified after " << lan.matvecs
          << " matvecs (kept " << n_keep << ")";
      throw IntegratorFailure(msg.str());
    }
    std::vector<int> keep(k_keep);
    for (int i = 0; i < k_keep; ++i) keep[i] = i;
    lan.restart(rd, keep);
  }
}

TopEigenPair top_eigenpair(const MatVecFn& apply, int dim, const VectorXd& start,
                           double resid_tol, int max_matvecs) {
  const int m_max = std::min(120, dim);
  const int k_keep = std::min(40, std::max(1, m_max - 8));
  ThickRestartLanczos lan(apply, dim, m_max);
  lan.start(start);
  for (;;) {
    lan.run_to_full();
    RitzDecomposition rd = ritz_of(lan.T, lan.m, lan.invariant ? 0.0 : lan.beta);
    if (rd.resid[0] <= resid_tol || lan.invariant) {
      TopEigenPair out;
      out.theta = rd.theta[0];
      out.w = lan.V.leftCols(lan.m) * rd.y.col(0);
      out.w.normalize();
      out.resid = rd.resid[0];
      out.gap = lan.m > 1 ? rd.theta[0] - rd.theta[1] : 0.0;
      return out;
    }
    if (lan.matvecs > max_matvecs)
      throw IntegratorFailure("top_eigenpair: matvec budget exhausted");
    std::vector<int> keep(std::min(k_keep, lan.m - 2));
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<int>(i);
    lan.restart(rd, keep);
  }
}

}  // namespace swmode
