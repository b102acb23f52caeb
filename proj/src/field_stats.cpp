#include "swmode/field_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "swmode/errors.hpp"
#include "swmode/parallel.hpp"

namespace swmode {

void ArrayGeometry::validate(double z_b) const {
  if (!(x_a > 0.0)) throw std::invalid_argument("ArrayGeometry: x_a must be positive");
  if (!(0.0 < z_m) || !(z_m < z_M) || !(z_M < z_b))
    throw std::invalid_argument("ArrayGeometry: need 0 < z_m < z_M < z_b");
  if (!std::is_sorted(hydrophone_depths.begin(), hydrophone_depths.end()))
    throw std::invalid_argument("ArrayGeometry: hydrophone depths must be sorted");
  for (double z : hydrophone_depths)
    if (z < z_m - 1e-9 || z > z_M + 1e-9)
      throw std::invalid_argument("ArrayGeometry: hydrophone outside the aperture");
}

ArrayGeometry uniform_array(double x_a, double z_m, double z_M, int n_hydrophones) {
  if (n_hydrophones < 1) throw std::invalid_argument("uniform_array: need >= 1 hydrophone");
  ArrayGeometry geom;
  geom.x_a = x_a;
  geom.z_m = z_m;
  geom.z_M = z_M;
  geom.hydrophone_depths.resize(n_hydrophones);
  if (n_hydrophones == 1) {
    geom.hydrophone_depths[0] = 0.5 * (z_m + z_M);
  } else {
    for (int i = 0; i < n_hydrophones; ++i)
      geom.hydrophone_depths[i] = z_m + (z_M - z_m) * i / (n_hydrophones - 1);
  }
  return geom;
}

std::vector<double> default_lag_grid(const ArrayGeometry& geom, int n) {
  std::vector<double> y(n);
  const double L = geom.aperture();
  for (int i = 0; i < n; ++i) y[i] = L * i / n;  // [0, L), open at the right
  return y;
}

CorrelationCurve correlation_curve(const ModeSet& modes, const Eigen::VectorXd& Qx,
                                   const ArrayGeometry& geom,
                                   const std::vector<double>& y_grid) {
  if (modes.empty()) throw NoGuidedModes("correlation_curve: empty mode set");
  if (Qx.size() != modes.size())
    throw DimensionMismatch("correlation_curve: Qx size does not match the mode set");
  const double L = geom.aperture();
  const int n = modes.size();

  struct Term {
    double weight, k;
  };
  std::vector<Term> terms(n);
  for (int j = 0; j < n; ++j)
    terms[j] = {Qx[j] / modes.beta[j] * modes.A[j] * modes.A[j] / 2.0, modes.k_wj[j]};
  const double z_m = geom.z_m, z_M = geom.z_M;

  // Aperture average of sum_j (Q_j / beta_j) phi_j(z) phi_j(z + y), un-normalized.
  auto raw = [terms, L, z_m, z_M](double y) {
    if (!(L - y > 0.0)) throw EmptyAperture("correlation_curve: lag >= aperture");
    double acc = 0.0;
    for (const Term& t : terms) {
      acc += t.weight *
             (std::cos(t.k * y) * (L - y) -
              (std::sin(t.k * (2.0 * z_M - y)) - std::sin(t.k * (2.0 * z_m + y))) /
                  (2.0 * t.k));
    }
    return acc / (L - y);
  };

  CorrelationCurve curve;
  curve.zero_lag = raw(0.0);
  const double c0 = curve.zero_lag;
  curve.evaluator = [raw, c0](double y) { return raw(y) / c0; };
  curve.y_grid = y_grid;
  curve.values.resize(y_grid.size());
  for (std::size_t i = 0; i < y_grid.size(); ++i) curve.values[i] = curve.evaluator(y_grid[i]);
  return curve;
}

CorrelationRadius correlation_radius(const CorrelationCurve& curve) {
  CorrelationRadius out;
  const auto& y = curve.y_grid;
  const auto& v = curve.values;
  if (y.size() < 2) throw InsufficientData("correlation_radius: need at least two lags");

  auto eval = curve.evaluator;
  if (!eval) {
    // Fall back to linear interpolation of the sampled curve.
    eval = [&y, &v](double lag) {
      auto it = std::upper_bound(y.begin(), y.end(), lag);
      if (it == y.begin()) return v.front();
      if (it == y.end()) return v.back();
      const std::size_t i = static_cast<std::size_t>(it - y.begin());
      const double t = (lag - y[i - 1]) / (y[i] - y[i - 1]);
      return v[i - 1] + t * (v[i] - v[i - 1]);
    };
  }

  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    if (v[i] >= 0.5 && v[i + 1] < 0.5) {
      double lo = y[i], hi = y[i + 1];
      while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        (eval(mid) >= 0.5 ? lo : hi) = mid;
      }
      out.radius = 0.5 * (lo + hi);
      out.reached = true;
      return out;
    }
  }
  out.radius = y.back() > y.front() ? y.back() : 0.0;
  out.reached = false;
  return out;
}

ModeSet select_modes(const ModeSet& modes, const std::vector<int>& keep) {
  ModeSet out;
  out.omega = modes.omega;
  out.k_w = modes.k_w;
  out.k_s = modes.k_s;
  out.z_b = modes.z_b;
  out.rho_w = modes.rho_w;
  out.rho_s = modes.rho_s;
  const int n = static_cast<int>(keep.size());
  out.sigma.resize(n);
  out.beta.resize(n);
  out.zeta.resize(n);
  out.A.resize(n);
  out.k_wj.resize(n);
  for (int i = 0; i < n; ++i) {
    const int j = keep[i];
    if (j < 0 || j >= modes.size()) throw std::out_of_range("select_modes: index out of range");
    out.sigma[i] = modes.sigma[j];
    out.beta[i] = modes.beta[j];
    out.zeta[i] = modes.zeta[j];
    out.A[i] = modes.A[j];
    out.k_wj[i] = modes.k_wj[j];
  }
  return out;
}

std::vector<int> dominant_modes(const Eigen::VectorXd& Q0, int n_max) {
  const int n = static_cast<int>(Q0.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (n_max <= 0 || n_max >= n) return idx;
  std::partial_sort(idx.begin(), idx.begin() + n_max, idx.end(),
                    [&Q0](int a, int b) { return Q0[a] > Q0[b]; });
  idx.resize(n_max);
  std::sort(idx.begin(), idx.end());
  return idx;
}

ForwardRadiiResult forward_radii(const EnvironmentParams& env, const SourceSpec& src,
                                 const ArrayGeometry& geom, const std::vector<double>& freqs_hz,
                                 const ForwardOptions& opts) {
  env.validate();
  src.validate(env.z_b);
  geom.validate(env.z_b);
  ForwardRadiiResult out;
  out.radii.resize(freqs_hz.size());
  std::vector<std::string> notes(freqs_hz.size());

  parallel_for(freqs_hz.size(), [&](std::size_t i) {
    FrequencyRadius& fr = out.radii[i];
    fr.freq_hz = freqs_hz[i];
    try {
      const double omega = 2.0 * std::numbers::pi * freqs_hz[i];
      ModeSet modes = solve_modes(env, omega);
      if (modes.empty()) {
        fr.ok = false;
        fr.message = "no guided modes";
        return;
      }
      Eigen::VectorXd q0 = source_amplitudes(modes, src);
      if (opts.n_max > 0 && opts.n_max < modes.size()) {
        const std::vector<int> keep = dominant_modes(q0, opts.n_max);
        Eigen::VectorXd q0_sub(keep.size());
        for (std::size_t t = 0; t < keep.size(); ++t) q0_sub[t] = q0[keep[t]];
        modes = select_modes(modes, keep);
        q0 = q0_sub;
      }
      CouplingModel coupling = build_coupling(modes, env, opts.coupling);
      const double mean_rate = coupling.Gamma.diagonal().cwiseAbs().mean();
      if (mean_rate * geom.x_a < 1.0) {
        std::ostringstream msg;
        msg << freqs_hz[i] << " Hz: x_a * mean coupling rate = " << mean_rate * geom.x_a
            << " < 1; cross-mode coherence may not be negligible";
        notes[i] = msg.str();
      }
      const Eigen::VectorXd qx = propagate_Q(coupling, q0, geom.x_a);
      CorrelationCurve curve =
          correlation_curve(modes, qx, geom, default_lag_grid(geom, opts.lag_points));
      fr.radius = correlation_radius(curve);
      fr.ok = true;
    } catch (const std::exception& e) {
      fr.ok = false;
      fr.message = e.what();
    }
  });

  for (std::size_t i = 0; i < out.radii.size(); ++i) {
    if (!out.radii[i].ok) {
      std::ostringstream msg;
      msg << out.radii[i].freq_hz << " Hz dropped: " << out.radii[i].message;
      out.warnings.push_back(msg.str());
    }
    if (!notes[i].empty()) out.warnings.push_back(notes[i]);
  }
  return out;
}

}  // namespace swmode
