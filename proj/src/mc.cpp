#include "swmode/mc.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "swmode/errors.hpp"
#include "swmode/parallel.hpp"

namespace swmode {

namespace {

// splitmix64; decorrelates per-path generators derived from (seed, index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

PowerEnsemble simulate_powers(const CouplingModel& coupling, const Eigen::VectorXd& Q0,
                              double x_end, double dx, int n_paths, std::uint64_t seed,
                              const SimulateOptions& opts) {
  const int n = coupling.size();
  if (Q0.size() != n)
    throw DimensionMismatch("simulate_powers: Q0 size does not match the coupling model");
  if (n_paths < 1) throw std::invalid_argument("simulate_powers: n_paths must be >= 1");
  if (!(dx > 0.0) || !(x_end >= 0.0))
    throw std::invalid_argument("simulate_powers: need dx > 0 and x_end >= 0");
  const double rate =
      (coupling.Gamma.diagonal().cwiseAbs() + coupling.Lambda.cwiseAbs()).maxCoeff();
  if (dx * rate >= 0.1) {
    std::ostringstream msg;
    msg << "simulate_powers: dx * max rate = " << dx * rate << " must be < 0.1";
    throw StepTooLarge(msg.str());
  }

  const int n_steps = x_end > 0.0 ? static_cast<int>(std::ceil(x_end / dx - 1e-9)) : 0;
  const int n_record = std::max(2, opts.record_points);
  PowerEnsemble ens;
  ens.paths.resize(n_paths);
  // Record at the step boundary at or after each requested range, so the
  // stored x values are exact for every path.
  std::vector<int> record_step(n_record);
  ens.x_grid.resize(n_record);
  for (int r = 0; r < n_record; ++r) {
    const double want = x_end * r / (n_record - 1);
    record_step[r] = std::min(n_steps, static_cast<int>(std::ceil(want / dx - 1e-9)));
    ens.x_grid[r] = std::min(record_step[r] * dx, x_end);
  }

  // Pairs with nonzero exchange rate.
  struct Pair {
    int j, l;
    double two_gamma;
  };
  std::vector<Pair> pairs;
  for (int j = 0; j < n; ++j)
    for (int l = j + 1; l < n; ++l)
      if (coupling.Gamma(j, l) > 0.0) pairs.push_back({j, l, 2.0 * coupling.Gamma(j, l)});

  std::atomic<std::int64_t> clamp_count{0};
  parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t ip) {
    std::mt19937_64 rng(mix_seed(seed, ip));
    std::normal_distribution<double> gauss;
    const double sq_dx = std::sqrt(dx);
    Eigen::VectorXd P = Q0;
    PowerPath& path = ens.paths[ip];
    path.P.resize(n_record);
    int next_record = 0;
    while (next_record < n_record && record_step[next_record] == 0)
      path.P[next_record++] = P;
    std::int64_t clamps = 0;
    Eigen::VectorXd frozen(n);
    for (int step = 0; step < n_steps; ++step) {
      const double h = std::min(dx, x_end - step * dx);
      const double sq_h = (h == dx) ? sq_dx : std::sqrt(h);
      // Coefficients are evaluated at the step start. Each pairwise transfer
      // is capped by the donor's running power, so the update conserves the
      // total exactly and never leaves the nonnegative orthant; capped
      // transfers are the counted "clamp" events.
      frozen = P;
      for (const Pair& pr : pairs) {
        const double pj = frozen[pr.j], pl = frozen[pr.l];
        double d = 0.5 * pr.two_gamma * (pl - pj) * h +
                   std::sqrt(pr.two_gamma * pj * pl) * sq_h * gauss(rng);
        if (d < -P[pr.j] || d > P[pr.l]) {
          d = std::clamp(d, -P[pr.j], P[pr.l]);
          ++clamps;
        }
        P[pr.j] += d;
        P[pr.l] -= d;
      }
      for (int j = 0; j < n; ++j) {
        if (coupling.Lambda[j] != 0.0) {
          P[j] -= coupling.Lambda[j] * frozen[j] * h;
          if (P[j] < 0.0) {
            P[j] = 0.0;
            ++clamps;
          }
        }
      }
      while (next_record < n_record && record_step[next_record] == step + 1)
        path.P[next_record++] = P;
    }
    while (next_record < n_record) path.P[next_record++] = P;
    clamp_count += clamps;
  });
  ens.clamp_count = clamp_count;
  return ens;
}

namespace {

SnapshotSet synthesize_impl(const ModeSet& modes,
                            const std::vector<Eigen::VectorXd>& draws,
                            const ArrayGeometry& geom, int n_snapshots, std::uint64_t seed,
                            double freq_hz) {
  if (modes.empty()) throw NoGuidedModes("synthesize_snapshots: empty mode set");
  if (draws.empty()) throw std::invalid_argument("synthesize_snapshots: no power draws");
  for (const auto& P : draws) {
    if (P.size() != modes.size())
      throw DimensionMismatch("synthesize_snapshots: power vector size mismatch");
    if ((P.array() < 0.0).any())
      throw std::invalid_argument("synthesize_snapshots: powers must be nonnegative");
  }
  const int n = modes.size();
  const int n_h = static_cast<int>(geom.hydrophone_depths.size());

  // phi_j(z_n)/sqrt(beta_j) evaluated once.
  Eigen::MatrixXd basis(n_h, n);
  for (int h = 0; h < n_h; ++h)
    for (int j = 0; j < n; ++j)
      basis(h, j) = eval_phi_j(modes, j, geom.hydrophone_depths[h]) / std::sqrt(modes.beta[j]);

  SnapshotSet set;
  set.depths = geom.hydrophone_depths;
  set.snapshots.resize(n_snapshots);
  parallel_for(static_cast<std::size_t>(n_snapshots), [&](std::size_t is) {
    std::mt19937_64 rng(mix_seed(seed ^ 0xa5a5a5a5ULL, is));
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    const Eigen::VectorXd& P = draws[is % draws.size()];
    Eigen::VectorXcd amp(n);
    for (int j = 0; j < n; ++j) {
      const double theta = uniform(rng);
      amp[j] = std::sqrt(P[j]) * std::complex<double>(std::cos(theta), std::sin(theta));
    }
    Snapshot& snap = set.snapshots[is];
    snap.freq_hz = freq_hz;
    snap.rep = static_cast<int>(is);
    snap.p.resize(n_h);
    Eigen::VectorXcd field = basis * amp;
    for (int h = 0; h < n_h; ++h) snap.p[h] = field[h];
  });
  return set;
}

}  // namespace

SnapshotSet synthesize_snapshots(const ModeSet& modes,
                                 const std::vector<Eigen::VectorXd>& power_draws,
                                 const ArrayGeometry& geom, int n_snapshots,
                                 std::uint64_t seed, double freq_hz) {
  return synthesize_impl(modes, power_draws, geom, n_snapshots, seed, freq_hz);
}

SnapshotSet synthesize_snapshots(const ModeSet& modes, const Eigen::VectorXd& fixed_powers,
                                 const ArrayGeometry& geom, int n_snapshots,
                                 std::uint64_t seed, double freq_hz) {
  return synthesize_impl(modes, {fixed_powers}, geom, n_snapshots, seed, freq_hz);
}

}  // namespace swmode
