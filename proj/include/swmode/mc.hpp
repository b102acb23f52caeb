#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "swmode/coupling.hpp"
#include "swmode/field_stats.hpp"
#include "swmode/modes.hpp"
#include "swmode/snapshots.hpp"

namespace swmode {

/// One realization of the mode-power diffusion, sampled on x_grid.
struct PowerPath {
  std::vector<Eigen::VectorXd> P;  ///< P[i] is the state at x_grid[i]
};

struct PowerEnsemble {
  std::vector<double> x_grid;
  std::vector<PowerPath> paths;
  /// Boundary events: pairwise transfers capped at the donor's power (which
  /// keeps the total conserved) plus decay steps clipped at zero.
  std::int64_t clamp_count = 0;
};

struct SimulateOptions {
  int record_points = 11;  ///< snapshots along [0, x_end], endpoints included
};

/// Euler-Maruyama ensemble of the limiting mode-power diffusion. The noise is
/// factorized over mode pairs,
///   dP = b dx + sum_{j<l} sqrt(2 Gamma_jl P_j P_l) (e_j - e_l) dW_jl,
/// which realizes the generator's diffusion matrix exactly and conserves the
/// total power pathwise when Lambda = 0. Requires
/// dx * max_j(|Gamma_jj| + Lambda_j) < 0.1 (throws StepTooLarge otherwise).
/// Identical seeds give identical ensembles regardless of thread count.
PowerEnsemble simulate_powers(const CouplingModel& coupling, const Eigen::VectorXd& Q0,
                              double x_end, double dx, int n_paths, std::uint64_t seed,
                              const SimulateOptions& opts = {});

/// Phase-randomized snapshot synthesis:
///   p(z_n) = sum_j sqrt(P_j) e^{i theta_j} phi_j(z_n) / sqrt(beta_j),
/// theta_j independent uniform per snapshot; P drawn per snapshot from the
/// supplied rows (cycled deterministically) or held fixed.
SnapshotSet synthesize_snapshots(const ModeSet& modes,
                                 const std::vector<Eigen::VectorXd>& power_draws,
                                 const ArrayGeometry& geom, int n_snapshots,
                                 std::uint64_t seed, double freq_hz);

SnapshotSet synthesize_snapshots(const ModeSet& modes, const Eigen::VectorXd& fixed_powers,
                                 const ArrayGeometry& geom, int n_snapshots,
                                 std::uint64_t seed, double freq_hz);

}  // namespace swmode
