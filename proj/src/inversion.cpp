#include "swmode/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "swmode/coupling.hpp"
#include "swmode/errors.hpp"

namespace swmode {

bool ParamBox::contains(const GeoParams& phi, double slack) const {
  const auto a = phi.to_array();
  for (int i = 0; i < 6; ++i) {
    const double span = std::max(hi[i] - lo[i], 1.0e-300);
    if (a[i] < lo[i] - slack * span || a[i] > hi[i] + slack * span) return false;
  }
  return true;
}

void ParamBox::validate() const {
  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i])
      throw std::invalid_argument("ParamBox: need finite lo <= hi for " +
                                  geo_param_names()[i]);
  }
}

void InverseProblem::validate() const {
  if (!(c_w > 0.0) || !(rho_w > 0.0) || !(z_b > 0.0))
    throw std::invalid_argument("InverseProblem: invalid known environment");
  src.validate(z_b);
  geom.validate(z_b);
  if (freqs_hz.empty()) throw std::invalid_argument("InverseProblem: no frequencies");
  if (observed_radii.size() != freqs_hz.size())
    throw DimensionMismatch("InverseProblem: observed radii do not match frequencies");
  for (double r : observed_radii)
    if (!(r > 0.0)) throw std::invalid_argument("InverseProblem: observed radii must be > 0");
  bounds.validate();
}

EnvironmentParams InverseProblem::environment(const GeoParams& phi) const {
  EnvironmentParams env;
  env.c_w = c_w;
  env.rho_w = rho_w;
  env.z_b = z_b;
  env.c_s = phi.c_s;
  env.rho_s = phi.rho_s;
  env.nu_s = alpha_to_nu(phi.alpha);
  env.sigma = phi.sigma;
  env.ell_v = phi.ell_v;
  env.ell_h = phi.ell_h;
  return env;
}

MisfitValue misfit(const InverseProblem& problem, const GeoParams& phi) {
  ForwardRadiiResult fwd = forward_radii(problem.environment(phi), problem.src, problem.geom,
                                         problem.freqs_hz, problem.forward);
  MisfitValue out;
  for (std::size_t k = 0; k < fwd.radii.size(); ++k) {
    const FrequencyRadius& fr = fwd.radii[k];
    if (!fr.ok) {
      out.excluded_freqs.push_back(problem.freqs_hz[k]);
      continue;
    }
    const double d = fr.radius.radius - problem.observed_radii[k];
    out.value += d * d;
    out.used_frequencies += 1;
  }
  if (out.used_frequencies == 0)
    throw ForwardModelFailure("misfit: forward model failed at every frequency");
  return out;
}

namespace {

// Logistic map of the unbounded simplex coordinates onto the box; collapsed
// dimensions stay pinned at their bound.
struct BoxMap {
  std::array<double, 6> lo, hi;
  std::vector<int> free_dims;

  explicit BoxMap(const ParamBox& box) : lo(box.lo), hi(box.hi) {
    for (int i = 0; i < 6; ++i)
      if (hi[i] > lo[i]) free_dims.push_back(i);
  }

  GeoParams decode(const std::vector<double>& t) const {
    std::array<double, 6> a;
    for (int i = 0; i < 6; ++i) a[i] = lo[i];
    for (std::size_t d = 0; d < free_dims.size(); ++d) {
      const int i = free_dims[d];
      a[i] = lo[i] + (hi[i] - lo[i]) / (1.0 + std::exp(-t[d]));
    }
    return GeoParams::from_array(a);
  }

  std::vector<double> encode(const GeoParams& phi) const {
    const auto a = phi.to_array();
    std::vector<double> t(free_dims.size());
    for (std::size_t d = 0; d < free_dims.size(); ++d) {
      const int i = free_dims[d];
      const double u =
          std::clamp((a[i] - lo[i]) / (hi[i] - lo[i]), 1e-12, 1.0 - 1e-12);
      t[d] = std::log(u / (1.0 - u));
    }
    return t;
  }
};

struct NelderMeadResult {
  std::vector<double> t;
  double f = 0.0;
  bool budget_exhausted = false;
};

// Standard simplex descent (reflection/expansion/contraction/shrink) on a
// callable f over R^d.
template <typename Fn>
NelderMeadResult nelder_mead(Fn&& f, const std::vector<double>& t0, double step, int max_evals,
                             double f_tol, double x_tol) {
  const int d = static_cast<int>(t0.size());
  int evals = 0;
  auto feval = [&](const std::vector<double>& t) {
    ++evals;
    return f(t);
  };

  std::vector<std::vector<double>> pts(d + 1, t0);
  std::vector<double> fv(d + 1);
  for (int i = 0; i < d; ++i) pts[i + 1][i] += step;
  for (int i = 0; i <= d; ++i) fv[i] = feval(pts[i]);

  NelderMeadResult res;
  while (evals < max_evals) {
    // Order ascending by f.
    std::vector<int> order(d + 1);
    for (int i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> spts(d + 1);
    std::vector<double> sfv(d + 1);
    for (int i = 0; i <= d; ++i) {
      spts[i] = pts[order[i]];
      sfv[i] = fv[order[i]];
    }
    pts.swap(spts);
    fv.swap(sfv);

    double size = 0.0;
    for (int i = 1; i <= d; ++i)
      for (int k = 0; k < d; ++k) size = std::max(size, std::abs(pts[i][k] - pts[0][k]));
    if (fv[d] - fv[0] <= f_tol || size <= x_tol) break;

    std::vector<double> centroid(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) centroid[k] += pts[i][k] / d;

    auto blend = [&](double coef) {
      std::vector<double> t(d);
      for (int k = 0; k < d; ++k) t[k] = centroid[k] + coef * (pts[d][k] - centroid[k]);
      return t;
    };

    std::vector<double> xr = blend(-1.0);
    const double fr = feval(xr);
    if (fr < fv[0]) {
      std::vector<double> xe = blend(-2.0);
      const double fe = feval(xe);
      if (fe < fr) {
        pts[d] = xe;
        fv[d] = fe;
      } else {
        pts[d] = xr;
        fv[d] = fr;
      }
    } else if (fr < fv[d - 1]) {
      pts[d] = xr;
      fv[d] = fr;
    } else {
      const bool outside = fr < fv[d];
      std::vector<double> xc = blend(outside ? -0.5 : 0.5);
      const double fc = feval(xc);
      if (fc < std::min(fr, fv[d])) {
        pts[d] = xc;
        fv[d] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          for (int k = 0; k < d; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
          fv[i] = feval(pts[i]);
        }
      }
    }
  }
  res.budget_exhausted = evals >= max_evals;
  int best = 0;
  for (int i = 1; i <= d; ++i)
    if (fv[i] < fv[best]) best = i;
  res.t = pts[best];
  res.f = fv[best];
  return res;
}

}  // namespace

InversionResult minimize(const InverseProblem& problem) {
  problem.validate();
  const BoxMap box(problem.bounds);
  const int d = static_cast<int>(box.free_dims.size());
  InversionResult result;
  result.misfit = std::numeric_limits<double>::infinity();

  if (d == 0) {
    // Zero-volume box: evaluate the single admissible point.
    result.phi_hat = box.decode({});
    result.misfit = misfit(problem, result.phi_hat).value;
    result.trace.push_back({result.phi_hat, result.misfit, 0});
    result.start_best.push_back(result.phi_hat);
    result.start_misfit.push_back(result.misfit);
    return result;
  }

  // Latin hypercube starts in the unit box, mapped through the logistic.
  const int n_starts = std::max(1, problem.options.n_starts);
  std::mt19937_64 rng(problem.options.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<std::vector<double>> unit(n_starts, std::vector<double>(d));
  for (int k = 0; k < d; ++k) {
    std::vector<int> perm(n_starts);
    for (int s = 0; s < n_starts; ++s) perm[s] = s;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int s = 0; s < n_starts; ++s)
      unit[s][k] = (perm[s] + uniform(rng)) / n_starts;
  }

  for (int s = 0; s < n_starts; ++s) {
    std::vector<double> t0(d);
    for (int k = 0; k < d; ++k) {
      const double u = std::clamp(unit[s][k], 1e-6, 1.0 - 1e-6);
      t0[k] = std::log(u / (1.0 - u));
    }
    auto objective = [&](const std::vector<double>& t) {
      const GeoParams phi = box.decode(t);
      double value;
      try {
        value = misfit(problem, phi).value;
      } catch (const ForwardModelFailure&) {
        value = std::numeric_limits<double>::infinity();
      }
      result.trace.push_back({phi, value, s});
      return value;
    };
    NelderMeadResult nm =
        nelder_mead(objective, t0, 1.0, problem.options.max_evals_per_start,
                    problem.options.f_tol, problem.options.x_tol);
    result.budget_exhausted = result.budget_exhausted || nm.budget_exhausted;
    const GeoParams phi_s = box.decode(nm.t);
    result.start_best.push_back(phi_s);
    result.start_misfit.push_back(nm.f);
    if (nm.f < result.misfit) {
      result.misfit = nm.f;
      result.phi_hat = phi_s;
    }
  }
  if (result.budget_exhausted)
    result.warnings.push_back("BudgetExhausted: at least one restart hit the eval budget");
  return result;
}

SensitivityTable sensitivity(const InverseProblem& problem, const GeoParams& phi0,
                             const std::string& param, const std::vector<double>& values) {
  const auto& names = geo_param_names();
  const auto it = std::find(names.begin(), names.end(), param);
  if (it == names.end())
    throw std::invalid_argument("sensitivity: unknown parameter " + param);
  const int index = static_cast<int>(it - names.begin());

  SensitivityTable table;
  table.param = param;
  table.values = values;
  table.radii.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto a = phi0.to_array();
    a[index] = values[i];
    ForwardRadiiResult fwd =
        forward_radii(problem.environment(GeoParams::from_array(a)), problem.src,
                      problem.geom, problem.freqs_hz, problem.forward);
    table.radii[i] = fwd.radii;
  }
  return table;
}

std::array<double, 6> identifiability(const InverseProblem& problem, const GeoParams& phi0,
                                      double log_step) {
  std::array<double, 6> out{};
  for (int i = 0; i < 6; ++i) {
    auto lo = phi0.to_array();
    auto hi = phi0.to_array();
    lo[i] *= std::exp(-log_step);
    hi[i] *= std::exp(log_step);
    ForwardRadiiResult f_lo = forward_radii(problem.environment(GeoParams::from_array(lo)),
                                            problem.src, problem.geom, problem.freqs_hz,
                                            problem.forward);
    ForwardRadiiResult f_hi = forward_radii(problem.environment(GeoParams::from_array(hi)),
                                            problem.src, problem.geom, problem.freqs_hz,
                                            problem.forward);
    double acc = 0.0;
    for (std::size_t k = 0; k < problem.freqs_hz.size(); ++k) {
      if (!f_lo.radii[k].ok || !f_hi.radii[k].ok) continue;
      const double dr =
          (f_hi.radii[k].radius.radius - f_lo.radii[k].radius.radius) / (2.0 * log_step);
      acc += dr * dr;
    }
    out[i] = std::sqrt(acc);
  }
  return out;
}

}  // namespace swmode
